//! Reconstructing ρ by integrating its gradient along two different paths.
//!
//! The gradient comes from `K` and `φ` alone; if it is curl-free, both
//! polylines give the same increment, which also matches the closed form.
//!
//! ```text
//! cargo run --example potential_reconstruction
//! ```

use bitime::grid::{line_integral, GridVectorField};
use bitime::plastic::{rho_gradient_field, PlasticState, SolutionFamily, DEFAULT_EPS0};

const A: [f64; 2] = [0.5, 0.2];
const B: [f64; 2] = [-0.3, 0.6];

/// Returns `(path difference, error against the closed-form increment)`.
pub fn run_example() -> bitime::Result<(f64, f64)> {
    let h = 1.0 / 64.0;
    let family = SolutionFamily::quadratic(1.0);
    let grid = family.grid(h, 2.0 * h, DEFAULT_EPS0)?;
    let state = PlasticState::from_family(&grid, family)?;
    let [gx, gy] = rho_gradient_field(&state.k, &state.phi);
    let v = GridVectorField {
        components: [&gx, &gy],
    };

    let upper = line_integral(&grid, &v, &[A, [0.5, 0.6], B])?;
    let lower = line_integral(&grid, &v, &[A, [-0.3, 0.2], B])?;
    let exact = family.rho(B, DEFAULT_EPS0)? - family.rho(A, DEFAULT_EPS0)?;
    println!("upper path {upper:.9}, lower path {lower:.9}, closed form {exact:.9}");
    let diff = (upper - lower).abs();
    let err = (upper - exact).abs().max((lower - exact).abs());
    println!("path difference {diff:.2e}, error {err:.2e}");
    Ok((diff, err))
}

fn main() -> bitime::Result<()> {
    run_example().map(|_| ())
}
