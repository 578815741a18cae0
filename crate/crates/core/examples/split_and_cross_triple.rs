//! Splitting a two-state linear system with canonical controls.
//!
//! The system is `grad a + M grad b = B` with a fixed matrix `M`; the split adds
//! one control pair `v₁ = grad a`, and the cross triple of each line is
//! printed at one node.
//!
//! ```text
//! cargo run --example split_and_cross_triple
//! ```

use bitime::pde::{cross_triple, forward_residual, split_controls};
use bitime::{build_disc_grid, QuasiLinearSystem, ScalarField, StateField};

const M: [[f64; 2]; 2] = [[2.0, 1.0], [0.5, -1.0]];

/// Returns the max forward residual and the two `R` values at the centre node.
pub fn run_example() -> bitime::Result<(f64, [f64; 2])> {
    let grid = build_disc_grid(1.0 / 16.0, 0.125, &[])?;
    let sys = QuasiLinearSystem::new(
        2,
        0,
        |i, _| if i == 0 { [[1.0, 0.0], [0.0, 1.0]] } else { M },
        // B matches a = x² + y, b = x − y below
        |e| {
            let [x, _] = e.t;
            [2.0 * x + M[0][0] - M[0][1], 1.0 + M[1][0] - M[1][1]]
        },
    );
    let a: StateField = ScalarField::from_point_fn(&grid, |[x, y]| x * x + y).into();
    let b: StateField = ScalarField::from_point_fn(&grid, |[x, y]| x - y).into();
    let states = [a, b];

    let [r1, r2] = forward_residual(&sys, &states, &[])?;
    let fwd = r1.max_norm().max(r2.max_norm());
    println!("forward residual (quadratic data, exact stencils): {fwd:.3e}");

    let split = split_controls(&sys, &states, &[])?;
    let [v1, v2] = split.canonical(0);
    let k = grid.node_index_at(0.0, 0.0).expect("centre is a node");
    println!("canonical control v₁ at origin = ({:.6}, {:.6})", v1[k], v2[k]);

    let mut r = [0.0; 2];
    for (i, slot) in r.iter_mut().enumerate() {
        let t = cross_triple(&split, i)?;
        *slot = t.r[k];
        println!(
            "line {}: P = {:+.6}, Q = {:+.6}, R = {:+.6}",
            i + 1,
            t.p[k],
            t.q[k],
            t.r[k]
        );
    }
    Ok((fwd, r))
}

fn main() -> bitime::Result<()> {
    run_example().map(|_| ())
}
