//! Masked disc grid, finite-difference derivatives and boundary quadrature.
//!
//! ```text
//! cargo run --example disc_grid
//! ```

use bitime::grid::{boundary_integral, boundary_samples};
use bitime::{build_disc_grid, ExclusionZone, ScalarField};

/// Returns the max derivative error on nodes and the boundary integral of `x²`.
pub fn run_example() -> bitime::Result<(f64, f64)> {
    let h = 1.0 / 32.0;
    let grid = build_disc_grid(h, 2.0 * h, &[ExclusionZone::Origin(0.1)])?;
    println!(
        "h = {h}: {} nodes, {} support points",
        grid.node_count(),
        grid.support_len()
    );

    let f = ScalarField::from_point_fn(&grid, |[x, y]| (x * y).sin());
    let exact = ScalarField::from_point_fn(&grid, |[x, y]| y * (x * y).cos());
    let err = (&f.dx() - &exact).max_norm();
    println!("max |D_x sin(xy) - y cos(xy)| = {err:.3e}  (h² = {:.3e})", h * h);

    // ∮ x² ds = π on the unit circle
    let samples = boundary_samples(360);
    let integral = boundary_integral(&samples, |s| s.point[0] * s.point[0]);
    println!(
        "boundary integral of x² = {integral:.15} (π = {:.15})",
        std::f64::consts::PI
    );

    let mut head = Vec::new();
    f.write_csv(&mut head)?;
    for line in String::from_utf8_lossy(&head).lines().take(3) {
        println!("{line}");
    }
    Ok((err, integral))
}

fn main() -> bitime::Result<()> {
    run_example().map(|_| ())
}
