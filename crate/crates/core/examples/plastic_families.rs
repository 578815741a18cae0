//! The four closed-form plastic solution families.
//!
//! For each family: the excluded zones, `K` and `ρ` at a sample point, and the
//! yield identity `(σyy − σxx)² + 4σxy² − 4K²` on the grid.
//!
//! ```text
//! cargo run --example plastic_families
//! ```

use bitime::plastic::{phi_star, FamilyKind, PlasticState, SolutionFamily, DEFAULT_EPS0};

/// Returns the worst yield residual over all families.
pub fn run_example() -> bitime::Result<f64> {
    let h = 1.0 / 64.0;
    let point = [0.4, 0.3];
    let phi = phi_star(point, DEFAULT_EPS0)?;
    println!("φ*(0.4, 0.3): cos = {:.6}, sin = {:.6}", phi.c, phi.s);

    let mut worst = 0.0_f64;
    for kind in FamilyKind::ALL {
        let family = SolutionFamily::new(kind, 1.0);
        let grid = family.grid(h, 2.0 * h, DEFAULT_EPS0)?;
        let state = PlasticState::from_family(&grid, family)?;
        let yield_res = state.stress().yield_residual(&state.k).max_norm();
        worst = worst.max(yield_res);
        println!(
            "{kind:<9} zones {:?}  K = {:.6}  rho = {:+.6}  nodes {:>5}  yield {:.2e}",
            family.exclusion_zones(DEFAULT_EPS0),
            family.k(point, DEFAULT_EPS0)?,
            family.rho(point, DEFAULT_EPS0)?,
            grid.node_count(),
            yield_res
        );
    }
    Ok(worst)
}

fn main() -> bitime::Result<()> {
    run_example().map(|_| ())
}
