//! Complete-integrability residuals of the plastic system.
//!
//! Computes the general per-state residual on the split form and the
//! plastic-specific closed form, and compares them node by node.
//!
//! ```text
//! cargo run --example integrability
//! ```

use bitime::integrability::{cic_multi, plastic_cic};
use bitime::plastic::{PlasticState, SolutionFamily, DEFAULT_EPS0};

/// Returns the largest node-wise gap between the two formulations.
pub fn run_example() -> bitime::Result<f64> {
    let h = 1.0 / 64.0;
    let family = SolutionFamily::quadratic(1.0);
    let grid = family.grid(h, 2.0 * h, DEFAULT_EPS0)?;
    let state = PlasticState::from_family(&grid, family)?;
    let split = state.split()?;

    let report = cic_multi(&split)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report.to_json()).expect("json")
    );

    let plastic = plastic_cic(&state.k, &state.phi, &state.controls()?)?;
    // the plastic lines carry the opposite sign on states 1 and 3
    let gap = report
        .states
        .iter()
        .zip(&plastic)
        .zip([-1.0, 1.0, -1.0])
        .map(|((general, line), sign)| (&general.residual.scale(sign) - line).max_norm())
        .fold(0.0, f64::max);
    println!("max |cic_multi - plastic_cic| = {gap:.3e}");
    Ok(gap)
}

fn main() -> bitime::Result<()> {
    run_example().map(|_| ())
}
