//! Necessary conditions for the plastic control problem.
//!
//! With the particular costates `q = (x, y)`, `r = (−y, x)`, `p = (y, −x)` the
//! stationarity residual vanishes to rounding, the costate system vanishes to
//! O(h²) and the boundary conditions hold exactly on the unit circle.
//!
//! ```text
//! cargo run --example maximum_principle
//! ```

use bitime::grid::boundary_samples;
use bitime::maximum_principle::{stationarity_residual, transversality_residual, ConditionReport};
use bitime::plastic::{
    boundary_sampler, control_problem, costates_star, plastic_cost, reduced_costate_residual,
    PlasticCostateFields, PlasticState, SolutionFamily, DEFAULT_EPS0,
};

/// Returns the stationarity, costate-system and transversality reports.
pub fn run_example() -> bitime::Result<[ConditionReport; 3]> {
    let h = 1.0 / 64.0;
    let family = SolutionFamily::quadratic(1.0);
    let grid = family.grid(h, 2.0 * h, DEFAULT_EPS0)?;
    let state = PlasticState::from_family(&grid, family)?;
    let controls = state.controls()?;
    let costates = PlasticCostateFields::particular(&state.phi, 0.0);

    let c = costates_star([0.6, 0.3], DEFAULT_EPS0)?;
    println!(
        "costates at (0.6, 0.3): p = {:?}, r = {:?}, q = {:?}",
        c.p, c.r, c.q
    );

    let stat = stationarity_residual(
        &control_problem(),
        &state.states(),
        &controls.to_vec(),
        &costates.bundle(),
        &plastic_cost(),
    )?;
    let stat = ConditionReport::from_fields("(26)", &stat);

    let costate_res = reduced_costate_residual(&costates.p, &costates.q, &state.phi);
    let costate_res = ConditionReport::from_fields("(28)", &costate_res);

    let lists = transversality_residual(
        &control_problem(),
        &plastic_cost(),
        boundary_sampler(family, 0.0),
        &boundary_samples(360),
    )?;
    let trans = ConditionReport::from_samples("(27)", &lists);

    for r in [&stat, &costate_res, &trans] {
        println!("{}", serde_json::to_string(r).expect("json"));
    }
    Ok([stat, costate_res, trans])
}

fn main() -> bitime::Result<()> {
    run_example().map(|_| ())
}
