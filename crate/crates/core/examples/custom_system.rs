//! A system read from JSON, checked against the built-in plastic suite.
//!
//! `data/plastic_quadratic.json` spells out the plastic system and the
//! quadratic family as expressions; its forward residual must match the
//! built-in one.
//!
//! ```text
//! cargo run --example custom_system
//! ```

use bitime::cli::residuals_report;
use bitime::config::RunConfig;
use bitime::plastic::SolutionFamily;
use bitime::suite::{run_plastic_suite, SuiteSettings};
use bitime::system_config::SystemConfig;

const SYSTEM: &str = include_str!("data/plastic_quadratic.json");

/// Returns the gap between the config-defined and built-in forward norms.
pub fn run_example() -> bitime::Result<f64> {
    let config = RunConfig::default();
    let system = SystemConfig::from_json(SYSTEM)?;
    let report = residuals_report(&config, &system)?;
    for (k, f) in report.forward.iter().enumerate() {
        println!("forward line {}: max {:.6e}", k + 1, f.max_norm);
    }
    for r in &report.cic {
        println!("integrability {}: max {:.6e}", r.state_index, r.max_norm);
    }

    let builtin = run_plastic_suite(&SuiteSettings::new(config.h, SolutionFamily::quadratic(1.0)))?;
    let fwd = builtin
        .check("(8)", "forward")
        .expect("forward check")
        .report
        .max_norm;
    let from_config = report.forward.iter().map(|f| f.max_norm).fold(0.0, f64::max);
    let gap = (fwd - from_config).abs();
    println!("built-in forward max {fwd:.6e}, gap {gap:.1e}");

    match SystemConfig::from_json(&SYSTEM.replace("\"-cos(phi)\"", "\"-cos(\"")) {
        Err(e) => println!("malformed expression: {e}"),
        Ok(_) => unreachable!("an unclosed call cannot parse"),
    }
    Ok(gap)
}

fn main() -> bitime::Result<()> {
    run_example().map(|_| ())
}
