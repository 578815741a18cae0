//! The full verification suite, as run by `bitime verify`.
//!
//! ```text
//! cargo run --release --example verify_suite
//! ```

use bitime::plastic::SolutionFamily;
use bitime::suite::{run_plastic_suite, SuiteReport, SuiteSettings};

pub fn run_example() -> bitime::Result<SuiteReport> {
    let mut settings = SuiteSettings::new(1.0 / 32.0, SolutionFamily::quadratic(1.0));
    let report = run_plastic_suite(&settings)?;
    print!("{}", report.to_text());

    // a corrupted costate shows up in the boundary conditions
    settings.q1_shift = 0.1;
    let broken = run_plastic_suite(&settings)?;
    for c in broken.failed() {
        println!(
            "with q1 + 0.1: {} {} fails, max {:.3e}",
            c.report.condition, c.name, c.report.max_norm
        );
    }
    Ok(report)
}

fn main() -> bitime::Result<()> {
    run_example().map(|_| ())
}
