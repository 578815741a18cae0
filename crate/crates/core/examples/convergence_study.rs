//! h-halving study of every grid-based condition.
//!
//! ```text
//! cargo run --release --example convergence_study -- constant
//! ```

use bitime::convergence::{convergence_table, ConvergenceRow};
use bitime::plastic::{FamilyKind, SolutionFamily, DEFAULT_EPS0};
use bitime::suite::plastic_conditions;

pub fn run_example(kind: FamilyKind) -> bitime::Result<Vec<ConvergenceRow>> {
    let family = SolutionFamily::new(kind, 1.0);
    let rows = convergence_table(&[1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0], |h| {
        plastic_conditions(&family.grid(h, 2.0 * h, DEFAULT_EPS0)?, family, 0.0)
    })?;
    println!("family {kind}");
    for r in &rows {
        let ratios: Vec<String> = r
            .ratios
            .iter()
            .map(|q| {
                if q.is_finite() {
                    format!("{q:5.2}")
                } else {
                    "    -".into()
                }
            })
            .collect();
        println!(
            "{:<32} C = {:9.3e}  ratios [{}]  {}",
            r.condition,
            r.constant(),
            ratios.join(", "),
            r.status.label()
        );
    }
    Ok(rows)
}

fn main() -> bitime::Result<()> {
    let kind = match std::env::args().nth(1) {
        Some(name) => name.parse()?,
        None => FamilyKind::Quadratic,
    };
    run_example(kind).map(|_| ())
}
