//! End-to-end verification of a plastic solution family.
//!
//! Every check is a residual with a tolerance: machine-precision identities use
//! a fixed bound, discretization residuals use `C·h²`.

use std::sync::Arc;

use serde::Serialize;

use crate::convergence::Conditions;
use crate::error::Result;
use crate::field::ScalarField;
use crate::grid::DiscGrid;
use crate::integrability::{plastic_cic, reduced_system_residual};
use crate::maximum_principle::{stationarity_residual, ConditionReport};
use crate::pde::{cross_triple, det, forward_residual, Eval};
use crate::plastic::{
    boundary_condition_residual_shifted, control_problem, k_equation_residual, plastic_cost, plastic_system,
    reduced_costate_residual, PlasticCostateFields, PlasticState, SolutionFamily,
};

/// Grid, family and tolerance settings of one verification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteSettings {
    pub h: f64,
    pub margin: f64,
    pub eps0: f64,
    pub samples: usize,
    pub family: SolutionFamily,
    /// `C` of the `C·h²` tolerance.
    pub tolerance_c: f64,
    /// Bound for conditions that hold to rounding.
    pub exact_tolerance: f64,
    /// Added to the costate `q₁` everywhere.
    pub q1_shift: f64,
}

impl SuiteSettings {
    pub fn new(h: f64, family: SolutionFamily) -> Self {
        Self {
            h,
            margin: 2.0 * h,
            eps0: crate::plastic::DEFAULT_EPS0,
            samples: 360,
            family,
            tolerance_c: 10.0,
            exact_tolerance: 1e-12,
            q1_shift: 0.0,
        }
    }

    pub fn grid(&self) -> Result<Arc<DiscGrid>> {
        self.family.grid(self.h, self.margin, self.eps0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceKind {
    /// Fixed bound.
    Exact,
    /// `C·h²`.
    SecondOrder,
}

/// One verified condition.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    #[serde(flatten)]
    pub report: ConditionReport,
    pub name: &'static str,
    pub tolerance_kind: ToleranceKind,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub settings: SuiteSettings,
    pub node_count: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, condition: &str, name: &str) -> Option<&Check> {
        self.checks
            .iter()
            .find(|c| c.report.condition == condition && c.name == name)
    }

    /// Plain-text table, one line per check.
    pub fn to_text(&self) -> String {
        let s = &self.settings;
        let mut out = format!(
            "family {} (coefficient {}), h = {}, {} nodes, {} boundary samples\n",
            s.family.kind, s.family.coeff, s.h, self.node_count, s.samples
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<6} {:<26} max {:>10.3e}  l2 {:>10.3e}  tol {:>9.2e}  {}\n",
                c.report.condition,
                c.name,
                c.report.max_norm,
                c.report.l2_norm,
                c.tolerance,
                if c.passed { "pass" } else { "FAIL" }
            ));
        }
        out.push_str(if self.passed {
            "all checks passed\n"
        } else {
            "some checks failed\n"
        });
        out
    }
}

/// Labels, names and tolerance kinds of the grid-based checks, in report order.
const GRID_CHECKS: [(&str, &str, ToleranceKind); 10] = [
    ("(7)", "yield", ToleranceKind::Exact),
    ("(7)", "equilibrium", ToleranceKind::SecondOrder),
    ("(8)", "forward", ToleranceKind::SecondOrder),
    ("(6)", "cross-triple determinants", ToleranceKind::Exact),
    ("(10)", "integrability", ToleranceKind::SecondOrder),
    ("(R)", "reduced system", ToleranceKind::SecondOrder),
    ("(K)", "K equation", ToleranceKind::SecondOrder),
    ("(26)", "stationarity", ToleranceKind::Exact),
    ("(28)", "costate system", ToleranceKind::SecondOrder),
    ("(27)", "boundary conditions", ToleranceKind::Exact),
];

/// Residual fields of every grid-based check for one family on one grid.
///
/// Names are `"<label> <name>"`; this is what convergence studies tabulate.
pub fn plastic_conditions(grid: &Arc<DiscGrid>, family: SolutionFamily, q1_shift: f64) -> Result<Conditions> {
    let state = PlasticState::from_family(grid, family)?;
    let sigma = state.stress();
    let split = state.split()?;
    let controls = crate::plastic::PlasticControls::from_split(&split);
    let states = state.states();

    let [e1, e2] = sigma.equilibrium_residual();
    let [f1, f2] = forward_residual(&plastic_system(), &states, &[])?;

    // R_i − det A_i, relative to |det A_i| (which is 1, 1, K²)
    let dets: Vec<ScalarField> = (0..3)
        .map(|i| {
            let t = cross_triple(&split, i)?;
            Ok(ScalarField::from_index_fn(grid, |n| {
                let vals = [state.rho[n], state.k[n], state.phi.angle(n)];
                let e = Eval {
                    t: grid.point(n),
                    states: &vals,
                    controls: &[],
                };
                let d = det(&plastic_system().matrix(i, &e));
                (t.r[n] - d) / d.abs()
            }))
        })
        .collect::<Result<_>>()?;

    let cic = plastic_cic(&state.k, &state.phi, &controls)?;
    let reduced = reduced_system_residual(&state.rho, &state.k, &state.phi);
    let kq = k_equation_residual(&state.k);

    let costates = PlasticCostateFields::particular(&state.phi, q1_shift);
    let stat = stationarity_residual(
        &control_problem(),
        &states,
        &controls.to_vec(),
        &costates.bundle(),
        &plastic_cost(),
    )?;
    let costate_res = reduced_costate_residual(&costates.p, &costates.q, &state.phi);

    let fields: [Vec<ScalarField>; 9] = [
        vec![sigma.yield_residual(&state.k)],
        vec![e1, e2],
        vec![f1, f2],
        dets,
        cic.to_vec(),
        reduced.to_vec(),
        vec![kq],
        stat,
        costate_res.to_vec(),
    ];
    Ok(GRID_CHECKS
        .iter()
        .zip(fields)
        .map(|((label, name, _), f)| (format!("{label} {name}"), f))
        .collect())
}

/// Runs every check for the configured family.
pub fn run_plastic_suite(settings: &SuiteSettings) -> Result<SuiteReport> {
    let grid = settings.grid()?;
    let conditions = plastic_conditions(&grid, settings.family, settings.q1_shift)?;
    let h2 = settings.h * settings.h;
    let tolerance = |kind| match kind {
        ToleranceKind::Exact => settings.exact_tolerance,
        ToleranceKind::SecondOrder => settings.tolerance_c * h2,
    };
    let mut checks: Vec<Check> = GRID_CHECKS
        .iter()
        .zip(&conditions)
        .map(|(&(label, name, kind), (_, fields))| {
            let report = ConditionReport::from_fields(label, fields);
            let tol = tolerance(kind);
            Check {
                passed: report.max_norm <= tol,
                report,
                name,
                tolerance_kind: kind,
                tolerance: tol,
            }
        })
        .collect();

    let boundary = boundary_condition_residual_shifted(settings.samples, settings.q1_shift)?;
    let (label, name, kind) = GRID_CHECKS[9];
    let report = ConditionReport::from_samples(label, &boundary);
    let tol = tolerance(kind);
    checks.push(Check {
        passed: report.max_norm <= tol,
        report,
        name,
        tolerance_kind: kind,
        tolerance: tol,
    });

    Ok(SuiteReport {
        settings: *settings,
        node_count: grid.node_count(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
