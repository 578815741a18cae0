//! h-halving studies of residual norms.
//!
//! Ratios are taken on the nodes of the coarsest grid. Those points are nodes of
//! every finer grid too (the mask radius `1 − 2h` grows as h shrinks), so the
//! ratio compares the same points; the full node sets differ in their outermost
//! ring and near zone edges that are not lattice-aligned.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Accepted window for consecutive ratios of a second-order residual.
pub const RATIO_WINDOW: (f64, f64) = (3.5, 4.5);

/// Residuals at or below this level count as exactly satisfied.
pub const EXACT_TOL: f64 = 1e-12;

/// Norms of one condition on one grid.
#[derive(Debug, Clone, Serialize)]
pub struct Level {
    pub h: f64,
    pub max_norm: f64,
    pub l2_norm: f64,
    /// Max norm over the coarsest grid's node points.
    pub common_max_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    /// Every level at or below [`EXACT_TOL`].
    Exact,
    /// All consecutive ratios inside [`RATIO_WINDOW`].
    SecondOrder,
    OutsideWindow,
}

impl ConvergenceStatus {
    pub fn label(self) -> &'static str {
        match self {
            ConvergenceStatus::Exact => "exact (≤1e−12)",
            ConvergenceStatus::SecondOrder => "ok",
            ConvergenceStatus::OutsideWindow => "ratio outside [3.5, 4.5]",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub condition: String,
    pub levels: Vec<Level>,
    /// `common_max_norm[k] / common_max_norm[k + 1]`.
    pub ratios: Vec<f64>,
    pub status: ConvergenceStatus,
}

impl ConvergenceRow {
    /// Largest `max_norm / h²` over the levels.
    pub fn constant(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| l.max_norm / (l.h * l.h))
            .fold(0.0, f64::max)
    }
}

/// Checks that `hs` has at least two entries, each half the previous.
pub fn check_halving(hs: &[f64]) -> Result<()> {
    if hs.len() < 2 {
        return Err(Error::InvalidInput(
            "a convergence study needs at least two spacings".into(),
        ));
    }
    for w in hs.windows(2) {
        if (w[0] / w[1] - 2.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "spacings must halve: {} is not half of {}",
                w[1], w[0]
            )));
        }
    }
    Ok(())
}

/// Residual fields of named conditions on one grid; several fields under one
/// name are pooled (max of max norms, root-sum-square of L2 norms).
pub type Conditions = Vec<(String, Vec<ScalarField>)>;

/// Runs `build` for each spacing and tabulates norms and ratios per condition.
///
/// `build` must return the same condition names in the same order each time.
pub fn convergence_table(
    hs: &[f64],
    build: impl Fn(f64) -> Result<Conditions>,
) -> Result<Vec<ConvergenceRow>> {
    check_halving(hs)?;
    let runs = hs.iter().map(|&h| build(h)).collect::<Result<Vec<_>>>()?;
    let names: Vec<&String> = runs[0].iter().map(|(n, _)| n).collect();
    for run in &runs[1..] {
        if run.len() != names.len() || run.iter().zip(&names).any(|((n, _), m)| n != *m) {
            return Err(Error::InvalidInput(
                "condition lists differ between levels".into(),
            ));
        }
    }
    let rows = names
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let coarse = &runs[0][c].1;
            let points: Vec<[f64; 2]> = coarse
                .first()
                .map(|f| f.grid().nodes().iter().map(|&k| f.grid().point(k)).collect())
                .unwrap_or_default();
            let levels: Vec<Level> = runs
                .iter()
                .zip(hs)
                .map(|(run, &h)| {
                    let fields = &run[c].1;
                    Level {
                        h,
                        max_norm: fields.iter().map(ScalarField::max_norm).fold(0.0, f64::max),
                        l2_norm: fields.iter().map(|f| f.l2_norm().powi(2)).sum::<f64>().sqrt(),
                        common_max_norm: fields.iter().map(|f| f.max_norm_at(&points)).fold(0.0, f64::max),
                    }
                })
                .collect();
            let ratios: Vec<f64> = levels
                .windows(2)
                .map(|w| w[0].common_max_norm / w[1].common_max_norm)
                .collect();
            let status = if levels.iter().all(|l| l.max_norm <= EXACT_TOL) {
                ConvergenceStatus::Exact
            } else if ratios
                .iter()
                .all(|r| (RATIO_WINDOW.0..=RATIO_WINDOW.1).contains(r))
            {
                ConvergenceStatus::SecondOrder
            } else {
                ConvergenceStatus::OutsideWindow
            };
            ConvergenceRow {
                condition: (*name).clone(),
                levels,
                ratios,
                status,
            }
        })
        .collect();
    Ok(rows)
}
