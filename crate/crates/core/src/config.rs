//! Run configuration for the command-line front end.
//!
//! A single JSON document; every key is optional. Defaults:
//!
//! ```json
//! {
//!   "h": 0.015625,
//!   "margin": null,
//!   "eps0": 0.1,
//!   "samples": 360,
//!   "family": "quadratic",
//!   "alpha": 1.0, "beta": 1.0, "gamma": 1.0, "delta": 1.0,
//!   "c0": 0.0,
//!   "tolerance_c": 10.0,
//!   "exact_tolerance": 1e-12,
//!   "perturb": { "q1": 0.0 },
//!   "convergence_h": [0.03125, 0.015625, 0.0078125],
//!   "out_dir": "out"
//! }
//! ```
//!
//! A `null` margin means `2h`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plastic::{FamilyKind, SolutionFamily, DEFAULT_EPS0};
use crate::suite::SuiteSettings;

/// Largest accepted grid spacing.
pub const MAX_H: f64 = 0.25;

/// Fewest accepted boundary samples.
pub const MIN_SAMPLES: usize = 8;

/// Deliberate corruptions of the particular solution.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Perturbation {
    /// Added to the costate `q₁`.
    pub q1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub h: f64,
    pub margin: Option<f64>,
    pub eps0: f64,
    pub samples: usize,
    pub family: FamilyKind,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub c0: f64,
    pub tolerance_c: f64,
    pub exact_tolerance: f64,
    pub perturb: Perturbation,
    pub convergence_h: Vec<f64>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            h: 1.0 / 64.0,
            margin: None,
            eps0: DEFAULT_EPS0,
            samples: 360,
            family: FamilyKind::Quadratic,
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            delta: 1.0,
            c0: 0.0,
            tolerance_c: 10.0,
            exact_tolerance: 1e-12,
            perturb: Perturbation::default(),
            convergence_h: vec![1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0],
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_json(source: &str) -> Result<Self> {
        serde_json::from_str(source).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks the spacing, sample count, tolerances and family coefficients.
    pub fn validate(&self) -> Result<()> {
        check_spacing(self.h)?;
        if let Some(m) = self.margin {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "margin must be non-negative, got {m}"
                )));
            }
        }
        if !(self.eps0.is_finite() && self.eps0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "eps0 must be positive, got {}",
                self.eps0
            )));
        }
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "at least {MIN_SAMPLES} boundary samples are required, got {}",
                self.samples
            )));
        }
        for (name, v) in [
            ("tolerance_c", self.tolerance_c),
            ("exact_tolerance", self.exact_tolerance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.perturb.q1.is_finite() {
            return Err(Error::InvalidInput("perturb.q1 must be finite".into()));
        }
        self.family().validate()
    }

    /// The selected family with its own coefficient.
    pub fn family(&self) -> SolutionFamily {
        let coeff = match self.family {
            FamilyKind::Quadratic => self.alpha,
            FamilyKind::InvX => self.beta,
            FamilyKind::InvY => self.gamma,
            FamilyKind::Constant => self.delta,
        };
        SolutionFamily::new(self.family, coeff).with_c0(self.c0)
    }

    pub fn margin(&self) -> f64 {
        self.margin.unwrap_or(2.0 * self.h)
    }

    /// Suite settings at the configured spacing.
    pub fn suite_settings(&self) -> SuiteSettings {
        self.suite_settings_at(self.h)
    }

    /// Suite settings at spacing `h`; an unset margin follows `h`.
    pub fn suite_settings_at(&self, h: f64) -> SuiteSettings {
        SuiteSettings {
            h,
            margin: self.margin.unwrap_or(2.0 * h),
            eps0: self.eps0,
            samples: self.samples,
            family: self.family(),
            tolerance_c: self.tolerance_c,
            exact_tolerance: self.exact_tolerance,
            q1_shift: self.perturb.q1,
        }
    }
}

/// `h` must lie in `(0, MAX_H]`.
pub fn check_spacing(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidGrid(format!("h must be positive, got {h}")));
    }
    if h > MAX_H {
        return Err(Error::CoarseSpacing { h });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        c.validate().unwrap();
        assert_eq!(c.margin(), 2.0 / 64.0);
        assert_eq!(c.family(), SolutionFamily::quadratic(1.0));
    }

    #[test]
    fn family_picks_its_coefficient() {
        let c = RunConfig::from_json(r#"{"family": "inv_y", "gamma": -2, "c0": 0.5}"#).unwrap();
        assert_eq!(c.family(), SolutionFamily::inv_y(-2.0).with_c0(0.5));
    }

    #[test]
    fn invalid_values_rejected() {
        let bad = |s: &str| RunConfig::from_json(s).and_then(|c| c.validate()).unwrap_err();
        assert!(bad(r#"{"h": 0.5}"#).to_string().contains("grid too coarse"));
        assert!(bad(r#"{"h": 0}"#).to_string().contains("positive"));
        assert!(bad(r#"{"samples": 7}"#).to_string().contains("8"));
        assert!(bad(r#"{"tolerance_c": 0}"#).to_string().contains("tolerance_c"));
        assert!(bad(r#"{"alpha": -1}"#).to_string().contains("K <= 0"));
        assert!(matches!(bad("{\n \"hh\": 1}"), Error::Parse { line: 2, .. }));
    }
}
