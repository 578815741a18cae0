//! User-defined quasi-linear systems read from JSON.
//!
//! ```json
//! {
//!   "states": [
//!     { "name": "rho", "field": "-2*(x^2 + y^2)" },
//!     { "name": "K", "field": "x^2 + y^2" },
//!     { "name": "phi", "angle": { "cos": "(y^2 - x^2)/(x^2 + y^2)", "sin": "2*x*y/(x^2 + y^2)" } }
//!   ],
//!   "controls": [],
//!   "matrices": [
//!     [["1", "0"], ["0", "1"]],
//!     [["-cos(phi)", "sin(phi)"], ["sin(phi)", "cos(phi)"]],
//!     [["K*sin(phi)", "K*cos(phi)"], ["K*cos(phi)", "-K*sin(phi)"]]
//!   ],
//!   "rhs": ["0", "0"],
//!   "zones": [{ "origin": 0.1 }]
//! }
//! ```
//!
//! Field expressions use `x` and `y`. Matrix and right-hand-side expressions may
//! also use every state and control name; an angle state evaluates to its
//! principal value. `matrices[i][β][α]` is `A_i^{βα}`.

use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, ExprError};
use crate::field::{AngleField, ScalarField, StateField};
use crate::grid::{build_disc_grid, DiscGrid, ExclusionZone};
use crate::pde::QuasiLinearSystem;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSpec {
    pub cos: String,
    pub sin: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
    #[serde(default)]
    pub field: Option<String>,
    #[serde(default)]
    pub angle: Option<AngleSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    pub name: String,
    pub field: String,
}

/// Raw system document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub states: Vec<StateSpec>,
    #[serde(default)]
    pub controls: Vec<ControlSpec>,
    pub matrices: Vec<[[String; 2]; 2]>,
    pub rhs: [String; 2],
    #[serde(default)]
    pub zones: Vec<ExclusionZone>,
}

/// A parsed system with its state and control expressions.
#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub spec: SystemSpec,
    source: String,
    system: QuasiLinearSystem,
}

/// State and control fields sampled on a grid.
#[derive(Debug, Clone)]
pub struct SampledSystem {
    pub grid: Arc<DiscGrid>,
    pub states: Vec<StateField>,
    pub controls: Vec<ScalarField>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Line and column (1-based) of character `col` of `expr` in `source`.
///
/// Looks for the expression as a JSON string literal; falls back to its first
/// bare occurrence, then to line 1.
fn locate(source: &str, expr: &str, col: usize) -> (usize, usize) {
    let quoted = serde_json::to_string(expr).unwrap_or_default();
    let offset = source.find(&quoted).map(|i| i + 1).or_else(|| source.find(expr));
    let Some(start) = offset else {
        return (1, col);
    };
    let prefix: String = source[..start]
        .chars()
        .chain(expr.chars().take(col.saturating_sub(1)))
        .collect();
    let line = prefix.matches('\n').count() + 1;
    let column = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl SystemConfig {
    pub fn from_json(source: &str) -> Result<Self> {
        let spec: SystemSpec = serde_json::from_str(source).map_err(json_error)?;
        let mut cfg = Self {
            system: QuasiLinearSystem::new(1, 0, |_, _| [[0.0; 2]; 2], |_| [0.0; 2]),
            source: source.to_owned(),
            spec,
        };
        cfg.system = cfg.build_system()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn system(&self) -> &QuasiLinearSystem {
        &self.system
    }

    fn parse_at(&self, expr: &str, vars: &[&str]) -> Result<Expr> {
        parse(expr, vars).map_err(|ExprError { column, message }| {
            let (line, column) = locate(&self.source, expr, column);
            Error::Parse {
                line,
                column,
                message: format!("in '{expr}': {message}"),
            }
        })
    }

    fn invalid(&self, message: String) -> Error {
        Error::Parse {
            line: 1,
            column: 1,
            message,
        }
    }

    /// Names visible to coefficient expressions: `x, y, states…, controls…`.
    fn symbols(&self) -> Vec<&str> {
        let mut v = vec!["x", "y"];
        v.extend(self.spec.states.iter().map(|s| s.name.as_str()));
        v.extend(self.spec.controls.iter().map(|c| c.name.as_str()));
        v
    }

    fn build_system(&self) -> Result<QuasiLinearSystem> {
        let s = &self.spec;
        if s.states.is_empty() {
            return Err(self.invalid("at least one state is required".into()));
        }
        if s.matrices.len() != s.states.len() {
            return Err(self.invalid(format!(
                "{} matrices for {} states",
                s.matrices.len(),
                s.states.len()
            )));
        }
        let symbols = self.symbols();
        for (i, name) in symbols.iter().enumerate() {
            let identifier = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_alphanumeric() || c == '_');
            let reserved = parse(name, &[]).is_ok() || parse(&format!("{name}(0)"), &[]).is_ok();
            if !identifier || reserved || symbols[..i].contains(name) {
                return Err(self.invalid(format!("name '{name}' is repeated or reserved")));
            }
        }
        let matrices = s
            .matrices
            .iter()
            .map(|m| {
                let mut out = Vec::with_capacity(4);
                for row in m {
                    for entry in row {
                        out.push(self.parse_at(entry, &symbols)?);
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<Vec<Expr>>>>()?;
        let rhs = [
            self.parse_at(&s.rhs[0], &symbols)?,
            self.parse_at(&s.rhs[1], &symbols)?,
        ];
        let n = s.states.len();
        let slots = symbols.len();
        let pack = move |e: &crate::pde::Eval| {
            let mut v = Vec::with_capacity(slots);
            v.extend_from_slice(&e.t);
            v.extend_from_slice(e.states);
            v.extend_from_slice(e.controls);
            v
        };
        Ok(QuasiLinearSystem::new(
            n,
            s.controls.len(),
            move |i, e| {
                let v = pack(e);
                let m = &matrices[i];
                [[m[0].eval(&v), m[1].eval(&v)], [m[2].eval(&v), m[3].eval(&v)]]
            },
            move |e| {
                let v = pack(e);
                [rhs[0].eval(&v), rhs[1].eval(&v)]
            },
        ))
    }

    /// Grid with the document's exclusion zones.
    pub fn grid(&self, h: f64, margin: f64) -> Result<Arc<DiscGrid>> {
        build_disc_grid(h, margin, &self.spec.zones)
    }

    fn sample(&self, grid: &Arc<DiscGrid>, expr: &str) -> Result<ScalarField> {
        let e = self.parse_at(expr, &["x", "y"])?;
        let values = (0..grid.support_len()).map(|k| e.eval(&grid.point(k))).collect();
        ScalarField::from_values(grid, values)
            .map_err(|err| Error::InvalidInput(format!("expression '{expr}': {err}")))
    }

    /// Samples every state and control expression on `grid`.
    pub fn sample_on(&self, grid: &Arc<DiscGrid>) -> Result<SampledSystem> {
        let states = self
            .spec
            .states
            .iter()
            .map(|s| match (&s.field, &s.angle) {
                (Some(f), None) => Ok(StateField::Scalar(self.sample(grid, f)?)),
                (None, Some(a)) => Ok(StateField::Angle(AngleField::new(
                    self.sample(grid, &a.cos)?,
                    self.sample(grid, &a.sin)?,
                )?)),
                _ => Err(self.invalid(format!(
                    "state '{}' needs exactly one of \"field\" or \"angle\"",
                    s.name
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        let controls = self
            .spec
            .controls
            .iter()
            .map(|c| self.sample(grid, &c.field))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledSystem {
            grid: grid.clone(),
            states,
            controls,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY: &str = r#"{
  "states": [{ "name": "a", "field": "3" }],
  "matrices": [[["1", "0"], ["0", "1"]]],
  "rhs": ["0", "0"]
}"#;

    #[test]
    fn parses_and_samples() {
        let cfg = SystemConfig::from_json(IDENTITY).unwrap();
        let g = cfg.grid(0.125, 0.25).unwrap();
        let s = cfg.sample_on(&g).unwrap();
        assert_eq!(s.states.len(), 1);
        assert_eq!(s.states[0].value(0), 3.0);
    }

    #[test]
    fn expression_error_points_into_file() {
        let bad = IDENTITY.replace(r#"["0", "1"]]]"#, r#"["0", "sin("]]]"#);
        match SystemConfig::from_json(&bad) {
            Err(Error::Parse { line, column, .. }) => {
                let text_line = bad.lines().nth(line - 1).unwrap();
                // column 5 of "sin(" is just past the open parenthesis
                let at: String = text_line.chars().skip(column - 5).take(4).collect();
                assert_eq!((line, at.as_str()), (3, "sin("));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_error_has_position() {
        match SystemConfig::from_json("{\n  \"states\": [,]\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        let two = IDENTITY.replace(r#""matrices": ["#, r#""matrices": [[["1","0"],["0","1"]], "#);
        assert!(SystemConfig::from_json(&two).is_err());
        let clash = IDENTITY.replace(r#""name": "a""#, r#""name": "x""#);
        assert!(SystemConfig::from_json(&clash).is_err());
    }
}
