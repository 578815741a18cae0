//! Discrete fields over a [`DiscGrid`].

use std::io::Write;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{partial, Axis, DiscGrid};

/// One value per support point of a grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<DiscGrid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(grid: &Arc<DiscGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.support_len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values, grid has {} support points",
                values.len(),
                grid.support_len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let [x, y] = grid.point(k);
            return Err(Error::InvalidInput(format!(
                "non-finite field value at ({x}, {y})"
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_index_fn(grid: &Arc<DiscGrid>, f: impl Fn(usize) -> f64 + Sync + Send) -> Self {
        let values = (0..grid.support_len()).into_par_iter().map(f).collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_point_fn(grid: &Arc<DiscGrid>, f: impl Fn([f64; 2]) -> f64 + Sync + Send) -> Self {
        Self::from_index_fn(grid, |k| f(grid.point(k)))
    }

    /// Samples a fallible closed form at every support point.
    pub fn try_from_point_fn(
        grid: &Arc<DiscGrid>,
        f: impl Fn([f64; 2]) -> Result<f64> + Sync + Send,
    ) -> Result<Self> {
        let values = (0..grid.support_len())
            .into_par_iter()
            .map(|k| f(grid.point(k)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(grid, values)
    }

    pub fn constant(grid: &Arc<DiscGrid>, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.support_len()],
        }
    }

    pub fn zeros(grid: &Arc<DiscGrid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync + Send) -> Self {
        Self::from_index_fn(&self.grid, |k| f(self.values[k]))
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64 + Sync + Send) -> Self {
        self.assert_same_grid(other);
        Self::from_index_fn(&self.grid, |k| f(self.values[k], other.values[k]))
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn dx(&self) -> Self {
        partial(self, Axis::X)
    }

    pub fn dy(&self) -> Self {
        partial(self, Axis::Y)
    }

    pub fn d(&self, axis: Axis) -> Self {
        partial(self, axis)
    }

    /// Largest `|value|` over the nodes.
    pub fn max_norm(&self) -> f64 {
        self.grid
            .nodes()
            .iter()
            .map(|&k| self.values[k].abs())
            .fold(0.0, f64::max)
    }

    /// Discrete area-weighted L2 norm `sqrt(Σ v² h²)` over the nodes.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.h();
        let sum: f64 = self.grid.nodes().iter().map(|&k| self.values[k].powi(2)).sum();
        (sum * h * h).sqrt()
    }

    /// Largest `|value|` over the nodes located at the given coordinates.
    ///
    /// Points that are not nodes of this grid are skipped.
    pub fn max_norm_at(&self, points: &[[f64; 2]]) -> f64 {
        points
            .iter()
            .filter_map(|p| self.grid.node_index_at(p[0], p[1]))
            .map(|k| self.values[k].abs())
            .fold(0.0, f64::max)
    }

    /// Writes `x,y,value` rows for every node with 17 significant digits.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        write_node_csv(out, &["value"], &[self])
    }

    pub(crate) fn assert_same_grid(&self, other: &ScalarField) {
        assert!(
            Arc::ptr_eq(&self.grid, &other.grid),
            "fields live on different grids"
        );
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.values[k]
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ScalarField> for &ScalarField {
            type Output = ScalarField;

            fn $method(self, rhs: &ScalarField) -> ScalarField {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);

impl Mul<&ScalarField> for f64 {
    type Output = ScalarField;

    fn mul(self, rhs: &ScalarField) -> ScalarField {
        rhs.scale(self)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;

    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// Angle field stored as its unit pair `(cos φ, sin φ)`.
///
/// No scalar angle is ever differenced: `∂φ = c ∂s − s ∂c`, which has no branch cut.
#[derive(Debug, Clone)]
pub struct AngleField {
    pub cos: ScalarField,
    pub sin: ScalarField,
}

impl AngleField {
    pub fn new(cos: ScalarField, sin: ScalarField) -> Result<Self> {
        cos.assert_same_grid(&sin);
        let grid = cos.grid().clone();
        for k in 0..grid.support_len() {
            let norm = cos[k].hypot(sin[k]);
            if (norm - 1.0).abs() > 1e-12 {
                let [x, y] = grid.point(k);
                return Err(Error::InvalidInput(format!(
                    "angle pair not unit length ({norm}) at ({x}, {y})"
                )));
            }
        }
        Ok(Self { cos, sin })
    }

    pub fn from_angle(theta: &ScalarField) -> Self {
        Self {
            cos: theta.map(f64::cos),
            sin: theta.map(f64::sin),
        }
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        self.cos.grid()
    }

    /// Principal value `atan2(s, c)` at a support point.
    pub fn angle(&self, k: usize) -> f64 {
        self.sin[k].atan2(self.cos[k])
    }

    pub fn gradient(&self, axis: Axis) -> ScalarField {
        let (dc, ds) = (self.cos.d(axis), self.sin.d(axis));
        ScalarField::from_index_fn(self.grid(), |k| self.cos[k] * ds[k] - self.sin[k] * dc[k])
    }
}

/// A state variable: an ordinary scalar sheet or an angle kept as a unit pair.
#[derive(Debug, Clone)]
pub enum StateField {
    Scalar(ScalarField),
    Angle(AngleField),
}

impl StateField {
    pub fn grid(&self) -> &Arc<DiscGrid> {
        match self {
            StateField::Scalar(f) => f.grid(),
            StateField::Angle(a) => a.grid(),
        }
    }

    /// Value handed to coefficient evaluators; angles as their principal value.
    pub fn value(&self, k: usize) -> f64 {
        match self {
            StateField::Scalar(f) => f[k],
            StateField::Angle(a) => a.angle(k),
        }
    }

    pub fn gradient(&self) -> [ScalarField; 2] {
        match self {
            StateField::Scalar(f) => [f.dx(), f.dy()],
            StateField::Angle(a) => [a.gradient(Axis::X), a.gradient(Axis::Y)],
        }
    }
}

impl From<ScalarField> for StateField {
    fn from(f: ScalarField) -> Self {
        StateField::Scalar(f)
    }
}

impl From<AngleField> for StateField {
    fn from(a: AngleField) -> Self {
        StateField::Angle(a)
    }
}

/// Writes one row per node: `x,y,<columns…>`, row-major by `j` then `i`.
pub fn write_node_csv(out: &mut impl Write, names: &[&str], columns: &[&ScalarField]) -> std::io::Result<()> {
    assert_eq!(names.len(), columns.len());
    let Some(first) = columns.first() else {
        return writeln!(out, "x,y");
    };
    let grid = first.grid();
    writeln!(out, "x,y,{}", names.join(","))?;
    let mut line = String::new();
    for &k in grid.nodes() {
        let [x, y] = grid.point(k);
        line.clear();
        line.push_str(&format!("{x:.16e},{y:.16e}"));
        for c in columns {
            line.push_str(&format!(",{:.16e}", c[k]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}
