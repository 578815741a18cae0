//! Uniform Cartesian lattice masked to the unit disc.
//!
//! A [`DiscGrid`] keeps two point sets. The *support* holds every lattice point
//! of the closed unit disc that lies outside the exclusion zones shrunk by two
//! lattice steps; fields store one value per support point. The *nodes* are the
//! support points inside the mask `x² + y² ≤ (1 − ε)²` and outside the full
//! exclusion zones. Residual norms, quadrature and exports run over nodes only.
//!
//! With the default margin `ε = 2h`, every node sees a fully centred stencil for
//! composed first derivatives (the `|a| + |b| ≤ 2` diamond around it), so mixed
//! and second derivatives built by composition stay O(h²) up to the mask edge.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;

const GEOM_TOL: f64 = 1e-12;
const ABSENT: u32 = u32::MAX;

/// Coordinate direction `t¹ = x` or `t² = y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    fn offset(self) -> (i32, i32) {
        match self {
            Axis::X => (1, 0),
            Axis::Y => (0, 1),
        }
    }
}

/// Region removed from the grid, typically around a singularity of a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionZone {
    /// `|x| < w`
    BandX(f64),
    /// `|y| < w`
    BandY(f64),
    /// `x² + y² < r²`
    Origin(f64),
    /// `x < t`
    BelowX(f64),
    /// `x > t`
    AboveX(f64),
    /// `y < t`
    BelowY(f64),
    /// `y > t`
    AboveY(f64),
}

impl ExclusionZone {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            ExclusionZone::BandX(w) => x.abs() < w - GEOM_TOL,
            ExclusionZone::BandY(w) => y.abs() < w - GEOM_TOL,
            ExclusionZone::Origin(r) => (x * x + y * y).sqrt() < r - GEOM_TOL,
            ExclusionZone::BelowX(t) => x < t - GEOM_TOL,
            ExclusionZone::AboveX(t) => x > t + GEOM_TOL,
            ExclusionZone::BelowY(t) => y < t - GEOM_TOL,
            ExclusionZone::AboveY(t) => y > t + GEOM_TOL,
        }
    }

    /// The zone pulled back by `by`, never by more than half its width.
    fn shrunk(&self, by: f64) -> Self {
        let pull = |w: f64| by.min(w.abs() / 2.0);
        match *self {
            ExclusionZone::BandX(w) => ExclusionZone::BandX(w - pull(w)),
            ExclusionZone::BandY(w) => ExclusionZone::BandY(w - pull(w)),
            ExclusionZone::Origin(r) => ExclusionZone::Origin(r - pull(r)),
            ExclusionZone::BelowX(t) => ExclusionZone::BelowX(t - pull(t)),
            ExclusionZone::AboveX(t) => ExclusionZone::AboveX(t + pull(t)),
            ExclusionZone::BelowY(t) => ExclusionZone::BelowY(t - pull(t)),
            ExclusionZone::AboveY(t) => ExclusionZone::AboveY(t + pull(t)),
        }
    }
}

/// Finite-difference stencil available at a support point along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Stencil {
    Centered { minus: u32, plus: u32 },
    Forward { p1: u32, p2: u32 },
    Backward { m1: u32, m2: u32 },
    // halo-only fallbacks; never selected for a node
    Forward1 { p1: u32 },
    Backward1 { m1: u32 },
    Isolated,
}

impl Stencil {
    fn is_second_order(self) -> bool {
        matches!(
            self,
            Stencil::Centered { .. } | Stencil::Forward { .. } | Stencil::Backward { .. }
        )
    }
}

#[derive(Debug)]
pub struct DiscGrid {
    h: f64,
    margin: f64,
    zones: Vec<ExclusionZone>,
    half: i32,
    lookup: Vec<u32>,
    lattice: Vec<(i32, i32)>,
    nodes: Vec<usize>,
    is_node: Vec<bool>,
    stencils: Vec<[Stencil; 2]>,
}

/// Builds the masked disc grid.
///
/// `margin` is the mask margin ε; `zones` are removed from the node set (and,
/// shrunk by `2h`, from the support).
pub fn build_disc_grid(h: f64, margin: f64, zones: &[ExclusionZone]) -> Result<Arc<DiscGrid>> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidGrid(format!("spacing h = {h} outside (0, 1)")));
    }
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::InvalidGrid(format!("margin = {margin} outside [0, 1)")));
    }
    let half = (1.0 / h + 1e-9).floor() as i32;
    let width = (2 * half + 1) as usize;
    let support_zones: Vec<ExclusionZone> = zones.iter().map(|z| z.shrunk(2.0 * h)).collect();

    let mut lookup = vec![ABSENT; width * width];
    let mut lattice = Vec::new();
    for j in -half..=half {
        for i in -half..=half {
            let (x, y) = (i as f64 * h, j as f64 * h);
            if x * x + y * y > 1.0 + GEOM_TOL {
                continue;
            }
            if support_zones.iter().any(|z| z.contains(x, y)) {
                continue;
            }
            lookup[(i + half) as usize + (j + half) as usize * width] = lattice.len() as u32;
            lattice.push((i, j));
        }
    }

    let mut grid = DiscGrid {
        h,
        margin,
        zones: zones.to_vec(),
        half,
        lookup,
        lattice,
        nodes: Vec::new(),
        is_node: Vec::new(),
        stencils: Vec::new(),
    };
    grid.stencils = (0..grid.lattice.len())
        .map(|k| [grid.select_stencil(k, Axis::X), grid.select_stencil(k, Axis::Y)])
        .collect();

    let mask_r2 = (1.0 - margin) * (1.0 - margin) + GEOM_TOL;
    grid.is_node = (0..grid.lattice.len())
        .map(|k| {
            let [x, y] = grid.point(k);
            x * x + y * y <= mask_r2
                && !zones.iter().any(|z| z.contains(x, y))
                && grid.stencils[k].iter().all(|s| s.is_second_order())
        })
        .collect();
    grid.nodes = (0..grid.lattice.len()).filter(|&k| grid.is_node[k]).collect();

    if grid.nodes.len() < 9 {
        return Err(Error::GridTooCoarse {
            nodes: grid.nodes.len(),
        });
    }
    Ok(Arc::new(grid))
}

impl DiscGrid {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn zones(&self) -> &[ExclusionZone] {
        &self.zones
    }

    /// Number of support points (the length of every field on this grid).
    pub fn support_len(&self) -> usize {
        self.lattice.len()
    }

    /// Support indices of the nodes, row-major by `j` then `i`.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_node(&self, k: usize) -> bool {
        self.is_node[k]
    }

    /// True when the node has centred stencils along both axes.
    pub fn is_interior(&self, k: usize) -> bool {
        self.is_node[k]
            && self.stencils[k]
                .iter()
                .all(|s| matches!(s, Stencil::Centered { .. }))
    }

    pub fn lattice(&self, k: usize) -> (i32, i32) {
        self.lattice[k]
    }

    pub fn point(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.lattice[k];
        [i as f64 * self.h, j as f64 * self.h]
    }

    fn slot(&self, i: i32, j: i32) -> Option<usize> {
        if i.abs() > self.half || j.abs() > self.half {
            return None;
        }
        let width = (2 * self.half + 1) as usize;
        match self.lookup[(i + self.half) as usize + (j + self.half) as usize * width] {
            ABSENT => None,
            k => Some(k as usize),
        }
    }

    /// Support index of the lattice point at `(x, y)`, if `(x, y)` is one.
    pub fn index_at(&self, x: f64, y: f64) -> Option<usize> {
        let (fi, fj) = (x / self.h, y / self.h);
        let (i, j) = (fi.round(), fj.round());
        if (fi - i).abs() > 1e-6 || (fj - j).abs() > 1e-6 {
            return None;
        }
        self.slot(i as i32, j as i32)
    }

    pub fn node_index_at(&self, x: f64, y: f64) -> Option<usize> {
        self.index_at(x, y).filter(|&k| self.is_node[k])
    }

    /// Whether a point lies in the mask and outside every exclusion zone.
    pub fn in_domain(&self, x: f64, y: f64) -> bool {
        let r = 1.0 - self.margin;
        x * x + y * y <= r * r + GEOM_TOL && !self.zones.iter().any(|z| z.contains(x, y))
    }

    pub(crate) fn stencil(&self, k: usize, axis: Axis) -> Stencil {
        self.stencils[k][axis as usize]
    }

    fn select_stencil(&self, k: usize, axis: Axis) -> Stencil {
        let (i, j) = self.lattice[k];
        let (di, dj) = axis.offset();
        let at = |s: i32| self.slot(i + s * di, j + s * dj).map(|v| v as u32);
        match (at(-1), at(1)) {
            (Some(minus), Some(plus)) => Stencil::Centered { minus, plus },
            (m, p) => {
                if let (Some(p1), Some(p2)) = (p, at(2)) {
                    Stencil::Forward { p1, p2 }
                } else if let (Some(m1), Some(m2)) = (m, at(-2)) {
                    Stencil::Backward { m1, m2 }
                } else if let Some(p1) = p {
                    Stencil::Forward1 { p1 }
                } else if let Some(m1) = m {
                    Stencil::Backward1 { m1 }
                } else {
                    Stencil::Isolated
                }
            }
        }
    }

    /// Finite-difference derivative of one support value along `axis`.
    pub(crate) fn derivative_at(&self, values: &[f64], k: usize, axis: Axis) -> f64 {
        let h = self.h;
        let v = |i: u32| values[i as usize];
        match self.stencil(k, axis) {
            Stencil::Centered { minus, plus } => (v(plus) - v(minus)) / (2.0 * h),
            Stencil::Forward { p1, p2 } => (-3.0 * values[k] + 4.0 * v(p1) - v(p2)) / (2.0 * h),
            Stencil::Backward { m1, m2 } => (3.0 * values[k] - 4.0 * v(m1) + v(m2)) / (2.0 * h),
            Stencil::Forward1 { p1 } => (v(p1) - values[k]) / h,
            Stencil::Backward1 { m1 } => (values[k] - v(m1)) / h,
            Stencil::Isolated => 0.0,
        }
    }

    /// Bilinear interpolation of support values at an arbitrary point.
    ///
    /// Returns `None` when one of the four surrounding lattice points is missing.
    pub fn interpolate(&self, values: &[f64], x: f64, y: f64) -> Option<f64> {
        let (fx, fy) = (x / self.h, y / self.h);
        let (i0, j0) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - i0, fy - j0);
        let (i0, j0) = (i0 as i32, j0 as i32);
        let corner = |di: i32, dj: i32, w: f64| -> Option<f64> {
            if w == 0.0 {
                return Some(0.0);
            }
            self.slot(i0 + di, j0 + dj).map(|k| w * values[k])
        };
        Some(
            corner(0, 0, (1.0 - tx) * (1.0 - ty))?
                + corner(1, 0, tx * (1.0 - ty))?
                + corner(0, 1, (1.0 - tx) * ty)?
                + corner(1, 1, tx * ty)?,
        )
    }
}

/// Second-order finite-difference partial derivative along `axis`.
///
/// Centred where both neighbours exist, one-sided second order otherwise; exact
/// for polynomials of degree ≤ 2 along the axis.
pub fn partial(f: &ScalarField, axis: Axis) -> ScalarField {
    let grid = f.grid().clone();
    let values = f.values();
    ScalarField::from_index_fn(&grid, |k| grid.derivative_at(values, k, axis))
}

/// A point of the unit circle with its outward normal and arc weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample {
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub weight: f64,
}

/// `m` equally spaced samples `θ_k = 2πk/m` of the unit circle.
pub fn boundary_samples(m: usize) -> Vec<BoundarySample> {
    (0..m)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / m as f64;
            let (s, c) = theta.sin_cos();
            BoundarySample {
                point: [c, s],
                normal: [c, s],
                weight: 2.0 * PI / m as f64,
            }
        })
        .collect()
}

/// Arc-weighted sum of `g` over boundary samples.
pub fn boundary_integral(samples: &[BoundarySample], mut g: impl FnMut(&BoundarySample) -> f64) -> f64 {
    samples.iter().map(|s| s.weight * g(s)).sum()
}

/// Something that yields a 2-vector at any point of the plane.
pub trait VectorSampler {
    fn sample(&self, x: f64, y: f64) -> Option<[f64; 2]>;
}

impl<F> VectorSampler for F
where
    F: Fn(f64, f64) -> [f64; 2],
{
    fn sample(&self, x: f64, y: f64) -> Option<[f64; 2]> {
        Some(self(x, y))
    }
}

/// Bilinear sampler over a pair of grid fields.
pub struct GridVectorField<'a> {
    pub components: [&'a ScalarField; 2],
}

impl VectorSampler for GridVectorField<'_> {
    fn sample(&self, x: f64, y: f64) -> Option<[f64; 2]> {
        let grid = self.components[0].grid();
        Some([
            grid.interpolate(self.components[0].values(), x, y)?,
            grid.interpolate(self.components[1].values(), x, y)?,
        ])
    }
}

/// Midpoint-rule `∫ v · dl` along a polyline, sub-stepping each segment at `h`.
pub fn line_integral(grid: &DiscGrid, v: &impl VectorSampler, path: &[[f64; 2]]) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidInput("polyline needs at least two vertices".into()));
    }
    let leaves = |p: [f64; 2]| Error::PathLeavesDomain { x: p[0], y: p[1] };
    for &p in path {
        if !grid.in_domain(p[0], p[1]) {
            return Err(leaves(p));
        }
    }
    let mut total = 0.0;
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = d[0].hypot(d[1]);
        let pieces = ((len / grid.h()).ceil() as usize).max(1);
        for s in 0..pieces {
            let t = (s as f64 + 0.5) / pieces as f64;
            let m = [a[0] + t * d[0], a[1] + t * d[1]];
            if !grid.in_domain(m[0], m[1]) {
                return Err(leaves(m));
            }
            let val = v.sample(m[0], m[1]).ok_or_else(|| leaves(m))?;
            total += (val[0] * d[0] + val[1] * d[1]) / pieces as f64;
        }
    }
    Ok(total)
}

/// Cell-sum quadrature `Σ f h²` over the nodes.
pub fn area_integral(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let h2 = grid.h() * grid.h();
    grid.nodes().iter().map(|&k| f[k] * h2).sum()
}
