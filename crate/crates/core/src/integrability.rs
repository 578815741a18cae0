//! Residuals of the complete integrability conditions.
//!
//! For one state with cross-triple `(P, Q, R)` the condition reads
//! `∂₂(P − x ∂₁R) = ∂₁(Q − x ∂₂R)`. The `x ∂₁∂₂R` terms cancel identically, so
//! the residual is assembled as `∂₂P − ∂₁Q + ∂₁x ∂₂R − ∂₂x ∂₁R`. The state then
//! enters only through its gradient, which keeps angle states branch-free.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{AngleField, ScalarField, StateField};
use crate::grid::Axis;
use crate::pde::{cross_triple, SplitSystem};
use crate::plastic::PlasticControls;

/// Residual `∂₂(P − x ∂₁R) − ∂₁(Q − x ∂₂R)` for a single state.
pub fn cic_single(p: &ScalarField, q: &ScalarField, r: &ScalarField, x: &StateField) -> ScalarField {
    cic_from_gradient(p, q, r, &x.gradient())
}

pub(crate) fn cic_from_gradient(
    p: &ScalarField,
    q: &ScalarField,
    r: &ScalarField,
    grad_x: &[ScalarField; 2],
) -> ScalarField {
    p.assert_same_grid(q);
    p.assert_same_grid(r);
    let (py, qx) = (p.dy(), q.dx());
    let (rx, ry) = (r.dx(), r.dy());
    let [gx, gy] = grad_x;
    ScalarField::from_index_fn(p.grid(), |k| py[k] - qx[k] + gx[k] * ry[k] - gy[k] * rx[k])
}

#[derive(Debug, Clone)]
pub struct StateResidual {
    /// 1-based state index.
    pub state_index: usize,
    pub residual: ScalarField,
    pub max_norm: f64,
    pub l2_norm: f64,
}

/// One residual field per state with its norms.
#[derive(Debug, Clone)]
pub struct CicReport {
    pub h: f64,
    pub states: Vec<StateResidual>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CicReportRow {
    pub state_index: usize,
    pub max_norm: f64,
    pub l2_norm: f64,
    pub h: f64,
}

impl CicReport {
    pub fn rows(&self) -> Vec<CicReportRow> {
        self.states
            .iter()
            .map(|s| CicReportRow {
                state_index: s.state_index,
                max_norm: s.max_norm,
                l2_norm: s.l2_norm,
                h: self.h,
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.rows()).expect("report rows serialize")
    }
}

/// Integrability residual of every line of a split system.
pub fn cic_multi(split: &SplitSystem) -> Result<CicReport> {
    let states = (0..split.n_states())
        .map(|i| {
            let t = cross_triple(split, i)?;
            let residual = cic_from_gradient(&t.p, &t.q, &t.r, split.gradient(i));
            Ok(StateResidual {
                state_index: i + 1,
                max_norm: residual.max_norm(),
                l2_norm: residual.l2_norm(),
                residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CicReport {
        h: split.grid().h(),
        states,
    })
}

fn check_positive_radius(k: &ScalarField) -> Result<()> {
    let grid = k.grid();
    for &n in grid.nodes() {
        if k[n] <= 0.0 {
            let [x, y] = grid.point(n);
            return Err(Error::DegenerateMohrRadius { k: k[n], x, y });
        }
    }
    Ok(())
}

/// Integrability conditions of the split plastic system, written out directly.
///
/// * line 1: `∂u/∂y − ∂v/∂x`
/// * line 2: `∂/∂y(−μ cos φ + ν sin φ) − ∂/∂x(μ sin φ + ν cos φ)`
/// * line 3: `∂/∂y(K S) − ∂/∂x(K C) + ∂φ/∂x ∂(K²)/∂y − ∂φ/∂y ∂(K²)/∂x`, where
///   `S = (u+μ) sin φ + (v+ν) cos φ` and `C = (u+μ) cos φ − (v+ν) sin φ`.
///
/// Line 3 keeps the factor carried by `det A₃ = −K²`; on solutions of the split
/// system it equals `K` times [`plastic_cic_reduced_line3`]. Relative to the
/// generic cross-triple route the lines carry signs `(−1, +1, −1)`.
pub fn plastic_cic(
    k: &ScalarField,
    phi: &AngleField,
    controls: &PlasticControls,
) -> Result<[ScalarField; 3]> {
    check_positive_radius(k)?;
    let grid = k.grid();
    let (c, s) = (&phi.cos, &phi.sin);
    let PlasticControls { u, v, mu, nu } = controls;

    let line1 = &u.dy() - &v.dx();

    let kx_part = ScalarField::from_index_fn(grid, |n| -mu[n] * c[n] + nu[n] * s[n]);
    let ky_part = ScalarField::from_index_fn(grid, |n| mu[n] * s[n] + nu[n] * c[n]);
    let line2 = &kx_part.dy() - &ky_part.dx();

    let ks = ScalarField::from_index_fn(grid, |n| k[n] * ((u[n] + mu[n]) * s[n] + (v[n] + nu[n]) * c[n]));
    let kc = ScalarField::from_index_fn(grid, |n| k[n] * ((u[n] + mu[n]) * c[n] - (v[n] + nu[n]) * s[n]));
    let k2 = k.map(|v| v * v);
    let (k2x, k2y) = (k2.dx(), k2.dy());
    let (phx, phy) = (phi.gradient(Axis::X), phi.gradient(Axis::Y));
    let (ksy, kcx) = (ks.dy(), kc.dx());
    let line3 = ScalarField::from_index_fn(grid, |n| ksy[n] - kcx[n] + phx[n] * k2y[n] - phy[n] * k2x[n]);
    Ok([line1, line2, line3])
}

/// `∂S/∂y + ∂K/∂y ∂φ/∂x − ∂C/∂x − ∂K/∂x ∂φ/∂y`, the third plastic condition
/// after dividing out `K` with the split equations.
pub fn plastic_cic_reduced_line3(
    k: &ScalarField,
    phi: &AngleField,
    controls: &PlasticControls,
) -> Result<ScalarField> {
    check_positive_radius(k)?;
    let grid = k.grid();
    let (c, s) = (&phi.cos, &phi.sin);
    let PlasticControls { u, v, mu, nu } = controls;
    let big_s = ScalarField::from_index_fn(grid, |n| (u[n] + mu[n]) * s[n] + (v[n] + nu[n]) * c[n]);
    let big_c = ScalarField::from_index_fn(grid, |n| (u[n] + mu[n]) * c[n] - (v[n] + nu[n]) * s[n]);
    let (sy, cx) = (big_s.dy(), big_c.dx());
    let (kx, ky) = (k.dx(), k.dy());
    let (phx, phy) = (phi.gradient(Axis::X), phi.gradient(Axis::Y));
    Ok(ScalarField::from_index_fn(grid, |n| {
        sy[n] + ky[n] * phx[n] - cx[n] - kx[n] * phy[n]
    }))
}

/// Residuals of the reduced system for `(ρ, K)` at a prescribed angle:
///
/// * `∂ρ/∂x − [∂(K cos φ)/∂x − ∂(K sin φ)/∂y]`
/// * `∂ρ/∂y + [∂(K sin φ)/∂x + ∂(K cos φ)/∂y]`
/// * `2 ∂²(K cos φ)/∂x∂y − ∂²(K sin φ)/∂y² + ∂²(K sin φ)/∂x²`
///
/// Second derivatives are composed first-derivative stencils.
pub fn reduced_system_residual(rho: &ScalarField, k: &ScalarField, phi: &AngleField) -> [ScalarField; 3] {
    rho.assert_same_grid(k);
    let kc = k * &phi.cos;
    let ks = k * &phi.sin;
    let (kcx, kcy, ksx, ksy) = (kc.dx(), kc.dy(), ks.dx(), ks.dy());
    let (rx, ry) = (rho.dx(), rho.dy());
    let grid = rho.grid();
    let first = ScalarField::from_index_fn(grid, |n| rx[n] - (kcx[n] - ksy[n]));
    let second = ScalarField::from_index_fn(grid, |n| ry[n] + (ksx[n] + kcy[n]));
    let (kcxy, ksyy, ksxx) = (kcx.dy(), ksy.dy(), ksx.dx());
    let third = ScalarField::from_index_fn(grid, |n| 2.0 * kcxy[n] - ksyy[n] + ksxx[n]);
    [first, second, third]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_disc_grid;
    use std::sync::Arc;

    fn f(g: &Arc<crate::grid::DiscGrid>, h: impl Fn(f64, f64) -> f64 + Sync) -> ScalarField {
        ScalarField::from_point_fn(g, |[x, y]| h(x, y))
    }

    #[test]
    fn constant_triple_has_zero_residual() {
        let g = build_disc_grid(1.0 / 32.0, 1.0 / 16.0, &[]).unwrap();
        let x: StateField = f(&g, |x, y| (3.0 * x).sin() * y).into();
        let r = cic_single(&f(&g, |_, _| 0.0), &f(&g, |_, _| 0.0), &f(&g, |_, _| 1.0), &x);
        assert!(r.max_norm() < 1e-12);
    }

    #[test]
    fn symmetric_linear_controls_integrable() {
        let g = build_disc_grid(1.0 / 32.0, 1.0 / 16.0, &[]).unwrap();
        let x: StateField = f(&g, |x, y| x * y).into();
        // P = −u, Q = −v with u = y, v = x
        let r = cic_single(&f(&g, |_, y| -y), &f(&g, |x, _| -x), &f(&g, |_, _| 1.0), &x);
        assert!(r.max_norm() < 1e-12);
    }

    #[test]
    fn non_integrable_linear_triple() {
        let g = build_disc_grid(1.0 / 32.0, 1.0 / 16.0, &[]).unwrap();
        let x: StateField = f(&g, |x, _| x).into();
        let r = cic_single(&f(&g, |_, y| -y), &f(&g, |_, _| 0.0), &f(&g, |_, _| 1.0), &x);
        assert!((&r + &f(&g, |_, _| 1.0)).max_norm() < 1e-12);
    }

    #[test]
    fn expanded_form_matches_literal_composition_on_smooth_data() {
        // ∂₂(P − x∂₁R) − ∂₁(Q − x∂₂R) vs the expanded assembly: equal up to O(h²)
        let err = |h: f64| {
            let g = build_disc_grid(h, 2.0 * h, &[]).unwrap();
            let p = f(&g, |x, y| (x + 2.0 * y).sin());
            let q = f(&g, |x, y| x * y.cos());
            let r = f(&g, |x, y| 2.0 + (x * y * y).sin());
            let xs = f(&g, |x, y| (x - y).exp());
            let lit = &(&p - &(&xs * &r.dx())).dy() - &(&q - &(&xs * &r.dy())).dx();
            let exp = cic_single(&p, &q, &r, &xs.clone().into());
            (&lit - &exp).max_norm()
        };
        let ratio = err(1.0 / 32.0) / err(1.0 / 64.0);
        assert!((3.0..5.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn report_json_shape() {
        let g = build_disc_grid(0.25, 0.0, &[]).unwrap();
        let report = CicReport {
            h: 0.25,
            states: vec![StateResidual {
                state_index: 1,
                residual: ScalarField::zeros(&g),
                max_norm: 0.0,
                l2_norm: 0.0,
            }],
        };
        let v = report.to_json();
        assert_eq!(v[0]["state_index"], 1);
        assert_eq!(v[0]["h"], 0.25);
        assert!(v[0].get("max_norm").is_some() && v[0].get("l2_norm").is_some());
    }
}
