//! Perfect-plastic plane medium: the polar stress system, its canonical split,
//! and the closed-form solution on the unit disc.
//!
//! States are ordered `(ρ, K, φ)`: `A₁ = I` acts on `grad ρ`,
//! `A₂ = [[−cos φ, sin φ], [sin φ, cos φ]]` on `grad K` and
//! `A₃ = [[K sin φ, K cos φ], [K cos φ, −K sin φ]]` on `grad φ`. Costates follow
//! the same order: `p` for ρ, `r` for K, `q` for φ.
//!
//! The extremal angle is `cos φ* = (y² − x²)/r²`, `sin φ* = 2xy/r²`. Four
//! families of `(K, ρ)` solve the remaining equations with it:
//!
//! | family    | K        | ρ                |
//! |-----------|----------|------------------|
//! | quadratic | α(x²+y²) | −2α(x²+y²) + c₀  |
//! | inv_x     | β/x      | β/x + c₀         |
//! | inv_y     | γ/y      | γ/y + c₀         |
//! | constant  | δ        | −δ ln(x²+y²) + c₀ |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AngleField, ScalarField, StateField};
use crate::grid::{boundary_samples, build_disc_grid, Axis, DiscGrid, ExclusionZone};
use crate::maximum_principle::{ControlProblem, CostBundle, CostateBundle, PointSample};
use crate::pde::{split_controls, QuasiLinearSystem, SplitSystem, Vec2};

/// Default half-width of the exclusion zones around singular sets.
pub const DEFAULT_EPS0: f64 = 0.1;

/// Index of each plastic state in state vectors.
pub const STATE_RHO: usize = 0;
pub const STATE_K: usize = 1;
pub const STATE_PHI: usize = 2;

/// An angle held as `(cos φ, sin φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnglePair {
    pub c: f64,
    pub s: f64,
}

impl AnglePair {
    pub fn new(c: f64, s: f64) -> Result<Self> {
        if (c.hypot(s) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("({c}, {s}) is not a unit pair")));
        }
        Ok(Self { c, s })
    }

    pub fn from_angle(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { c, s }
    }

    /// Principal value in `(−π, π]`.
    pub fn angle(&self) -> f64 {
        self.s.atan2(self.c)
    }
}

fn phi_star_raw(x: f64, y: f64) -> Result<AnglePair> {
    let r2 = x * x + y * y;
    if r2 == 0.0 {
        return Err(Error::AngleSingular { x, y });
    }
    Ok(AnglePair {
        c: (y * y - x * x) / r2,
        s: 2.0 * x * y / r2,
    })
}

/// The extremal angle `φ*` at a point outside the origin zone of radius `eps0`.
pub fn phi_star(point: [f64; 2], eps0: f64) -> Result<AnglePair> {
    let [x, y] = point;
    if ExclusionZone::Origin(eps0).contains(x, y) {
        return Err(Error::AngleSingular { x, y });
    }
    phi_star_raw(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Quadratic,
    InvX,
    InvY,
    Constant,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [
        FamilyKind::Quadratic,
        FamilyKind::InvX,
        FamilyKind::InvY,
        FamilyKind::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Quadratic => "quadratic",
            FamilyKind::InvX => "inv_x",
            FamilyKind::InvY => "inv_y",
            FamilyKind::Constant => "constant",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown family '{s}' (expected quadratic, inv_x, inv_y or constant)"
                ))
            })
    }
}

/// One closed-form `(K, ρ)` family with its coefficient and the constant `c₀` of ρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub kind: FamilyKind,
    /// α, β, γ or δ depending on `kind`.
    pub coeff: f64,
    #[serde(default)]
    pub c0: f64,
}

impl SolutionFamily {
    pub fn new(kind: FamilyKind, coeff: f64) -> Self {
        Self { kind, coeff, c0: 0.0 }
    }

    pub fn quadratic(alpha: f64) -> Self {
        Self::new(FamilyKind::Quadratic, alpha)
    }

    pub fn inv_x(beta: f64) -> Self {
        Self::new(FamilyKind::InvX, beta)
    }

    pub fn inv_y(gamma: f64) -> Self {
        Self::new(FamilyKind::InvY, gamma)
    }

    pub fn constant(delta: f64) -> Self {
        Self::new(FamilyKind::Constant, delta)
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    /// The coefficient sign must keep `K > 0` somewhere on the disc.
    ///
    /// Quadratic and constant families need a positive coefficient; `inv_x` and
    /// `inv_y` accept either sign and are evaluated on the matching half-disc.
    pub fn validate(&self) -> Result<()> {
        let a = self.coeff;
        if !a.is_finite() || !self.c0.is_finite() {
            return Err(Error::InvalidInput("family coefficients must be finite".into()));
        }
        let ok = match self.kind {
            FamilyKind::Quadratic | FamilyKind::Constant => a > 0.0,
            FamilyKind::InvX | FamilyKind::InvY => a != 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "{} coefficient {a} gives K <= 0 on the whole disc",
                self.kind
            )))
        }
    }

    /// Regions excluded for this family: the origin (where φ* is singular) and,
    /// for `inv_x`/`inv_y`, the half-plane where K is singular or negative.
    pub fn exclusion_zones(&self, eps0: f64) -> Vec<ExclusionZone> {
        let positive = self.coeff > 0.0;
        match self.kind {
            FamilyKind::Quadratic | FamilyKind::Constant => vec![ExclusionZone::Origin(eps0)],
            FamilyKind::InvX if positive => vec![ExclusionZone::BelowX(eps0)],
            FamilyKind::InvX => vec![ExclusionZone::AboveX(-eps0)],
            FamilyKind::InvY if positive => vec![ExclusionZone::BelowY(eps0)],
            FamilyKind::InvY => vec![ExclusionZone::AboveY(-eps0)],
        }
    }

    pub fn is_admissible(&self, point: [f64; 2], eps0: f64) -> bool {
        let [x, y] = point;
        !self.exclusion_zones(eps0).iter().any(|z| z.contains(x, y))
    }

    fn check(&self, point: [f64; 2], eps0: f64) -> Result<()> {
        if self.is_admissible(point, eps0) {
            Ok(())
        } else {
            Err(Error::FamilySingular {
                family: self.kind.name(),
                x: point[0],
                y: point[1],
            })
        }
    }

    /// `K` at an admissible point.
    pub fn k(&self, point: [f64; 2], eps0: f64) -> Result<f64> {
        self.check(point, eps0)?;
        self.k_raw(point)
    }

    /// `ρ` at an admissible point.
    pub fn rho(&self, point: [f64; 2], eps0: f64) -> Result<f64> {
        self.check(point, eps0)?;
        self.rho_raw(point)
    }

    /// Closed forms without the zone check; fails only on the singular set itself.
    fn k_raw(&self, [x, y]: [f64; 2]) -> Result<f64> {
        let a = self.coeff;
        let singular = || Error::FamilySingular {
            family: self.kind.name(),
            x,
            y,
        };
        Ok(match self.kind {
            FamilyKind::Quadratic => a * (x * x + y * y),
            FamilyKind::InvX if x == 0.0 => return Err(singular()),
            FamilyKind::InvX => a / x,
            FamilyKind::InvY if y == 0.0 => return Err(singular()),
            FamilyKind::InvY => a / y,
            FamilyKind::Constant => a,
        })
    }

    fn rho_raw(&self, [x, y]: [f64; 2]) -> Result<f64> {
        let a = self.coeff;
        let r2 = x * x + y * y;
        let singular = || Error::FamilySingular {
            family: self.kind.name(),
            x,
            y,
        };
        let v = match self.kind {
            FamilyKind::Quadratic => -2.0 * a * r2,
            FamilyKind::InvX | FamilyKind::InvY => self.k_raw([x, y])?,
            FamilyKind::Constant if r2 == 0.0 => return Err(singular()),
            FamilyKind::Constant => -a * r2.ln(),
        };
        Ok(v + self.c0)
    }

    /// Disc grid with this family's exclusion zones.
    pub fn grid(&self, h: f64, margin: f64, eps0: f64) -> Result<Arc<DiscGrid>> {
        build_disc_grid(h, margin, &self.exclusion_zones(eps0))
    }
}

/// `K` of a family at a point; see [`SolutionFamily::k`].
pub fn k_family(family: &SolutionFamily, point: [f64; 2], eps0: f64) -> Result<f64> {
    family.k(point, eps0)
}

/// `ρ` of a family at a point; see [`SolutionFamily::rho`].
pub fn rho_family(family: &SolutionFamily, point: [f64; 2], eps0: f64) -> Result<f64> {
    family.rho(point, eps0)
}

/// Canonical controls `(u, v) = grad ρ` and `(μ, ν) = A₂ grad K`.
#[derive(Debug, Clone)]
pub struct PlasticControls {
    pub u: ScalarField,
    pub v: ScalarField,
    pub mu: ScalarField,
    pub nu: ScalarField,
}

impl PlasticControls {
    pub fn from_split(split: &SplitSystem) -> Self {
        let [u, v] = split.canonical(0).clone();
        let [mu, nu] = split.canonical(1).clone();
        Self { u, v, mu, nu }
    }

    /// `[u, v, μ, ν]`, the control vector of [`control_problem`].
    pub fn to_vec(&self) -> Vec<ScalarField> {
        vec![self.u.clone(), self.v.clone(), self.mu.clone(), self.nu.clone()]
    }
}

/// A family sampled on a grid.
#[derive(Debug, Clone)]
pub struct PlasticState {
    pub family: SolutionFamily,
    pub rho: ScalarField,
    pub k: ScalarField,
    pub phi: AngleField,
}

impl PlasticState {
    /// Samples `(ρ, K, φ*)` on every support point of `grid`.
    ///
    /// The grid must exclude the family's singular sets (see
    /// [`SolutionFamily::grid`]); `K ≤ 0` on a node is rejected.
    pub fn from_family(grid: &Arc<DiscGrid>, family: SolutionFamily) -> Result<Self> {
        family.validate()?;
        let rho = ScalarField::try_from_point_fn(grid, |p| family.rho_raw(p))?;
        let k = ScalarField::try_from_point_fn(grid, |p| family.k_raw(p))?;
        let c = ScalarField::try_from_point_fn(grid, |[x, y]| Ok(phi_star_raw(x, y)?.c))?;
        let s = ScalarField::try_from_point_fn(grid, |[x, y]| Ok(phi_star_raw(x, y)?.s))?;
        for &n in grid.nodes() {
            if k[n] <= 0.0 {
                let [x, y] = grid.point(n);
                return Err(Error::DegenerateMohrRadius { k: k[n], x, y });
            }
        }
        Ok(Self {
            family,
            rho,
            k,
            phi: AngleField { cos: c, sin: s },
        })
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        self.rho.grid()
    }

    /// `[ρ, K, φ]` in system order.
    pub fn states(&self) -> Vec<StateField> {
        vec![
            self.rho.clone().into(),
            self.k.clone().into(),
            self.phi.clone().into(),
        ]
    }

    pub fn split(&self) -> Result<SplitSystem> {
        split_controls(&plastic_system(), &self.states(), &[])
    }

    pub fn controls(&self) -> Result<PlasticControls> {
        Ok(PlasticControls::from_split(&self.split()?))
    }

    pub fn stress(&self) -> StressTensor2D {
        stress_from_polar(self)
    }
}

fn angle_of(e: &crate::pde::Eval) -> (f64, f64) {
    let (s, c) = e.states[STATE_PHI].sin_cos();
    (c, s)
}

/// The polar system with `B = 0` and no initial controls.
pub fn plastic_system() -> QuasiLinearSystem {
    QuasiLinearSystem::new(
        3,
        0,
        |i, e| {
            let (c, s) = angle_of(e);
            let k = e.states[STATE_K];
            match i {
                STATE_RHO => [[1.0, 0.0], [0.0, 1.0]],
                STATE_K => [[-c, s], [s, c]],
                _ => [[k * s, k * c], [k * c, -k * s]],
            }
        },
        |_| [0.0, 0.0],
    )
}

/// The split system solved for the gradients, controls `ū = [u, v, μ, ν]`:
///
/// * `grad ρ = (u, v)`
/// * `grad K = (−μ cos φ + ν sin φ, μ sin φ + ν cos φ)`
/// * `K grad φ = (−(u+μ) sin φ − (v+ν) cos φ, −(u+μ) cos φ + (v+ν) sin φ)`
///
/// Its Hamiltonian is `p·f_ρ + r·f_K + q·f_φ`.
pub fn control_problem() -> ControlProblem {
    ControlProblem::new(
        3,
        4,
        |i, e| {
            let w = if i == STATE_PHI { e.states[STATE_K] } else { 1.0 };
            [[w, 0.0], [0.0, w]]
        },
        |i, e| {
            let (c, s) = angle_of(e);
            let [u, v, mu, nu] = [e.controls[0], e.controls[1], e.controls[2], e.controls[3]];
            match i {
                STATE_RHO => [u, v],
                STATE_K => [-mu * c + nu * s, mu * s + nu * c],
                _ => [-(u + mu) * s - (v + nu) * c, -(u + mu) * c + (v + nu) * s],
            }
        },
    )
    .control_affine(true)
}

/// No running cost, boundary cost `g = φ`.
pub fn plastic_cost() -> CostBundle {
    CostBundle::new(|_| 0.0, |_, x| x[STATE_PHI]).with_boundary_gradient(|_, _| vec![0.0, 0.0, 1.0])
}

/// Residual of the second-order equation for K at the angle φ*:
/// `2(y²−x²) K_xy − 2xy (K_yy − K_xx) + 4(y K_x − x K_y)`.
///
/// Second derivatives are composed first-derivative stencils.
pub fn k_equation_residual(k: &ScalarField) -> ScalarField {
    let (kx, ky) = (k.dx(), k.dy());
    let (kxy, kxx, kyy) = (kx.dy(), kx.dx(), ky.dy());
    let grid = k.grid();
    ScalarField::from_index_fn(grid, |n| {
        let [x, y] = grid.point(n);
        2.0 * (y * y - x * x) * kxy[n] - 2.0 * x * y * (kyy[n] - kxx[n]) + 4.0 * (y * kx[n] - x * ky[n])
    })
}

#[derive(Debug, Clone)]
pub struct StressTensor2D {
    pub sxx: ScalarField,
    pub syy: ScalarField,
    pub sxy: ScalarField,
}

/// `σxx = ρ − K cos φ`, `σyy = ρ + K cos φ`, `σxy = K sin φ`.
pub fn stress_from_polar(state: &PlasticState) -> StressTensor2D {
    let (rho, k) = (&state.rho, &state.k);
    let (c, s) = (&state.phi.cos, &state.phi.sin);
    let grid = rho.grid();
    StressTensor2D {
        sxx: ScalarField::from_index_fn(grid, |n| rho[n] - k[n] * c[n]),
        syy: ScalarField::from_index_fn(grid, |n| rho[n] + k[n] * c[n]),
        sxy: ScalarField::from_index_fn(grid, |n| k[n] * s[n]),
    }
}

impl StressTensor2D {
    /// `(σyy − σxx)² + 4σxy² − 4K²`.
    pub fn yield_residual(&self, k: &ScalarField) -> ScalarField {
        let grid = k.grid();
        ScalarField::from_index_fn(grid, |n| {
            let d = self.syy[n] - self.sxx[n];
            d * d + 4.0 * self.sxy[n] * self.sxy[n] - 4.0 * k[n] * k[n]
        })
    }

    /// `(∂σxx/∂x + ∂σxy/∂y, ∂σxy/∂x + ∂σyy/∂y)`.
    pub fn equilibrium_residual(&self) -> [ScalarField; 2] {
        equilibrium_residual(self)
    }
}

pub fn equilibrium_residual(sigma: &StressTensor2D) -> [ScalarField; 2] {
    [
        &sigma.sxx.dx() + &sigma.sxy.dy(),
        &sigma.sxy.dx() + &sigma.syy.dy(),
    ]
}

/// Costates `p`, `r`, `q` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlasticCostates {
    pub p: Vec2,
    pub r: Vec2,
    pub q: Vec2,
}

impl PlasticCostates {
    /// `p₁ = y`, `p₂ = −x`, `q₁ = r₂ = y sin φ − x cos φ`, `q₂ = −r₁ = y cos φ + x sin φ`.
    pub fn particular([x, y]: [f64; 2], phi: AnglePair) -> Self {
        let q1 = y * phi.s - x * phi.c;
        let q2 = y * phi.c + x * phi.s;
        Self {
            p: [y, -x],
            r: [-q2, q1],
            q: [q1, q2],
        }
    }

    /// Costate pairs in state order `(ρ, K, φ)`.
    pub fn to_vec(&self) -> Vec<Vec2> {
        vec![self.p, self.r, self.q]
    }

    /// Residuals of `p₁ = q₁ sin φ + q₂ cos φ`, `p₂ = q₁ cos φ − q₂ sin φ`,
    /// `r₁ = −q₂`, `r₂ = q₁`.
    pub fn relation_residuals(&self, phi: AnglePair) -> [f64; 4] {
        let [q1, q2] = self.q;
        [
            self.p[0] - (q1 * phi.s + q2 * phi.c),
            self.p[1] - (q1 * phi.c - q2 * phi.s),
            self.r[0] + q2,
            self.r[1] - q1,
        ]
    }
}

/// The particular costates at a point, with `φ = φ*`.
pub fn costates_star(point: [f64; 2], eps0: f64) -> Result<PlasticCostates> {
    Ok(PlasticCostates::particular(point, phi_star(point, eps0)?))
}

/// Grid version of the particular costates; `q1_shift` is added to `q₁` alone
/// (used to build deliberately broken inputs).
#[derive(Debug, Clone)]
pub struct PlasticCostateFields {
    pub p: [ScalarField; 2],
    pub r: [ScalarField; 2],
    pub q: [ScalarField; 2],
}

impl PlasticCostateFields {
    pub fn particular(phi: &AngleField, q1_shift: f64) -> Self {
        let grid = phi.grid();
        let at = |n: usize| {
            let mut c = PlasticCostates::particular(
                grid.point(n),
                AnglePair {
                    c: phi.cos[n],
                    s: phi.sin[n],
                },
            );
            c.q[0] += q1_shift;
            c
        };
        let f = |pick: fn(&PlasticCostates) -> f64| ScalarField::from_index_fn(grid, |n| pick(&at(n)));
        Self {
            p: [f(|c| c.p[0]), f(|c| c.p[1])],
            r: [f(|c| c.r[0]), f(|c| c.r[1])],
            q: [f(|c| c.q[0]), f(|c| c.q[1])],
        }
    }

    pub fn bundle(&self) -> CostateBundle {
        CostateBundle::new(vec![self.p.clone(), self.r.clone(), self.q.clone()])
    }
}

/// Costate system after substituting the algebraic relations between `p`, `r`, `q`:
///
/// * `∂p₁/∂x + ∂p₂/∂y`
/// * `−∂q₂/∂x + ∂q₁/∂y − q₁ ∂φ/∂x − q₂ ∂φ/∂y`
/// * `∂q₁/∂x + ∂q₂/∂y + q₁ ∂φ/∂y − q₂ ∂φ/∂x`
pub fn reduced_costate_residual(
    p: &[ScalarField; 2],
    q: &[ScalarField; 2],
    phi: &AngleField,
) -> [ScalarField; 3] {
    let grid = phi.grid();
    let (phx, phy) = (phi.gradient(Axis::X), phi.gradient(Axis::Y));
    let line1 = &p[0].dx() + &p[1].dy();
    let (q1x, q1y, q2x, q2y) = (q[0].dx(), q[0].dy(), q[1].dx(), q[1].dy());
    let (q1, q2) = (&q[0], &q[1]);
    let line2 = ScalarField::from_index_fn(grid, |n| -q2x[n] + q1y[n] - q1[n] * phx[n] - q2[n] * phy[n]);
    let line3 = ScalarField::from_index_fn(grid, |n| q1x[n] + q2y[n] + q1[n] * phy[n] - q2[n] * phx[n]);
    [line1, line2, line3]
}

/// Boundary identities on the unit circle at `m` samples:
/// `(p₁x + p₂y, q₁x + q₂y − 1, r₁x + r₂y)`.
pub fn boundary_condition_residual(m: usize) -> Result<[Vec<f64>; 3]> {
    boundary_condition_residual_shifted(m, 0.0)
}

/// As [`boundary_condition_residual`] with `q₁` shifted by `q1_shift`.
pub fn boundary_condition_residual_shifted(m: usize, q1_shift: f64) -> Result<[Vec<f64>; 3]> {
    let mut out = [
        Vec::with_capacity(m),
        Vec::with_capacity(m),
        Vec::with_capacity(m),
    ];
    for s in boundary_samples(m) {
        let [x, y] = s.point;
        let mut c = costates_star(s.point, DEFAULT_EPS0)?;
        c.q[0] += q1_shift;
        out[0].push(c.p[0] * x + c.p[1] * y);
        out[1].push(c.q[0] * x + c.q[1] * y - 1.0);
        out[2].push(c.r[0] * x + c.r[1] * y);
    }
    Ok(out)
}

/// Closed-form boundary sampler of a family for the general transversality check.
///
/// Controls are the exact canonical controls of the family.
pub fn boundary_sampler(family: SolutionFamily, q1_shift: f64) -> impl Fn([f64; 2]) -> Result<PointSample> {
    move |point| {
        let [x, y] = point;
        let phi = phi_star_raw(x, y)?;
        let k = family.k_raw(point)?;
        let rho = family.rho_raw(point)?;
        let mut c = PlasticCostates::particular(point, phi);
        c.q[0] += q1_shift;
        let [kx, ky] = family.k_gradient(point)?;
        let [u, v] = family.rho_gradient(point)?;
        // (μ, ν) = A₂ grad K
        let mu = -phi.c * kx + phi.s * ky;
        let nu = phi.s * kx + phi.c * ky;
        Ok(PointSample {
            states: vec![rho, k, phi.angle()],
            controls: vec![u, v, mu, nu],
            costates: c.to_vec(),
        })
    }
}

impl SolutionFamily {
    /// Exact `grad K`.
    pub fn k_gradient(&self, [x, y]: [f64; 2]) -> Result<Vec2> {
        let a = self.coeff;
        self.k_raw([x, y])?;
        Ok(match self.kind {
            FamilyKind::Quadratic => [2.0 * a * x, 2.0 * a * y],
            FamilyKind::InvX => [-a / (x * x), 0.0],
            FamilyKind::InvY => [0.0, -a / (y * y)],
            FamilyKind::Constant => [0.0, 0.0],
        })
    }

    /// Exact `grad ρ`.
    pub fn rho_gradient(&self, [x, y]: [f64; 2]) -> Result<Vec2> {
        let a = self.coeff;
        self.rho_raw([x, y])?;
        let r2 = x * x + y * y;
        Ok(match self.kind {
            FamilyKind::Quadratic => [-4.0 * a * x, -4.0 * a * y],
            FamilyKind::InvX | FamilyKind::InvY => self.k_gradient([x, y])?,
            FamilyKind::Constant => [-2.0 * a * x / r2, -2.0 * a * y / r2],
        })
    }
}

/// Right-hand sides of the reduced system for `grad ρ` at a prescribed angle:
/// `(∂(K cos φ)/∂x − ∂(K sin φ)/∂y, −∂(K sin φ)/∂x − ∂(K cos φ)/∂y)`.
pub fn rho_gradient_field(k: &ScalarField, phi: &AngleField) -> [ScalarField; 2] {
    let kc = k * &phi.cos;
    let ks = k * &phi.sin;
    [&kc.dx() - &ks.dy(), &(-&ks.dx()) - &kc.dy()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_star_values() {
        let at = |x, y| phi_star([x, y], DEFAULT_EPS0).unwrap();
        assert_eq!(at(0.0, 1.0), AnglePair { c: 1.0, s: 0.0 });
        assert_eq!(at(1.0, 0.0), AnglePair { c: -1.0, s: 0.0 });
        assert_eq!(at(1.0, 1.0), AnglePair { c: 0.0, s: 1.0 });
        assert!(matches!(
            phi_star([0.01, 0.02], 0.1),
            Err(Error::AngleSingular { .. })
        ));
    }

    #[test]
    fn family_values() {
        let e = DEFAULT_EPS0;
        let q = SolutionFamily::quadratic(1.0);
        assert_eq!(
            (q.k([1.0, 1.0], e).unwrap(), q.rho([1.0, 1.0], e).unwrap()),
            (2.0, -4.0)
        );
        let c = SolutionFamily::constant(1.0);
        assert_eq!(
            (c.k([1.0, 0.0], e).unwrap(), c.rho([1.0, 0.0], e).unwrap()),
            (1.0, 0.0)
        );
        let ix = SolutionFamily::inv_x(1.0);
        assert_eq!(
            (ix.k([0.5, 0.0], e).unwrap(), ix.rho([0.5, 0.0], e).unwrap()),
            (2.0, 2.0)
        );
        assert!(matches!(ix.k([0.05, 0.5], e), Err(Error::FamilySingular { .. })));
        let iy = SolutionFamily::inv_y(-2.0).with_c0(1.0);
        assert_eq!(iy.rho([0.0, -0.5], e).unwrap(), 5.0);
        assert!(iy.k([0.0, 0.5], e).is_err());
    }

    #[test]
    fn coefficient_signs_checked() {
        assert!(SolutionFamily::quadratic(-1.0).validate().is_err());
        assert!(SolutionFamily::constant(0.0).validate().is_err());
        assert!(SolutionFamily::inv_x(-1.0).validate().is_ok());
        assert!(SolutionFamily::inv_y(f64::NAN).validate().is_err());
    }

    #[test]
    fn determinants_of_the_system() {
        let sys = plastic_system();
        let e = crate::pde::Eval {
            t: [0.3, 0.2],
            states: &[1.0, 2.5, 0.7],
            controls: &[],
        };
        use crate::pde::det;
        assert_eq!(det(&sys.matrix(0, &e)), 1.0);
        assert!((det(&sys.matrix(1, &e)) + 1.0).abs() < 1e-15);
        assert!((det(&sys.matrix(2, &e)) + 6.25).abs() < 1e-14);
    }

    #[test]
    fn stress_examples() {
        let g = build_disc_grid(1.0 / 8.0, 0.0, &[ExclusionZone::Origin(0.1)]).unwrap();
        let st = PlasticState::from_family(&g, SolutionFamily::quadratic(1.0)).unwrap();
        let sigma = st.stress();
        let n = g.index_at(0.5, 0.5).unwrap();
        // at (1/2, 1/2): ρ = −1, K = 1/2, φ* = (0, 1)
        assert!((sigma.sxx[n] + 1.0).abs() < 1e-15);
        assert!((sigma.syy[n] + 1.0).abs() < 1e-15);
        assert!((sigma.sxy[n] - 0.5).abs() < 1e-15);
        assert!(sigma.yield_residual(&st.k).max_norm() < 1e-12);
    }

    #[test]
    fn particular_costates() {
        let c = costates_star([0.0, 1.0], DEFAULT_EPS0).unwrap();
        assert_eq!((c.p, c.q, c.r), ([1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]));
        let c = costates_star([1.0, 0.0], DEFAULT_EPS0).unwrap();
        assert_eq!((c.p, c.q, c.r), ([0.0, -1.0], [1.0, 0.0], [0.0, 1.0]));
    }

    #[test]
    fn boundary_identities_at_top_sample() {
        let r = boundary_condition_residual(4).unwrap();
        // sample 1 of 4 is (0, 1)
        for line in &r {
            assert!(line[1].abs() < 1e-15);
        }
    }

    #[test]
    fn family_names_round_trip() {
        for k in FamilyKind::ALL {
            assert_eq!(k.name().parse::<FamilyKind>().unwrap(), k);
        }
        assert!("cubic".parse::<FamilyKind>().is_err());
    }
}
