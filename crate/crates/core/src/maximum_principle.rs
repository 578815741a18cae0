//! Hamiltonian and necessary-condition residuals of the bi-time maximum principle.
//!
//! A [`ControlProblem`] is a split system in solved form: one line
//! `A_i(t, x, ū) grad xⁱ = f_i(t, x, ū)` per state (no sum over i), with the
//! full control vector `ū`. The Hamiltonian is `H = X + Σ_i p^i_β f_i^β`.
//! [`ControlProblem::from_split`] builds the canonical form of a
//! [`QuasiLinearSystem`]: `ū = (u, v_1, …, v_{n−1})`, `f_i = v_i` for `i < n` and
//! `f_n = B − Σ v_i`.
//!
//! Partial derivatives of `H` and `A_i` in state arguments are central
//! differences with step `1e-6`. Control derivatives use exact coefficient
//! extraction when the problem is flagged control-affine.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ScalarField, StateField};
use crate::grid::{BoundarySample, DiscGrid};
use crate::pde::{Eval, Mat2, QuasiLinearSystem, Vec2};

/// Step of every central difference taken in a state or control argument.
pub const FD_STEP: f64 = 1e-6;

type LineMatrixFn = dyn Fn(usize, &Eval) -> Mat2 + Send + Sync;
type LineRhsFn = dyn Fn(usize, &Eval) -> Vec2 + Send + Sync;

/// Split system in solved form, the constraint of the control problem.
#[derive(Clone)]
pub struct ControlProblem {
    n_states: usize,
    n_controls: usize,
    matrix: Arc<LineMatrixFn>,
    rhs: Arc<LineRhsFn>,
    control_affine: bool,
}

impl fmt::Debug for ControlProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlProblem")
            .field("n_states", &self.n_states)
            .field("n_controls", &self.n_controls)
            .field("control_affine", &self.control_affine)
            .finish_non_exhaustive()
    }
}

impl ControlProblem {
    /// `matrix(i, eval)` is `A_i`, `rhs(i, eval)` is `f_i`; `eval.controls` holds `ū`.
    pub fn new(
        n_states: usize,
        n_controls: usize,
        matrix: impl Fn(usize, &Eval) -> Mat2 + Send + Sync + 'static,
        rhs: impl Fn(usize, &Eval) -> Vec2 + Send + Sync + 'static,
    ) -> Self {
        Self {
            n_states,
            n_controls,
            matrix: Arc::new(matrix),
            rhs: Arc::new(rhs),
            control_affine: false,
        }
    }

    /// Declares that every `A_i` and `f_i` is affine in each control component.
    pub fn control_affine(mut self, yes: bool) -> Self {
        self.control_affine = yes;
        self
    }

    /// Canonical split of a quasi-linear system.
    ///
    /// With no initial controls the result is control-affine.
    pub fn from_split(sys: &QuasiLinearSystem) -> Self {
        let n = sys.n_states();
        let big_n = sys.n_controls();
        let (sa, sb) = (sys.clone(), sys.clone());
        fn base<'a>(e: &Eval<'a>, big_n: usize) -> Eval<'a> {
            Eval {
                t: e.t,
                states: e.states,
                controls: &e.controls[..big_n],
            }
        }
        Self::new(
            n,
            big_n + 2 * (n - 1),
            move |i, e| sa.matrix(i, &base(e, big_n)),
            move |i, e| {
                let v = |j: usize| [e.controls[big_n + 2 * j], e.controls[big_n + 2 * j + 1]];
                if i + 1 < n {
                    v(i)
                } else {
                    (0..n - 1).fold(sb.rhs(&base(e, big_n)), |acc, j| {
                        let vj = v(j);
                        [acc[0] - vj[0], acc[1] - vj[1]]
                    })
                }
            },
        )
        .control_affine(big_n == 0)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_controls(&self) -> usize {
        self.n_controls
    }

    pub fn is_control_affine(&self) -> bool {
        self.control_affine
    }

    pub fn matrix(&self, i: usize, e: &Eval) -> Mat2 {
        (self.matrix)(i, e)
    }

    pub fn rhs(&self, i: usize, e: &Eval) -> Vec2 {
        (self.rhs)(i, e)
    }
}

type RunningFn = dyn Fn(&Eval) -> f64 + Send + Sync;
type BoundaryFn = dyn Fn([f64; 2], &[f64]) -> f64 + Send + Sync;
type BoundaryGradFn = dyn Fn([f64; 2], &[f64]) -> Vec<f64> + Send + Sync;

/// Running cost `X(t, x, ū)` and boundary cost `g(t, x)`.
#[derive(Clone)]
pub struct CostBundle {
    running: Arc<RunningFn>,
    boundary: Arc<BoundaryFn>,
    boundary_gradient: Option<Arc<BoundaryGradFn>>,
}

impl fmt::Debug for CostBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostBundle")
            .field("exact_boundary_gradient", &self.boundary_gradient.is_some())
            .finish_non_exhaustive()
    }
}

impl CostBundle {
    pub fn new(
        running: impl Fn(&Eval) -> f64 + Send + Sync + 'static,
        boundary: impl Fn([f64; 2], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            running: Arc::new(running),
            boundary: Arc::new(boundary),
            boundary_gradient: None,
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_, _| 0.0)
    }

    /// Supplies `∂g/∂xⁱ` in closed form instead of by central differences.
    pub fn with_boundary_gradient(
        mut self,
        grad: impl Fn([f64; 2], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.boundary_gradient = Some(Arc::new(grad));
        self
    }

    pub fn running(&self, e: &Eval) -> f64 {
        (self.running)(e)
    }

    pub fn boundary(&self, t: [f64; 2], states: &[f64]) -> f64 {
        (self.boundary)(t, states)
    }

    pub fn boundary_gradient(&self, t: [f64; 2], states: &[f64]) -> Vec<f64> {
        if let Some(g) = &self.boundary_gradient {
            return g(t, states);
        }
        let mut x = states.to_vec();
        (0..states.len())
            .map(|i| {
                let x0 = x[i];
                x[i] = x0 + FD_STEP;
                let plus = self.boundary(t, &x);
                x[i] = x0 - FD_STEP;
                let minus = self.boundary(t, &x);
                x[i] = x0;
                (plus - minus) / (2.0 * FD_STEP)
            })
            .collect()
    }
}

/// Multipliers `p^i = (p^i_1, p^i_2)`, one pair of fields per state.
#[derive(Debug, Clone)]
pub struct CostateBundle {
    pub fields: Vec<[ScalarField; 2]>,
}

impl CostateBundle {
    pub fn new(fields: Vec<[ScalarField; 2]>) -> Self {
        Self { fields }
    }

    pub fn at(&self, k: usize) -> Vec<Vec2> {
        self.fields.iter().map(|[a, b]| [a[k], b[k]]).collect()
    }
}

/// `H = X + Σ_i p^i_β f_i^β` at one point.
pub fn hamiltonian(problem: &ControlProblem, cost: &CostBundle, e: &Eval, costates: &[Vec2]) -> f64 {
    (0..problem.n_states()).fold(cost.running(e), |h, i| {
        let f = problem.rhs(i, e);
        h + costates[i][0] * f[0] + costates[i][1] * f[1]
    })
}

/// Node values and state gradients shared by the field-level conditions.
struct Context<'a> {
    grid: Arc<DiscGrid>,
    problem: &'a ControlProblem,
    states: &'a [StateField],
    controls: &'a [ScalarField],
    costates: &'a CostateBundle,
    gradients: Vec<[ScalarField; 2]>,
}

impl<'a> Context<'a> {
    fn new(
        problem: &'a ControlProblem,
        states: &'a [StateField],
        controls: &'a [ScalarField],
        costates: &'a CostateBundle,
    ) -> Result<Self> {
        let n = problem.n_states();
        if states.len() != n || costates.fields.len() != n {
            return Err(Error::InvalidInput(format!(
                "problem has {n} states; got {} state fields and {} costate pairs",
                states.len(),
                costates.fields.len()
            )));
        }
        if controls.len() != problem.n_controls() {
            return Err(Error::InvalidInput(format!(
                "problem has {} controls, {} fields supplied",
                problem.n_controls(),
                controls.len()
            )));
        }
        let grid = states
            .first()
            .ok_or_else(|| Error::InvalidInput("no states".into()))?
            .grid()
            .clone();
        let same = states.iter().all(|s| Arc::ptr_eq(s.grid(), &grid))
            && controls.iter().all(|c| Arc::ptr_eq(c.grid(), &grid))
            && costates
                .fields
                .iter()
                .flatten()
                .all(|c| Arc::ptr_eq(c.grid(), &grid));
        if !same {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        Ok(Self {
            grid,
            problem,
            states,
            controls,
            costates,
            gradients: states.iter().map(StateField::gradient).collect(),
        })
    }

    fn values(&self, k: usize) -> (Vec<f64>, Vec<f64>, Vec<Vec2>) {
        (
            self.states.iter().map(|s| s.value(k)).collect(),
            self.controls.iter().map(|c| c[k]).collect(),
            self.costates.at(k),
        )
    }

    fn grad(&self, j: usize, k: usize) -> Vec2 {
        [self.gradients[j][0][k], self.gradients[j][1][k]]
    }

    /// Central difference of `f` in state argument `i`.
    fn d_state<T: Combine>(&self, k: usize, i: usize, f: impl Fn(&Eval) -> T) -> T {
        let (mut x, u, _) = self.values(k);
        let t = self.grid.point(k);
        let x0 = x[i];
        x[i] = x0 + FD_STEP;
        let plus = f(&Eval {
            t,
            states: &x,
            controls: &u,
        });
        x[i] = x0 - FD_STEP;
        let minus = f(&Eval {
            t,
            states: &x,
            controls: &u,
        });
        plus.diff(&minus, 2.0 * FD_STEP)
    }

    /// Derivative of `f` in control argument `a`, exact for affine problems.
    fn d_control<T: Combine>(
        &self,
        k: usize,
        a: usize,
        mode: ControlDerivative,
        f: impl Fn(&Eval) -> T,
    ) -> T {
        let (x, mut u, _) = self.values(k);
        let t = self.grid.point(k);
        let exact = match mode {
            ControlDerivative::Auto => self.problem.is_control_affine(),
            ControlDerivative::CoefficientExtraction => true,
            ControlDerivative::CentralDifference => false,
        };
        let (hi, lo, span) = if exact {
            (1.0, 0.0, 1.0)
        } else {
            (u[a] + FD_STEP, u[a] - FD_STEP, 2.0 * FD_STEP)
        };
        u[a] = hi;
        let plus = f(&Eval {
            t,
            states: &x,
            controls: &u,
        });
        u[a] = lo;
        let minus = f(&Eval {
            t,
            states: &x,
            controls: &u,
        });
        plus.diff(&minus, span)
    }
}

trait Combine {
    fn diff(&self, other: &Self, span: f64) -> Self;
}

impl Combine for f64 {
    fn diff(&self, other: &Self, span: f64) -> Self {
        (self - other) / span
    }
}

impl Combine for Mat2 {
    fn diff(&self, other: &Self, span: f64) -> Self {
        let mut out = [[0.0; 2]; 2];
        for b in 0..2 {
            for a in 0..2 {
                out[b][a] = (self[b][a] - other[b][a]) / span;
            }
        }
        out
    }
}

/// `Σ_{β,α} p_β M^{βα} g_α`.
fn contract(p: Vec2, m: &Mat2, g: Vec2) -> f64 {
    let mut s = 0.0;
    for b in 0..2 {
        for a in 0..2 {
            s += p[b] * m[b][a] * g[a];
        }
    }
    s
}

/// `H` evaluated node-wise.
pub fn hamiltonian_field(
    problem: &ControlProblem,
    states: &[StateField],
    controls: &[ScalarField],
    costates: &CostateBundle,
    cost: &CostBundle,
) -> Result<ScalarField> {
    let ctx = Context::new(problem, states, controls, costates)?;
    Ok(ScalarField::from_index_fn(&ctx.grid, |k| {
        let (x, u, p) = ctx.values(k);
        let e = Eval {
            t: ctx.grid.point(k),
            states: &x,
            controls: &u,
        };
        hamiltonian(problem, cost, &e, &p)
    }))
}

/// Residual of each split line `A_i grad xⁱ − f_i`, two fields per state.
pub fn state_residual(
    problem: &ControlProblem,
    states: &[StateField],
    controls: &[ScalarField],
    costates: &CostateBundle,
) -> Result<Vec<[ScalarField; 2]>> {
    let ctx = Context::new(problem, states, controls, costates)?;
    Ok((0..problem.n_states())
        .map(|i| {
            let line = |k: usize, beta: usize| {
                let (x, u, _) = ctx.values(k);
                let e = Eval {
                    t: ctx.grid.point(k),
                    states: &x,
                    controls: &u,
                };
                let a = problem.matrix(i, &e);
                let g = ctx.grad(i, k);
                a[beta][0] * g[0] + a[beta][1] * g[1] - problem.rhs(i, &e)[beta]
            };
            [
                ScalarField::from_index_fn(&ctx.grid, |k| line(k, 0)),
                ScalarField::from_index_fn(&ctx.grid, |k| line(k, 1)),
            ]
        })
        .collect())
}

fn coupling(ctx: &Context, k: usize, i: usize, skip_own: bool) -> f64 {
    let (_, _, p) = ctx.values(k);
    (0..ctx.problem.n_states())
        .filter(|&j| !(skip_own && j == i))
        .map(|j| {
            let da = ctx.d_state(k, i, |e| ctx.problem.matrix(j, e));
            contract(p[j], &da, ctx.grad(j, k))
        })
        .sum()
}

fn dh_dstate(ctx: &Context, cost: &CostBundle, k: usize, i: usize) -> f64 {
    let (_, _, p) = ctx.values(k);
    ctx.d_state(k, i, |e| hamiltonian(ctx.problem, cost, e, &p))
}

/// Costate residual in the general form, one field per state (no sum over i):
/// `∂H/∂xⁱ + ∂/∂t^α(p^i_β A_i^{βα}) − p^j_β ∂A_j^{βα}/∂xⁱ ∂x^j/∂t^α`.
pub fn costate_residual(
    problem: &ControlProblem,
    states: &[StateField],
    controls: &[ScalarField],
    costates: &CostateBundle,
    cost: &CostBundle,
) -> Result<Vec<ScalarField>> {
    let ctx = Context::new(problem, states, controls, costates)?;
    let grid = &ctx.grid;
    Ok((0..problem.n_states())
        .map(|i| {
            let flux = |k: usize, alpha: usize| {
                let (x, u, p) = ctx.values(k);
                let a = problem.matrix(
                    i,
                    &Eval {
                        t: grid.point(k),
                        states: &x,
                        controls: &u,
                    },
                );
                p[i][0] * a[0][alpha] + p[i][1] * a[1][alpha]
            };
            let f1 = ScalarField::from_index_fn(grid, |k| flux(k, 0));
            let f2 = ScalarField::from_index_fn(grid, |k| flux(k, 1));
            let (f1x, f2y) = (f1.dx(), f2.dy());
            ScalarField::from_index_fn(grid, |k| {
                dh_dstate(&ctx, cost, k, i) + f1x[k] + f2y[k] - coupling(&ctx, k, i, false)
            })
        })
        .collect())
}

/// Costate residual in the variational form, one field per state:
/// `∂H/∂xⁱ + ∂p^i_β/∂t^α A_i^{βα} + p^i_β ∂A_i^{βα}/∂t^α − Σ_{j≠i} p^j_β ∂A_j^{βα}/∂xⁱ ∂x^j/∂t^α`.
///
/// `∂A_i/∂t^α` is the derivative along the sheet with the own-state
/// contribution `∂A_i/∂xⁱ ∂xⁱ/∂t^α` removed; with that reading both forms are
/// the same expression, and they agree node-wise up to the discrete product
/// rule (exactly when every `A_i` is constant).
pub fn costate_residual_variational(
    problem: &ControlProblem,
    states: &[StateField],
    controls: &[ScalarField],
    costates: &CostateBundle,
    cost: &CostBundle,
) -> Result<Vec<ScalarField>> {
    let ctx = Context::new(problem, states, controls, costates)?;
    let grid = &ctx.grid;
    Ok((0..problem.n_states())
        .map(|i| {
            let entry = |b: usize, a: usize| {
                ScalarField::from_index_fn(grid, |k| {
                    let (x, u, _) = ctx.values(k);
                    problem.matrix(
                        i,
                        &Eval {
                            t: grid.point(k),
                            states: &x,
                            controls: &u,
                        },
                    )[b][a]
                })
            };
            // d_α A^{βα}, summed over α, one field per β
            let div_a = [
                &entry(0, 0).dx() + &entry(0, 1).dy(),
                &entry(1, 0).dx() + &entry(1, 1).dy(),
            ];
            let dp = [
                [ctx.costates.fields[i][0].dx(), ctx.costates.fields[i][0].dy()],
                [ctx.costates.fields[i][1].dx(), ctx.costates.fields[i][1].dy()],
            ];
            ScalarField::from_index_fn(grid, |k| {
                let (x, u, p) = ctx.values(k);
                let a = problem.matrix(
                    i,
                    &Eval {
                        t: grid.point(k),
                        states: &x,
                        controls: &u,
                    },
                );
                let own = ctx.d_state(k, i, |e| problem.matrix(i, e));
                let mut r = dh_dstate(&ctx, cost, k, i);
                for b in 0..2 {
                    r += dp[b][0][k] * a[b][0] + dp[b][1][k] * a[b][1];
                    r += p[i][b] * div_a[b][k];
                }
                r -= contract(p[i], &own, ctx.grad(i, k));
                r - coupling(&ctx, k, i, true)
            })
        })
        .collect())
}

/// How `∂/∂ū^a` is taken in [`stationarity_residual_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlDerivative {
    /// Coefficient extraction for control-affine problems, central difference otherwise.
    Auto,
    /// `F(ū^a = 1) − F(ū^a = 0)`; exact only for affine dependence.
    CoefficientExtraction,
    /// Central difference with step [`FD_STEP`].
    CentralDifference,
}

/// `∂H/∂ū^a − p^i_β ∂A_i^{βα}/∂ū^a ∂xⁱ/∂t^α`, one field per control.
pub fn stationarity_residual(
    problem: &ControlProblem,
    states: &[StateField],
    controls: &[ScalarField],
    costates: &CostateBundle,
    cost: &CostBundle,
) -> Result<Vec<ScalarField>> {
    stationarity_residual_with(problem, states, controls, costates, cost, ControlDerivative::Auto)
}

pub fn stationarity_residual_with(
    problem: &ControlProblem,
    states: &[StateField],
    controls: &[ScalarField],
    costates: &CostateBundle,
    cost: &CostBundle,
    mode: ControlDerivative,
) -> Result<Vec<ScalarField>> {
    let ctx = Context::new(problem, states, controls, costates)?;
    Ok((0..problem.n_controls())
        .map(|a| {
            ScalarField::from_index_fn(&ctx.grid, |k| {
                let (_, _, p) = ctx.values(k);
                let dh = ctx.d_control(k, a, mode, |e| hamiltonian(problem, cost, e, &p));
                let da: f64 = (0..problem.n_states())
                    .map(|i| {
                        let m = ctx.d_control(k, a, mode, |e| problem.matrix(i, e));
                        contract(p[i], &m, ctx.grad(i, k))
                    })
                    .sum();
                dh - da
            })
        })
        .collect())
}

/// States, controls and costates of a solution at one boundary point.
#[derive(Debug, Clone)]
pub struct PointSample {
    pub states: Vec<f64>,
    pub controls: Vec<f64>,
    pub costates: Vec<Vec2>,
}

/// `∂g/∂xⁱ − p^i_β A_i^{βα} n_α` at every sample, one list per state.
///
/// Everything is read from the closed-form `sampler`; no grid values are
/// extrapolated to the boundary.
pub fn transversality_residual(
    problem: &ControlProblem,
    cost: &CostBundle,
    sampler: impl Fn([f64; 2]) -> Result<PointSample>,
    samples: &[BoundarySample],
) -> Result<Vec<Vec<f64>>> {
    let n = problem.n_states();
    let mut out = vec![Vec::with_capacity(samples.len()); n];
    for s in samples {
        let v = sampler(s.point)?;
        let e = Eval {
            t: s.point,
            states: &v.states,
            controls: &v.controls,
        };
        let dg = cost.boundary_gradient(s.point, &v.states);
        for (i, row) in out.iter_mut().enumerate() {
            let a = problem.matrix(i, &e);
            row.push(dg[i] - contract(v.costates[i], &a, s.normal));
        }
    }
    Ok(out)
}

/// Norms of one necessary condition, serialized as
/// `{condition, max_norm, l2_norm, h}` or `{condition, max_norm, l2_norm, m}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub max_norm: f64,
    pub l2_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl ConditionReport {
    /// Node norms pooled over several residual fields.
    pub fn from_fields(condition: impl Into<String>, fields: &[ScalarField]) -> Self {
        let h = fields.first().map(|f| f.grid().h());
        Self {
            condition: condition.into(),
            max_norm: fields.iter().map(ScalarField::max_norm).fold(0.0, f64::max),
            l2_norm: fields.iter().map(|f| f.l2_norm().powi(2)).sum::<f64>().sqrt(),
            h,
            m: None,
        }
    }

    /// Sample norms pooled over several lists; the L2 norm uses the arc weight `2π/m`.
    pub fn from_samples(condition: impl Into<String>, lists: &[Vec<f64>]) -> Self {
        let m = lists.first().map_or(0, Vec::len);
        let weight = if m == 0 {
            0.0
        } else {
            2.0 * std::f64::consts::PI / m as f64
        };
        let all = lists.iter().flatten();
        Self {
            condition: condition.into(),
            max_norm: all.clone().map(|v| v.abs()).fold(0.0, f64::max),
            l2_norm: (all.map(|v| v * v).sum::<f64>() * weight).sqrt(),
            h: None,
            m: Some(m),
        }
    }
}
