//! Quasi-linear plane systems `Σ_i A_i(t, x, u) grad xⁱ = B(t, x, u)` and their
//! gradient split with canonical controls.
//!
//! Index conventions: `A^{βα}` is row β (equation), column α (derivative
//! direction). State indices are 0-based here; reports print them 1-based.
//! Per-state quantities (canonical controls, cross-triples) never sum over the
//! state index; the forward residual does, explicitly.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{ScalarField, StateField};
use crate::grid::DiscGrid;

pub type Mat2 = [[f64; 2]; 2];
pub type Vec2 = [f64; 2];

pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat_vec(a: &Mat2, v: Vec2) -> Vec2 {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Arguments of a coefficient evaluator at one point.
#[derive(Debug, Clone, Copy)]
pub struct Eval<'a> {
    pub t: [f64; 2],
    pub states: &'a [f64],
    pub controls: &'a [f64],
}

type MatrixFn = dyn Fn(usize, &Eval) -> Mat2 + Send + Sync;
type VectorFn = dyn Fn(&Eval) -> Vec2 + Send + Sync;

/// `n` coefficient matrices `A_i` and a right-hand side `B`, all evaluated
/// through callbacks of `(point, states, controls)`.
#[derive(Clone)]
pub struct QuasiLinearSystem {
    n_states: usize,
    n_controls: usize,
    matrix: Arc<MatrixFn>,
    rhs: Arc<VectorFn>,
}

impl fmt::Debug for QuasiLinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuasiLinearSystem")
            .field("n_states", &self.n_states)
            .field("n_controls", &self.n_controls)
            .finish_non_exhaustive()
    }
}

impl QuasiLinearSystem {
    /// `matrix(i, eval)` returns `A_i`; `rhs(eval)` returns `B`.
    pub fn new(
        n_states: usize,
        n_controls: usize,
        matrix: impl Fn(usize, &Eval) -> Mat2 + Send + Sync + 'static,
        rhs: impl Fn(&Eval) -> Vec2 + Send + Sync + 'static,
    ) -> Self {
        assert!(n_states >= 1, "a system needs at least one state");
        Self {
            n_states,
            n_controls,
            matrix: Arc::new(matrix),
            rhs: Arc::new(rhs),
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_controls(&self) -> usize {
        self.n_controls
    }

    pub fn matrix(&self, i: usize, e: &Eval) -> Mat2 {
        (self.matrix)(i, e)
    }

    pub fn rhs(&self, e: &Eval) -> Vec2 {
        (self.rhs)(e)
    }

    pub(crate) fn check_inputs(
        &self,
        states: &[StateField],
        controls: &[ScalarField],
    ) -> Result<Arc<DiscGrid>> {
        if states.len() != self.n_states {
            return Err(Error::InvalidInput(format!(
                "system has {} states, {} fields supplied",
                self.n_states,
                states.len()
            )));
        }
        if controls.len() != self.n_controls {
            return Err(Error::InvalidInput(format!(
                "system has {} controls, {} fields supplied",
                self.n_controls,
                controls.len()
            )));
        }
        let grid = states[0].grid().clone();
        let same = states.iter().all(|s| Arc::ptr_eq(s.grid(), &grid))
            && controls.iter().all(|c| Arc::ptr_eq(c.grid(), &grid));
        if !same {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        Ok(grid)
    }
}

/// State and control values gathered at one support point.
pub(crate) struct NodeValues {
    pub t: [f64; 2],
    pub states: Vec<f64>,
    pub controls: Vec<f64>,
}

impl NodeValues {
    pub fn gather(grid: &DiscGrid, states: &[StateField], controls: &[ScalarField], k: usize) -> Self {
        Self {
            t: grid.point(k),
            states: states.iter().map(|s| s.value(k)).collect(),
            controls: controls.iter().map(|c| c[k]).collect(),
        }
    }

    pub fn eval(&self) -> Eval<'_> {
        Eval {
            t: self.t,
            states: &self.states,
            controls: &self.controls,
        }
    }
}

/// `Σ_i A_i^{βα} ∂_α xⁱ − B^β` for β = 1, 2.
pub fn forward_residual(
    sys: &QuasiLinearSystem,
    states: &[StateField],
    controls: &[ScalarField],
) -> Result<[ScalarField; 2]> {
    let grid = sys.check_inputs(states, controls)?;
    let grads: Vec<[ScalarField; 2]> = states.iter().map(StateField::gradient).collect();
    let rows = |k: usize| {
        let node = NodeValues::gather(&grid, states, controls, k);
        let e = node.eval();
        let b = sys.rhs(&e);
        let mut r = [-b[0], -b[1]];
        for (i, g) in grads.iter().enumerate() {
            let a = sys.matrix(i, &e);
            let lhs = mat_vec(&a, [g[0][k], g[1][k]]);
            r[0] += lhs[0];
            r[1] += lhs[1];
        }
        r
    };
    Ok([
        ScalarField::from_index_fn(&grid, |k| rows(k)[0]),
        ScalarField::from_index_fn(&grid, |k| rows(k)[1]),
    ])
}

/// A system rewritten with one canonical control pair per state `i < n − 1`:
/// `A_i grad xⁱ = v_i` and `A_n grad xⁿ = B − Σ v_i`.
#[derive(Debug, Clone)]
pub struct SplitSystem {
    system: QuasiLinearSystem,
    states: Vec<StateField>,
    gradients: Vec<[ScalarField; 2]>,
    controls: Vec<ScalarField>,
    canonical: Vec<[ScalarField; 2]>,
    grid: Arc<DiscGrid>,
}

/// Computes `v_i = A_i(t, x, u) grad xⁱ` node-wise for `i < n − 1` (no sum over i).
pub fn split_controls(
    sys: &QuasiLinearSystem,
    states: &[StateField],
    controls: &[ScalarField],
) -> Result<SplitSystem> {
    let grid = sys.check_inputs(states, controls)?;
    let gradients: Vec<[ScalarField; 2]> = states.iter().map(StateField::gradient).collect();
    let canonical = (0..sys.n_states() - 1)
        .map(|i| {
            let v = |k: usize| {
                let node = NodeValues::gather(&grid, states, controls, k);
                let a = sys.matrix(i, &node.eval());
                mat_vec(&a, [gradients[i][0][k], gradients[i][1][k]])
            };
            [
                ScalarField::from_index_fn(&grid, |k| v(k)[0]),
                ScalarField::from_index_fn(&grid, |k| v(k)[1]),
            ]
        })
        .collect();
    Ok(SplitSystem {
        system: sys.clone(),
        states: states.to_vec(),
        gradients,
        controls: controls.to_vec(),
        canonical,
        grid,
    })
}

impl SplitSystem {
    /// A split system with externally supplied canonical controls.
    pub fn with_canonical(
        sys: &QuasiLinearSystem,
        states: &[StateField],
        controls: &[ScalarField],
        canonical: Vec<[ScalarField; 2]>,
    ) -> Result<Self> {
        let grid = sys.check_inputs(states, controls)?;
        if canonical.len() + 1 != sys.n_states() {
            return Err(Error::InvalidInput(format!(
                "{} canonical control pairs for {} states",
                canonical.len(),
                sys.n_states()
            )));
        }
        if canonical.iter().flatten().any(|c| !Arc::ptr_eq(c.grid(), &grid)) {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        Ok(Self {
            system: sys.clone(),
            gradients: states.iter().map(StateField::gradient).collect(),
            states: states.to_vec(),
            controls: controls.to_vec(),
            canonical,
            grid,
        })
    }

    pub fn system(&self) -> &QuasiLinearSystem {
        &self.system
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        &self.grid
    }

    pub fn states(&self) -> &[StateField] {
        &self.states
    }

    pub fn gradient(&self, i: usize) -> &[ScalarField; 2] {
        &self.gradients[i]
    }

    pub fn controls(&self) -> &[ScalarField] {
        &self.controls
    }

    /// Canonical control pair `v_i`, `i < n − 1`.
    pub fn canonical(&self, i: usize) -> &[ScalarField; 2] {
        &self.canonical[i]
    }

    pub fn n_states(&self) -> usize {
        self.system.n_states()
    }

    pub(crate) fn node(&self, k: usize) -> NodeValues {
        NodeValues::gather(&self.grid, &self.states, &self.controls, k)
    }

    /// Right-hand side of line `i`: `v_i` for `i < n − 1`, `B − Σ v_j` for the last.
    pub(crate) fn line_rhs(&self, i: usize, k: usize, e: &Eval) -> Vec2 {
        if i + 1 < self.n_states() {
            [self.canonical[i][0][k], self.canonical[i][1][k]]
        } else {
            let b = self.system.rhs(e);
            self.canonical
                .iter()
                .fold(b, |acc, v| [acc[0] - v[0][k], acc[1] - v[1][k]])
        }
    }

    /// Residual of every split line, `A_i grad xⁱ − rhs_i`.
    pub fn split_residual(&self) -> Vec<[ScalarField; 2]> {
        (0..self.n_states())
            .map(|i| {
                let r = |k: usize| {
                    let node = self.node(k);
                    let e = node.eval();
                    let a = self.system.matrix(i, &e);
                    let lhs = mat_vec(&a, [self.gradients[i][0][k], self.gradients[i][1][k]]);
                    let rhs = self.line_rhs(i, k, &e);
                    [lhs[0] - rhs[0], lhs[1] - rhs[1]]
                };
                [
                    ScalarField::from_index_fn(&self.grid, |k| r(k)[0]),
                    ScalarField::from_index_fn(&self.grid, |k| r(k)[1]),
                ]
            })
            .collect()
    }
}

/// Per-state cross product `(P_i, Q_i, R_i)` of the augmented coefficient rows.
#[derive(Debug, Clone)]
pub struct CrossTriple {
    pub p: ScalarField,
    pub q: ScalarField,
    pub r: ScalarField,
}

/// `(A¹² w² − A²² w¹, A²¹ w¹ − A¹¹ w², det A_i)` with `w` the right-hand side
/// of split line `i`.
///
/// The last line uses its own matrix `A_n` in all three components.
pub fn cross_triple(split: &SplitSystem, i: usize) -> Result<CrossTriple> {
    if i >= split.n_states() {
        return Err(Error::InvalidInput(format!(
            "state index {} out of range 1..={}",
            i + 1,
            split.n_states()
        )));
    }
    let grid = split.grid().clone();
    let triple = |k: usize| {
        let node = split.node(k);
        let e = node.eval();
        let a = split.system().matrix(i, &e);
        let w = split.line_rhs(i, k, &e);
        [
            a[0][1] * w[1] - a[1][1] * w[0],
            a[1][0] * w[0] - a[0][0] * w[1],
            det(&a),
        ]
    };
    Ok(CrossTriple {
        p: ScalarField::from_index_fn(&grid, |k| triple(k)[0]),
        q: ScalarField::from_index_fn(&grid, |k| triple(k)[1]),
        r: ScalarField::from_index_fn(&grid, |k| triple(k)[2]),
    })
}
