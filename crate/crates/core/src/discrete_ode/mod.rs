//! Discrete calculus and solvers for linear length-ODEs and plain linear recurrences.

mod calculus;
mod file;
mod solve;
mod stability;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::dyadic_ball::{Ball, Dyadic, Precision, Scalar};
use crate::expr::{decompose_linear, Expr, ExprError, ExprVec};

pub use calculus::{discrete_derivative, discrete_integral, falling_exponential, Matrix};
pub use file::parse_ode_file;
pub use solve::{
    bit_length, magnitude_bound_bits, precision_schedule, solve_certified, solve_explicit,
    solve_explicit_scheduled, solve_length, solve_recurrence, trajectory,
};
pub use stability::{stability_probe, StabilityBudget, StabilityReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OdeError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OdeKind {
    /// Derivation along the length: step `t` moves from `x = 2^t - 1` to `x = 2^(t+1) - 1`.
    LengthDerivation,
    /// Ordinary derivation: step `t` moves from `x = t` to `x = t + 1`.
    PlainDerivation,
}

/// Position of one update inside an iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepIndex {
    pub t: u64,
    pub kind: OdeKind,
}

impl StepIndex {
    pub fn new(t: u64, kind: OdeKind) -> Self {
        StepIndex { t, kind }
    }

    /// Value of the independent variable at which this update reads its inputs.
    pub fn counter(&self) -> Dyadic {
        match self.kind {
            OdeKind::LengthDerivation => &Dyadic::pow2(self.t as i64) - &Dyadic::one(),
            OdeKind::PlainDerivation => Dyadic::from_int(self.t as i64),
        }
    }
}

/// A recurrence `f(t+1) = step(f(t), h(t), t, y)` with `f(0) = initial(y)`.
pub trait DiscreteOde<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    fn initial(&self, y: &[T], p: Precision) -> Vec<T>;

    /// Auxiliary values `h` fed to the update at `step`.
    fn auxiliary(&self, _step: &StepIndex, _p: Precision) -> Vec<Ball> {
        Vec::new()
    }

    fn step(&self, f: &[T], aux: &[Ball], step: &StepIndex, y: &[T], p: Precision) -> Vec<T>;
}

pub type AuxFn = dyn Fn(&StepIndex, Precision) -> Vec<Ball> + Send + Sync;

/// Linear system `f <- f + A f + B`, where `A` and `B` are tanh-polynomial expressions
/// over the environment `[f.., h.., counter, y..]`, essentially constant in `f`.
#[derive(Clone)]
pub struct LinearOdeSystem {
    dim: usize,
    n_aux: usize,
    n_y: usize,
    a: Vec<Vec<Expr>>,
    b: Vec<Expr>,
    init: ExprVec,
    aux: Arc<AuxFn>,
}

impl fmt::Debug for LinearOdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearOdeSystem")
            .field("dim", &self.dim)
            .field("n_aux", &self.n_aux)
            .field("n_y", &self.n_y)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("init", &self.init)
            .finish()
    }
}

impl LinearOdeSystem {
    /// `init` is evaluated over the `y` slots only; `aux` must return `n_aux` balls.
    pub fn new(
        a: Vec<Vec<Expr>>,
        b: Vec<Expr>,
        init: ExprVec,
        n_aux: usize,
        n_y: usize,
        aux: Arc<AuxFn>,
    ) -> Result<Self, OdeError> {
        let dim = b.len();
        if dim == 0 {
            return Err(OdeError::Dimension("empty system".into()));
        }
        if a.len() != dim || a.iter().any(|r| r.len() != dim) {
            return Err(OdeError::Dimension(format!("A must be {dim}x{dim}")));
        }
        if init.len() != dim {
            return Err(OdeError::Dimension(format!(
                "initial value has {} components, expected {dim}",
                init.len()
            )));
        }
        if init.arity() != n_y {
            return Err(OdeError::Dimension(format!(
                "initial value has arity {}, expected {n_y}",
                init.arity()
            )));
        }
        let arity = dim + n_aux + 1 + n_y;
        let f_vars: Vec<usize> = (0..dim).collect();
        for (i, e) in a.iter().flatten().chain(b.iter()).enumerate() {
            if e.arity() > arity {
                return Err(ExprError::VarOutOfRange {
                    var: e.arity() - 1,
                    arity,
                }
                .into());
            }
            if !e.is_essentially_constant(&f_vars) {
                return Err(ExprError::NotEssentiallyLinear {
                    component: i,
                    term: e.to_string(),
                    degree: f_vars.iter().map(|&v| e.degree(v)).max().unwrap_or(0),
                }
                .into());
            }
        }
        Ok(LinearOdeSystem {
            dim,
            n_aux,
            n_y,
            a,
            b,
            init,
            aux,
        })
    }

    /// Build from an update `u` with `f <- f + u`, splitting `u = A f + B`.
    pub fn from_update(
        u: ExprVec,
        init: ExprVec,
        n_aux: usize,
        n_y: usize,
        aux: Arc<AuxFn>,
    ) -> Result<Self, OdeError> {
        let dim = u.len();
        let f_vars: Vec<usize> = (0..dim).collect();
        let dec = decompose_linear(&u, &f_vars)?;
        Self::new(dec.a, dec.b, init, n_aux, n_y, aux)
    }

    pub fn n_aux(&self) -> usize {
        self.n_aux
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn a(&self) -> &[Vec<Expr>] {
        &self.a
    }

    pub fn b(&self) -> &[Expr] {
        &self.b
    }

    fn env<T: Scalar>(&self, f: &[T], aux: &[Ball], step: &StepIndex, y: &[T]) -> Vec<T> {
        assert_eq!(aux.len(), self.n_aux, "auxiliary arity");
        assert_eq!(y.len(), self.n_y, "parameter arity");
        let mut env = Vec::with_capacity(self.dim + self.n_aux + 1 + self.n_y);
        env.extend(f.iter().cloned());
        env.extend(aux.iter().cloned().map(T::constant));
        env.push(T::from_dyadic(step.counter()));
        env.extend(y.iter().cloned());
        env
    }

    /// `A` and `B` evaluated at the given state.
    pub fn linear_parts<T: Scalar>(
        &self,
        f: &[T],
        aux: &[Ball],
        step: &StepIndex,
        y: &[T],
        p: Precision,
    ) -> (Matrix<T>, Vec<T>) {
        let env = self.env(f, aux, step, y);
        let a = self
            .a
            .iter()
            .map(|row| row.iter().map(|e| e.eval_unchecked(&env, p)).collect())
            .collect();
        let b = self.b.iter().map(|e| e.eval_unchecked(&env, p)).collect();
        (Matrix::from_rows(a), b)
    }
}

impl<T: Scalar> DiscreteOde<T> for LinearOdeSystem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn initial(&self, y: &[T], p: Precision) -> Vec<T> {
        self.init
            .eval(y, p)
            .expect("initial arity checked at construction")
    }

    fn auxiliary(&self, step: &StepIndex, p: Precision) -> Vec<Ball> {
        (self.aux)(step, p)
    }

    fn step(&self, f: &[T], aux: &[Ball], step: &StepIndex, y: &[T], p: Precision) -> Vec<T> {
        let (a, b) = self.linear_parts(f, aux, step, y, p);
        let af = a.mul_vec(f);
        f.iter()
            .zip(af.iter().zip(&b))
            .map(|(fi, (ai, bi))| fi.add(&ai.add(bi)).round(p.plus(4)))
            .collect()
    }
}
