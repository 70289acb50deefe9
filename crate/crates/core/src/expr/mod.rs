//! Tanh-polynomial expressions: variables, integer constants, `+`, `-`, `*` and `tanh`.

mod linear;
mod sexpr;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::dyadic_ball::{Dyadic, Precision, Scalar};

pub use linear::{decompose_linear, LinearDecomposition};
pub use sexpr::parse_sexpr;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("environment has {got} values, expression needs {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable {var} out of range for arity {arity}")]
    VarOutOfRange { var: usize, arity: usize },
    #[error("component {component} is not essentially linear: term `{term}` has degree {degree}")]
    NotEssentiallyLinear {
        component: usize,
        term: String,
        degree: u32,
    },
    #[error("expression vector must be nonempty")]
    Empty,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(usize),
    Int(BigInt),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Tanh(Box<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn int(v: impl Into<BigInt>) -> Self {
        Expr::Int(v.into())
    }

    pub fn add(a: Expr, b: Expr) -> Self {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Self {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn tanh(a: Expr) -> Self {
        Expr::Tanh(Box::new(a))
    }

    pub fn neg(a: Expr) -> Self {
        Expr::sub(Expr::int(0), a)
    }

    /// Sum of all items, `0` when empty.
    pub fn sum(items: impl IntoIterator<Item = Expr>) -> Self {
        items
            .into_iter()
            .reduce(Expr::add)
            .unwrap_or_else(|| Expr::int(0))
    }

    /// Product of all items, `1` when empty.
    pub fn product(items: impl IntoIterator<Item = Expr>) -> Self {
        items
            .into_iter()
            .reduce(Expr::mul)
            .unwrap_or_else(|| Expr::int(1))
    }

    /// One more than the largest variable index (0 for closed expressions).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Var(i) => i + 1,
            Expr::Int(_) => 0,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.arity().max(b.arity()),
            Expr::Tanh(a) => a.arity(),
        }
    }

    /// Essential degree in `v`: anything below a `tanh` counts as degree 0.
    pub fn degree(&self, v: usize) -> u32 {
        match self {
            Expr::Var(i) => u32::from(*i == v),
            Expr::Int(_) => 0,
            Expr::Add(a, b) | Expr::Sub(a, b) => a.degree(v).max(b.degree(v)),
            Expr::Mul(a, b) => a.degree(v) + b.degree(v),
            Expr::Tanh(_) => 0,
        }
    }

    /// Degree in `v` for an expression over `arity` variables.
    pub fn degree_checked(&self, v: usize, arity: usize) -> Result<u32, ExprError> {
        if v >= arity {
            return Err(ExprError::VarOutOfRange { var: v, arity });
        }
        Ok(self.degree(v))
    }

    pub fn is_essentially_constant(&self, vars: &[usize]) -> bool {
        vars.iter().all(|&v| self.degree(v) == 0)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Int(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Tanh(a) => a.collect_vars(out),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Int(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => 1 + a.size() + b.size(),
            Expr::Tanh(a) => 1 + a.size(),
        }
    }

    /// Certified evaluation. Products and `tanh` results are rounded at `p + 4` bits.
    pub fn eval<T: Scalar>(&self, env: &[T], p: Precision) -> Result<T, ExprError> {
        let arity = self.arity();
        if env.len() < arity {
            return Err(ExprError::ArityMismatch {
                expected: arity,
                got: env.len(),
            });
        }
        Ok(self.eval_unchecked(env, p))
    }

    pub(crate) fn eval_unchecked<T: Scalar>(&self, env: &[T], p: Precision) -> T {
        let rp = p.plus(4);
        match self {
            Expr::Var(i) => env[*i].clone(),
            Expr::Int(v) => T::from_dyadic(Dyadic::from_bigint(v.clone())),
            Expr::Add(a, b) => a.eval_unchecked(env, p).add(&b.eval_unchecked(env, p)),
            Expr::Sub(a, b) => a.eval_unchecked(env, p).sub(&b.eval_unchecked(env, p)),
            Expr::Mul(a, b) => {
                let (x, y) = (a.eval_unchecked(env, p), b.eval_unchecked(env, p));
                x.mul(&y).round(rp)
            }
            Expr::Tanh(a) => a.eval_unchecked(env, p).tanh(rp),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "(var {i})"),
            Expr::Int(v) => write!(f, "(int {v})"),
            Expr::Add(a, b) => write!(f, "(add {a} {b})"),
            Expr::Sub(a, b) => write!(f, "(sub {a} {b})"),
            Expr::Mul(a, b) => write!(f, "(mul {a} {b})"),
            Expr::Tanh(a) => write!(f, "(tanh {a})"),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, ExprError> {
        parse_sexpr(s)
    }
}

/// Expressions sharing one variable environment of a declared arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprVec {
    components: Vec<Expr>,
    arity: usize,
}

impl ExprVec {
    pub fn new(components: Vec<Expr>, arity: usize) -> Result<Self, ExprError> {
        if components.is_empty() {
            return Err(ExprError::Empty);
        }
        for c in &components {
            if c.arity() > arity {
                return Err(ExprError::VarOutOfRange {
                    var: c.arity() - 1,
                    arity,
                });
            }
        }
        Ok(ExprVec { components, arity })
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn degree(&self, component: usize, v: usize) -> Result<u32, ExprError> {
        self.components[component].degree_checked(v, self.arity)
    }

    pub fn eval<T: Scalar>(&self, env: &[T], p: Precision) -> Result<Vec<T>, ExprError> {
        if env.len() != self.arity {
            return Err(ExprError::ArityMismatch {
                expected: self.arity,
                got: env.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.eval_unchecked(env, p))
            .collect())
    }
}
