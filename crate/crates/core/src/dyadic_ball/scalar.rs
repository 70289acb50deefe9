use std::fmt::Debug;

use super::ball::{Ball, Precision};
use super::dyadic::Dyadic;
use super::elementary::{sech2_from_tanh, tanh_ball};

/// Numeric domain for the tanh-polynomial evaluators.
///
/// Implemented by [`Ball`] (plain interval evaluation) and [`Dual`]
/// (interval evaluation with an enclosed gradient).
pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    fn constant(b: Ball) -> Self;
    fn value(&self) -> &Ball;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, d: &Dyadic) -> Self;
    fn mul_ball(&self, b: &Ball) -> Self;
    fn add_dyadic(&self, d: &Dyadic) -> Self;
    fn tanh(&self, p: Precision) -> Self;
    fn round(&self, p: Precision) -> Self;

    fn from_dyadic(d: Dyadic) -> Self {
        Self::constant(Ball::exact(d))
    }

    fn from_int(v: i64) -> Self {
        Self::from_dyadic(Dyadic::from_int(v))
    }

    fn shl(&self, k: i64) -> Self {
        self.scale(&Dyadic::pow2(k))
    }
}

impl Scalar for Ball {
    fn constant(b: Ball) -> Self {
        b
    }
    fn value(&self) -> &Ball {
        self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, d: &Dyadic) -> Self {
        Ball::scale(self, d)
    }
    fn mul_ball(&self, b: &Ball) -> Self {
        self * b
    }
    fn add_dyadic(&self, d: &Dyadic) -> Self {
        Ball::add_dyadic(self, d)
    }
    fn tanh(&self, p: Precision) -> Self {
        tanh_ball(self, p)
    }
    fn round(&self, p: Precision) -> Self {
        Ball::round(self, p)
    }
    fn shl(&self, k: i64) -> Self {
        Ball::shl(self, k)
    }
}

/// First-order forward-mode value: a ball and an enclosure of its gradient
/// with respect to the seeded input variables, valid over the whole input box.
#[derive(Clone, Debug)]
pub struct Dual {
    pub value: Ball,
    pub grad: Vec<Ball>,
}

impl Dual {
    /// The `i`-th of `n` input variables.
    pub fn variable(value: Ball, i: usize, n: usize) -> Self {
        let mut grad = vec![Ball::zero(); n];
        grad[i] = Ball::one();
        Dual { value, grad }
    }

    fn zip(&self, o: &Self, f: impl Fn(&Ball, &Ball) -> Ball) -> Vec<Ball> {
        let n = self.grad.len().max(o.grad.len());
        let z = Ball::zero();
        (0..n)
            .map(|i| f(self.grad.get(i).unwrap_or(&z), o.grad.get(i).unwrap_or(&z)))
            .collect()
    }

    fn map_grad(&self, f: impl Fn(&Ball) -> Ball) -> Vec<Ball> {
        self.grad.iter().map(f).collect()
    }
}

impl Scalar for Dual {
    fn constant(b: Ball) -> Self {
        Dual {
            value: b,
            grad: Vec::new(),
        }
    }
    fn value(&self) -> &Ball {
        &self.value
    }
    fn add(&self, o: &Self) -> Self {
        Dual {
            value: &self.value + &o.value,
            grad: self.zip(o, |a, b| a + b),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Dual {
            value: &self.value - &o.value,
            grad: self.zip(o, |a, b| a - b),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        Dual {
            value: &self.value * &o.value,
            grad: self.zip(o, |a, b| &(&self.value * b) + &(&o.value * a)),
        }
    }
    fn neg(&self) -> Self {
        Dual {
            value: -&self.value,
            grad: self.map_grad(|g| -g),
        }
    }
    fn scale(&self, d: &Dyadic) -> Self {
        Dual {
            value: self.value.scale(d),
            grad: self.map_grad(|g| g.scale(d)),
        }
    }
    fn mul_ball(&self, b: &Ball) -> Self {
        Dual {
            value: &self.value * b,
            grad: self.map_grad(|g| g * b),
        }
    }
    fn add_dyadic(&self, d: &Dyadic) -> Self {
        Dual {
            value: self.value.add_dyadic(d),
            grad: self.grad.clone(),
        }
    }
    fn tanh(&self, p: Precision) -> Self {
        let t = tanh_ball(&self.value, p);
        if self.grad.is_empty() {
            return Dual::constant(t);
        }
        let d = sech2_from_tanh(&t).round(p.plus(8));
        Dual {
            grad: self.map_grad(|g| (&d * g).round(p.plus(8))),
            value: t,
        }
    }
    fn round(&self, p: Precision) -> Self {
        Dual {
            value: self.value.round(p),
            grad: self.map_grad(|g| g.round(p)),
        }
    }
    fn shl(&self, k: i64) -> Self {
        Dual {
            value: self.value.shl(k),
            grad: self.map_grad(|g| g.shl(k)),
        }
    }
}

/// A map `R^n -> R^k` written once and evaluated over any [`Scalar`].
pub trait VectorMap: Sync {
    fn eval<T: Scalar>(&self, x: &[T]) -> Vec<T>;
}

/// Mean-value enclosure `f(c) + J(X)(X - c)`, intersected with the direct enclosure.
///
/// Direct interval evaluation of deep compositions overestimates because each
/// layer loses the correlation between its inputs; the centered form keeps the
/// output radius proportional to the input radius.
pub fn centered_eval<F: VectorMap>(f: &F, x: &[Ball]) -> Vec<Ball> {
    let n = x.len();
    let centers: Vec<Ball> = x.iter().map(|b| Ball::exact(b.center().clone())).collect();
    let fc: Vec<Ball> = f.eval(&centers);
    if x.iter().all(Ball::is_exact) {
        return fc;
    }
    let duals: Vec<Dual> = x
        .iter()
        .enumerate()
        .map(|(i, b)| Dual::variable(b.clone(), i, n))
        .collect();
    let fd: Vec<Dual> = f.eval(&duals);
    fc.into_iter()
        .zip(fd)
        .map(|(c, d)| {
            let mut acc = c;
            for (j, g) in d.grad.iter().enumerate() {
                let dx = Ball::new(Dyadic::zero(), x[j].radius().clone()).expect("radius");
                acc = &acc + &(g * &dx);
            }
            acc.intersect(&d.value)
        })
        .collect()
}
