//! Certified tanh constructions: smooth ramps, fractional part and floor
//! approximations, parity, selection gates and finite lookup tables.
//!
//! Every function is generic over [`Scalar`], so the same code evaluates on
//! plain balls and on [`crate::dyadic_ball::Dual`] numbers. The integer `m`
//! is the accuracy exponent: on the stated validity band the exact value of
//! the constructed tanh expression is within `2^-m` of the target, so the
//! returned enclosure satisfies `|center - target| <= 2^-m + radius`.
//! Outside the band the result is still a sound enclosure of the expression.

mod registry;
mod select;
mod xi;

use thiserror::Error;

use crate::dyadic_ball::{Ball, Dyadic, Precision, Scalar};

pub use registry::{CertifiedFn, Sample, NAMES};
pub use select::{send_pairs_tanh, send_tanh, tt_tanh, SendTable};
pub use xi::{
    div2, lambda_fn, mod2, sigma1, sigma2, xi, xi1, xi2, xi_composed, xi_prime, xi_prime_composed,
    xi_prime_system,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunError {
    #[error("empty ramp: need a < b, got a = {a}, b = {b}")]
    EmptyRamp { a: Dyadic, b: Dyadic },
    #[error("empty table")]
    EmptyTable,
    #[error("duplicate key {0} in table")]
    DuplicateKey(i64),
    #[error("second coordinates must be 0..N-1 without gaps; missing {0}")]
    NonContiguous(i64),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("{0}")]
    InvalidArgument(String),
}

/// Working precision that keeps rounding far below `2^-m` for arguments of size `2^n`.
pub fn default_precision(m: u32, n: u32) -> Precision {
    Precision::new(i64::from(m) + 2 * i64::from(n) + 24).expect("positive precision")
}

/// `x (1 + tanh(2^k x)) / 2`, a smooth `max(0, x)` with error at most `2^-(k+1)`.
fn ramp<T: Scalar>(x: &T, k: i64, p: Precision) -> T {
    let t = x.shl(k).tanh(p).add_dyadic(&Dyadic::one());
    x.mul(&t).shl(-1).round(p)
}

/// `x Y(x, 2^(m+2))` with `Y(x, K) = (1 + tanh(K x)) / 2`; within `2^-m` of `max(0, x)`.
pub fn relu_approx<T: Scalar>(m: u32, x: &T, p: Precision) -> T {
    ramp(x, i64::from(m) + 2, p)
}

/// Smallest integer `c` with `1 / d <= 2^c`, for `d > 0`.
pub(crate) fn inverse_exponent(d: &Dyadic) -> i64 {
    -d.magnitude_exp().expect("positive width")
}

/// Uniform approximation of the clamped ramp `sig(a, b, x)`, accurate to `2^-m`.
pub fn sigtanh<T: Scalar>(
    m: i64,
    a: &Dyadic,
    b: &Dyadic,
    x: &T,
    p: Precision,
) -> Result<T, FunError> {
    if a >= b {
        return Err(FunError::EmptyRamp {
            a: a.clone(),
            b: b.clone(),
        });
    }
    Ok(sigtanh_unchecked(m, a, b, x, p))
}

pub(crate) fn sigtanh_unchecked<T: Scalar>(
    m: i64,
    a: &Dyadic,
    b: &Dyadic,
    x: &T,
    p: Precision,
) -> T {
    let width = b - a;
    let c = inverse_exponent(&width);
    let k = m + 1 + c;
    let diff = ramp(&x.add_dyadic(&-a), k, p).sub(&ramp(&x.add_dyadic(&-b), k, p));
    let scaled = if width.mantissa() == &num_bigint::BigInt::from(1) {
        diff.shl(c)
    } else {
        let inv = Ball::recip(&width, i64::from(p.bits()) + 8).expect("positive width");
        diff.mul_ball(&inv)
    };
    scaled.round(p)
}

/// Exact `sig(a, b, x) = clamp((x - a) / (b - a), 0, 1)` as a ball (exact when `b - a` is a power of two).
pub fn sig_exact(a: &Dyadic, b: &Dyadic, x: &Dyadic, bits: i64) -> Ball {
    if x <= a {
        Ball::zero()
    } else if x >= b {
        Ball::one()
    } else {
        let inv = Ball::recip(&(b - a), bits).expect("positive width");
        &Ball::exact(x - a) * &inv
    }
}

/// Fractional part of an exact dyadic.
pub fn frac(x: &Dyadic) -> Dyadic {
    x - &Dyadic::from_bigint(x.floor_int())
}

/// `|center - target| + target radius <= 2^-m + radius`.
pub fn within_bound(result: &Ball, target: &Ball, m: i64) -> bool {
    let dev = &(result.center() - target.center()).abs() + target.radius();
    dev <= &Dyadic::pow2(-m) + result.radius()
}
