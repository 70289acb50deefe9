//! Exact dyadic numbers, balls over them, and certified elementary functions.

mod ball;
mod dyadic;
mod elementary;
mod scalar;

pub use ball::{Ball, Precision, RADIUS_BITS};
pub use dyadic::{Dyadic, Rounding};
pub use elementary::{exp_neg_ball, sech2_from_tanh, tanh_ball};
pub use scalar::{centered_eval, Dual, Scalar, VectorMap};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BallError {
    #[error("precision must be a positive bit count, got {0}")]
    InvalidPrecision(i64),
    #[error("argument ball contains negative values")]
    NegativeArgument,
    #[error("negative radius")]
    NegativeRadius,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse dyadic value `{0}`")]
    Parse(String),
}

/// Shorten the center of `b` to `p` fractional bits, growing the radius by the rounding error.
pub fn ball_round(b: &Ball, p: Precision) -> Ball {
    b.round(p)
}
