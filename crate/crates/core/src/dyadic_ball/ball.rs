use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use super::dyadic::{Dyadic, Rounding};
use super::BallError;

/// Significant bits kept in a radius; radii are always rounded up to this width.
pub const RADIUS_BITS: u64 = 16;

/// Absolute precision request: a result at precision `p` should carry
/// an error of at most `2^-p` beyond the propagated input radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub fn new(bits: i64) -> Result<Self, BallError> {
        if bits < 1 || bits > u32::MAX as i64 / 2 {
            return Err(BallError::InvalidPrecision(bits));
        }
        Ok(Precision(bits as u32))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn plus(self, k: u32) -> Self {
        Precision(self.0 + k)
    }
}

/// Closed interval `[center - radius, center + radius]` with dyadic endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ball {
    center: Dyadic,
    radius: Dyadic,
}

fn up(r: Dyadic) -> Dyadic {
    r.round_up_mantissa(RADIUS_BITS)
}

impl Ball {
    pub fn new(center: Dyadic, radius: Dyadic) -> Result<Self, BallError> {
        if radius.is_negative() {
            return Err(BallError::NegativeRadius);
        }
        Ok(Ball {
            center,
            radius: up(radius),
        })
    }

    pub fn exact(center: Dyadic) -> Self {
        Ball {
            center,
            radius: Dyadic::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::exact(Dyadic::from_int(v))
    }

    pub fn zero() -> Self {
        Self::exact(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Smallest ball with these endpoints (the center is kept exact).
    pub fn from_interval(lo: &Dyadic, hi: &Dyadic) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let center = (lo + hi).shl(-1);
        let radius = (hi - lo).shl(-1);
        Ball {
            center,
            radius: up(radius),
        }
    }

    /// Interval ball whose center is shortened to `bits` fractional bits.
    pub fn from_interval_rounded(lo: &Dyadic, hi: &Dyadic, bits: i64) -> Self {
        Self::from_interval(lo, hi).round_bits(bits)
    }

    pub fn center(&self) -> &Dyadic {
        &self.center
    }

    pub fn radius(&self) -> &Dyadic {
        &self.radius
    }

    pub fn lower(&self) -> Dyadic {
        &self.center - &self.radius
    }

    pub fn upper(&self) -> Dyadic {
        &self.center + &self.radius
    }

    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    /// Upper bound on `|x|` over the ball.
    pub fn mag(&self) -> Dyadic {
        &self.center.abs() + &self.radius
    }

    /// Lower bound on `|x|` over the ball.
    pub fn mig(&self) -> Dyadic {
        let d = &self.center.abs() - &self.radius;
        if d.is_negative() {
            Dyadic::zero()
        } else {
            d
        }
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        (&self.center - x).abs() <= self.radius
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        &(&self.center - &other.center).abs() + &other.radius <= self.radius
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        (&self.center - &other.center).abs() <= &self.radius + &other.radius
    }

    /// Largest distance between a point of `self` and `x`.
    pub fn max_dist(&self, x: &Dyadic) -> Dyadic {
        &(&self.center - x).abs() + &self.radius
    }

    pub fn scale(&self, d: &Dyadic) -> Ball {
        Ball {
            center: &self.center * d,
            radius: up(&self.radius * &d.abs()),
        }
    }

    pub fn shl(&self, k: i64) -> Ball {
        Ball {
            center: self.center.shl(k),
            radius: self.radius.shl(k),
        }
    }

    pub fn add_dyadic(&self, d: &Dyadic) -> Ball {
        Ball {
            center: &self.center + d,
            radius: self.radius.clone(),
        }
    }

    /// Grow the radius by `extra`.
    pub fn inflate(&self, extra: &Dyadic) -> Ball {
        Ball {
            center: self.center.clone(),
            radius: up(&self.radius + &extra.abs()),
        }
    }

    /// Shorten the center to a multiple of `2^-bits`, adding the rounding error to the radius.
    pub fn round_bits(&self, bits: i64) -> Ball {
        if self.center.exponent() >= -bits {
            return self.clone();
        }
        let c = self.center.round_to(bits, Rounding::Nearest);
        let err = (&c - &self.center).abs();
        Ball {
            center: c,
            radius: up(&self.radius + &err),
        }
    }

    pub fn round(&self, p: Precision) -> Ball {
        self.round_bits(p.bits() as i64)
    }

    pub fn sqr(&self) -> Ball {
        let m = self.mag();
        let n = self.mig();
        // x^2 over the ball lies in [mig^2, mag^2].
        let lo = &n * &n;
        let hi = &m * &m;
        Ball::narrower(self * self, Ball::from_interval(&lo, &hi))
    }

    /// Enclosure of `1/d` accurate to `2^-bits`.
    pub fn recip(d: &Dyadic, bits: i64) -> Result<Ball, BallError> {
        if d.is_zero() {
            return Err(BallError::DivisionByZero);
        }
        let one = Dyadic::one();
        let lo = Dyadic::div_rounded(&one, d, bits, Rounding::Floor);
        let hi = Dyadic::div_rounded(&one, d, bits, Rounding::Ceil);
        Ok(Ball::from_interval(&lo, &hi))
    }

    /// Tightest-width choice between two enclosures of the same quantity.
    pub fn narrower(a: Ball, b: Ball) -> Ball {
        if b.radius < a.radius {
            b
        } else {
            a
        }
    }

    /// Intersection of two enclosures of the same quantity; falls back to `self` if disjoint.
    pub fn intersect(&self, other: &Ball) -> Ball {
        let lo = self.lower().max(other.lower());
        let hi = self.upper().min(other.upper());
        if lo > hi {
            return self.clone();
        }
        let r = Ball::from_interval(&lo, &hi);
        Ball::narrower(self.clone(), r)
    }

    pub fn to_f64(&self) -> f64 {
        self.center.to_f64()
    }
}

impl Add for &Ball {
    type Output = Ball;
    fn add(self, rhs: &Ball) -> Ball {
        Ball {
            center: &self.center + &rhs.center,
            radius: up(&self.radius + &rhs.radius),
        }
    }
}

impl Sub for &Ball {
    type Output = Ball;
    fn sub(self, rhs: &Ball) -> Ball {
        Ball {
            center: &self.center - &rhs.center,
            radius: up(&self.radius + &rhs.radius),
        }
    }
}

impl Mul for &Ball {
    type Output = Ball;
    fn mul(self, rhs: &Ball) -> Ball {
        let r = &(&(&self.center.abs() * &rhs.radius) + &(&rhs.center.abs() * &self.radius))
            + &(&self.radius * &rhs.radius);
        Ball {
            center: &self.center * &rhs.center,
            radius: up(r),
        }
    }
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball {
            center: -&self.center,
            radius: self.radius.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Ball {
            type Output = Ball;
            fn $m(self, rhs: Ball) -> Ball {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        -&self
    }
}

impl From<Dyadic> for Ball {
    fn from(d: Dyadic) -> Self {
        Ball::exact(d)
    }
}

/// `center+/-radius` with both parts in dyadic text form.
impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+/-{}", self.center, self.radius)
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{} +/- {:e}]",
            self.center.to_f64(),
            self.radius.to_f64()
        )
    }
}

impl FromStr for Ball {
    type Err = BallError;

    fn from_str(s: &str) -> Result<Self, BallError> {
        match s.split_once("+/-") {
            Some((c, r)) => Ball::new(Dyadic::parse_loose(c)?, Dyadic::parse_loose(r)?),
            None => Ok(Ball::exact(Dyadic::parse_loose(s)?)),
        }
    }
}
