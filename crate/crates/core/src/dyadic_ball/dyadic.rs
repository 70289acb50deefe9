use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::BallError;

/// Exact number `mantissa * 2^exponent`.
///
/// Canonical form: the mantissa is odd, or the value is zero with exponent 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: k,
        }
    }

    /// `num / 2^k`.
    pub fn ratio(num: i64, k: u32) -> Self {
        Self::new(BigInt::from(num), -(k as i64))
    }

    /// Exact conversion from a finite double.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        Some(Self::new(BigInt::from(m) * sign, e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Multiply by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    /// `floor(log2 |x|)`, or `None` for zero.
    pub fn magnitude_exp(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.mantissa.bits() as i64 - 1 + self.exponent)
        }
    }

    /// Number of fractional bits needed to represent the value exactly.
    pub fn frac_bits(&self) -> u64 {
        if self.exponent >= 0 {
            0
        } else {
            (-self.exponent) as u64
        }
    }

    /// Value as an integer multiple of `2^-bits`, rounded with `mode`.
    pub fn scaled_int(&self, bits: i64, mode: Rounding) -> BigInt {
        let shift = self.exponent + bits;
        if shift >= 0 {
            return &self.mantissa << (shift as usize);
        }
        let s = (-shift) as u64;
        let (q, r) = self.mantissa.div_mod_floor(&(BigInt::one() << s));
        if r.is_zero() {
            return q;
        }
        match mode {
            Rounding::Floor => q,
            Rounding::Ceil => q + 1,
            Rounding::Nearest => {
                let half = BigInt::one() << (s - 1);
                if r >= half {
                    q + 1
                } else {
                    q
                }
            }
        }
    }

    /// Round to a multiple of `2^-bits`.
    pub fn round_to(&self, bits: i64, mode: Rounding) -> Self {
        if self.exponent >= -bits {
            return self.clone();
        }
        Self::new(self.scaled_int(bits, mode), -bits)
    }

    pub fn floor_to(&self, bits: i64) -> Self {
        self.round_to(bits, Rounding::Floor)
    }

    pub fn ceil_to(&self, bits: i64) -> Self {
        self.round_to(bits, Rounding::Ceil)
    }

    /// Round the mantissa up in magnitude to at most `width` significant bits.
    pub fn round_up_mantissa(&self, width: u64) -> Self {
        let bits = self.mantissa.bits();
        if bits <= width {
            return self.clone();
        }
        let drop = (bits - width) as i64;
        let mode = if self.is_negative() {
            Rounding::Floor
        } else {
            Rounding::Ceil
        };
        Self::new(
            self.scaled_int(-(self.exponent + drop), mode),
            self.exponent + drop,
        )
    }

    pub fn floor_int(&self) -> BigInt {
        self.scaled_int(0, Rounding::Floor)
    }

    pub fn nearest_int(&self) -> BigInt {
        self.scaled_int(0, Rounding::Nearest)
    }

    pub fn to_bigint_exact(&self) -> Option<BigInt> {
        if self.exponent >= 0 {
            Some(&self.mantissa << (self.exponent as usize))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let drop = (bits - 60).max(0);
        let m = (&self.mantissa >> drop as usize)
            .to_f64()
            .unwrap_or(f64::NAN);
        let e = self.exponent + drop;
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        let mut v = m;
        let mut rem = e;
        while rem != 0 {
            let step = rem.clamp(-1000, 1000);
            v *= 2f64.powi(step as i32);
            rem -= step;
        }
        v
    }

    /// `a / b` rounded to a multiple of `2^-bits` in direction `mode`.
    pub fn div_rounded(a: &Self, b: &Self, bits: i64, mode: Rounding) -> Self {
        assert!(!b.is_zero(), "division by zero");
        // a/b = (ma/mb) 2^(ea-eb); we need floor/ceil of (ma * 2^(ea-eb+bits)) / mb.
        let shift = a.exponent - b.exponent + bits;
        let (num, den) = if shift >= 0 {
            (&a.mantissa << (shift as usize), b.mantissa.clone())
        } else {
            (a.mantissa.clone(), &b.mantissa << ((-shift) as usize))
        };
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num, den)
        };
        let (q, r) = num.div_mod_floor(&den);
        let q = match mode {
            Rounding::Floor => q,
            Rounding::Ceil => {
                if r.is_zero() {
                    q
                } else {
                    q + 1
                }
            }
            Rounding::Nearest => {
                if (&r << 1usize) >= den {
                    q + 1
                } else {
                    q
                }
            }
        };
        Self::new(q, -bits)
    }

    /// Parse decimal text such as `-3`, `0.375`, `1/64`, or the hex form `+3p-2`.
    /// Only values with a finite binary expansion are accepted.
    pub fn parse_loose(s: &str) -> Result<Self, BallError> {
        let t = s.trim();
        if t.contains('p') {
            return t.parse();
        }
        let bad = || BallError::Parse(s.to_string());
        if let Some((n, d)) = t.split_once('/') {
            let n = Self::parse_loose(n)?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if !d.is_positive() || d.trailing_zeros() != Some(d.bits() - 1) {
                return Err(bad());
            }
            return Ok(n.shl(-((d.bits() - 1) as i64)));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
        if ip.is_empty() && fp.is_empty() {
            return Err(bad());
        }
        let digits = format!("{ip}{fp}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        // num / 10^k is dyadic iff 5^k divides num.
        let five_k = BigInt::from(5u32).pow(fp.len() as u32);
        let (q, r) = num.div_rem(&five_k);
        if !r.is_zero() {
            return Err(bad());
        }
        let v = Self::new(q, -(fp.len() as i64));
        Ok(if neg { -v } else { v })
    }
}

/// Direction used when shortening a dyadic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
    Nearest,
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Same sign: compare magnitudes first by leading bit position.
        let ma = self.magnitude_exp().unwrap();
        let mb = other.magnitude_exp().unwrap();
        if ma != mb {
            let o = ma.cmp(&mb);
            return if sa > 0 { o } else { o.reverse() };
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << ((self.exponent - e) as usize);
        let b = &other.mantissa << ((other.exponent - e) as usize);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << ((self.exponent - e) as usize);
        let b = &rhs.mantissa << ((rhs.exponent - e) as usize);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

/// Text form `<sign><hex mantissa>p<decimal exponent>`, e.g. `+3p-2` is 3/4.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_negative() { '-' } else { '+' };
        write!(f, "{sign}{:x}p{}", self.mantissa.abs(), self.exponent)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{:e})", self, self.to_f64())
    }
}

impl FromStr for Dyadic {
    type Err = BallError;

    fn from_str(s: &str) -> Result<Self, BallError> {
        let bad = || BallError::Parse(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'+') => (false, &t[1..]),
            Some(b'-') => (true, &t[1..]),
            _ => return Err(bad()),
        };
        let (m, e) = body.split_once('p').ok_or_else(bad)?;
        if m.is_empty() || !m.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(bad());
        }
        let m = BigInt::parse_bytes(m.as_bytes(), 16).ok_or_else(bad)?;
        let e: i64 = e.parse().map_err(|_| bad())?;
        let v = Dyadic::new(m, e);
        Ok(if neg { -v } else { v })
    }
}
