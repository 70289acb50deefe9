use num_bigint::BigInt;
use num_integer::Integer;

use super::select::{tt_tanh, SendTable};
use super::xi::{div2, lambda_fn, mod2, sigma1, sigma2, xi, xi1, xi2};
use super::{default_precision, relu_approx, sig_exact, sigtanh_unchecked, within_bound, FunError};
use crate::dyadic_ball::{Ball, Dyadic, Precision};

/// A constructed function together with its exact target on its validity band.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifiedFn {
    Relu,
    Sigtanh {
        a: Dyadic,
        b: Dyadic,
    },
    Xi,
    Xi1,
    Xi2,
    Sigma1,
    Sigma2,
    Lambda,
    Mod2,
    Div2,
    /// Gate with the selector as the swept argument and a fixed `ell`.
    TtTanh {
        ell: Dyadic,
    },
    SendTanh(SendTable),
}

/// One evaluated grid point.
#[derive(Clone, Debug)]
pub struct Sample {
    pub x: Dyadic,
    pub value: Ball,
    /// Exact target, when `x` is in the validity band.
    pub target: Option<Ball>,
    /// `Some(bound holds)` inside the band.
    pub pass: Option<bool>,
}

pub const NAMES: &[&str] = &[
    "relu",
    "sigtanh",
    "xi",
    "xi1",
    "xi2",
    "sigma1",
    "sigma2",
    "lambda",
    "mod2",
    "div2",
    "tt-tanh",
    "send-tanh",
];

fn int(k: &BigInt) -> Dyadic {
    Dyadic::from_bigint(k.clone())
}

fn in_range(k: &BigInt, lo: i64, hi: i64) -> bool {
    *k >= BigInt::from(lo) && *k <= BigInt::from(hi)
}

/// Anchor `k` with `x - k` in `[lo, hi]`, the band being shorter than one unit.
fn anchor(x: &Dyadic, lo: &Dyadic, hi: &Dyadic) -> Option<BigInt> {
    let k = (x - lo).floor_int();
    let off = x - &int(&k);
    (&off >= lo && &off <= hi).then_some(k)
}

impl CertifiedFn {
    /// Instance with default parameters: ramp on `[1/2, 3/4]`, `ell = 1/2`, table `{0 -> 0, 1 -> 1}`.
    pub fn from_name(name: &str) -> Result<Self, FunError> {
        Ok(match name {
            "relu" => CertifiedFn::Relu,
            "sigtanh" => CertifiedFn::Sigtanh {
                a: Dyadic::ratio(1, 1),
                b: Dyadic::ratio(3, 2),
            },
            "xi" => CertifiedFn::Xi,
            "xi1" => CertifiedFn::Xi1,
            "xi2" => CertifiedFn::Xi2,
            "sigma1" => CertifiedFn::Sigma1,
            "sigma2" => CertifiedFn::Sigma2,
            "lambda" => CertifiedFn::Lambda,
            "mod2" => CertifiedFn::Mod2,
            "div2" => CertifiedFn::Div2,
            "tt-tanh" => CertifiedFn::TtTanh {
                ell: Dyadic::ratio(1, 1),
            },
            "send-tanh" => {
                CertifiedFn::SendTanh(SendTable::new([(0, Dyadic::zero()), (1, Dyadic::one())])?)
            }
            other => return Err(FunError::UnknownFunction(other.to_string())),
        })
    }

    pub fn sigtanh(a: Dyadic, b: Dyadic) -> Result<Self, FunError> {
        if a >= b {
            return Err(FunError::EmptyRamp { a, b });
        }
        Ok(CertifiedFn::Sigtanh { a, b })
    }

    pub fn tt_tanh(ell: Dyadic) -> Result<Self, FunError> {
        if ell.is_negative() || ell > Dyadic::one() {
            return Err(FunError::InvalidArgument(format!(
                "ell = {ell} outside [0, 1]"
            )));
        }
        Ok(CertifiedFn::TtTanh { ell })
    }

    pub fn name(&self) -> &'static str {
        match self {
            CertifiedFn::Relu => "relu",
            CertifiedFn::Sigtanh { .. } => "sigtanh",
            CertifiedFn::Xi => "xi",
            CertifiedFn::Xi1 => "xi1",
            CertifiedFn::Xi2 => "xi2",
            CertifiedFn::Sigma1 => "sigma1",
            CertifiedFn::Sigma2 => "sigma2",
            CertifiedFn::Lambda => "lambda",
            CertifiedFn::Mod2 => "mod2",
            CertifiedFn::Div2 => "div2",
            CertifiedFn::TtTanh { .. } => "tt-tanh",
            CertifiedFn::SendTanh(_) => "send-tanh",
        }
    }

    pub fn eval(&self, m: u32, n: u32, x: &Ball, p: Precision) -> Ball {
        match self {
            CertifiedFn::Relu => relu_approx(m, x, p),
            CertifiedFn::Sigtanh { a, b } => sigtanh_unchecked(i64::from(m), a, b, x, p),
            CertifiedFn::Xi => xi(m, n, x, p),
            CertifiedFn::Xi1 => xi1(m, n, x, p),
            CertifiedFn::Xi2 => xi2(m, n, x, p),
            CertifiedFn::Sigma1 => sigma1(m, n, x, p),
            CertifiedFn::Sigma2 => sigma2(m, n, x, p),
            CertifiedFn::Lambda => lambda_fn(m, n, x, p),
            CertifiedFn::Mod2 => mod2(m, n, x, p),
            CertifiedFn::Div2 => div2(m, n, x, p),
            CertifiedFn::TtTanh { ell } => tt_tanh(m, x, &Ball::exact(ell.clone()), p),
            CertifiedFn::SendTanh(t) => t.eval(m, x, p),
        }
    }

    /// Exact target at `x`, or `None` outside the validity band for range exponent `n`.
    pub fn target(&self, n: u32, x: &Dyadic) -> Option<Ball> {
        let big = 1i64 << n.min(62);
        let q = |k: i64| Dyadic::ratio(k, 3);
        let exact = |d: Dyadic| Some(Ball::exact(d));
        match self {
            CertifiedFn::Relu => exact(if x.is_negative() {
                Dyadic::zero()
            } else {
                x.clone()
            }),
            CertifiedFn::Sigtanh { a, b } => Some(sig_exact(a, b, x, 400)),
            CertifiedFn::Xi => {
                let k = anchor(x, &q(1), &q(7))?;
                in_range(&k, -big, big - 1).then(|| Ball::exact(&(x - &int(&k)) - &q(1)))
            }
            CertifiedFn::Xi1 | CertifiedFn::Sigma1 => {
                let k = anchor(x, &q(-4), &q(2))?;
                in_range(&k, -big + 1, big).then(|| {
                    Ball::exact(if *self == CertifiedFn::Xi1 {
                        x - &int(&k)
                    } else {
                        int(&k)
                    })
                })
            }
            CertifiedFn::Xi2 | CertifiedFn::Sigma2 => {
                let k = anchor(x, &Dyadic::zero(), &q(6))?;
                in_range(&k, -big + 1, big).then(|| {
                    Ball::exact(if *self == CertifiedFn::Xi2 {
                        x - &int(&k)
                    } else {
                        int(&k)
                    })
                })
            }
            CertifiedFn::Lambda => {
                if let Some(k) = anchor(x, &q(2), &q(4)) {
                    return in_range(&k, -big + 1, big).then(Ball::zero);
                }
                let k = anchor(x, &q(6), &q(8))?;
                in_range(&k, -big + 1, big).then(Ball::one)
            }
            CertifiedFn::Mod2 | CertifiedFn::Div2 => {
                let k = anchor(x, &q(-2), &q(2))?;
                if !in_range(&k, -big + 1, big) {
                    return None;
                }
                let (quo, rem) = k.div_mod_floor(&BigInt::from(2));
                exact(int(if *self == CertifiedFn::Mod2 {
                    &rem
                } else {
                    &quo
                }))
            }
            CertifiedFn::TtTanh { ell } => {
                let quarter = q(2);
                if x.abs() <= quarter {
                    exact(Dyadic::zero())
                } else if (x - &Dyadic::one()).abs() <= quarter {
                    exact(ell.clone())
                } else {
                    None
                }
            }
            CertifiedFn::SendTanh(t) => t.lookup(x).cloned().map(Ball::exact),
        }
    }

    pub fn sample(&self, m: u32, n: u32, x: &Dyadic, p: Option<Precision>) -> Sample {
        let p = p.unwrap_or_else(|| default_precision(m, n));
        let value = self.eval(m, n, &Ball::exact(x.clone()), p);
        let target = self.target(n, x);
        let pass = target
            .as_ref()
            .map(|t| within_bound(&value, t, i64::from(m)));
        Sample {
            x: x.clone(),
            value,
            target,
            pass,
        }
    }
}
