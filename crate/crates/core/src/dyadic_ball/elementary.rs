//! Rigorous enclosures of `exp(-t)` and `tanh(t)`.
//!
//! Everything is computed in fixed point: an integer pair `(lo, hi)` at scale `g`
//! stands for the interval `[lo 2^-g, hi 2^-g]`. Every operation rounds outward.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::{Ball, Precision};
use super::dyadic::{Dyadic, Rounding};
use super::BallError;

/// Upper bound on ln 2 (45427/65536 > 0.693147...).
fn ln2_upper() -> Dyadic {
    Dyadic::ratio(45427, 16)
}

fn shr_floor(x: &BigInt, s: u64) -> BigInt {
    x >> s
}

fn shr_ceil(x: &BigInt, s: u64) -> BigInt {
    let q = x >> s;
    if &q << s == *x {
        q
    } else {
        q + 1
    }
}

#[derive(Clone)]
struct Fixed {
    lo: BigInt,
    hi: BigInt,
}

impl Fixed {
    fn mul(&self, other: &Fixed, g: u64) -> Fixed {
        // Both operands are non-negative.
        Fixed {
            lo: shr_floor(&(&self.lo * &other.lo), g),
            hi: shr_ceil(&(&self.hi * &other.hi), g),
        }
    }
}

/// Enclosure of `sum_k (-f)^k / k!` for exact `f = f_int 2^-g` with `0 <= f <= 1`.
fn taylor_exp_neg(f_int: &BigInt, g: u64) -> Fixed {
    let one = BigInt::one() << g;
    let mut t_lo = one.clone();
    let mut t_hi = one.clone();
    let mut s_lo = one.clone();
    let mut s_hi = one;
    let mut k: u64 = 1;
    loop {
        let den = BigInt::from(k);
        t_lo = shr_floor(&(&t_lo * f_int), g) / &den;
        let num = shr_ceil(&(&t_hi * f_int), g);
        t_hi = (&num + &den - 1u32) / &den;
        if k % 2 == 1 {
            s_lo -= &t_hi;
            s_hi -= &t_lo;
        } else {
            s_lo += &t_lo;
            s_hi += &t_hi;
        }
        if t_hi <= BigInt::one() {
            // Alternating series with non-increasing terms: the tail is bounded by the next term.
            s_lo -= &t_hi;
            s_hi += &t_hi;
            break;
        }
        k += 1;
    }
    if s_lo.is_negative() {
        s_lo = BigInt::zero();
    }
    Fixed { lo: s_lo, hi: s_hi }
}

/// Enclosure of `exp(-f)` for `f` in `[f_lo, f_hi] 2^-g`, `0 <= f <= 1`, using argument halving.
fn exp_neg_frac(f_lo: &BigInt, f_hi: &BigInt, g: u64, halvings: u64) -> Fixed {
    let gg = g + halvings + 4;
    // f / 2^r at scale gg is f_int << (gg - g - r); gg - g - r = 4.
    let lo_arg = f_lo << (gg - g - halvings);
    let hi_arg = f_hi << (gg - g - halvings);
    let a = taylor_exp_neg(&hi_arg, gg);
    let b = taylor_exp_neg(&lo_arg, gg);
    let mut v = Fixed { lo: a.lo, hi: b.hi };
    for _ in 0..halvings {
        v = v.mul(&v, gg);
    }
    Fixed {
        lo: shr_floor(&v.lo, gg - g),
        hi: shr_ceil(&v.hi, gg - g),
    }
}

thread_local! {
    static EXP_NEG_ONE: RefCell<HashMap<u64, Fixed>> = RefCell::new(HashMap::new());
}

fn exp_neg_one(g: u64) -> Fixed {
    if let Some(v) = EXP_NEG_ONE.with(|c| c.borrow().get(&g).cloned()) {
        return v;
    }
    let one = BigInt::one() << g;
    let v = exp_neg_frac(&one, &one, g, halvings_for(g));
    EXP_NEG_ONE.with(|c| c.borrow_mut().insert(g, v.clone()));
    v
}

fn halvings_for(g: u64) -> u64 {
    ((g as f64).sqrt() as u64 / 2).max(2)
}

/// Enclosure `[lo, hi]` of `exp(-t)` for exact `t >= 0`, with endpoints on the grid `2^-w`.
pub(crate) fn exp_neg_point(t: &Dyadic, w: u64) -> (Dyadic, Dyadic) {
    debug_assert!(!t.is_negative());
    if t.is_zero() {
        return (Dyadic::one(), Dyadic::one());
    }
    let thresh = &Dyadic::from_int(w as i64 + 2) * &ln2_upper();
    if t >= &thresh {
        // exp(-t) <= 2^-(w+2).
        return (Dyadic::zero(), Dyadic::pow2(-(w as i64)));
    }
    let q = t.floor_int().to_u64().unwrap_or(0);
    let qbits = 64 - q.leading_zeros() as u64;
    let g = w + 16 + 2 * qbits;
    let f = t - &Dyadic::from_int(q as i64);
    let f_lo = f.scaled_int(g as i64, Rounding::Floor);
    let f_hi = f.scaled_int(g as i64, Rounding::Ceil);
    let mut acc = exp_neg_frac(&f_lo, &f_hi, g, halvings_for(g));
    if q > 0 {
        let base = exp_neg_one(g);
        let mut pow = Fixed {
            lo: BigInt::one() << g,
            hi: BigInt::one() << g,
        };
        let mut sq = base;
        let mut e = q;
        while e > 0 {
            if e & 1 == 1 {
                pow = pow.mul(&sq, g);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq, g);
            }
        }
        acc = acc.mul(&pow, g);
    }
    let lo = Dyadic::new(shr_floor(&acc.lo, g - w), -(w as i64));
    let hi = Dyadic::new(shr_ceil(&acc.hi, g - w), -(w as i64));
    (lo, hi)
}

/// Enclosure of `tanh(t)` for exact `t`, accurate to a few units of `2^-w`.
pub(crate) fn tanh_point(t: &Dyadic, w: u64) -> (Dyadic, Dyadic) {
    if t.is_zero() {
        return (Dyadic::zero(), Dyadic::zero());
    }
    if t.is_negative() {
        let (lo, hi) = tanh_point(&-t, w);
        return (-hi, -lo);
    }
    let (elo, ehi) = exp_neg_point(&t.shl(1), w + 4);
    let one = Dyadic::one();
    if ehi <= Dyadic::pow2(-(w as i64) - 1) {
        // 1 - tanh t = 2e/(1+e) <= 2e.
        return (&one - &ehi.shl(1), one);
    }
    let lo = Dyadic::div_rounded(&(&one - &ehi), &(&one + &ehi), w as i64, Rounding::Floor);
    let hi = Dyadic::div_rounded(&(&one - &elo), &(&one + &elo), w as i64, Rounding::Ceil);
    (lo, hi)
}

const GUARD: u64 = 12;

/// Ball around `[lo, hi]` whose center sits on the grid `2^-(p+6)`.
///
/// The radius always carries the full grid allowance, so for an exact input
/// the radius shrinks strictly as `p` grows.
fn finish(lo: &Dyadic, hi: &Dyadic, p: Precision) -> Ball {
    if lo == hi {
        return Ball::exact(lo.clone());
    }
    let bits = p.bits() as i64 + 6;
    let mid = (lo + hi).shl(-1);
    let c = mid.round_to(bits, Rounding::Nearest);
    let r = &(hi - lo).shl(-1) + &Dyadic::pow2(-bits - 1);
    Ball::new(c, r).expect("non-negative radius")
}

/// Ball enclosing `tanh` over `x`; radius at most `radius(x) + 2^-p`.
pub fn tanh_ball(x: &Ball, p: Precision) -> Ball {
    let w = p.bits() as u64 + GUARD;
    let grid = w as i64 + 8;
    let lo_t = x.lower().floor_to(grid);
    let hi_t = x.upper().ceil_to(grid);
    let lo = tanh_point(&lo_t, w).0;
    let hi = tanh_point(&hi_t, w).1;
    finish(&lo, &hi, p)
}

/// Enclosure of `1 - tanh(x)^2` over `x`, given an enclosure `t` of `tanh(x)`.
pub fn sech2_from_tanh(t: &Ball) -> Ball {
    let one = Dyadic::one();
    let sq = t.sqr();
    let mut lo = &one - &sq.upper();
    let hi = &one - &sq.lower();
    if lo.is_negative() {
        lo = Dyadic::zero();
    }
    let hi = if hi > one { one } else { hi };
    Ball::from_interval(&lo, &hi)
}

/// Ball enclosing `exp(-x)` over `x`; requires `x >= 0` on the whole ball.
pub fn exp_neg_ball(x: &Ball, p: Precision) -> Result<Ball, BallError> {
    if x.lower().is_negative() {
        return Err(BallError::NegativeArgument);
    }
    let w = p.bits() as u64 + 8;
    let grid = w as i64 + 8;
    let lo_t = x.lower().floor_to(grid);
    let hi_t = x.upper().ceil_to(grid);
    let lo = exp_neg_point(&hi_t, w).0;
    let hi = exp_neg_point(&lo_t, w).1;
    Ok(finish(&lo, &hi, p))
}
