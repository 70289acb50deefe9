use num_bigint::{BigUint, Sign};
use num_traits::Zero;

use super::machine::encode_word;
use super::TuringError;
use crate::dyadic_ball::{centered_eval, Ball, Dyadic, Precision, Scalar, VectorMap};
use crate::funlib::{mod2, sigma1, sigtanh_unchecked};

/// Binary digits of `n`, most significant first, with bit `0 -> 11` and `1 -> 13`.
/// Zero is the one-bit expansion `0`, i.e. the word `11`.
pub fn digits_encode_int(n: &BigUint) -> Vec<u8> {
    let bits = n.bits().max(1);
    (0..bits)
        .rev()
        .flat_map(|i| if n.bit(i) { [1, 3] } else { [1, 1] })
        .collect()
}

/// Encoding of a non-negative dyadic: integer bits as `11`/`13`, then fractional bits as
/// `31`/`33` (bit 0 / bit 1) up to the last non-zero bit.
pub fn digits_encode_dyadic(d: &Dyadic) -> Result<Vec<u8>, TuringError> {
    if d.is_negative() {
        return Err(TuringError::NegativeValue(d.to_string()));
    }
    let frac_bits = d.frac_bits();
    let int = d.floor_int().to_biguint().expect("non-negative");
    let mut w = digits_encode_int(&int);
    let scaled = d
        .shl(frac_bits as i64)
        .floor_int()
        .to_biguint()
        .expect("non-negative");
    for i in (0..frac_bits).rev() {
        w.extend_from_slice(if scaled.bit(i) { &[3, 3] } else { &[3, 1] });
    }
    Ok(w)
}

/// Number of two-symbol blocks of [`digits_encode_int`].
pub fn int_blocks(n: &BigUint) -> u32 {
    n.bits().max(1) as u32
}

/// Exact `Gamma(digits_encode_int(n))`.
pub fn encode_int_exact(n: &BigUint) -> Dyadic {
    encode_word(&digits_encode_int(n)).expect("valid symbols")
}

/// `Gamma` of the word with `blocks` blocks encoding `k`, left-padded with zero bits.
pub fn encode_int_padded(k: &BigUint, blocks: u32) -> Dyadic {
    let mut w = vec![1u8; 2 * blocks.saturating_sub(int_blocks(k)) as usize];
    w.extend(digits_encode_int(k));
    encode_word(&w).expect("valid symbols")
}

fn decode_precision(m: u32, steps: u32) -> Precision {
    Precision::new(2 * i64::from(m) + 4 * i64::from(steps) + 32).expect("positive")
}

/// `Gamma` of the `steps`-block encoding of `k`, for `x` within `1/4` of a non-negative
/// integer `k < 2^steps`, to accuracy `2^-m`.
///
/// State `(r, l)` starts at `(x, 0)`; each step reads the low bit `b = mod2(r)`, sets
/// `r <- div2(r)` and prepends the block of `b`: `l <- (l + 5 + 2b) / 16`.
pub fn decode_ball<T: Scalar>(m: u32, x: &T, steps: u32) -> T {
    let p = decode_precision(m, steps);
    let acc = m + steps + 2;
    let range = steps.max(1);
    let mut r = x.clone();
    let mut l = T::from_int(0);
    for _ in 0..steps {
        let bit = mod2(acc, range, &r, p);
        let floor = sigma1(acc, range, &r, p);
        r = floor.sub(&bit).shl(-1).round(p);
        l = l
            .add(&bit.shl(1))
            .add_dyadic(&Dyadic::from_int(5))
            .shl(-4)
            .round(p);
    }
    l
}

struct DecodeMap {
    m: u32,
    steps: u32,
}

impl VectorMap for DecodeMap {
    fn eval<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        vec![decode_ball(self.m, &x[0], self.steps)]
    }
}

/// [`decode_ball`] on a ball in centered form.
pub fn decode_enclosure(m: u32, x: &Ball, steps: u32) -> Ball {
    centered_eval(&DecodeMap { m, steps }, std::slice::from_ref(x)).remove(0)
}

/// Within `2^-m` of `Gamma(digits_encode_int(n))`.
pub fn decode_int(m: u32, n: &BigUint) -> Ball {
    let v = Dyadic::from_bigint(n.clone().into());
    decode_ball(m, &Ball::exact(v), int_blocks(n))
}

/// Default bound `B_lambda` on `|lambda|` for [`encode_mul`].
pub const LAMBDA_BOUND: u32 = 2;

/// `lambda * d` from an approximation of `Gamma(d_bar)` with at most `s` blocks, to accuracy
/// `2^-m`, for `|lambda| <= 2`.
pub fn encode_mul(m: u32, s: u32, d_enc: &Ball, lam: &Ball) -> Ball {
    let map = EncodeMulMap {
        m,
        s,
        lambda_bound: LAMBDA_BOUND,
    };
    centered_eval(&map, &[d_enc.clone(), lam.clone()]).remove(0)
}

struct EncodeMulMap {
    m: u32,
    s: u32,
    lambda_bound: u32,
}

impl VectorMap for EncodeMulMap {
    fn eval<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        vec![encode_mul_bounded(
            self.m,
            self.s,
            &x[0],
            &x[1],
            self.lambda_bound,
        )]
    }
}

fn ramp<T: Scalar>(acc: u32, a: Dyadic, b: Dyadic, x: &T, p: Precision) -> T {
    sigtanh_unchecked(i64::from(acc), &a, &b, x, p)
}

/// [`encode_mul`] with an explicit bound `|lambda| <= lambda_bound`.
///
/// `d_enc` is first rounded to `16^-s Z` with `sigma1`, which tolerates input errors up to
/// `4^-(2s+1)`. Then `s` block steps read `x = 16 r`, whose integer part `i` is `5, 7, 13, 15`
/// for the blocks `11, 13, 31, 33` (and `x = 0` once the word is exhausted), and set `r <- x - i`.
/// Integer blocks update `acc <- 2 acc + bit lambda`; fractional blocks halve the weight
/// `w` (initially `lambda`) and add `bit w`.
pub fn encode_mul_bounded<T: Scalar>(m: u32, s: u32, d_enc: &T, lam: &T, lambda_bound: u32) -> T {
    let lb = 32 - lambda_bound.max(1).leading_zeros();
    let acc = m + 5 * s + 12 + lb;
    let p = Precision::new(2 * i64::from(acc) + 32).expect("positive");
    let shift = 4 * i64::from(s);
    let mut r = sigma1(m + s + 12 + lb, (4 * s).max(1), &d_enc.shl(shift), p).shl(-shift);
    let mut total = T::from_int(0);
    let mut weight = lam.clone();
    for _ in 0..s {
        let x = r.shl(4);
        let present = ramp(acc, Dyadic::from_int(1), Dyadic::from_int(3), &x, p);
        let odd_low = ramp(acc, Dyadic::ratio(25, 2), Dyadic::ratio(27, 2), &x, p);
        let frac = ramp(acc, Dyadic::ratio(17, 1), Dyadic::ratio(25, 1), &x, p);
        let odd_high = ramp(acc, Dyadic::ratio(57, 2), Dyadic::ratio(59, 2), &x, p);
        let bit = odd_low.sub(&frac).add(&odd_high);
        let int = present
            .scale(&Dyadic::from_int(5))
            .add(&odd_low.shl(1))
            .add(&frac.scale(&Dyadic::from_int(6)))
            .add(&odd_high.shl(1));
        r = x.sub(&int).round(p);
        let integral = present.sub(&frac);
        let half_weight = weight.shl(-1);
        let grown = total.add(&bit.mul(lam));
        let added = bit.mul(&half_weight);
        total = total
            .add(&integral.mul(&grown))
            .add(&frac.mul(&added))
            .round(p);
        weight = weight.sub(&frac.mul(&half_weight)).round(p);
    }
    total
}

/// Exact `lambda * d` for a dyadic `d`, used as the oracle of [`encode_mul`].
pub fn product_exact(lam: &Dyadic, d: &Dyadic) -> Dyadic {
    lam * d
}

/// Number of blocks in [`digits_encode_dyadic`].
pub fn dyadic_blocks(d: &Dyadic) -> u32 {
    let int = d.floor_int();
    let int_bits = if int.sign() == Sign::Minus || int.is_zero() {
        1
    } else {
        int.bits() as u32
    };
    int_bits + d.frac_bits() as u32
}
