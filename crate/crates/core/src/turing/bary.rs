use num_bigint::{BigInt, BigUint};
use num_traits::Signed;

use super::convert::{decode_enclosure, digits_encode_int, encode_mul};
use super::machine::{Config, EncodedConfig, TuringMachine};
use super::next::exec_time;
use super::TuringError;
use crate::dyadic_ball::{centered_eval, Ball, Dyadic, Precision, Scalar, VectorMap};
use crate::funlib::{lambda_fn, sigma1, sigma2};

/// Integer approximation scheme of a real function: `f(x) ~ 2^-n ftilde(floor(2^m(n,M) x))`
/// within `2^-n` on `[-2^M, 2^M]`.
///
/// Arguments and results are passed shifted by `offset(n, M) = 2^(M + m(n,M))` so that
/// they are non-negative and can be digit-encoded.
pub trait DiscreteApproximator: Sync {
    /// Modulus exponent `m(n, M)`.
    fn modulus(&self, n: u32, big_m: u32) -> u32;

    /// Declared bound `t` on the bit length of shifted outputs.
    fn output_bits(&self, n: u32, big_m: u32) -> u32;

    /// `ftilde` on a shifted argument.
    fn exact(&self, k: &BigUint, u: i64, n: u32, big_m: u32) -> BigUint;

    /// Analytic `ftilde` on encodings: from a ball near `Gamma` of the `blocks`-block
    /// encoding of `k` (left-padded with zero bits), a ball within `2^-acc` of `Gamma` of
    /// the `blocks`-block encoding of `ftilde(k)`.
    fn on_encoding(&self, enc: &Ball, blocks: u32, u: i64, n: u32, big_m: u32, acc: u32) -> Ball;

    /// Accuracy exponent [`DiscreteApproximator::on_encoding`] needs on its input.
    fn input_accuracy(&self, blocks: u32) -> u32 {
        4 * blocks + 4
    }
}

/// `f(x) = 2^s x` with `ftilde = id` and `m(n, M) = n + s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScaledIdentity {
    pub log2_scale: i32,
}

impl ScaledIdentity {
    pub fn identity() -> Self {
        ScaledIdentity { log2_scale: 0 }
    }

    pub fn halving() -> Self {
        ScaledIdentity { log2_scale: -1 }
    }

    pub fn eval_exact(&self, x: &Dyadic) -> Dyadic {
        x.shl(i64::from(self.log2_scale))
    }
}

impl DiscreteApproximator for ScaledIdentity {
    fn modulus(&self, n: u32, _big_m: u32) -> u32 {
        (n as i32 + self.log2_scale).max(0) as u32
    }

    fn output_bits(&self, n: u32, big_m: u32) -> u32 {
        big_m + self.modulus(n, big_m) + 2
    }

    fn exact(&self, k: &BigUint, _u: i64, _n: u32, _big_m: u32) -> BigUint {
        k.clone()
    }

    fn on_encoding(
        &self,
        enc: &Ball,
        _blocks: u32,
        _u: i64,
        _n: u32,
        _big_m: u32,
        _acc: u32,
    ) -> Ball {
        enc.clone()
    }
}

/// `ftilde` computed by simulating a machine for a fixed number of steps on the encoded
/// argument and reading the right tape. The machine must leave the head on the first symbol
/// of its output.
#[derive(Clone, Debug)]
pub struct MachineApproximator {
    pub machine: TuringMachine,
    pub steps: u64,
    pub scaled: ScaledIdentity,
    /// Exact map realized by the machine on shifted integers.
    pub map: fn(&BigUint) -> BigUint,
}

impl DiscreteApproximator for MachineApproximator {
    fn modulus(&self, n: u32, big_m: u32) -> u32 {
        self.scaled.modulus(n, big_m)
    }

    fn output_bits(&self, n: u32, big_m: u32) -> u32 {
        self.scaled.output_bits(n, big_m)
    }

    fn exact(&self, k: &BigUint, _u: i64, _n: u32, _big_m: u32) -> BigUint {
        (self.map)(k)
    }

    fn on_encoding(
        &self,
        enc: &Ball,
        blocks: u32,
        _u: i64,
        _n: u32,
        _big_m: u32,
        acc: u32,
    ) -> Ball {
        let cells = 2 * blocks as usize;
        let c0 = EncodedConfig {
            q: Ball::from_int(self.machine.init() as i64),
            l: Ball::zero(),
            r: enc.clone(),
        };
        exec_time(&self.machine, acc, self.steps, &c0, cells).r
    }

    fn input_accuracy(&self, blocks: u32) -> u32 {
        2 * (self.steps as u32 + 2 * blocks + 2) + 2
    }
}

/// Outcome of [`barycentric_eval`] with the intermediate quantities used by the checks.
#[derive(Clone, Debug)]
pub struct BaryResult {
    pub value: Ball,
    /// `2^m(n,M) x`.
    pub scaled_x: Ball,
    pub lambda: Ball,
    pub sigma1: Ball,
    pub sigma2: Ball,
    /// Accuracy exponent `e` of the selectors.
    pub e: u32,
}

/// Guard bits added to `max(t, n)` by default.
pub const DEFAULT_GUARD: u32 = 4;

/// `lambda 2^-n EncodeMul(ftilde(Decode(sigma1))) + (1 - lambda) 2^-n EncodeMul(ftilde(Decode(sigma2)))`
/// evaluated at `2^m(n,M) x`, minus the output shift.
pub fn barycentric_eval(
    ftilde: &dyn DiscreteApproximator,
    x: &Ball,
    u: i64,
    big_m: u32,
    n: u32,
    guard: u32,
) -> Result<BaryResult, TuringError> {
    let bound = Dyadic::pow2(i64::from(big_m));
    if x.center().abs() > bound {
        return Err(TuringError::OutOfRange(format!("|x| > 2^{big_m}")));
    }
    let mm = ftilde.modulus(n, big_m);
    let t = ftilde.output_bits(n, big_m);
    let e = t.max(n) + guard;
    let offset_exp = i64::from(big_m) + i64::from(mm);
    let offset = Dyadic::pow2(offset_exp);
    let blocks = t.max((offset_exp + 2) as u32);
    let range = (offset_exp + 1) as u32;
    let p = Precision::new(2 * i64::from(e) + 4 * i64::from(range) + 32).expect("positive");

    let y = x.shl(i64::from(mm));
    let sel = centered_eval(&BranchSelectors { e, range, p }, std::slice::from_ref(&y));
    let (lam, s1, s2) = (sel[0].clone(), sel[1].clone(), sel[2].clone());
    let weight_exp = -i64::from(n);
    let w1 = lam.shl(weight_exp);
    let w2 = (&Ball::one() - &lam).shl(weight_exp);

    let em_acc = n + guard + 2;
    let branch = |s: &Ball, w: &Ball| -> Result<Ball, TuringError> {
        let shifted = s.add_dyadic(&offset);
        check_output_length(ftilde, &shifted, u, n, big_m, t)?;
        let enc = decode_enclosure(ftilde.input_accuracy(blocks), &shifted, blocks);
        let out = ftilde.on_encoding(&enc, blocks, u, n, big_m, 4 * blocks + 4);
        Ok(encode_mul(em_acc, blocks, &out, w))
    };
    let total = &branch(&s1, &w1)? + &branch(&s2, &w2)?;
    let value = total.add_dyadic(&-offset.shl(weight_exp));
    Ok(BaryResult {
        value,
        scaled_x: y,
        lambda: lam,
        sigma1: s1,
        sigma2: s2,
        e,
    })
}

struct BranchSelectors {
    e: u32,
    range: u32,
    p: Precision,
}

impl VectorMap for BranchSelectors {
    fn eval<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        vec![
            lambda_fn(self.e, self.range, &x[0], self.p),
            sigma1(self.e, self.range, &x[0], self.p),
            sigma2(self.e, self.range, &x[0], self.p),
        ]
    }
}

fn check_output_length(
    ftilde: &dyn DiscreteApproximator,
    shifted: &Ball,
    u: i64,
    n: u32,
    big_m: u32,
    t: u32,
) -> Result<(), TuringError> {
    let k = shifted.center().nearest_int();
    if k.is_negative() {
        return Ok(());
    }
    let k = k.magnitude().clone();
    let out = ftilde.exact(&k, u, n, big_m);
    if out.bits() > u64::from(t) {
        return Err(TuringError::OutputTooLong {
            bits: out.bits(),
            bound: t,
        });
    }
    Ok(())
}

/// Exact reference `2^-n (ftilde(floor(2^m x) + offset) - offset)`.
pub fn barycentric_reference(
    ftilde: &dyn DiscreteApproximator,
    x: &Dyadic,
    u: i64,
    big_m: u32,
    n: u32,
) -> Dyadic {
    let mm = ftilde.modulus(n, big_m);
    let offset = BigInt::from(1) << (big_m + mm) as usize;
    let k = x.shl(i64::from(mm)).floor_int() + &offset;
    let out = ftilde.exact(k.magnitude(), u, n, big_m);
    Dyadic::from_bigint(BigInt::from(out) - offset).shl(-i64::from(n))
}

/// Identity machine: a two-state halting oscillator that ends every even step on the
/// first input symbol.
pub fn identity_machine() -> TuringMachine {
    super::machines::oscillator()
}

/// Initial configuration helper for machines fed with [`digits_encode_int`].
pub fn int_config(machine: &TuringMachine, k: &BigUint) -> Config {
    Config::initial(machine, &digits_encode_int(k))
}
