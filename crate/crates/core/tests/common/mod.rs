//! Independent high-precision oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use odem_core::dyadic_ball::{Ball, Dyadic};

pub const ORACLE_BITS: i64 = 400;

/// `exp(x)` to roughly `ORACLE_BITS` fractional bits, via argument halving,
/// a positive Taylor series and repeated squaring (round to nearest throughout).
pub fn exp_oracle(x: &Dyadic) -> Dyadic {
    let b = ORACLE_BITS as u64 + 64;
    let halvings = 24u64;
    let y = x.shl(-(halvings as i64));
    let y_int = y.scaled_int(b as i64, odem_core::dyadic_ball::Rounding::Nearest);
    let one = BigInt::one() << b;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut k = 1u64;
    loop {
        term = (&term * &y_int >> b) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..halvings {
        sum = &sum * &sum >> b;
    }
    Dyadic::new(sum, -(b as i64))
}

pub fn tanh_oracle(x: &Dyadic) -> Dyadic {
    if x.is_zero() {
        return Dyadic::zero();
    }
    if x.abs() > Dyadic::from_int(150) {
        return Dyadic::from_int(x.signum() as i64);
    }
    let e = exp_oracle(&x.shl(1));
    let one = Dyadic::one();
    Dyadic::div_rounded(
        &(&e - &one),
        &(&e + &one),
        ORACLE_BITS,
        odem_core::dyadic_ball::Rounding::Nearest,
    )
}

/// `|x - oracle| <= radius + 2^-(ORACLE_BITS - 50)`.
pub fn encloses(b: &Ball, oracle: &Dyadic) -> bool {
    (b.center() - oracle).abs() <= b.radius() + &Dyadic::pow2(-(ORACLE_BITS - 50))
}

pub fn within(b: &Ball, target: &Dyadic, m: i64) -> bool {
    (b.center() - target).abs() <= b.radius() + &Dyadic::pow2(-m)
}

pub fn ratio(num: i64, den_log2: u32) -> Dyadic {
    Dyadic::ratio(num, den_log2)
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn is_canonical(d: &Dyadic) -> bool {
    if d.mantissa().is_zero() {
        d.exponent() == 0
    } else {
        d.mantissa().abs().trailing_zeros() == Some(0)
    }
}

pub mod systems {
    use std::sync::Arc;

    use odem_core::discrete_ode::{LinearOdeSystem, StepIndex};
    use odem_core::dyadic_ball::{Ball, Dyadic, Precision};
    use odem_core::expr::{Expr, ExprVec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random essentially linear system over `[f.., h0, counter, y0, y1]`, with its parameters.
    pub fn random_system(seed: u64) -> (LinearOdeSystem, Vec<Ball>, u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3usize);
        let h0 = d;
        let counter = d + 1;
        let y0 = d + 2;
        let atom = |rng: &mut ChaCha8Rng| -> Expr {
            match rng.gen_range(0..5) {
                0 => Expr::var(rng.gen_range(0..d)),
                1 => Expr::var(h0),
                2 => Expr::var(y0 + rng.gen_range(0..2)),
                3 => Expr::mul(Expr::var(counter), Expr::var(h0)),
                _ => Expr::int(rng.gen_range(-2..=2)),
            }
        };
        let a = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let k = rng.gen_range(-1..=1);
                        let arg = Expr::add(atom(&mut rng), atom(&mut rng));
                        Expr::mul(Expr::int(k), Expr::tanh(arg))
                    })
                    .collect()
            })
            .collect();
        let b = (0..d)
            .map(|_| {
                let arg = Expr::mul(atom(&mut rng), atom(&mut rng));
                Expr::add(Expr::tanh(arg), Expr::var(y0 + rng.gen_range(0..2)))
            })
            .collect();
        let init = ExprVec::new(
            (0..d)
                .map(|i| Expr::add(Expr::var(i % 2), Expr::int(i as i64)))
                .collect(),
            2,
        )
        .unwrap();
        let aux = Arc::new(|s: &StepIndex, _p: Precision| -> Vec<Ball> {
            vec![Ball::exact(Dyadic::ratio(1, 3 + (s.t % 3) as u32))]
        });
        let sys = LinearOdeSystem::new(a, b, init, 1, 2, aux).unwrap();
        let y = vec![
            Ball::exact(Dyadic::ratio(rng.gen_range(-8..=8), 3)),
            Ball::exact(Dyadic::ratio(rng.gen_range(-8..=8), 2)),
        ];
        let steps = rng.gen_range(0..=8u64);
        (sys, y, steps)
    }
}
