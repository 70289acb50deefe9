mod common;

use common::*;
use num_bigint::BigInt;
use odem_core::dyadic_ball::{
    ball_round, exp_neg_ball, tanh_ball, Ball, BallError, Dyadic, Precision, RADIUS_BITS,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prec(b: i64) -> Precision {
    Precision::new(b).unwrap()
}

/// `r_x + 2^-p`, widened by the relative slack of the 16-bit radius mantissa.
fn radius_bound(r_x: &Dyadic, p: i64) -> Dyadic {
    let b = r_x + &Dyadic::pow2(-p);
    &b + &b.shl(-(RADIUS_BITS as i64 - 2))
}

fn arb_dyadic() -> impl Strategy<Value = Dyadic> {
    (any::<i64>(), -80i64..40).prop_map(|(m, e)| Dyadic::new(BigInt::from(m), e))
}

fn arb_small_dyadic() -> impl Strategy<Value = Dyadic> {
    (-(1i64 << 40)..(1i64 << 40), 30u32..44).prop_map(|(m, k)| Dyadic::ratio(m, k))
}

fn arb_ball() -> impl Strategy<Value = Ball> {
    (arb_small_dyadic(), 0i64..(1 << 20), 20u32..40)
        .prop_map(|(c, r, k)| Ball::new(c, Dyadic::ratio(r, k)).unwrap())
}

#[test]
fn dyadic_examples() {
    assert_eq!(ratio(1, 1) + ratio(1, 2), ratio(3, 2));
    let x = Dyadic::new(BigInt::from(12345), -7);
    assert_eq!(&Dyadic::zero() * &x, Dyadic::zero());
    assert_eq!(&ratio(3, 2) * &ratio(5, 1), ratio(15, 3));
    assert_eq!(Dyadic::new(BigInt::from(12), 0).exponent(), 2);
}

#[test]
fn text_format() {
    assert_eq!("+3p-2".parse::<Dyadic>().unwrap(), ratio(3, 2));
    assert_eq!(ratio(3, 2).to_string(), "+3p-2");
    assert_eq!(Dyadic::zero().to_string(), "+0p0");
    assert_eq!(
        "-ffp4".parse::<Dyadic>().unwrap(),
        Dyadic::from_int(-255 * 16)
    );
    assert!(matches!("3p-2".parse::<Dyadic>(), Err(BallError::Parse(_))));
    assert!("+xp1".parse::<Dyadic>().is_err());
    assert_eq!(Dyadic::parse_loose("1/64").unwrap(), ratio(1, 6));
    assert_eq!(Dyadic::parse_loose("-0.375").unwrap(), ratio(-3, 3));
    assert!(Dyadic::parse_loose("0.1").is_err());
    assert!(Dyadic::parse_loose("1/3").is_err());
}

#[test]
fn ball_examples() {
    let a = Ball::new(Dyadic::from_int(1), ratio(1, 4)).unwrap();
    let b = Ball::new(Dyadic::from_int(2), ratio(1, 4)).unwrap();
    let s = &a + &b;
    assert_eq!(s.center(), &Dyadic::from_int(3));
    assert_eq!(s.radius(), &ratio(1, 3));
    assert_eq!(&a + &Ball::zero(), a);

    let e = &Ball::from_int(3) * &Ball::exact(ratio(5, 3));
    assert!(e.is_exact());

    let a = Ball::new(Dyadic::from_int(2), ratio(1, 8)).unwrap();
    let b = Ball::new(Dyadic::from_int(3), ratio(1, 8)).unwrap();
    let p = &a * &b;
    assert_eq!(p.center(), &Dyadic::from_int(6));
    assert!(p.radius() >= &(&ratio(5, 8) + &ratio(1, 16)));
    assert!(Ball::new(Dyadic::one(), Dyadic::from_int(-1)).is_err());
}

#[test]
fn rounding_examples() {
    let third = Ball::exact(Dyadic::div_rounded(
        &Dyadic::one(),
        &Dyadic::from_int(3),
        60,
        odem_core::dyadic_ball::Rounding::Nearest,
    ));
    let r = ball_round(&third, prec(8));
    assert!(r.radius() <= &(third.radius() + &Dyadic::pow2(-8)));
    assert!(r.contains_ball(&third));
    let exact = Ball::exact(ratio(5, 8));
    assert_eq!(ball_round(&exact, prec(8)), exact);
    assert_eq!(ball_round(&r, prec(8)), r);
}

#[test]
fn precision_rejects_zero() {
    assert!(Precision::new(0).is_err());
    assert!(Precision::new(-3).is_err());
    assert_eq!(Precision::new(5).unwrap().bits(), 5);
}

proptest! {
    #[test]
    fn text_round_trip(d in arb_dyadic()) {
        prop_assert!(is_canonical(&d));
        let s = d.to_string();
        prop_assert_eq!(s.parse::<Dyadic>().unwrap(), d);
    }

    #[test]
    fn arithmetic_is_canonical_and_exact(a in arb_dyadic(), b in arb_dyadic()) {
        let s = &a + &b;
        let d = &a - &b;
        let p = &a * &b;
        prop_assert!(is_canonical(&s) && is_canonical(&d) && is_canonical(&p));
        prop_assert_eq!(&s - &b, a.clone());
        prop_assert_eq!(&d + &b, a.clone());
        prop_assert_eq!(a.cmp(&b), d.signum().cmp(&0));
    }

    #[test]
    fn ball_ops_contain_endpoint_results(a in arb_ball(), b in arb_ball()) {
        let sum = &a + &b;
        let diff = &a - &b;
        let prod = &a * &b;
        for x in [a.lower(), a.center().clone(), a.upper()] {
            for y in [b.lower(), b.center().clone(), b.upper()] {
                prop_assert!(sum.contains(&(&x + &y)));
                prop_assert!(diff.contains(&(&x - &y)));
                prop_assert!(prod.contains(&(&x * &y)));
            }
        }
    }

    #[test]
    fn rounding_preserves_containment(a in arb_ball(), bits in 1i64..60) {
        let r = ball_round(&a, prec(bits));
        prop_assert!(r.contains_ball(&a));
        prop_assert!(r.radius() <= &radius_bound(a.radius(), bits));
        prop_assert!(r.center().exponent() >= -bits);
        prop_assert_eq!(ball_round(&r, prec(bits)), r.clone());
    }

    #[test]
    fn tanh_contains_oracle(x in arb_ball(), bits in 8i64..120) {
        let t = tanh_ball(&x, prec(bits));
        for p in [x.lower(), x.center().clone(), x.upper()] {
            prop_assert!(encloses(&t, &tanh_oracle(&p)));
        }
        prop_assert!(t.radius() <= &radius_bound(x.radius(), bits));
        prop_assert!(is_canonical(t.center()) && is_canonical(t.radius()));
    }

    #[test]
    fn tanh_radius_monotone_in_precision(c in arb_small_dyadic(), bits in 4i64..100) {
        let x = Ball::exact(c);
        let lo = tanh_ball(&x, prec(bits));
        let hi = tanh_ball(&x, prec(bits + 1));
        prop_assert!(hi.radius() <= lo.radius());
    }

    #[test]
    fn exp_neg_contains_oracle(m in 0i64..(1 << 40), k in 30u32..40, r in 0i64..1000, bits in 8i64..120) {
        let x = Ball::new(Dyadic::ratio(m, k), Dyadic::ratio(r, 40)).unwrap();
        prop_assume!(!x.lower().is_negative());
        let e = exp_neg_ball(&x, prec(bits)).unwrap();
        for p in [x.lower(), x.center().clone(), x.upper()] {
            prop_assert!(encloses(&e, &exp_oracle(&-p)));
        }
        prop_assert!(e.radius() <= &radius_bound(x.radius(), bits));
    }
}

#[test]
fn tanh_special_values() {
    let z = tanh_ball(&Ball::zero(), prec(30));
    assert!(z.is_exact() && z.center().is_zero());

    let t = tanh_ball(&Ball::from_int(20), prec(48));
    let two_e40 = exp_oracle(&Dyadic::from_int(-40)).shl(1);
    let lo = &Dyadic::one() - &two_e40;
    assert!(t.center() >= &(&lo - &Dyadic::pow2(-48)));
    assert!(t.center() <= &Dyadic::one());
    assert!(encloses(&t, &tanh_oracle(&Dyadic::from_int(20))));

    let big = tanh_ball(&Ball::exact(Dyadic::pow2(200)), prec(64));
    assert!(big.contains(&Dyadic::one()) || big.upper() <= Dyadic::one());
    let neg = tanh_ball(&Ball::exact(-Dyadic::pow2(200)), prec(64));
    assert!(neg.lower() >= -Dyadic::one() - Dyadic::pow2(-64));
}

#[test]
fn tanh_thousand_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let m: i64 = rng.gen_range(-(1i64 << 50)..(1i64 << 50));
        let k: u32 = rng.gen_range(40..56);
        let x = Dyadic::ratio(m, k);
        let b = tanh_ball(&Ball::exact(x.clone()), prec(200));
        assert!(encloses(&b, &tanh_oracle(&x)), "tanh({x:?})");
        assert!(b.radius() <= &Dyadic::pow2(-200));
    }
}

#[test]
fn exp_neg_examples() {
    let one = exp_neg_ball(&Ball::zero(), prec(40)).unwrap();
    assert!(one.contains(&Dyadic::one()));
    let mut prev: Option<Ball> = None;
    for i in 0..200 {
        let e = exp_neg_ball(&Ball::exact(Dyadic::ratio(i, 4)), prec(80)).unwrap();
        if let Some(p) = &prev {
            assert!(e.upper() <= p.upper() && e.lower() <= p.lower());
        }
        prev = Some(e);
    }
    let straddle = Ball::new(Dyadic::zero(), ratio(1, 10)).unwrap();
    assert_eq!(
        exp_neg_ball(&straddle, prec(10)),
        Err(BallError::NegativeArgument)
    );
    let huge = exp_neg_ball(&Ball::exact(Dyadic::pow2(40)), prec(30)).unwrap();
    assert!(huge.upper() <= Dyadic::pow2(-30) && !huge.lower().is_positive());
}

/// Certified check of `1 - tanh|x| <= 2 exp(-2|x|)` on both sides of zero:
/// the upper bound of the left side must lie below the lower bound of the right side.
#[test]
fn tanh_tail_bounds() {
    for k in 0..200i64 {
        let a = Dyadic::ratio(k, 2) + Dyadic::ratio(1, 7);
        let bits = 40 + 6 * (k / 2 + 1);
        let p = prec(bits);
        let rhs = exp_neg_ball(&Ball::exact(a.shl(1)), p).unwrap().shl(1);
        let neg = &Ball::one() + &tanh_ball(&Ball::exact(-&a), p);
        let pos = &Ball::one() - &tanh_ball(&Ball::exact(a.clone()), p);
        assert!(neg.upper() <= rhs.lower(), "left side at -{a:?}");
        assert!(pos.upper() <= rhs.lower(), "right side at {a:?}");
    }
}
