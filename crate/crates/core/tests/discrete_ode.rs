mod common;

use std::sync::Arc;

use common::systems::random_system;
use odem_core::discrete_ode::*;
use odem_core::dyadic_ball::{Ball, Dyadic, Precision};
use odem_core::expr::{Expr, ExprVec};
use proptest::prelude::*;

fn p(bits: i64) -> Precision {
    Precision::new(bits).unwrap()
}

fn no_aux() -> Arc<AuxFn> {
    Arc::new(|_: &StepIndex, _: Precision| Vec::new())
}

fn int_ball(v: i64) -> Ball {
    Ball::from_int(v)
}

/// f <- f + f with f(0) = 1.
fn doubling() -> LinearOdeSystem {
    let init = ExprVec::new(vec![Expr::int(1)], 0).unwrap();
    LinearOdeSystem::new(
        vec![vec![Expr::int(1)]],
        vec![Expr::int(0)],
        init,
        0,
        0,
        no_aux(),
    )
    .unwrap()
}

#[test]
fn derivative_and_integral_examples() {
    let sq = |x: i64| int_ball(x * x);
    assert_eq!(discrete_derivative(sq, 3), int_ball(7));
    assert_eq!(discrete_derivative(|_| int_ball(4), 10), int_ball(0));
    assert_eq!(discrete_integral(|x| int_ball(x), 4, 4), int_ball(0));
    assert_eq!(discrete_integral(|_| int_ball(1), 0, 5), int_ball(5));
    assert_eq!(discrete_integral(|_| int_ball(1), 5, 0), int_ball(-5));
}

#[test]
fn falling_exponential_examples() {
    let one = |_: i64| Matrix::from_rows(vec![vec![int_ball(1)]]);
    for x in 0..10 {
        let m = falling_exponential(one, x, 1);
        assert_eq!(m.get(0, 0), &int_ball(1 << x));
    }
    let m = falling_exponential(|_| Matrix::from_rows(vec![vec![int_ball(5)]]), 0, 1);
    assert_eq!(m.get(0, 0), &int_ball(1));
    let m = falling_exponential(|_| Matrix::from_rows(vec![vec![int_ball(5)]]), -3, 1);
    assert_eq!(m.get(0, 0), &int_ball(1));
}

proptest! {
    #[test]
    fn polynomial_differences(coefs in proptest::collection::vec(-9i64..10, 1..5), x in -20i64..20) {
        let poly = |t: i64| coefs.iter().rev().fold(0i64, |acc, c| acc * t + c);
        let d = discrete_derivative(|t| int_ball(poly(t)), x);
        // (x+1)^k - x^k expanded term by term.
        let expected: i64 = coefs.iter().enumerate().map(|(k, c)| {
            c * ((x + 1).pow(k as u32) - x.pow(k as u32))
        }).sum();
        prop_assert_eq!(d, int_ball(expected));
    }

    #[test]
    fn fundamental_theorem(vals in proptest::collection::vec(-1000i64..1000, 30), a in 0i64..25, b in 0i64..25) {
        let big_f = |x: i64| int_ball(vals[x as usize]);
        let deriv = |x: i64| discrete_derivative(big_f, x);
        prop_assert_eq!(discrete_integral(deriv, a, b), &big_f(b) - &big_f(a));
    }

    #[test]
    fn derivative_of_integral(vals in proptest::collection::vec(-100i64..100, 64), a in 0i64..6, b in 0i64..6, x in 0i64..6) {
        let f = |x: i64, t: i64| int_ball(vals[(x * 8 + t) as usize % 64]);
        let lhs = discrete_derivative(|xx| discrete_integral(|t| f(xx, t), a, b), x);
        let rhs = discrete_integral(|t| discrete_derivative(|xx| f(xx, t), x), a, b);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn falling_exponential_derivative(vals in proptest::collection::vec(-3i64..4, 36), x in 0i64..8, d in 1usize..3) {
        let up = |t: i64| Matrix::from_rows((0..d).map(|i| (0..d).map(|j| {
            int_ball(vals[(t as usize * 4 + i * 2 + j) % 36])
        }).collect()).collect());
        let e1 = falling_exponential(up, x + 1, d);
        let e0 = falling_exponential(up, x, d);
        let rhs = up(x).mul(&e0);
        for i in 0..d {
            for j in 0..d {
                prop_assert_eq!(&(e1.get(i, j) - e0.get(i, j)), rhs.get(i, j));
            }
        }
    }
}

#[test]
fn doubling_scheme_gives_32() {
    let sys = doubling();
    for kind in [OdeKind::LengthDerivation, OdeKind::PlainDerivation] {
        let r = solve_recurrence(&sys, kind, 5, &[] as &[Ball], p(20));
        assert_eq!(r, vec![int_ball(32)]);
        let e = solve_explicit(&sys, kind, 5, &[] as &[Ball], p(20));
        assert_eq!(e, vec![int_ball(32)]);
    }
    let x = num_bigint::BigUint::from(31u32);
    assert_eq!(
        solve_length(&sys, &x, &[] as &[Ball], p(20)),
        vec![int_ball(32)]
    );
    assert_eq!(bit_length(&num_bigint::BigUint::from(0u32)), 0);
}

#[test]
fn zero_steps_return_initial_value() {
    let (sys, y, _) = random_system(3);
    let g = DiscreteOde::<Ball>::initial(&sys, &y, p(40));
    assert_eq!(
        solve_recurrence(&sys, OdeKind::PlainDerivation, 0, &y, p(40)),
        g
    );
    assert_eq!(
        solve_explicit(&sys, OdeKind::PlainDerivation, 0, &y, p(40)),
        g
    );
}

#[test]
fn constant_free_system_telescopes() {
    // A = 0, B = counter: f(t) = sum of counters.
    let init = ExprVec::new(vec![Expr::int(7)], 0).unwrap();
    let sys = LinearOdeSystem::new(
        vec![vec![Expr::int(0)]],
        vec![Expr::var(1)],
        init,
        0,
        0,
        no_aux(),
    )
    .unwrap();
    let r = solve_explicit(&sys, OdeKind::LengthDerivation, 6, &[] as &[Ball], p(30));
    let expected: i64 = 7 + (0..6).map(|t| (1i64 << t) - 1).sum::<i64>();
    assert_eq!(r, vec![int_ball(expected)]);
    let r = solve_recurrence(&sys, OdeKind::PlainDerivation, 6, &[] as &[Ball], p(30));
    assert_eq!(r, vec![int_ball(7 + 15)]);
}

#[test]
fn construction_rejects_nonlinear_entries() {
    let init = ExprVec::new(vec![Expr::int(0)], 0).unwrap();
    let err = LinearOdeSystem::new(
        vec![vec![Expr::var(0)]],
        vec![Expr::int(0)],
        init.clone(),
        0,
        0,
        no_aux(),
    );
    assert!(matches!(err, Err(OdeError::Expr(_))));
    let u = ExprVec::new(vec![Expr::mul(Expr::var(0), Expr::var(0))], 1).unwrap();
    assert!(LinearOdeSystem::from_update(u, init.clone(), 0, 0, no_aux()).is_err());
    let bad_dims = LinearOdeSystem::new(vec![], vec![Expr::int(0)], init, 0, 0, no_aux());
    assert!(matches!(bad_dims, Err(OdeError::Dimension(_))));
}

#[test]
fn explicit_matches_recurrence_on_random_systems() {
    for seed in 0..50 {
        let (sys, y, steps) = random_system(seed);
        for kind in [OdeKind::LengthDerivation, OdeKind::PlainDerivation] {
            let r = solve_recurrence(&sys, kind, steps, &y, p(60));
            let e = solve_explicit(&sys, kind, steps, &y, p(60));
            for (a, b) in r.iter().zip(&e) {
                assert!(a.overlaps(b), "seed {seed}: {a:?} vs {b:?}");
            }
        }
    }
}

#[test]
fn schedule_examples() {
    assert_eq!(precision_schedule(30, 1, 0), vec![32]);
    let a = precision_schedule(40, 7, 5);
    let b = precision_schedule(40, 7, 10);
    assert_eq!(a.len(), 7);
    assert!(a.iter().zip(&b).all(|(x, y)| y - x == 5));
    assert!(a.iter().all(|&v| v <= 40 + 2 * 3 + 5));
}

#[test]
fn schedule_meets_target_radius() {
    let goal = Dyadic::pow2(-40);
    for seed in 0..50 {
        let (sys, y, steps) = random_system(seed);
        let kind = OdeKind::PlainDerivation;
        let bound = magnitude_bound_bits(&sys, kind, steps, &y);
        let schedule = precision_schedule(40, steps, bound);
        let out = solve_explicit_scheduled(&sys, kind, steps, &y, &schedule);
        for b in &out {
            assert!(b.radius() <= &goal, "seed {seed}: radius {:?}", b.radius());
        }
    }
}

#[test]
fn certified_solve_reaches_target() {
    let (sys, y, steps) = random_system(17);
    let (out, schedule) = solve_certified(&sys, OdeKind::LengthDerivation, steps, &y, 64);
    assert!(!schedule.is_empty());
    assert!(out.iter().all(|b| b.radius() <= &Dyadic::pow2(-64)));
}

#[test]
fn stability_probe_examples() {
    // Contracting system f <- f/2 + y: perturbations stay bounded.
    let init = ExprVec::new(vec![Expr::var(0)], 1).unwrap();
    let half = Arc::new(|_: &StepIndex, _: Precision| vec![Ball::exact(Dyadic::ratio(-1, 1))]);
    let contracting = LinearOdeSystem::new(
        vec![vec![Expr::var(1)]],
        vec![Expr::var(3)],
        init,
        1,
        1,
        half,
    )
    .unwrap();
    let y = [Ball::exact(Dyadic::ratio(3, 2))];
    let budget = StabilityBudget::linear(1, 1, 4);
    assert!(budget.is_monotone_on(20, 20));
    let rep = stability_probe(
        &contracting,
        OdeKind::PlainDerivation,
        &budget,
        40,
        &y,
        10,
        12,
        0,
        p(60),
    );
    assert!(rep.pass, "{rep:?}");

    let zero = StabilityBudget::constant(400);
    let rep = stability_probe(
        &doubling(),
        OdeKind::PlainDerivation,
        &zero,
        20,
        &[],
        8,
        4,
        0,
        p(60),
    );
    assert!(rep.pass);
    assert!(rep.max_deviation <= Dyadic::pow2(-300));

    // Doubling amplifies any perturbation by 2 per step.
    let rep = stability_probe(
        &doubling(),
        OdeKind::PlainDerivation,
        &StabilityBudget::constant(12),
        20,
        &[],
        8,
        4,
        0,
        p(60),
    );
    assert!(!rep.pass);
}

#[test]
fn ode_file_round_trip() {
    let text = "\
# doubling through a zero auxiliary
dim 1
aux 1
params 1
kind plain
u 0 (add (var 0) (var 1))
init 0 (var 0)
h 0 (mul (var 0) (int 0))
";
    let (sys, kind) = parse_ode_file(text).unwrap();
    assert_eq!(kind, OdeKind::PlainDerivation);
    let r = solve_recurrence(&sys, kind, 5, &[int_ball(1)], p(20));
    assert_eq!(r, vec![int_ball(32)]);

    let bad = "dim 1\nA 0 0 (mul (var 0) (var 0))\n";
    assert!(parse_ode_file(bad).is_err());
    match parse_ode_file("dim 1\nfoo 3\n") {
        Err(OdeError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}
