mod common;

use odem_core::dyadic_ball::{Ball, Dual, Dyadic, Precision, Scalar};
use odem_core::funlib::*;
use proptest::prelude::*;

fn d(s: &str) -> Dyadic {
    Dyadic::parse_loose(s).unwrap()
}

fn exact(s: &str) -> Ball {
    Ball::exact(d(s))
}

fn check(f: &CertifiedFn, m: u32, n: u32, x: &Dyadic) {
    let s = f.sample(m, n, x, None);
    assert_eq!(
        s.pass,
        Some(true),
        "{} m={m} n={n} x={x}: value {} target {:?}",
        f.name(),
        s.value,
        s.target
    );
}

/// `k + j/16` for every anchor `k` in `[lo, hi]` and offset index `j` in `js`.
fn grid(lo: i64, hi: i64, js: impl Iterator<Item = i64> + Clone) -> Vec<Dyadic> {
    (lo..=hi)
        .flat_map(|k| {
            js.clone()
                .map(move |j| &Dyadic::from_int(k) + &Dyadic::ratio(j, 4))
        })
        .collect()
}

#[test]
fn relu_examples() {
    let p = default_precision(8, 0);
    assert_eq!(relu_approx(4, &Ball::zero(), p), Ball::zero());
    let v = relu_approx(4, &exact("-8"), p);
    assert!(v.mag() <= Dyadic::pow2(-4));
    let f = CertifiedFn::Relu;
    for m in 1..=8 {
        for k in -32..=32 {
            check(&f, m, 0, &Dyadic::ratio(k, 3));
        }
    }
}

#[test]
fn sigtanh_examples() {
    let p = default_precision(8, 0);
    let v = sigtanh(5, &d("0"), &d("1"), &exact("2"), p).unwrap();
    assert!(within_bound(&v, &Ball::one(), 5));
    let v = sigtanh(5, &d("1/2"), &d("3/4"), &exact("5/8"), p).unwrap();
    assert!(within_bound(&v, &exact("1/2"), 5));
    assert!(matches!(
        sigtanh(3, &d("1"), &d("1"), &exact("0"), p),
        Err(FunError::EmptyRamp { .. })
    ));
    for (a, b) in [("0", "1"), ("1/2", "3/4"), ("-1", "2"), ("1/8", "7/8")] {
        let f = CertifiedFn::sigtanh(d(a), d(b)).unwrap();
        for m in 1..=8 {
            for k in -24..=24 {
                check(&f, m, 0, &Dyadic::ratio(k, 3));
            }
        }
    }
}

#[test]
fn xi_examples() {
    let p = default_precision(3, 2);
    let v = xi(3, 2, &exact("1.5"), p);
    assert!(within_bound(&v, &exact("0.375"), 3));
    let v = xi(3, 2, &exact("-1.5"), p);
    assert!(within_bound(&v, &exact("0.375"), 3));
}

#[test]
fn xi_sweep() {
    for n in 1..=4 {
        let big = 1i64 << n;
        for m in 1..=6 {
            for x in grid(-big + 1, big - 1, 2..=14) {
                check(&CertifiedFn::Xi, m, n, &x);
            }
        }
    }
}

#[test]
fn xi_edge_cells() {
    // Cells at -2^n are inside the construction's range as well.
    for n in 1..=3 {
        let big = 1i64 << n;
        for x in grid(-big, -big, 2..=14) {
            check(&CertifiedFn::Xi, 4, n, &x);
        }
    }
}

#[test]
fn xi_ode_matches_composition() {
    for n in 0..=4 {
        for m in [1, 3, 6] {
            let p = default_precision(m, n);
            for k in -70..=70 {
                let x = Ball::exact(Dyadic::ratio(k, 3));
                let a = xi_prime(m, n, &x, p);
                let b = xi_prime_composed(m, n, &x, p);
                assert!(a.overlaps(&b), "xi' n={n} m={m} x={x}: {a} vs {b}");
                let a = xi(m, n, &x, p);
                let b = xi_composed(m, n, &x, p);
                assert!(a.overlaps(&b), "xi n={n} m={m} x={x}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn xi_system_is_a_length_ode() {
    let sys = xi_prime_system(3, 4);
    assert_eq!(sys.n_aux(), 4);
    assert_eq!(sys.n_y(), 1);
    // The update is essentially linear in h: A and B mention h only under tanh.
    for e in sys.a().iter().flatten().chain(sys.b()) {
        assert_eq!(e.degree(0), 0);
    }
}

#[test]
fn derived_fn_examples() {
    let m = 5;
    let p = default_precision(m, 3);
    assert!(within_bound(&xi1(m, 3, &exact("3"), p), &Ball::zero(), 5));
    assert!(within_bound(&xi2(m, 3, &exact("3.5"), p), &exact("0.5"), 5));
    assert!(within_bound(&sigma1(m, 3, &exact("5"), p), &exact("5"), 5));
    assert!(within_bound(
        &sigma2(m, 3, &exact("-1.25"), p),
        &exact("-2"),
        5
    ));
    for k in -3..=3 {
        let one = lambda_fn(m, 3, &Ball::exact(&Dyadic::from_int(k) + &d("7/8")), p);
        let zero = lambda_fn(m, 3, &Ball::exact(&Dyadic::from_int(k) + &d("3/8")), p);
        assert!(within_bound(&one, &Ball::one(), 5));
        assert!(within_bound(&zero, &Ball::zero(), 5));
    }
    assert!(within_bound(
        &mod2(m, 3, &exact("6.125"), p),
        &Ball::zero(),
        5
    ));
    assert!(within_bound(
        &div2(m, 3, &exact("6.125"), p),
        &exact("3"),
        5
    ));
    assert!(within_bound(&mod2(m, 3, &exact("7"), p), &Ball::one(), 5));
    assert!(within_bound(&div2(m, 3, &exact("7"), p), &exact("3"), 5));
}

#[test]
fn derived_fn_sweeps() {
    let fns = [
        CertifiedFn::Xi1,
        CertifiedFn::Xi2,
        CertifiedFn::Sigma1,
        CertifiedFn::Sigma2,
        CertifiedFn::Lambda,
        CertifiedFn::Mod2,
        CertifiedFn::Div2,
    ];
    for n in [0, 1, 3] {
        let big = 1i64 << n;
        for m in [1, 3, 6] {
            for f in &fns {
                let mut hits = 0;
                for x in grid(-big, big + 1, -8..8) {
                    let s = f.sample(m, n, &x, None);
                    if let Some(ok) = s.pass {
                        hits += 1;
                        assert!(
                            ok,
                            "{} m={m} n={n} x={x}: {} vs {:?}",
                            f.name(),
                            s.value,
                            s.target
                        );
                    }
                }
                assert!(hits > 0, "{} has an empty band", f.name());
            }
        }
    }
}

#[test]
fn bounded_outputs() {
    // Outputs stay within the target range widened by the bound, also off band.
    let p = default_precision(4, 2);
    for k in -64..=64 {
        let x = Ball::exact(Dyadic::ratio(k, 4));
        for (v, lo, hi) in [
            (lambda_fn(4, 2, &x, p), 0, 1),
            (mod2(4, 2, &x, p), 0, 1),
            (sigtanh(4, &d("0"), &d("1"), &x, p).unwrap(), 0, 1),
            (xi(4, 2, &x, p), 0, 1),
        ] {
            let slack = &Dyadic::pow2(-4) + v.radius();
            assert!(
                v.center() >= &(&Dyadic::from_int(lo) - &slack),
                "{v} at {x}"
            );
            assert!(
                v.center() <= &(&Dyadic::from_int(hi) + &slack),
                "{v} at {x}"
            );
        }
    }
}

#[test]
fn tt_tanh_examples() {
    let p = default_precision(8, 0);
    for m in 1..=8 {
        let v = tt_tanh(m, &Ball::zero(), &exact("1/2"), p);
        assert!(within_bound(&v, &Ball::zero(), i64::from(m)));
        let v = tt_tanh(m, &Ball::one(), &exact("1/2"), p);
        assert!(within_bound(&v, &exact("1/2"), i64::from(m)));
        for ell in 0..=8 {
            let f = CertifiedFn::tt_tanh(Dyadic::ratio(ell, 3)).unwrap();
            for dd in ["-1/4", "0", "1/4", "3/4", "1", "5/4", "1/8", "15/16"] {
                check(&f, m, 0, &d(dd));
            }
        }
    }
    assert!(CertifiedFn::tt_tanh(d("2")).is_err());
}

#[test]
fn send_examples() {
    let p = default_precision(8, 0);
    let table = [(0, d("0")), (1, d("1"))];
    let v = send_tanh(6, &table, &exact("1.125"), p).unwrap();
    assert!(within_bound(&v, &Ball::one(), 6));
    let v = send_tanh(6, &[(3, d("5/4"))], &exact("100"), p).unwrap();
    assert_eq!(v, exact("5/4"));
    assert_eq!(
        send_tanh::<Ball>(3, &[], &Ball::zero(), p),
        Err(FunError::EmptyTable)
    );
    assert_eq!(
        send_tanh(3, &[(1, d("0")), (1, d("1"))], &Ball::zero(), p),
        Err(FunError::DuplicateKey(1))
    );
}

#[test]
fn send_pairs_examples() {
    let p = default_precision(8, 0);
    let xor = [
        ((0, 0), d("0")),
        ((0, 1), d("1")),
        ((1, 0), d("1")),
        ((1, 1), d("0")),
    ];
    for m in [2, 5, 8] {
        for ((a, j), v) in &xor {
            for (dx, dy) in [("0", "0"), ("1/4", "-1/4"), ("-1/4", "1/4"), ("1/4", "1/4")] {
                let x = Ball::exact(&Dyadic::from_int(*a) + &d(dx));
                let y = Ball::exact(&Dyadic::from_int(*j) + &d(dy));
                let r = send_pairs_tanh(m, &xor, &x, &y, p).unwrap();
                assert!(
                    within_bound(&r, &Ball::exact(v.clone()), i64::from(m)),
                    "{a},{j}: {r}"
                );
            }
        }
    }
    let constant = [((0, 0), d("3")), ((2, 0), d("3")), ((5, 0), d("3"))];
    let r = send_pairs_tanh(4, &constant, &exact("2"), &exact("0"), p).unwrap();
    assert_eq!(r, exact("3"));
    let gap = [((0, 0), d("1")), ((0, 2), d("1"))];
    assert_eq!(
        send_pairs_tanh(4, &gap, &Ball::zero(), &Ball::zero(), p),
        Err(FunError::NonContiguous(1))
    );
}

#[test]
fn dual_evaluation_agrees() {
    let p = default_precision(4, 2);
    for k in -20..=20 {
        let x = Ball::exact(Dyadic::ratio(k, 3));
        let plain = xi(4, 2, &x, p);
        let dual = xi(4, 2, &Dual::variable(x.clone(), 0, 1), p);
        assert!(plain.overlaps(dual.value()));
    }
}

#[test]
fn registry_names() {
    for name in NAMES {
        assert_eq!(CertifiedFn::from_name(name).unwrap().name(), *name);
    }
    assert!(matches!(
        CertifiedFn::from_name("cosh"),
        Err(FunError::UnknownFunction(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_tables(vals in proptest::collection::btree_map(-6i64..6, -16i64..16, 1..6), m in 1u32..8, pick in 0usize..6, off in -1i64..=1) {
        let table: Vec<(i64, Dyadic)> = vals.iter().map(|(k, v)| (*k, Dyadic::ratio(*v, 2))).collect();
        let (alpha, v) = &table[pick % table.len()];
        let x = Ball::exact(&Dyadic::from_int(*alpha) + &Dyadic::ratio(off, 2));
        let p = default_precision(m, 0);
        let r = send_tanh(m, &table, &x, p).unwrap();
        prop_assert!(within_bound(&r, &Ball::exact(v.clone()), i64::from(m)), "{} vs {}", r, v);
    }

    #[test]
    fn xi_random_points(k in -15i64..15, j in 2i64..=14, m in 1u32..7) {
        let x = &Dyadic::from_int(k) + &Dyadic::ratio(j, 4);
        check(&CertifiedFn::Xi, m, 4, &x);
        if j <= 12 {
            check(&CertifiedFn::Sigma2, m, 4, &x);
        }
    }

    #[test]
    fn coarse_ball_contains_fine(k in -40i64..40, m in 1u32..6) {
        // An inflated input yields an enclosure overlapping the point evaluation.
        let p = default_precision(m, 3);
        let x = Ball::exact(Dyadic::ratio(k, 3));
        let wide = x.inflate(&Dyadic::pow2(-30));
        let a = lambda_fn(m, 3, &x, p);
        let b = lambda_fn(m, 3, &wide, p);
        prop_assert!(b.contains_ball(&a) || b.overlaps(&a));
    }
}

#[test]
fn precision_type_is_shared() {
    let p = Precision::new(60).unwrap();
    let v: Ball = Scalar::round(&relu_approx(3, &exact("1"), p), p);
    assert!(within_bound(&v, &Ball::one(), 3));
}
