mod common;

use common::*;
use odem_core::dyadic_ball::{Ball, Dyadic, Precision};
use odem_core::expr::{decompose_linear, parse_sexpr, Expr, ExprError, ExprVec};
use proptest::prelude::*;

fn v(i: usize) -> Expr {
    Expr::var(i)
}

fn p(bits: i64) -> Precision {
    Precision::new(bits).unwrap()
}

/// x*tanh((x^2 - z)*y) + y^3 over (x, y, z) = (0, 1, 2).
fn sample_expr_1() -> Expr {
    let x2 = Expr::mul(v(0), v(0));
    let inner = Expr::mul(Expr::sub(x2, v(2)), v(1));
    let y3 = Expr::mul(Expr::mul(v(1), v(1)), v(1));
    Expr::add(Expr::mul(v(0), Expr::tanh(inner)), y3)
}

/// z + (1 - tanh x)(1 - tanh(-x))(y - z).
fn sample_expr_3() -> Expr {
    let one = Expr::int(1);
    let a = Expr::sub(one.clone(), Expr::tanh(v(0)));
    let b = Expr::sub(one, Expr::tanh(Expr::neg(v(0))));
    Expr::add(v(2), Expr::mul(Expr::mul(a, b), Expr::sub(v(1), v(2))))
}

fn arb_expr(nvars: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0..nvars).prop_map(Expr::var),
        (-5i64..6).prop_map(Expr::int),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.prop_map(Expr::tanh),
        ]
    })
}

/// Reference degree: expand into monomials and count occurrences of `var`
/// outside tanh nodes, maximising over monomials.
fn reference_degree(e: &Expr, var: usize) -> u32 {
    fn monomials(e: &Expr, var: usize) -> Vec<u32> {
        match e {
            Expr::Var(i) => vec![u32::from(*i == var)],
            Expr::Int(_) | Expr::Tanh(_) => vec![0],
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let mut m = monomials(a, var);
                m.extend(monomials(b, var));
                m
            }
            Expr::Mul(a, b) => {
                let (ma, mb) = (monomials(a, var), monomials(b, var));
                ma.iter()
                    .flat_map(|x| mb.iter().map(move |y| x + y))
                    .collect()
            }
        }
    }
    monomials(e, var).into_iter().max().unwrap_or(0)
}

/// Exact-dyadic evaluation with oracle tanh.
fn oracle_eval(e: &Expr, env: &[Dyadic]) -> Dyadic {
    match e {
        Expr::Var(i) => env[*i].clone(),
        Expr::Int(c) => Dyadic::from_bigint(c.clone()),
        Expr::Add(a, b) => oracle_eval(a, env) + oracle_eval(b, env),
        Expr::Sub(a, b) => oracle_eval(a, env) - oracle_eval(b, env),
        Expr::Mul(a, b) => (oracle_eval(a, env) * oracle_eval(b, env))
            .round_to(ORACLE_BITS + 20, odem_core::dyadic_ball::Rounding::Nearest),
        Expr::Tanh(a) => tanh_oracle(&oracle_eval(a, env)),
    }
}

#[test]
fn degree_examples() {
    let e = sample_expr_1();
    assert_eq!(e.degree(0), 1);
    assert_eq!(e.degree(2), 0);
    assert_eq!(e.degree(1), 3);
    assert_eq!(Expr::int(7).degree(0), 0);
    assert_eq!(Expr::int(7).degree(5), 0);
    assert_eq!(
        e.degree_checked(3, 3),
        Err(ExprError::VarOutOfRange { var: 3, arity: 3 })
    );
    let u = ExprVec::new(vec![e], 3).unwrap();
    assert_eq!(u.degree(0, 1), Ok(3));
    assert!(u.degree(0, 7).is_err());
}

#[test]
fn essential_constancy_examples() {
    assert!(Expr::tanh(v(0)).is_essentially_constant(&[0]));
    assert!(!v(0).is_essentially_constant(&[0]));
    let e = sample_expr_3();
    assert!(e.is_essentially_constant(&[0]));
    assert_eq!(e.degree(1), 1);
    assert_eq!(e.degree(2), 1);
}

#[test]
fn decomposition_examples() {
    let x2 = Expr::mul(v(0), v(0));
    let u = ExprVec::new(vec![Expr::mul(v(0), Expr::tanh(x2.clone()))], 2).unwrap();
    let d = decompose_linear(&u, &[0]).unwrap();
    assert_eq!(d.a, vec![vec![Expr::tanh(x2.clone())]]);
    assert_eq!(d.b, vec![Expr::int(0)]);

    let y3 = Expr::mul(Expr::mul(v(1), v(1)), v(1));
    let u = ExprVec::new(vec![y3.clone()], 2).unwrap();
    let d = decompose_linear(&u, &[0]).unwrap();
    assert_eq!(d.a, vec![vec![Expr::int(0)]]);
    assert_eq!(d.b, vec![y3]);

    let u = ExprVec::new(vec![x2], 2).unwrap();
    match decompose_linear(&u, &[0]) {
        Err(ExprError::NotEssentiallyLinear {
            component,
            degree,
            term,
        }) => {
            assert_eq!(component, 0);
            assert_eq!(degree, 2);
            assert_eq!(term, "(mul (var 0) (var 0))");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn eval_examples() {
    let five = Expr::int(5).eval::<Ball>(&[], p(20)).unwrap();
    assert!(five.is_exact() && five.center() == &Dyadic::from_int(5));
    let z = Expr::add(v(0), Expr::neg(v(0)))
        .eval(&[Ball::new(ratio(3, 2), ratio(1, 10)).unwrap()], p(20))
        .unwrap();
    assert!(z.center().is_zero());
    assert!(matches!(
        v(2).eval::<Ball>(&[Ball::zero()], p(10)),
        Err(ExprError::ArityMismatch {
            expected: 3,
            got: 1
        })
    ));
}

#[test]
fn sample_exprs_against_oracle() {
    let second = Expr::add(
        Expr::mul(v(0), Expr::tanh(v(2))),
        Expr::mul(v(1), Expr::sub(Expr::int(1), Expr::tanh(v(0)))),
    );
    let exprs = [sample_expr_1(), second, sample_expr_3()];
    let mut seed = 11u64;
    for _ in 0..60 {
        let env: Vec<Dyadic> = (0..3)
            .map(|_| {
                seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                Dyadic::ratio(((seed >> 33) as i64 % 4096) - 2048, 9)
            })
            .collect();
        let balls: Vec<Ball> = env.iter().cloned().map(Ball::exact).collect();
        for e in &exprs {
            let b = e.eval(&balls, p(200)).unwrap();
            assert!(encloses(&b, &oracle_eval(e, &env)), "{e} at {env:?}");
        }
    }
}

#[test]
fn sexpr_examples() {
    let e = parse_sexpr("(add (mul (var 0) (tanh (var 1))) (int 3))").unwrap();
    assert_eq!(
        e,
        Expr::add(Expr::mul(v(0), Expr::tanh(v(1))), Expr::int(3))
    );
    assert_eq!(e.to_string(), "(add (mul (var 0) (tanh (var 1))) (int 3))");
    let n = parse_sexpr("(add (var 0) (var 1) (int -2))").unwrap();
    assert_eq!(n, Expr::add(Expr::add(v(0), v(1)), Expr::int(-2)));
    for bad in [
        "(add (var 0))",
        "(pow (var 0) (int 2))",
        "(var x)",
        "(int 3",
        "(int 3) x",
        "",
    ] {
        assert!(
            matches!(parse_sexpr(bad), Err(ExprError::Parse { .. })),
            "{bad}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_matches_reference(e in arb_expr(3), var in 0usize..3) {
        prop_assert_eq!(e.degree(var), reference_degree(&e, var));
    }

    #[test]
    fn degree_laws(a in arb_expr(3), b in arb_expr(3), var in 0usize..3) {
        prop_assert_eq!(Expr::add(a.clone(), b.clone()).degree(var), a.degree(var).max(b.degree(var)));
        prop_assert_eq!(Expr::sub(a.clone(), b.clone()).degree(var), a.degree(var).max(b.degree(var)));
        prop_assert_eq!(Expr::mul(a.clone(), b.clone()).degree(var), a.degree(var) + b.degree(var));
        prop_assert_eq!(Expr::tanh(a).degree(var), 0);
    }

    #[test]
    fn sexpr_round_trip(e in arb_expr(4)) {
        prop_assert_eq!(parse_sexpr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn decomposition_is_sound(
        parts in proptest::collection::vec((arb_expr(3), arb_expr(3)), 1..3),
        env in proptest::collection::vec(-64i64..64, 3),
    ) {
        // Build u = sum_k c_k * f_k + d_k with c_k, d_k essentially constant in f = var 0.
        let strip = |e: &Expr| -> Expr { Expr::tanh(e.clone()) };
        let u = Expr::sum(parts.iter().map(|(c, d)| Expr::add(Expr::mul(strip(c), v(0)), Expr::mul(d.clone(), strip(d)))));
        let u = Expr::add(u, Expr::mul(v(1), v(2)));
        prop_assume!(u.degree(0) <= 1);
        let uv = ExprVec::new(vec![u.clone()], 3).unwrap();
        let dec = match decompose_linear(&uv, &[0]) {
            Ok(d) => d,
            Err(ExprError::NotEssentiallyLinear { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        prop_assert!(dec.a[0][0].is_essentially_constant(&[0]));
        prop_assert!(dec.b[0].is_essentially_constant(&[0]));
        let envb: Vec<Ball> = env.iter().map(|&k| Ball::exact(Dyadic::ratio(k, 4))).collect();
        let prec = p(80);
        let direct = u.eval(&envb, prec).unwrap();
        let a = dec.a[0][0].eval(&envb, prec).unwrap();
        let b = dec.b[0].eval(&envb, prec).unwrap();
        let recon = &(&a * &envb[0]) + &b;
        prop_assert!(direct.overlaps(&recon));
    }

    #[test]
    fn eval_is_monotone_under_refinement(e in arb_expr(2), c in proptest::collection::vec(-32i64..32, 2), shrink in 1u32..6) {
        let coarse: Vec<Ball> = c.iter().map(|&k| Ball::new(Dyadic::ratio(k, 3), Dyadic::ratio(1, 6)).unwrap()).collect();
        let fine: Vec<Ball> = c.iter().map(|&k| Ball::new(Dyadic::ratio(k, 3), Dyadic::ratio(1, 6 + shrink)).unwrap()).collect();
        let bits = 40;
        let rc = e.eval(&coarse, p(bits)).unwrap();
        let rf = e.eval(&fine, p(bits)).unwrap();
        let grown = rc.inflate(&Dyadic::pow2(-bits));
        prop_assert!(grown.contains_ball(&rf), "{:?} vs {:?}", rc, rf);
    }
}
