use std::sync::Arc;

use super::sigtanh_unchecked;
use crate::discrete_ode::{solve_recurrence, LinearOdeSystem, OdeKind, StepIndex};
use crate::dyadic_ball::{Ball, Dyadic, Precision, Scalar};
use crate::expr::{Expr, ExprVec};

// Level `t` of the halving iteration for `xi'(m, n, .)` subtracts `K = 2^(n-1-t)` when the
// state is above `K`, via a ramp on `[K + 1/32, K + 3/32]` (inside the gap between cells).
// The ramp is evaluated at accuracy `m + n + 1`, so level `t` contributes at most
// `K 2^-(m+n+1) = 2^-(m+2+t)` and all levels together stay below `2^-(m+1)`.

fn level_ramp(m: u32, n: u32) -> i64 {
    i64::from(m) + i64::from(n) + 1
}

fn level_bounds(k: &Dyadic) -> (Dyadic, Dyadic) {
    (k + &Dyadic::ratio(1, 5), k + &Dyadic::ratio(3, 5))
}

fn final_level<T: Scalar>(m: u32, h: &T, p: Precision) -> T {
    let s = sigtanh_unchecked(
        i64::from(m) + 1,
        &Dyadic::ratio(1, 3),
        &Dyadic::ratio(7, 3),
        h,
        p,
    );
    s.scale(&Dyadic::ratio(3, 2))
}

/// `xi'(m, n, .)` as a linear length-ODE in one state variable `h`, started at the
/// parameter `x` and run for `n` steps; the last ramp `3/4 sig(1/8, 7/8, h)` is applied
/// by [`xi_prime`].
///
/// Environment layout: `[h, C, a, b, G, counter, x]` with auxiliary values
/// `C = 8K`, `a = K + 1/32`, `b = K + 3/32`, `G = 2^(m+n+6)` at level `K`.
pub fn xi_prime_system(m: u32, n: u32) -> LinearOdeSystem {
    let h = || Expr::var(0);
    let (c, a, b, g) = (Expr::var(1), Expr::var(2), Expr::var(3), Expr::var(4));
    let half_ramp = |edge: Expr| {
        let shifted = Expr::sub(h(), edge);
        Expr::mul(
            shifted.clone(),
            Expr::add(Expr::int(1), Expr::tanh(Expr::mul(g.clone(), shifted))),
        )
    };
    let u = Expr::neg(Expr::mul(c, Expr::sub(half_ramp(a), half_ramp(b))));
    let update = ExprVec::new(vec![u], 7).expect("update arity");
    let init = ExprVec::new(vec![Expr::var(0)], 1).expect("initial arity");
    let gain = Dyadic::pow2(level_ramp(m, n) + 5);
    let aux = Arc::new(move |step: &StepIndex, _p: Precision| {
        let k = Dyadic::pow2(i64::from(n) - 1 - step.t as i64);
        let (a, b) = level_bounds(&k);
        vec![
            Ball::exact(k.shl(3)),
            Ball::exact(a),
            Ball::exact(b),
            Ball::exact(gain.clone()),
        ]
    });
    LinearOdeSystem::from_update(update, init, 4, 1, aux).expect("well-formed halving system")
}

/// `xi'(m, n, x)`: within `2^-m` of `{x - 1/8}` on `[k + 1/8, k + 7/8]` for `0 <= k < 2^n`,
/// and within `2^-m` of `0` for `x <= -1/8`.
pub fn xi_prime<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    let sys = xi_prime_system(m, n);
    let h = solve_recurrence(
        &sys,
        OdeKind::LengthDerivation,
        u64::from(n),
        std::slice::from_ref(x),
        p,
    );
    final_level(m, &h[0], p)
}

/// Direct composition of the halving levels, without the ODE machinery.
pub fn xi_prime_composed<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    let e = level_ramp(m, n);
    let mut h = x.clone();
    for t in 0..n {
        let k = Dyadic::pow2(i64::from(n) - 1 - i64::from(t));
        let (a, b) = level_bounds(&k);
        let s = sigtanh_unchecked(e, &a, &b, &h, p);
        h = h.sub(&s.scale(&k)).round(p);
    }
    final_level(m, &h, p)
}

fn combine<T: Scalar>(m: u32, x: &T, p: Precision, inner: impl Fn(u32, &T) -> T) -> T {
    let mp = m + 2;
    let pos = inner(mp, x);
    let neg = inner(mp, &x.neg());
    let step = sigtanh_unchecked(i64::from(mp), &Dyadic::zero(), &Dyadic::ratio(1, 3), x, p);
    let three_quarters = Dyadic::ratio(3, 2);
    pos.sub(&neg)
        .add_dyadic(&three_quarters)
        .sub(&step.scale(&three_quarters))
        .round(p)
}

/// `xi(m, n, x)`: within `2^-m` of `{x - 1/8}` whenever `x` lies in `[k + 1/8, k + 7/8]`
/// with `-2^n <= k < 2^n`.
pub fn xi<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    combine(m, x, p, |mp, v| xi_prime(mp, n, v, p))
}

/// [`xi`] built on [`xi_prime_composed`].
pub fn xi_composed<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    combine(m, x, p, |mp, v| xi_prime_composed(mp, n, v, p))
}

/// `xi(x - 3/8) - 1/2`: within `2^-m` of `x - k` on `[k - 1/2, k + 1/4]`.
pub fn xi1<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    xi(m, n, &x.add_dyadic(&Dyadic::ratio(-3, 3)), p).add_dyadic(&Dyadic::ratio(-1, 1))
}

/// `xi(x - 7/8)`: within `2^-m` of `x - k` on `[k, k + 3/4]`.
pub fn xi2<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    xi(m, n, &x.add_dyadic(&Dyadic::ratio(-7, 3)), p)
}

/// `x - xi1`: within `2^-m` of `k` on `[k - 1/2, k + 1/4]`.
pub fn sigma1<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    x.sub(&xi1(m, n, x, p))
}

/// `x - xi2`: within `2^-m` of `k` on `[k, k + 3/4]`.
pub fn sigma2<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    x.sub(&xi2(m, n, x, p))
}

/// `sig(1/4, 1/2, xi(x - 9/8))`: within `2^-m` of `0` on `[k + 1/4, k + 1/2]` and of `1`
/// on `[k + 3/4, k + 1]`. The inner `xi` runs three bits finer to absorb the ramp slope 4.
pub fn lambda_fn<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    let inner = xi(m + 3, n, &x.add_dyadic(&Dyadic::ratio(-9, 3)), p);
    sigtanh_unchecked(
        i64::from(m) + 1,
        &Dyadic::ratio(1, 2),
        &Dyadic::ratio(1, 1),
        &inner,
        p,
    )
}

/// `1 - lambda(m, n - 1, x/2 + 7/8)`: within `2^-m` of `k mod 2` on `[k - 1/4, k + 1/4]`.
pub fn mod2<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    let arg = x.shl(-1).add_dyadic(&Dyadic::ratio(7, 3));
    lambda_fn(m, n.saturating_sub(1), &arg, p)
        .neg()
        .add_dyadic(&Dyadic::one())
}

/// `(sigma1 - mod2) / 2`: within `2^-m` of `k // 2` on `[k - 1/4, k + 1/4]`.
pub fn div2<T: Scalar>(m: u32, n: u32, x: &T, p: Precision) -> T {
    sigma1(m, n, x, p).sub(&mod2(m, n, x, p)).shl(-1)
}
