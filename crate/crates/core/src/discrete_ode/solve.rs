use num_bigint::BigUint;

use super::{DiscreteOde, LinearOdeSystem, Matrix, OdeKind, StepIndex};
use crate::dyadic_ball::{Ball, Dyadic, Precision, Scalar};

/// Number of bits of `x`; `bit_length(0) = 0`.
pub fn bit_length(x: &BigUint) -> u64 {
    x.bits()
}

/// All iterates `f(0), ..., f(steps)`.
pub fn trajectory<T, S>(sys: &S, kind: OdeKind, steps: u64, y: &[T], p: Precision) -> Vec<Vec<T>>
where
    T: Scalar,
    S: DiscreteOde<T> + ?Sized,
{
    let mut out = Vec::with_capacity(steps as usize + 1);
    let mut f = sys.initial(y, p);
    for t in 0..steps {
        let idx = StepIndex::new(t, kind);
        let aux = sys.auxiliary(&idx, p);
        let next = sys.step(&f, &aux, &idx, y, p);
        out.push(std::mem::replace(&mut f, next));
    }
    out.push(f);
    out
}

/// Iterate the recurrence `steps` times. For [`OdeKind::LengthDerivation`] `steps` is `t = l(x)`.
pub fn solve_recurrence<T, S>(sys: &S, kind: OdeKind, steps: u64, y: &[T], p: Precision) -> Vec<T>
where
    T: Scalar,
    S: DiscreteOde<T> + ?Sized,
{
    let mut f = sys.initial(y, p);
    for t in 0..steps {
        let idx = StepIndex::new(t, kind);
        let aux = sys.auxiliary(&idx, p);
        f = sys.step(&f, &aux, &idx, y, p);
    }
    f
}

/// Value of a length-ODE at `x`, i.e. after `l(x)` updates.
pub fn solve_length<T, S>(sys: &S, x: &BigUint, y: &[T], p: Precision) -> Vec<T>
where
    T: Scalar,
    S: DiscreteOde<T> + ?Sized,
{
    solve_recurrence(sys, OdeKind::LengthDerivation, bit_length(x), y, p)
}

/// Explicit solution `f = sum_{u=-1}^{steps-1} (prod_{t=u+1}^{steps-1} (1 + A_t)) B_u`, `B_{-1} = g(y)`.
pub fn solve_explicit<T: Scalar>(
    sys: &LinearOdeSystem,
    kind: OdeKind,
    steps: u64,
    y: &[T],
    p: Precision,
) -> Vec<T> {
    let schedule = vec![p.bits(); steps.max(1) as usize];
    solve_explicit_scheduled(sys, kind, steps, y, &schedule)
}

/// [`solve_explicit`] with factor `u` evaluated at `schedule[u]` bits.
pub fn solve_explicit_scheduled<T: Scalar>(
    sys: &LinearOdeSystem,
    kind: OdeKind,
    steps: u64,
    y: &[T],
    schedule: &[u32],
) -> Vec<T> {
    let top = schedule.iter().copied().max().unwrap_or(1).max(1);
    let p_top = Precision::new(top as i64 + 4).expect("precision");
    let g = DiscreteOde::<T>::initial(sys, y, p_top);
    if steps == 0 {
        return g;
    }
    let traj = trajectory(sys, kind, steps - 1, y, p_top);
    let d = DiscreteOde::<T>::dim(sys);
    let mut suffix = Matrix::<T>::identity(d);
    let mut acc: Vec<T> = vec![T::from_int(0); d];
    for u in (0..steps as usize).rev() {
        let pu = Precision::new(schedule[u.min(schedule.len() - 1)] as i64).expect("precision");
        let idx = StepIndex::new(u as u64, kind);
        let aux = DiscreteOde::<T>::auxiliary(sys, &idx, pu);
        let (a, b) = sys.linear_parts(&traj[u], &aux, &idx, y, pu);
        let term = suffix.mul_vec(&b);
        acc = acc.iter().zip(&term).map(|(x, t)| x.add(t)).collect();
        suffix = suffix.mul(&a.one_plus()).map(|e| e.round(p_top));
    }
    let term = suffix.mul_vec(&g);
    acc.iter()
        .zip(&term)
        .map(|(x, t)| x.add(t).round(p_top))
        .collect()
}

fn ceil_log2(v: u64) -> u32 {
    if v <= 1 {
        0
    } else {
        64 - (v - 1).leading_zeros()
    }
}

/// Per-factor precisions `p_j = target + 2 ceil(log2(steps + 1)) + magnitude_bound_bits`.
pub fn precision_schedule(target_bits: u32, steps: u64, magnitude_bound_bits: u32) -> Vec<u32> {
    let p = target_bits + 2 * ceil_log2(steps + 1) + magnitude_bound_bits;
    vec![p; steps.max(1) as usize]
}

fn mag_bits(x: &Dyadic) -> i64 {
    x.magnitude_exp().map_or(i64::MIN / 4, |e| e + 1)
}

fn max_row_sum(m: &Matrix<Ball>) -> Dyadic {
    m.rows()
        .iter()
        .map(|r| r.iter().fold(Dyadic::zero(), |acc, b| &acc + &b.mag()))
        .max()
        .unwrap_or_else(Dyadic::zero)
}

fn max_mag(v: &[Ball]) -> Dyadic {
    v.iter().map(Ball::mag).max().unwrap_or_else(Dyadic::zero)
}

/// Bits needed to absorb the growth of products, inputs and state sensitivity in the
/// explicit formula, estimated by an interval pre-pass at 8 bits.
pub fn magnitude_bound_bits(sys: &LinearOdeSystem, kind: OdeKind, steps: u64, y: &[Ball]) -> u32 {
    let p8 = Precision::new(8).expect("precision");
    let traj = trajectory(sys, kind, steps, y, p8);
    let d = DiscreteOde::<Ball>::dim(sys);
    let mut magnitude = Dyadic::one();
    let mut sensitivity = Dyadic::one();
    let mut suffix = Matrix::<Ball>::identity(d);
    for u in (0..steps as usize).rev() {
        let idx = StepIndex::new(u as u64, kind);
        let aux = DiscreteOde::<Ball>::auxiliary(sys, &idx, p8);
        let (a, b) = sys.linear_parts(&traj[u], &aux, &idx, y, p8);
        // Sensitivity of A, B to the state: compare against a state perturbed by 2^-20.
        let shifted: Vec<Ball> = traj[u]
            .iter()
            .map(|x| x.inflate(&Dyadic::pow2(-20)))
            .collect();
        let (a2, b2) = sys.linear_parts(&shifted, &aux, &idx, y, p8);
        let spread = a2
            .rows()
            .iter()
            .flatten()
            .chain(&b2)
            .zip(a.rows().iter().flatten().chain(&b))
            .map(|(w, n)| w.radius() - n.radius())
            .max()
            .unwrap_or_else(Dyadic::zero)
            .shl(20);
        sensitivity = sensitivity.max(spread);
        let one_plus = a.one_plus();
        magnitude = magnitude
            .max(max_row_sum(&suffix))
            .max(max_mag(&b))
            .max(max_row_sum(&one_plus))
            .max(max_mag(&traj[u]));
        suffix = suffix.mul(&one_plus);
    }
    magnitude = magnitude
        .max(max_row_sum(&suffix))
        .max(max_mag(&traj[steps as usize]));
    let m = mag_bits(&magnitude).max(0);
    let s = mag_bits(&sensitivity).max(0);
    (2 * m + s + 2) as u32
}

/// Solve with [`precision_schedule`] driven by [`magnitude_bound_bits`], raising the
/// bound by the observed shortfall until every component has radius at most `2^-target`.
pub fn solve_certified(
    sys: &LinearOdeSystem,
    kind: OdeKind,
    steps: u64,
    y: &[Ball],
    target_bits: u32,
) -> (Vec<Ball>, Vec<u32>) {
    let goal = Dyadic::pow2(-(target_bits as i64));
    let mut bound = magnitude_bound_bits(sys, kind, steps, y);
    loop {
        let schedule = precision_schedule(target_bits, steps, bound);
        let out = solve_explicit_scheduled(sys, kind, steps, y, &schedule);
        let worst = out
            .iter()
            .map(|b| b.radius().clone())
            .max()
            .unwrap_or_else(Dyadic::zero);
        if worst <= goal || bound > 16 * (target_bits + 64) {
            return (out, schedule);
        }
        let short = mag_bits(&worst) + target_bits as i64 + 2;
        bound += short.max(1) as u32;
    }
}
