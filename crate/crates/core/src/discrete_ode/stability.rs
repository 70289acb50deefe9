use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{DiscreteOde, OdeKind, StepIndex};
use crate::dyadic_ball::{Ball, Dyadic, Precision};

/// Perturbation budget `eps(n, len(y))` in bits.
#[derive(Clone)]
pub struct StabilityBudget {
    epsilon_bits: Arc<dyn Fn(u32, u32) -> u32 + Send + Sync>,
}

impl fmt::Debug for StabilityBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StabilityBudget(eps(1,1)={})", self.epsilon_bits(1, 1))
    }
}

impl StabilityBudget {
    pub fn new(f: impl Fn(u32, u32) -> u32 + Send + Sync + 'static) -> Self {
        StabilityBudget {
            epsilon_bits: Arc::new(f),
        }
    }

    pub fn constant(bits: u32) -> Self {
        Self::new(move |_, _| bits)
    }

    /// `a n + b len + c`.
    pub fn linear(a: u32, b: u32, c: u32) -> Self {
        Self::new(move |n, len| a * n + b * len + c)
    }

    pub fn epsilon_bits(&self, n: u32, len: u32) -> u32 {
        (self.epsilon_bits)(n, len)
    }

    /// Check monotonicity on `[0, n_max] x [0, len_max]`.
    pub fn is_monotone_on(&self, n_max: u32, len_max: u32) -> bool {
        (0..=n_max).all(|n| {
            (0..=len_max).all(|l| {
                let v = self.epsilon_bits(n, l);
                (n == n_max || self.epsilon_bits(n + 1, l) >= v)
                    && (l == len_max || self.epsilon_bits(n, l + 1) >= v)
            })
        })
    }
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub trials: usize,
    pub epsilon_bits: u32,
    /// Largest center deviation from the unperturbed run over all trials, steps and components.
    pub max_deviation: Dyadic,
    /// Largest `deviation - (2^-n + radii)`; non-positive when the probe passes.
    pub worst_excess: Dyadic,
    pub worst_trial: usize,
    pub worst_step: u64,
    pub pass: bool,
}

/// Sign pattern of one trial: adversarial corners first, then random signs.
fn signs(trial: usize, seed: u64, steps: u64, width: usize) -> Vec<Vec<i8>> {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (0..=steps + 2)
        .map(|t| {
            (0..width)
                .map(|i| match trial {
                    0 => 1,
                    1 => -1,
                    2 => {
                        if i % 2 == 0 {
                            1
                        } else {
                            -1
                        }
                    }
                    3 => {
                        if t % 2 == 0 {
                            1
                        } else {
                            -1
                        }
                    }
                    _ => {
                        if rng.gen::<bool>() {
                            1
                        } else {
                            -1
                        }
                    }
                })
                .collect()
        })
        .collect()
}

fn shift(b: &Ball, delta: &Dyadic, sign: i8) -> Ball {
    if sign >= 0 {
        b.add_dyadic(delta)
    } else {
        b.add_dyadic(&-delta)
    }
}

fn y_length(y: &[Ball]) -> u32 {
    y.iter()
        .map(|b| b.mag().floor_int().bits() as u32)
        .max()
        .unwrap_or(0)
}

/// Sampled robustness check: perturb `y`, the initial value, the auxiliary values and
/// every step by `2^-eps(n, len(y))` and compare against the unperturbed trajectory.
#[allow(clippy::too_many_arguments)]
pub fn stability_probe<S>(
    sys: &S,
    kind: OdeKind,
    budget: &StabilityBudget,
    steps: u64,
    y: &[Ball],
    n: u32,
    trials: usize,
    seed: u64,
    p: Precision,
) -> StabilityReport
where
    S: DiscreteOde<Ball> + ?Sized,
{
    assert!(trials >= 1, "at least one trial");
    let eps = budget.epsilon_bits(n, y_length(y));
    let delta = Dyadic::pow2(-(eps as i64));
    let reference = super::trajectory(sys, kind, steps, y, p);
    let dim = sys.dim();
    let width = dim
        .max(y.len())
        .max(sys.auxiliary(&StepIndex::new(0, kind), p).len())
        .max(1);
    let tol = Dyadic::pow2(-(n as i64));

    let per_trial: Vec<(Dyadic, Dyadic, u64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let sg = signs(trial, seed, steps, width);
            let yp: Vec<Ball> = y
                .iter()
                .enumerate()
                .map(|(i, b)| shift(b, &delta, sg[0][i]))
                .collect();
            let mut f: Vec<Ball> = sys
                .initial(&yp, p)
                .iter()
                .enumerate()
                .map(|(i, b)| shift(b, &delta, sg[1][i]))
                .collect();
            let mut worst_dev = Dyadic::zero();
            let mut worst_excess: Option<Dyadic> = None;
            let mut worst_step = 0;
            for t in 0..=steps {
                let r = &reference[t as usize];
                for (a, b) in f.iter().zip(r) {
                    let dev = (a.center() - b.center()).abs();
                    let allowance = &(&tol + a.radius()) + b.radius();
                    let excess = &dev - &allowance;
                    if worst_excess.as_ref().is_none_or(|w| &excess > w) {
                        worst_excess = Some(excess);
                        worst_step = t;
                    }
                    if dev > worst_dev {
                        worst_dev = dev;
                    }
                }
                if t == steps {
                    break;
                }
                let idx = StepIndex::new(t, kind);
                let aux: Vec<Ball> = sys
                    .auxiliary(&idx, p)
                    .iter()
                    .enumerate()
                    .map(|(i, b)| shift(b, &delta, sg[(t + 2) as usize][(i + 1) % width]))
                    .collect();
                let row = &sg[(t + 2) as usize];
                f = sys
                    .step(&f, &aux, &idx, &yp, p)
                    .iter()
                    .enumerate()
                    .map(|(i, b)| shift(b, &delta, row[i]))
                    .collect();
            }
            (
                worst_dev,
                worst_excess.unwrap_or_else(Dyadic::zero),
                worst_step,
            )
        })
        .collect();

    let mut report = StabilityReport {
        trials,
        epsilon_bits: eps,
        max_deviation: Dyadic::zero(),
        worst_excess: per_trial[0].1.clone(),
        worst_trial: 0,
        worst_step: per_trial[0].2,
        pass: true,
    };
    for (i, (dev, excess, step)) in per_trial.into_iter().enumerate() {
        if dev > report.max_deviation {
            report.max_deviation = dev;
        }
        if excess > report.worst_excess {
            report.worst_excess = excess;
            report.worst_trial = i;
            report.worst_step = step;
        }
    }
    report.pass = !report.worst_excess.is_positive();
    report
}
