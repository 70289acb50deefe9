use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use anyhow::bail;
use clap::Args;
use num_bigint::BigUint;
use odem_core::discrete_ode::{
    magnitude_bound_bits, precision_schedule, solve_explicit, solve_explicit_scheduled,
    solve_recurrence, stability_probe, LinearOdeSystem, OdeKind, StabilityBudget, StepIndex,
};
use odem_core::dyadic_ball::{exp_neg_ball, tanh_ball, Ball, Dyadic, Precision};
use odem_core::expr::{Expr, ExprVec};
use odem_core::funlib::{CertifiedFn, SendTable};
use odem_core::turing::machines;
use odem_core::turing::{
    barycentric_eval, decode_int, encode_int_exact, encode_mul, exec_space_trajectory,
    exec_time_trajectory, int_blocks, reference_run, Config, DiscreteApproximator, EncodedConfig,
    ExecSystem, NextMap, ScaledIdentity, TuringMachine, DEFAULT_GUARD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::out::csv_writer;
use crate::Status;

pub const SUITES: &[&str] = &[
    "relu",
    "xi",
    "bestiary",
    "tanh-tail",
    "ode-equivalence",
    "precision-schedule",
    "tm-soundness",
    "tm-robustness",
    "converters",
    "barycentric",
    "stability",
];

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only these suites (repeatable); default all.
    #[arg(long)]
    pub suite: Vec<String>,
    /// Largest accuracy exponent m swept by the bound checks.
    #[arg(long, default_value_t = 6)]
    pub m_max: u32,
    /// Sweep density multiplier.
    #[arg(long, default_value_t = 1)]
    pub density: u32,
    /// Also write the summary as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Ctx {
    m_max: u32,
    density: u32,
    seed: u64,
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: usize,
    max_error: f64,
}

impl Tally {
    fn record(&mut self, ok: bool, error: f64) {
        self.cases += 1;
        self.failures += usize::from(!ok);
        if error.is_finite() {
            self.max_error = self.max_error.max(error);
        } else {
            self.max_error = f64::INFINITY;
        }
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failures += other.failures;
        self.max_error = self.max_error.max(other.max_error);
    }
}

fn sweep(f: &CertifiedFn, ms: impl Iterator<Item = u32>, n: u32, xs: &[Dyadic]) -> Tally {
    let mut tally = Tally::default();
    for m in ms {
        let res: Vec<(bool, f64)> = xs
            .par_iter()
            .filter_map(|x| {
                let s = f.sample(m, n, x, None);
                let t = s.target?;
                Some((s.pass?, (s.value.center() - t.center()).abs().to_f64()))
            })
            .collect();
        for (ok, e) in res {
            tally.record(ok, e);
        }
    }
    tally
}

/// Points `k + j/16` for integer cells `k` in `lo..=hi`.
fn cells(lo: i64, hi: i64, js: std::ops::Range<i64>) -> Vec<Dyadic> {
    (lo..=hi)
        .flat_map(|k| {
            js.clone()
                .map(move |j| &Dyadic::from_int(k) + &Dyadic::ratio(j, 4))
        })
        .collect()
}

/// `step = 2^-(2 + log2 density)` over `[-16, 16]`.
fn relu(ctx: &Ctx) -> Tally {
    let bits = 2 + ctx.density.ilog2();
    let k = 16i64 << bits;
    let xs: Vec<Dyadic> = (-k..=k).map(|i| Dyadic::ratio(i, bits)).collect();
    sweep(&CertifiedFn::Relu, 1..=ctx.m_max, 0, &xs)
}

fn xi(ctx: &Ctx) -> Tally {
    let mut t = Tally::default();
    for n in 1..=2 + ctx.density.min(2) {
        let big = 1i64 << n;
        t.merge(sweep(
            &CertifiedFn::Xi,
            1..=ctx.m_max,
            n,
            &cells(-big + 1, big - 1, 2..15),
        ));
    }
    t
}

fn bestiary(ctx: &Ctx) -> Tally {
    let mut t = Tally::default();
    let js = 0..(if ctx.density > 1 { 16 } else { 8 });
    for f in [
        CertifiedFn::Xi1,
        CertifiedFn::Xi2,
        CertifiedFn::Sigma1,
        CertifiedFn::Sigma2,
        CertifiedFn::Lambda,
        CertifiedFn::Mod2,
        CertifiedFn::Div2,
    ] {
        for n in [1, 3] {
            let big = 1i64 << n;
            t.merge(sweep(&f, 1..=ctx.m_max, n, &cells(-big, big, js.clone())));
        }
    }
    let gate: Vec<Dyadic> = (-8..=8)
        .chain(24..=40)
        .map(|k| Dyadic::ratio(k, 5))
        .collect();
    for ell in 0..=2 {
        let f = CertifiedFn::tt_tanh(Dyadic::ratio(ell, 1)).expect("ell in [0, 1]");
        t.merge(sweep(&f, 1..=ctx.m_max, 0, &gate));
    }
    let table =
        SendTable::new((0..6).map(|k| (k, Dyadic::ratio(k * 3 - 5, 1)))).expect("distinct keys");
    t.merge(sweep(
        &CertifiedFn::SendTanh(table),
        1..=ctx.m_max,
        0,
        &cells(-2, 7, js.clone()),
    ));
    t
}

fn tanh_tail(ctx: &Ctx) -> Tally {
    let mut t = Tally::default();
    let points = 100 * i64::from(ctx.density);
    for k in 0..points {
        let a = &Dyadic::ratio(k, 2) + &Dyadic::ratio(1, 7);
        let p = Precision::new(40 + 6 * (k / 2 + 1)).expect("positive");
        let rhs = match exp_neg_ball(&Ball::exact(a.shl(1)), p) {
            Ok(r) => r.shl(1),
            Err(_) => {
                t.record(false, f64::INFINITY);
                continue;
            }
        };
        let neg = &Ball::one() + &tanh_ball(&Ball::exact(-&a), p);
        let pos = &Ball::one() - &tanh_ball(&Ball::exact(a.clone()), p);
        for side in [neg, pos] {
            t.record(side.upper() <= rhs.lower(), 0.0);
        }
    }
    t
}

/// Random essentially linear system over `[f.., h0, counter, y0, y1]`.
fn random_system(rng: &mut ChaCha8Rng) -> (LinearOdeSystem, Vec<Ball>, u64) {
    let d = rng.gen_range(1..=3usize);
    let (h0, counter, y0) = (d, d + 1, d + 2);
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
                    let arg = Expr::add(atom(rng), atom(rng));
                    Expr::mul(Expr::int(k), Expr::tanh(arg))
                })
                .collect()
        })
        .collect();
    let b = (0..d)
        .map(|_| {
            let arg = Expr::mul(atom(rng), atom(rng));
            Expr::add(Expr::tanh(arg), Expr::var(y0 + rng.gen_range(0..2)))
        })
        .collect();
    let init = ExprVec::new(
        (0..d)
            .map(|i| Expr::add(Expr::var(i % 2), Expr::int(i as i64)))
            .collect(),
        2,
    )
    .expect("closed over the parameters");
    let aux = Arc::new(|s: &StepIndex, _p: Precision| -> Vec<Ball> {
        vec![Ball::exact(Dyadic::ratio(1, 3 + (s.t % 3) as u32))]
    });
    let sys = LinearOdeSystem::new(a, b, init, 1, 2, aux).expect("essentially linear");
    let y = vec![
        Ball::exact(Dyadic::ratio(rng.gen_range(-8..=8), 3)),
        Ball::exact(Dyadic::ratio(rng.gen_range(-8..=8), 2)),
    ];
    (sys, y, rng.gen_range(0..=8u64))
}

fn systems(ctx: &Ctx) -> Vec<(LinearOdeSystem, Vec<Ball>, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    (0..20 * ctx.density)
        .map(|_| random_system(&mut rng))
        .collect()
}

fn ode_equivalence(ctx: &Ctx) -> Tally {
    let p = Precision::new(60).expect("positive");
    let mut t = Tally::default();
    for (sys, y, steps) in systems(ctx) {
        for kind in [OdeKind::LengthDerivation, OdeKind::PlainDerivation] {
            let r = solve_recurrence(&sys, kind, steps, &y, p);
            let e = solve_explicit(&sys, kind, steps, &y, p);
            let gap = r
                .iter()
                .zip(&e)
                .map(|(a, b)| (a.center() - b.center()).abs().to_f64())
                .fold(0.0, f64::max);
            t.record(r.iter().zip(&e).all(|(a, b)| a.overlaps(b)), gap);
        }
    }
    t
}

fn precision_schedule_suite(ctx: &Ctx) -> Tally {
    let goal = Dyadic::pow2(-40);
    let mut t = Tally::default();
    for (sys, y, steps) in systems(ctx) {
        for kind in [OdeKind::LengthDerivation, OdeKind::PlainDerivation] {
            let schedule =
                precision_schedule(40, steps, magnitude_bound_bits(&sys, kind, steps, &y));
            for b in solve_explicit_scheduled(&sys, kind, steps, &y, &schedule) {
                t.record(b.radius() <= &goal, b.radius().to_f64());
            }
        }
    }
    t
}

fn tm_machines() -> Vec<(TuringMachine, Vec<u8>)> {
    vec![
        (machines::binary_increment(), vec![1, 1]),
        (machines::unary_copier(), vec![1, 1, 1]),
        (machines::looper3(), vec![3]),
    ]
}

fn tm_ms(ctx: &Ctx) -> Vec<u32> {
    (4..=ctx.m_max.max(4)).step_by(2).collect()
}

/// Runs of the three sample machines, time- and space-bounded, optionally perturbed.
fn tm_runs(ctx: &Ctx, perturb: Option<(i8, i8)>) -> Tally {
    let t_time = 10 * u64::from(ctx.density);
    let t_space = 100 * u64::from(ctx.density);
    let mut jobs = Vec::new();
    for (machine, input) in tm_machines() {
        for m in tm_ms(ctx) {
            jobs.push((machine.clone(), input.clone(), m, true));
            jobs.push((machine.clone(), input.clone(), m, false));
        }
    }
    let results: Vec<Tally> = jobs
        .par_iter()
        .map(|(machine, input, m, time_bounded)| {
            let mut t = Tally::default();
            let c0 = Config::initial(machine, input);
            let (steps, space) = if *time_bounded {
                (t_time, t_time as usize + input.len())
            } else {
                (t_space, 8)
            };
            let Ok(reference) = reference_run(machine, &c0, steps, Some(space)) else {
                t.record(false, f64::INFINITY);
                return t;
            };
            let mut e0 = EncodedConfig::exact(&c0);
            if let Some((sl, sr)) = perturb {
                e0 = e0.perturbed(&Dyadic::pow2(-2 * (space as i64 + 2)), sl, sr);
            }
            let traj = if *time_bounded {
                exec_time_trajectory(machine, *m, steps, &e0, input.len(), true)
            } else {
                exec_space_trajectory(machine, *m, space, steps, &e0, true)
            };
            for (e, c) in traj.iter().zip(&reference) {
                let d = e.deviation(c);
                t.record(d.within(*m), d.tape_max().to_f64());
            }
            let decoded = traj.last().and_then(|e| e.decode(space));
            t.record(decoded.as_ref() == reference.last(), 0.0);
            t
        })
        .collect();
    let mut t = Tally::default();
    for r in results {
        t.merge(r);
    }
    t
}

fn tm_soundness(ctx: &Ctx) -> Tally {
    tm_runs(ctx, None)
}

/// Largest excess of the tape deviation over `2^-m + radius` on a right-moving machine.
fn right_mover_excess(m: u32, space: usize, rounding: bool) -> Dyadic {
    let machine = machines::right_mover();
    let c0 = Config::initial(&machine, &[1]);
    let steps = space as u64;
    let reference = reference_run(&machine, &c0, steps, Some(space)).expect("within the band");
    let e0 = EncodedConfig::exact(&c0).perturbed(&Dyadic::pow2(-2 * (space as i64 + 2)), 1, 1);
    let tol = Dyadic::pow2(-i64::from(m));
    exec_space_trajectory(&machine, m, space, steps, &e0, rounding)
        .iter()
        .zip(&reference)
        .map(|(e, c)| {
            let d = e.deviation(c);
            (&d.l - &(&tol + &d.l_radius)).max(&d.r - &(&tol + &d.r_radius))
        })
        .max()
        .expect("non-empty")
}

fn tm_robustness(ctx: &Ctx) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut sign = || if rng.gen::<bool>() { 1 } else { -1 };
    let mut t = tm_runs(ctx, Some((sign(), sign())));
    let rounded = right_mover_excess(8, 30, true);
    let unrounded = right_mover_excess(8, 30, false);
    t.record(!rounded.is_positive(), 0.0);
    // Negative control: the unrounded run must exceed the bound.
    t.record(unrounded.is_positive(), 0.0);
    t
}

fn converters(ctx: &Ctx) -> Tally {
    let limit = 64u64 * u64::from(ctx.density);
    let m_max = ctx.m_max.max(2);
    let results: Vec<Tally> = (0..limit)
        .into_par_iter()
        .map(|n| {
            let mut t = Tally::default();
            let big = BigUint::from(n);
            let target = encode_int_exact(&big);
            for m in 2..=m_max {
                let tol = Dyadic::pow2(-i64::from(m));
                let v = decode_int(m, &big);
                let e = (v.center() - &target).abs();
                t.record(e <= &tol + v.radius(), e.to_f64());
                let back = encode_mul(m, int_blocks(&big), &decode_int(m + 4, &big), &Ball::one());
                let e = (back.center() - &Dyadic::from_int(n as i64)).abs();
                t.record(e <= &tol + back.radius(), e.to_f64());
            }
            t
        })
        .collect();
    let mut t = Tally::default();
    for r in results {
        t.merge(r);
    }
    t
}

fn barycentric(ctx: &Ctx) -> Tally {
    let points = 16i64 << ctx.density.ilog2();
    let mut jobs = Vec::new();
    for f in [ScaledIdentity::identity(), ScaledIdentity::halving()] {
        for n in 3..=4u32 {
            for k in -points..=points {
                jobs.push((f, n, Dyadic::ratio(k, 4 + ctx.density.ilog2())));
            }
            // Points with 2^m(n,M) x in j + [1/4, 1/2].
            let mm = i64::from(f.modulus(n, 1));
            for j in [-5i64, -1, 0, 2, 7] {
                jobs.push((f, n, Dyadic::new((8 * j + 3).into(), -(mm + 3))));
            }
        }
    }
    let results: Vec<(bool, f64)> = jobs
        .par_iter()
        .map(|(f, n, x)| {
            match barycentric_eval(f, &Ball::exact(x.clone()), 0, 1, *n, DEFAULT_GUARD) {
                Ok(r) => {
                    let err = (r.value.center() - &f.eval_exact(x)).abs();
                    let tol = &(&Dyadic::pow2(-i64::from(*n))
                        + &Dyadic::pow2(-i64::from(n + DEFAULT_GUARD)))
                        + r.value.radius();
                    (err <= tol, err.to_f64())
                }
                Err(_) => (false, f64::INFINITY),
            }
        })
        .collect();
    let mut t = Tally::default();
    for (ok, e) in results {
        t.record(ok, e);
    }
    t
}

fn stability(ctx: &Ctx) -> Tally {
    let m = 6;
    let trials = 10 * ctx.density as usize;
    let mut t = Tally::default();
    let probe =
        |machine: &TuringMachine, input: &[u8], space: usize, steps: u64, rounding: bool| {
            let c0 = EncodedConfig::exact(&Config::initial(machine, input));
            let sys = ExecSystem::new(NextMap::new(machine, m, space).with_rounding(rounding));
            let p = sys.next_map().precision();
            let budget = StabilityBudget::constant(2 * m.max(space as u32 + 2));
            stability_probe(
                &sys,
                OdeKind::PlainDerivation,
                &budget,
                steps,
                &c0.to_vec(),
                m,
                trials,
                ctx.seed,
                p,
            )
        };
    for (machine, input) in tm_machines() {
        let r = probe(&machine, &input, 8, 40, true);
        t.record(r.pass, r.max_deviation.to_f64());
    }
    let rm = machines::right_mover();
    let r = probe(&rm, &[1], 30, 30, false);
    t.record(!r.pass, 0.0);
    t
}

pub fn run(args: &VerifyArgs, seed: u64) -> anyhow::Result<Status> {
    for s in &args.suite {
        if !SUITES.contains(&s.as_str()) {
            bail!("unknown suite `{s}` (known: {})", SUITES.join(", "));
        }
    }
    if args.density == 0 {
        bail!("--density must be at least 1");
    }
    if args.m_max == 0 || args.m_max > 16 {
        bail!("--m-max must be in 1..=16");
    }
    let ctx = Ctx {
        m_max: args.m_max,
        density: args.density,
        seed,
    };
    let selected: Vec<&str> = SUITES
        .iter()
        .copied()
        .filter(|s| args.suite.is_empty() || args.suite.iter().any(|a| a == s))
        .collect();
    let mut rows = Vec::new();
    println!("suite,cases,failures,max_error,wall_ms");
    for name in selected {
        let start = Instant::now();
        let t = match name {
            "relu" => relu(&ctx),
            "xi" => xi(&ctx),
            "bestiary" => bestiary(&ctx),
            "tanh-tail" => tanh_tail(&ctx),
            "ode-equivalence" => ode_equivalence(&ctx),
            "precision-schedule" => precision_schedule_suite(&ctx),
            "tm-soundness" => tm_soundness(&ctx),
            "tm-robustness" => tm_robustness(&ctx),
            "converters" => converters(&ctx),
            "barycentric" => barycentric(&ctx),
            "stability" => stability(&ctx),
            _ => unreachable!("validated above"),
        };
        let row = [
            name.to_string(),
            t.cases.to_string(),
            t.failures.to_string(),
            format!("{:e}", t.max_error),
            start.elapsed().as_millis().to_string(),
        ];
        println!("{}", row.join(","));
        rows.push((row, t.failures == 0 && t.cases > 0));
    }
    if let Some(path) = &args.out {
        let mut w = csv_writer(path)?;
        w.write_record(["suite", "cases", "failures", "max_error", "wall_ms"])?;
        for (row, _) in &rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(if rows.iter().all(|(_, ok)| *ok) {
        Status::Ok
    } else {
        Status::VerificationFailed
    })
}
