use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Subcommand};
use odem_core::dyadic_ball::Dyadic;
use odem_core::turing::machines::catalog;
use odem_core::turing::{
    exec_space_trajectory, exec_time_trajectory, parse_word, reference_run, word_to_string, Config,
    Deviation, EncodedConfig, OracleError, TuringMachine,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::out::{csv_writer, pair};
use crate::Status;

#[derive(Subcommand, Debug)]
pub enum TmCommand {
    /// Simulate a machine with the analytic step map and report the final configuration.
    Run(TmArgs),
    /// Compare the analytic run with the exact interpreter step by step.
    Compare(TmArgs),
    /// List the built-in machines.
    List,
    /// Print a built-in machine in the text format.
    Export {
        #[arg(long)]
        name: String,
    },
}

#[derive(Args, Debug)]
pub struct TmArgs {
    /// Machine file, or `builtin:<name>` (see `odem tm list`).
    #[arg(long)]
    pub machine: String,
    /// Input word over 0, 1, 3 (default: the built-in machine's sample input, else empty).
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub steps: u64,
    /// Accuracy exponent.
    #[arg(long, default_value_t = 8)]
    pub m: u32,
    /// Space bound S. With it the run is space-bounded; without it, time-bounded with
    /// S = steps + input length.
    #[arg(long)]
    pub space: Option<usize>,
    /// Disable the tape rounding (negative control).
    #[arg(long)]
    pub no_rounding: bool,
    /// Shift the tape channels of the input by 4^-(S+2) with seeded random signs.
    #[arg(long)]
    pub perturb: bool,
    /// Per-step trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

fn builtin(name: &str) -> anyhow::Result<(TuringMachine, Vec<u8>)> {
    catalog()
        .into_iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, m, input)| (m, input))
        .with_context(|| {
            let names: Vec<&str> = catalog().iter().map(|(n, _, _)| *n).collect();
            format!(
                "unknown built-in machine `{name}` (known: {})",
                names.join(", ")
            )
        })
}

fn load(args: &TmArgs) -> anyhow::Result<(TuringMachine, Vec<u8>)> {
    let (machine, default_input) = match args.machine.strip_prefix("builtin:") {
        Some(name) => builtin(name)?,
        None => {
            let text = std::fs::read_to_string(&args.machine)
                .with_context(|| format!("reading {}", args.machine))?;
            let m =
                TuringMachine::parse(&text).with_context(|| format!("parsing {}", args.machine))?;
            (m, Vec::new())
        }
    };
    let input = match &args.input {
        Some(s) => parse_word(s)?,
        None => default_input,
    };
    if input.contains(&0) {
        bail!("the input must be a word over 1 and 3 (blanks would leave the Cantor encoding)");
    }
    Ok((machine, input))
}

struct Simulation {
    m: u32,
    space: usize,
    trajectory: Vec<EncodedConfig>,
    reference: Vec<Config>,
    space_violation: Option<OracleError>,
}

impl Simulation {
    fn deviations(&self) -> Vec<Deviation> {
        self.trajectory
            .iter()
            .zip(&self.reference)
            .map(|(e, c)| e.deviation(c))
            .collect()
    }
}

fn simulate(args: &TmArgs, seed: u64) -> anyhow::Result<Simulation> {
    let (machine, input) = load(args)?;
    let c0 = Config::initial(&machine, &input);
    let space = args.space.unwrap_or(args.steps as usize + input.len());
    let reference = reference_run(&machine, &c0, args.steps, None)?;
    let space_violation = reference_run(&machine, &c0, args.steps, Some(space)).err();
    let mut e0 = EncodedConfig::exact(&c0);
    if args.perturb {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sign = |r: &mut ChaCha8Rng| if r.gen::<bool>() { 1 } else { -1 };
        let (sl, sr) = (sign(&mut rng), sign(&mut rng));
        e0 = e0.perturbed(&Dyadic::pow2(-2 * (space as i64 + 2)), sl, sr);
    }
    let rounding = !args.no_rounding;
    let trajectory = match args.space {
        Some(s) => exec_space_trajectory(&machine, args.m, s, args.steps, &e0, rounding),
        None => exec_time_trajectory(&machine, args.m, args.steps, &e0, input.len(), rounding),
    };
    Ok(Simulation {
        m: args.m,
        space,
        trajectory,
        reference,
        space_violation,
    })
}

fn write_trace(sim: &Simulation, path: &PathBuf) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "step",
        "q_center",
        "q_center_decimal",
        "l_center",
        "l_center_decimal",
        "l_radius",
        "l_radius_decimal",
        "r_center",
        "r_center_decimal",
        "r_radius",
        "r_radius_decimal",
        "reference",
        "deviation",
        "deviation_decimal",
        "within_bound",
    ])?;
    for (t, ((e, c), d)) in sim
        .trajectory
        .iter()
        .zip(&sim.reference)
        .zip(sim.deviations())
        .enumerate()
    {
        let [qc, qd] = pair(e.q.center());
        let [lc, ld] = pair(e.l.center());
        let [lr, lrd] = pair(e.l.radius());
        let [rc, rd] = pair(e.r.center());
        let [rr, rrd] = pair(e.r.radius());
        let [dv, dvd] = pair(&d.tape_max());
        w.write_record([
            t.to_string(),
            qc,
            qd,
            lc,
            ld,
            lr,
            lrd,
            rc,
            rd,
            rr,
            rrd,
            c.to_string(),
            dv,
            dvd,
            d.within(sim.m).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn report_final(sim: &Simulation) {
    let last = sim.trajectory.last().expect("non-empty trajectory");
    let exact = sim.reference.last().expect("non-empty reference");
    println!(
        "q = {} ({}), l = {} +/- {:e}, r = {} +/- {:e}",
        last.q.center(),
        last.q.center().to_f64(),
        last.l.center().to_f64(),
        last.l.radius().to_f64(),
        last.r.center().to_f64(),
        last.r.radius().to_f64()
    );
    match last.decode(sim.space) {
        Some(c) => println!(
            "decoded: {c}  output tape: {}  interpreter: {exact}{}",
            word_to_string(&c.right),
            if &c == exact { "" } else { "  (MISMATCH)" }
        ),
        None => println!("decoded: not a valid encoding  interpreter: {exact}"),
    }
}

pub fn run(cmd: &TmCommand, seed: u64) -> anyhow::Result<Status> {
    match cmd {
        TmCommand::List => {
            for (name, m, input) in catalog() {
                println!(
                    "{name}: {} states, sample input {}",
                    m.states(),
                    word_to_string(&input)
                );
            }
            Ok(Status::Ok)
        }
        TmCommand::Export { name } => {
            let (m, input) = builtin(name)?;
            println!("# {name}, sample input {}", word_to_string(&input));
            print!("{}", m.to_text());
            Ok(Status::Ok)
        }
        TmCommand::Run(args) => {
            let sim = simulate(args, seed)?;
            if let Some(e) = &sim.space_violation {
                eprintln!("warning: oracle: {e}");
            }
            report_final(&sim);
            if let Some(path) = &args.trace {
                write_trace(&sim, path)?;
            }
            Ok(Status::Ok)
        }
        TmCommand::Compare(args) => {
            let sim = simulate(args, seed)?;
            println!("step,deviation,q_deviation,allowance,ok");
            let tol = Dyadic::pow2(-i64::from(sim.m));
            let mut bad = 0usize;
            let mut worst = Dyadic::zero();
            for (t, d) in sim.deviations().iter().enumerate() {
                let ok = d.within(sim.m);
                bad += usize::from(!ok);
                let allowance = &tol + &d.l_radius.clone().max(d.r_radius.clone());
                worst = worst.max(d.tape_max());
                println!(
                    "{t},{:e},{:e},{:e},{ok}",
                    d.tape_max().to_f64(),
                    d.q.to_f64(),
                    allowance.to_f64()
                );
            }
            if let Some(path) = &args.trace {
                write_trace(&sim, path)?;
            }
            report_final(&sim);
            if let Some(e) = &sim.space_violation {
                println!("oracle: {e}");
            }
            println!(
                "{} steps, {bad} outside 2^-{} + radius, max deviation {:e}",
                sim.trajectory.len() - 1,
                sim.m,
                worst.to_f64()
            );
            let pass = bad == 0 && sim.space_violation.is_none();
            Ok(if pass {
                Status::Ok
            } else {
                Status::VerificationFailed
            })
        }
    }
}
