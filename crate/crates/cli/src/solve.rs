use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use odem_core::discrete_ode::{
    parse_ode_file, solve_certified, solve_explicit, solve_recurrence, trajectory, LinearOdeSystem,
    OdeKind,
};
use odem_core::dyadic_ball::{Ball, Dyadic, Precision};

use crate::out::{csv_writer, pair, parse_dyadic};
use crate::Status;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    /// Step-by-step iteration.
    Recurrence,
    /// Closed form through falling exponentials.
    Explicit,
    /// Closed form under a precision schedule that meets `--prec` as a radius target.
    Certified,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Length,
    Plain,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// System description file.
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub steps: u64,
    /// Working precision in bits, or the radius target for `--method certified`.
    #[arg(long, default_value_t = 64)]
    pub prec: u32,
    /// Parameter values, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_dyadic, allow_hyphen_values = true)]
    pub y: Vec<Dyadic>,
    #[arg(long, value_enum, default_value = "recurrence")]
    pub method: Method,
    /// Override the derivation kind declared in the file.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Write the trajectory (or the final value for the closed forms) as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn load(args: &SolveArgs) -> anyhow::Result<(LinearOdeSystem, OdeKind)> {
    let text = std::fs::read_to_string(&args.system)
        .with_context(|| format!("reading {}", args.system.display()))?;
    let (sys, kind) =
        parse_ode_file(&text).with_context(|| format!("parsing {}", args.system.display()))?;
    let kind = match args.kind {
        Some(Kind::Length) => OdeKind::LengthDerivation,
        Some(Kind::Plain) => OdeKind::PlainDerivation,
        None => kind,
    };
    Ok((sys, kind))
}

pub fn run(args: &SolveArgs) -> anyhow::Result<Status> {
    let (sys, kind) = load(args)?;
    if args.y.len() != sys.n_y() {
        bail!(
            "the system takes {} parameters, got {}",
            sys.n_y(),
            args.y.len()
        );
    }
    let y: Vec<Ball> = args.y.iter().cloned().map(Ball::exact).collect();
    let p = Precision::new(i64::from(args.prec))?;
    let rows: Vec<(u64, Vec<Ball>)> = match args.method {
        Method::Recurrence => {
            if args.csv.is_some() {
                trajectory(&sys, kind, args.steps, &y, p)
                    .into_iter()
                    .enumerate()
                    .map(|(t, v)| (t as u64, v))
                    .collect()
            } else {
                vec![(args.steps, solve_recurrence(&sys, kind, args.steps, &y, p))]
            }
        }
        Method::Explicit => vec![(args.steps, solve_explicit(&sys, kind, args.steps, &y, p))],
        Method::Certified => {
            let (out, schedule) = solve_certified(&sys, kind, args.steps, &y, args.prec);
            println!("precision schedule: {schedule:?}");
            vec![(args.steps, out)]
        }
    };
    let (_, last) = rows.last().expect("at least one row");
    for (i, b) in last.iter().enumerate() {
        println!(
            "f[{i}] = {} +/- {}  ({} +/- {:e})",
            b.center(),
            b.radius(),
            b.center().to_f64(),
            b.radius().to_f64()
        );
    }
    if let Some(path) = &args.csv {
        let mut w = csv_writer(path)?;
        w.write_record([
            "step",
            "component",
            "center",
            "center_decimal",
            "radius",
            "radius_decimal",
        ])?;
        for (t, v) in &rows {
            for (i, b) in v.iter().enumerate() {
                let [c, cd] = pair(b.center());
                let [r, rd] = pair(b.radius());
                w.write_record([t.to_string(), i.to_string(), c, cd, r, rd])?;
            }
        }
        w.flush()?;
    }
    Ok(Status::Ok)
}
