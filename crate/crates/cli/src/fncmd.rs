use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use odem_core::dyadic_ball::{Dyadic, Precision};
use odem_core::funlib::{CertifiedFn, Sample, SendTable, NAMES};
use rayon::prelude::*;

use crate::out::{csv_writer, grid, pair, parse_dyadic};
use crate::Status;

#[derive(Args, Debug)]
pub struct FnArgs {
    /// Function name: relu, sigtanh, xi, xi1, xi2, sigma1, sigma2, lambda, mod2, div2, tt-tanh, send-tanh.
    #[arg(long)]
    pub name: String,
    /// Accuracy exponent: the bound is 2^-m.
    #[arg(long, default_value_t = 4)]
    pub m: u32,
    /// Range exponent: the domain is [-2^n, 2^n].
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value = "-4", value_parser = parse_dyadic, allow_hyphen_values = true)]
    pub from: Dyadic,
    #[arg(long, default_value = "4", value_parser = parse_dyadic, allow_hyphen_values = true)]
    pub to: Dyadic,
    #[arg(long, default_value = "1/64", value_parser = parse_dyadic)]
    pub step: Dyadic,
    /// Ramp start for sigtanh.
    #[arg(long, value_parser = parse_dyadic, allow_hyphen_values = true)]
    pub a: Option<Dyadic>,
    /// Ramp end for sigtanh.
    #[arg(long, value_parser = parse_dyadic, allow_hyphen_values = true)]
    pub b: Option<Dyadic>,
    /// Gated value for tt-tanh, in [0, 1].
    #[arg(long, value_parser = parse_dyadic)]
    pub ell: Option<Dyadic>,
    /// Table for send-tanh as `key:value,key:value`.
    #[arg(long, allow_hyphen_values = true)]
    pub table: Option<String>,
    /// Working precision in bits (default: derived from m and n).
    #[arg(long)]
    pub prec: Option<i64>,
    /// Output file (default: <name>.csv).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_table(s: &str) -> anyhow::Result<SendTable> {
    let mut entries = Vec::new();
    for item in s.split(',').filter(|t| !t.trim().is_empty()) {
        let (k, v) = item
            .split_once(':')
            .with_context(|| format!("table entry `{item}` is not `key:value`"))?;
        let k: i64 = k
            .trim()
            .parse()
            .with_context(|| format!("table key `{k}` is not an integer"))?;
        let v = parse_dyadic(v).map_err(anyhow::Error::msg)?;
        entries.push((k, v));
    }
    Ok(SendTable::new(entries)?)
}

pub fn build_function(args: &FnArgs) -> anyhow::Result<CertifiedFn> {
    let f = match args.name.as_str() {
        "sigtanh" if args.a.is_some() || args.b.is_some() => {
            let a = args.a.clone().unwrap_or_else(|| Dyadic::ratio(1, 1));
            let b = args.b.clone().unwrap_or_else(|| Dyadic::ratio(3, 2));
            CertifiedFn::sigtanh(a, b)?
        }
        "tt-tanh" if args.ell.is_some() => {
            CertifiedFn::tt_tanh(args.ell.clone().expect("checked"))?
        }
        "send-tanh" if args.table.is_some() => {
            CertifiedFn::SendTanh(parse_table(args.table.as_deref().expect("checked"))?)
        }
        name => CertifiedFn::from_name(name)
            .with_context(|| format!("known functions: {}", NAMES.join(", ")))?,
    };
    Ok(f)
}

pub struct SweepSummary {
    pub rows: usize,
    pub in_band: usize,
    pub failures: usize,
    pub max_error: f64,
}

/// Evaluate `f` on every grid point and write `x, center, radius, oracle, pass` rows.
pub fn write_sweep(
    f: &CertifiedFn,
    m: u32,
    n: u32,
    xs: &[Dyadic],
    prec: Option<Precision>,
    path: &Path,
) -> anyhow::Result<SweepSummary> {
    let samples: Vec<Sample> = xs.par_iter().map(|x| f.sample(m, n, x, prec)).collect();
    let mut w = csv_writer(path)?;
    w.write_record([
        "x",
        "x_decimal",
        "center",
        "center_decimal",
        "radius",
        "radius_decimal",
        "oracle",
        "oracle_decimal",
        "pass",
    ])?;
    let mut summary = SweepSummary {
        rows: samples.len(),
        in_band: 0,
        failures: 0,
        max_error: 0.0,
    };
    for s in &samples {
        let [x, xd] = pair(&s.x);
        let [c, cd] = pair(s.value.center());
        let [r, rd] = pair(s.value.radius());
        let (o, od) = match &s.target {
            Some(t) => {
                let [o, od] = pair(t.center());
                let err = (s.value.center() - t.center()).abs().to_f64();
                summary.max_error = summary.max_error.max(err);
                (o, od)
            }
            None => (String::new(), String::new()),
        };
        let pass = match s.pass {
            Some(ok) => {
                summary.in_band += 1;
                summary.failures += usize::from(!ok);
                ok.to_string()
            }
            None => String::new(),
        };
        w.write_record([x, xd, c, cd, r, rd, o, od, pass])?;
    }
    w.flush()?;
    Ok(summary)
}

pub fn run(args: &FnArgs) -> anyhow::Result<Status> {
    let f = build_function(args)?;
    let xs = grid(&args.from, &args.to, &args.step)?;
    let prec = match args.prec {
        Some(bits) => Some(Precision::new(bits)?),
        None => None,
    };
    let path = args
        .csv
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", args.name)));
    if args.m > 4096 || args.n > 4096 {
        bail!("m and n are limited to 4096");
    }
    let s = write_sweep(&f, args.m, args.n, &xs, prec, &path)?;
    println!(
        "{}: {} rows, {} in band, {} failures, max error {:e} -> {}",
        f.name(),
        s.rows,
        s.in_band,
        s.failures,
        s.max_error,
        path.display()
    );
    Ok(if s.failures == 0 {
        Status::Ok
    } else {
        Status::VerificationFailed
    })
}
