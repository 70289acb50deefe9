use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context};
use odem_core::dyadic_ball::Dyadic;

pub fn parse_dyadic(s: &str) -> Result<Dyadic, String> {
    Dyadic::parse_loose(s)
        .map_err(|_| format!("`{s}` is not a dyadic number (try -3, 0.375, 1/64 or +3p-2)"))
}

/// Exact text form and decimal approximation.
pub fn pair(d: &Dyadic) -> [String; 2] {
    [d.to_string(), format!("{}", d.to_f64())]
}

pub fn csv_writer(path: &Path) -> anyhow::Result<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))
}

/// `from, from + step, ...` up to `to` inclusive.
pub fn grid(from: &Dyadic, to: &Dyadic, step: &Dyadic) -> anyhow::Result<Vec<Dyadic>> {
    const MAX_POINTS: usize = 1 << 22;
    if !step.is_positive() {
        bail!("grid step must be positive, got {step}");
    }
    let mut xs = Vec::new();
    let mut x = from.clone();
    while &x <= to {
        if xs.len() == MAX_POINTS {
            bail!("grid has more than {MAX_POINTS} points");
        }
        xs.push(x.clone());
        x = &x + step;
    }
    Ok(xs)
}
