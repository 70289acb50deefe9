use std::path::PathBuf;

use clap::Args;
use odem_core::dyadic_ball::Dyadic;
use odem_core::funlib::CertifiedFn;

use crate::fncmd::write_sweep;
use crate::out::{grid, parse_dyadic};
use crate::Status;

#[derive(Args, Debug)]
pub struct FiguresArgs {
    /// Output directory.
    #[arg(long, default_value = "figures")]
    pub out: PathBuf,
    #[arg(long, default_value = "1/64", value_parser = parse_dyadic)]
    pub step: Dyadic,
}

pub fn run(args: &FiguresArgs) -> anyhow::Result<Status> {
    let ramp = CertifiedFn::sigtanh(Dyadic::ratio(1, 1), Dyadic::ratio(3, 2))?;
    let wide = grid(&Dyadic::from_int(-4), &Dyadic::from_int(4), &args.step)?;
    let ramp_grid = grid(
        &Dyadic::from_int(-1),
        &Dyadic::from_int(2),
        &args.step.shl(-2),
    )?;
    let detail = grid(&Dyadic::zero(), &Dyadic::from_int(1), &Dyadic::pow2(-10))?;
    // (file, function, m, n, grid): m and n are the exponents of the 2^m, 2^n arguments.
    let plots: Vec<(&str, CertifiedFn, u32, u32, &[Dyadic])> = vec![
        ("fig1_relu", CertifiedFn::Relu, 2, 0, &wide),
        ("fig2_sigtanh_m1", ramp.clone(), 1, 0, &ramp_grid),
        ("fig2_sigtanh_m5", ramp, 5, 0, &ramp_grid),
        ("fig3_xi", CertifiedFn::Xi, 1, 2, &wide),
        ("fig3_xi_detail", CertifiedFn::Xi, 1, 2, &detail),
        ("fig4_xi1", CertifiedFn::Xi1, 1, 2, &wide),
        ("fig4_xi2", CertifiedFn::Xi2, 1, 2, &wide),
        ("fig5_sigma1", CertifiedFn::Sigma1, 1, 2, &wide),
        ("fig5_sigma2", CertifiedFn::Sigma2, 1, 2, &wide),
        ("fig6_lambda", CertifiedFn::Lambda, 1, 2, &wide),
        ("fig7_mod2", CertifiedFn::Mod2, 1, 2, &wide),
        ("fig8_div2", CertifiedFn::Div2, 1, 2, &wide),
    ];
    let mut failures = 0;
    for (file, f, m, n, xs) in plots {
        let path = args.out.join(format!("{file}.csv"));
        let s = write_sweep(&f, m, n, xs, None, &path)?;
        failures += s.failures;
        println!(
            "{}: {} rows, {} failures",
            path.display(),
            s.rows,
            s.failures
        );
    }
    Ok(if failures == 0 {
        Status::Ok
    } else {
        Status::VerificationFailed
    })
}
