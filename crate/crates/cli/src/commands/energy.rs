use clap::Args;
use fnls_core::energy::{energy_ratios, estimate_region, tangent_derivative, NormalFormKernel};
use fnls_core::Ensemble;

use super::PhysicsArgs;
use crate::exit::{invalid, CliResult, Verdict};
use crate::output::{num, Table};
use crate::Context;

#[derive(Args, Debug)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Cutoffs to scan (comma separated).
    #[arg(long = "N-list", alias = "n-list", value_delimiter = ',')]
    pub n_list: Vec<usize>,
    /// Ensemble size M.
    #[arg(long)]
    pub samples: Option<usize>,
    /// ε̃ of the weak estimate; must satisfy 0 < ε̃ < ε (default ε/2).
    #[arg(long)]
    pub eps_tilde: Option<f64>,
}

/// Relative residual above which the finite-difference check fails.
pub const FD_TOLERANCE: f64 = 1e-4;

const COLUMNS: &[&str] = &[
    "N", "sample", "strong_ratio", "weak_ratio", "n1", "r1", "n2", "r2", "fd_residual",
];

fn residual(terms: f64, fd: f64) -> f64 {
    let scale = terms.abs().max(fd.abs());
    if scale == 0.0 {
        0.0
    } else {
        (terms - fd).abs() / scale
    }
}

pub fn run(ctx: &Context, a: EnergyArgs) -> CliResult<Verdict> {
    let f = &ctx.file;
    let n_list = f.pick_list(a.n_list, "n_list", vec![8, 16])?;
    if n_list.is_empty() {
        return Err(invalid("empty --N-list"));
    }
    let samples = f.pick(a.samples, "samples", 100)?;
    let seed = ctx.seed()?;
    let params: Vec<_> = n_list
        .iter()
        .map(|&n| a.physics.params(ctx, n))
        .collect::<CliResult<_>>()?;
    let p0 = params[0];
    let eps_tilde = f.pick(a.eps_tilde, "eps_tilde", 0.5 * p0.eps)?;
    if !(eps_tilde > 0.0 && eps_tilde < p0.eps) {
        return Err(invalid(format!(
            "need 0 < eps_tilde < eps, got eps_tilde = {eps_tilde}, eps = {}",
            p0.eps
        )));
    }
    if estimate_region(p0.alpha, p0.s).is_none() {
        log::warn!(
            "(alpha, s) = ({}, {}) lies outside the proven energy-estimate regions",
            p0.alpha,
            p0.s
        );
    }
    let kernels: Vec<_> = params
        .iter()
        .map(|p| NormalFormKernel::new(p.s, p.alpha, p.cutoff))
        .collect::<Result<_, _>>()?;

    let mut table = Table::create(ctx.out()?.as_deref(), "energy", COLUMNS)?;
    let mut pass = true;
    let mut summary = Vec::new();
    for (p, kernel) in params.iter().zip(&kernels) {
        let e = Ensemble::new(*p, seed, samples);
        let rows = e.map(|_, v| {
            let pair = energy_ratios(kernel, v, p, eps_tilde);
            let fd = tangent_derivative(kernel, v, p);
            (pair, fd)
        });
        let (mut smax, mut wmax, mut rmax) = (0.0f64, 0.0f64, 0.0f64);
        for (k, (pair, fd)) in rows.into_iter().enumerate() {
            let t = pair.terms;
            let res = residual(t.sum(), fd?);
            pass &= res <= FD_TOLERANCE;
            smax = smax.max(pair.strong);
            wmax = wmax.max(pair.weak);
            rmax = rmax.max(res);
            table.row([
                p.cutoff.to_string(),
                k.to_string(),
                num(pair.strong),
                num(pair.weak),
                num(t.n1),
                num(t.r1),
                num(t.n2),
                num(t.r2),
                num(res),
            ])?;
        }
        if samples > 0 {
            summary.push((p.cutoff, smax, wmax, rmax));
        }
    }
    for (n, smax, wmax, rmax) in summary {
        let blank = String::new;
        table.row([
            n.to_string(),
            "max".into(),
            num(smax),
            num(wmax),
            blank(),
            blank(),
            blank(),
            blank(),
            num(rmax),
        ])?;
    }
    table.finish()?;
    Ok(Verdict::from_pass(pass))
}
