use clap::{Args, Subcommand};
use fnls_core::measure::{
    default_radius, flow_jacobian_det, gauge_invariance_check, moment_growth, pushforward_check,
    r_convergence, sample_mu, Statistic, TransportSet, Weighting,
};
use fnls_core::{Ensemble, SimParams};

use super::PhysicsArgs;
use crate::exit::{invalid, CliResult, Verdict};
use crate::output::{num, Table};
use crate::Context;

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[command(subcommand)]
    pub experiment: Experiment,
}

#[derive(Args, Debug, Clone)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Galerkin cutoff N (sampler and dynamics).
    #[arg(long = "N", alias = "cutoff")]
    pub cutoff: Option<usize>,
    /// Ensemble size M.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Experiment {
    /// L^p moments of a statistic and the fitted growth exponent in p.
    Moments {
        #[command(flatten)]
        ens: EnsembleArgs,
        /// fl:<σ>, sobolev:<σ>, abs_coeff:<n> or l2_block:<m>; default fl:<s − 0.1>.
        #[arg(long)]
        stat: Option<String>,
        /// Moment exponents.
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        /// Weight samples by the density F_{N,r} with this radius instead of plain μ_s.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Cauchy table of the correction R_{s,N} across cutoffs.
    Convergence {
        #[command(flatten)]
        physics: PhysicsArgs,
        #[arg(long = "N-list", alias = "n-list", value_delimiter = ',')]
        n_list: Vec<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// L^q norm of the differences.
        #[arg(long)]
        q: Option<f64>,
    },
    /// Two estimators of the weighted measure of a transported set.
    Pushforward {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
        /// Test set {Re û(n₀) ≥ 0}.
        #[arg(long)]
        half_space: Option<i64>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Finite-difference Jacobian determinant of the truncated flow map.
    Jacobian {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Two-sample KS distances between μ_s and its image under the gauge map.
    Gauge {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long)]
        t: Option<f64>,
    },
}

/// Tolerance on `|det − 1|` for the Jacobian check.
pub const JACOBIAN_TOLERANCE: f64 = 1e-5;

fn parse_stat(spec: &str) -> CliResult<Statistic> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| invalid(format!("statistic `{spec}` must look like kind:value")))?;
    let bad = |e: String| invalid(format!("statistic `{spec}`: {e}"));
    Ok(match kind {
        "fl" => Statistic::FlNorm(arg.parse().map_err(|e| bad(format!("{e}")))?),
        "sobolev" => Statistic::SobolevNorm(arg.parse().map_err(|e| bad(format!("{e}")))?),
        "abs_coeff" => Statistic::AbsCoeff(arg.parse().map_err(|e| bad(format!("{e}")))?),
        "l2_block" => Statistic::L2Block(arg.parse().map_err(|e| bad(format!("{e}")))?),
        _ => return Err(bad("unknown kind".into())),
    })
}

impl EnsembleArgs {
    fn resolve(&self, ctx: &Context, default_cutoff: usize, default_samples: usize) -> CliResult<(SimParams, usize)> {
        let cutoff = ctx.file.pick(self.cutoff, "N", default_cutoff)?;
        let samples = ctx.file.pick(self.samples, "samples", default_samples)?;
        Ok((self.physics.params(ctx, cutoff)?, samples))
    }
}

pub fn run(ctx: &Context, a: MeasureArgs) -> CliResult<Verdict> {
    let f = &ctx.file;
    let seed = ctx.seed()?;
    let out = ctx.out()?;
    let out = out.as_deref();
    match a.experiment {
        Experiment::Moments { ens, stat, p, radius } => {
            let (params, m) = ens.resolve(ctx, 32, 10_000)?;
            let stat = match f.pick_opt(stat, "stat")? {
                Some(s) => parse_stat(&s)?,
                None => Statistic::FlNorm(params.s - 0.1),
            };
            let exps = f.pick_list(p, "p", vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0])?;
            if exps.is_empty() {
                return Err(invalid("empty --p list"));
            }
            let weighting = match f.pick_opt(radius, "radius")? {
                Some(r) => Weighting::Density { r },
                None => Weighting::Gaussian,
            };
            let e = Ensemble::new(params, seed, m);
            let (moments, beta) = if exps.len() >= 2 {
                let g = moment_growth(stat, &exps, &e, weighting)?;
                (g.moments, g.beta)
            } else {
                (vec![fnls_core::measure::lp_moment(stat, exps[0], &e, weighting)?], f64::NAN)
            };
            let mut t = Table::create(out, "measure.moments", &["p", "value", "std_error", "ci_low", "ci_high", "beta"])?;
            for (p, est) in exps.iter().zip(&moments) {
                let (lo, hi) = est.ci95();
                t.row([num(*p), num(est.value), num(est.std_error), num(lo), num(hi), num(beta)])?;
            }
            t.finish()?;
            Ok(Verdict::Pass)
        }
        Experiment::Convergence { physics, n_list, samples, q } => {
            let n_list = f.pick_list(n_list, "n_list", vec![4, 8, 16, 32])?;
            let n_max = *n_list.iter().max().ok_or_else(|| invalid("empty --N-list"))?;
            let params = physics.params(ctx, n_max)?;
            let m = f.pick(samples, "samples", 1000)?;
            let q = f.pick(q, "q", 2.0)?;
            let rows = r_convergence(&Ensemble::new(params, seed, m), &n_list, q)?;
            let mut t = Table::create(out, "measure.convergence", &["N", "N_max", "value", "std_error"])?;
            for row in &rows {
                t.row([row.cutoff.to_string(), n_max.to_string(), num(row.norm.value), num(row.norm.std_error)])?;
            }
            t.finish()?;
            let decreasing = rows.windows(2).all(|w| w[1].norm.value < w[0].norm.value);
            Ok(Verdict::from_pass(decreasing))
        }
        Experiment::Pushforward { ens, t, radius, half_space, dt } => {
            let (mut params, m) = ens.resolve(ctx, 1, 10_000)?;
            params = params.with_dt(f.pick(dt, "dt", 1e-3)?);
            let t_val = f.pick(t, "t", 0.2)?;
            let r = f.pick(radius, "radius", default_radius(&params))?;
            let set = TransportSet::half_space(f.pick(half_space, "half_space", 1)?);
            let rep = pushforward_check(&set, &params, r, t_val, &Ensemble::new(params, seed, m))?;
            let mut tab = Table::create(
                out,
                "measure.pushforward",
                &["t", "direct", "direct_se", "transported", "transported_se", "ratio", "max_sample_gap", "consistent"],
            )?;
            tab.row([
                num(t_val),
                num(rep.direct.value),
                num(rep.direct.std_error),
                num(rep.transported.value),
                num(rep.transported.std_error),
                num(rep.ratio),
                num(rep.max_sample_gap),
                rep.consistent().to_string(),
            ])?;
            tab.finish()?;
            Ok(Verdict::from_pass(rep.consistent()))
        }
        Experiment::Jacobian { ens, t, dt } => {
            let (mut params, m) = ens.resolve(ctx, 1, 3)?;
            params = params.with_dt(f.pick(dt, "dt", 1e-3)?);
            let times = f.pick_list(t, "t", vec![0.05, 0.1, 0.2])?;
            let mut tab = Table::create(out, "measure.jacobian", &["sample", "t", "det", "abs_dev"])?;
            let mut pass = true;
            for k in 0..m {
                let f0 = sample_mu(&params, seed, k as u64);
                for &tv in &times {
                    let det = flow_jacobian_det(&f0, &params, tv)?;
                    let dev = (det - 1.0).abs();
                    pass &= dev <= JACOBIAN_TOLERANCE;
                    tab.row([k.to_string(), num(tv), num(det), num(dev)])?;
                }
            }
            tab.finish()?;
            Ok(Verdict::from_pass(pass))
        }
        Experiment::Gauge { ens, t } => {
            let (params, m) = ens.resolve(ctx, 16, 10_000)?;
            let t_val = f.pick(t, "t", 0.7)?;
            let rep = gauge_invariance_check(&params, t_val, &Ensemble::new(params, seed, m))?;
            let mut tab = Table::create(out, "measure.gauge", &["statistic", "ks_distance", "critical_1pct", "pass"])?;
            for (name, d) in &rep.rows {
                tab.row([name.clone(), num(*d), num(rep.critical_1pct), (*d < rep.critical_1pct).to_string()])?;
            }
            tab.finish()?;
            Ok(Verdict::from_pass(rep.passes()))
        }
    }
}
