use clap::Args;
use fnls_core::phase::{
    divisor_bound_constant, verify_dmvt_bound, verify_phase_lower_bound, verify_varphi_regime,
};

use super::fmt_quad;
use crate::exit::{CliResult, Verdict};
use crate::output::{num, Table};
use crate::Context;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Dispersion exponents for the phase lower bound scan (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Regularities for the double mean value scan, each > 1.
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    /// Lattice scan radius.
    #[arg(long)]
    pub radius: Option<usize>,
    /// Exponents β for the partial-sum regime scan.
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    #[arg(long)]
    pub k_max: Option<i64>,
    /// δ in d(m) ≤ C_δ m^δ.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub divisor_limit: Option<u64>,
}

const COLUMNS: &[&str] = &[
    "lemma", "parameter", "scan_radius", "min_ratio", "max_ratio", "witness", "count", "pass",
];

pub fn run(ctx: &Context, a: VerifyArgs) -> CliResult<Verdict> {
    let f = &ctx.file;
    let alphas = f.pick_list(a.alpha, "alpha", vec![0.6, 0.75, 1.0, 1.5, 2.0])?;
    let ss = f.pick_list(a.s, "s", vec![])?;
    let radius = f.pick(a.radius, "radius", 64)?;
    let betas = f.pick_list(a.beta, "beta", vec![0.5, 1.0, 1.5])?;
    let k_max = f.pick(a.k_max, "k_max", 4096)?;
    let delta = f.pick(a.delta, "delta", 0.25)?;
    let limit = f.pick(a.divisor_limit, "divisor_limit", 1_000_000)?;

    // Validate every parameter point before writing anything.
    let phase: Vec<_> = alphas
        .iter()
        .map(|&al| verify_phase_lower_bound(al, radius))
        .collect::<Result<_, _>>()?;
    let dmvt: Vec<_> = ss
        .iter()
        .map(|&s| verify_dmvt_bound(s, radius))
        .collect::<Result<_, _>>()?;
    let varphi: Vec<_> = betas
        .iter()
        .map(|&b| verify_varphi_regime(b, k_max).map(|r| (b, r)))
        .collect::<Result<_, _>>()?;
    let (c_delta, witness) = divisor_bound_constant(delta, limit)?;

    let mut table = Table::create(ctx.out()?.as_deref(), "verify", COLUMNS)?;
    let mut all = true;
    let flag = |b: bool| if b { "true" } else { "false" }.to_string();
    for r in &phase {
        let ok = r.min_ratio() > 0.0;
        all &= ok;
        table.row([
            "phase_lower_bound".into(),
            num(r.parameter),
            r.scan_radius.to_string(),
            num(r.min_ratio()),
            String::new(),
            fmt_quad(&r.witness),
            r.quads_scanned.to_string(),
            flag(ok),
        ])?;
    }
    for r in &dmvt {
        let ok = r.max_ratio().is_finite();
        all &= ok;
        table.row([
            "double_mean_value".into(),
            num(r.parameter),
            r.scan_radius.to_string(),
            String::new(),
            num(r.max_ratio()),
            fmt_quad(&r.witness),
            r.quads_scanned.to_string(),
            flag(ok),
        ])?;
    }
    for (b, r) in &varphi {
        let ok = r.min > 0.0 && r.max.is_finite();
        all &= ok;
        table.row([
            "partial_sum_regime".into(),
            num(*b),
            k_max.to_string(),
            num(r.min),
            num(r.max),
            format!("k={}/{}", r.argmin, r.argmax),
            k_max.to_string(),
            flag(ok),
        ])?;
    }
    let ok = c_delta.is_finite();
    all &= ok;
    table.row([
        "divisor_bound".into(),
        num(delta),
        limit.to_string(),
        String::new(),
        num(c_delta),
        format!("m={witness}"),
        limit.to_string(),
        flag(ok),
    ])?;
    table.finish()?;
    Ok(Verdict::from_pass(all))
}
