use clap::Args;
use fnls_core::dynamics::{conservation_report, evolve};
use fnls_core::energy::{tangent_derivative, NormalFormKernel};
use fnls_core::measure::{
    flow_jacobian_det, gauge_invariance_check, pushforward_check, sample_mu, TransportSet,
};
use fnls_core::phase::{verify_dmvt_bound, verify_phase_lower_bound};
use fnls_core::{Complex64, Ensemble, SimParams};

use crate::exit::{CliResult, Verdict};
use crate::output::{num, Table};
use crate::Context;

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Ensemble size for the Monte-Carlo rows.
    #[arg(long)]
    pub samples: Option<usize>,
}

struct Row {
    check: &'static str,
    setting: String,
    value: f64,
    tolerance: String,
    pass: bool,
}

pub fn run(ctx: &Context, a: ReportArgs) -> CliResult<Verdict> {
    let m = ctx.file.pick(a.samples, "samples", 10_000)?;
    let seed = ctx.seed()?;
    let mut rows = Vec::new();

    let phase = verify_phase_lower_bound(1.0, 24)?;
    rows.push(Row {
        check: "phase_lower_bound",
        setting: "alpha=1 radius=24".into(),
        value: phase.min_ratio(),
        tolerance: "== 2".into(),
        pass: phase.min_ratio() == 2.0,
    });
    let dmvt = verify_dmvt_bound(1.5, 24)?;
    rows.push(Row {
        check: "double_mean_value",
        setting: "s=1.5 radius=24".into(),
        value: dmvt.max_ratio(),
        tolerance: "finite".into(),
        pass: dmvt.max_ratio().is_finite(),
    });

    let p = SimParams::new(1.0, 1.5, 16);
    let v0 = sample_mu(&p, seed, 0).scale(Complex64::new(0.2, 0.0));
    let cons = conservation_report(&evolve(&v0, &p, 100)?, &p)?;
    let drift = cons.mass_drift.max(cons.energy_drift);
    rows.push(Row {
        check: "conservation",
        setting: "alpha=1 N=16 dt=1e-3 horizon=1".into(),
        value: drift,
        tolerance: "<= 1e-8".into(),
        pass: drift <= 1e-8,
    });

    let p = SimParams::new(2.0, 0.8, 16);
    let kernel = NormalFormKernel::new(p.s, p.alpha, p.cutoff)?;
    let mut worst = 0.0f64;
    for k in 0..5 {
        let v = sample_mu(&p, seed, k);
        let terms = kernel.derivative_terms_lab(&v, p.sign.value()).sum();
        let fd = tangent_derivative(&kernel, &v, &p)?;
        worst = worst.max((terms - fd).abs() / fd.abs().max(f64::MIN_POSITIVE));
    }
    rows.push(Row {
        check: "normal_form_identity",
        setting: "alpha=2 s=0.8 N=16".into(),
        value: worst,
        tolerance: "<= 1e-4".into(),
        pass: worst <= 1e-4,
    });

    let p = SimParams::new(2.0, 0.8, 1);
    let det = flow_jacobian_det(&sample_mu(&p, seed, 0), &p, 0.1)?;
    rows.push(Row {
        check: "liouville",
        setting: "N=1 t=0.1".into(),
        value: (det - 1.0).abs(),
        tolerance: "<= 1e-5".into(),
        pass: (det - 1.0).abs() <= 1e-5,
    });
    let e = Ensemble::new(p, seed, m.clamp(2, 2000));
    let still = pushforward_check(&TransportSet::half_space(1), &p, 3.0, 0.0, &e)?;
    rows.push(Row {
        check: "pushforward_identity",
        setting: "N=1 t=0".into(),
        value: still.max_sample_gap,
        tolerance: "<= 1e-12".into(),
        pass: still.max_sample_gap <= 1e-12,
    });

    let p = SimParams::new(2.0, 0.8, 16);
    let gauge = gauge_invariance_check(&p, 0.7, &Ensemble::new(p, seed, m.max(1)))?;
    rows.push(Row {
        check: "gauge_invariance",
        setting: format!("N=16 t=0.7 M={}", m.max(1)),
        value: gauge.max_distance,
        tolerance: format!("< {:.3e}", gauge.critical_1pct),
        pass: gauge.passes(),
    });

    let mut table = Table::create(
        ctx.out()?.as_deref(),
        "report",
        &["check", "setting", "value", "tolerance", "pass"],
    )?;
    let mut all = true;
    for r in rows {
        all &= r.pass;
        table.row([r.check.to_string(), r.setting, num(r.value), r.tolerance, r.pass.to_string()])?;
    }
    table.finish()?;
    Ok(Verdict::from_pass(all))
}
