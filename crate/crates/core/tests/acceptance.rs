//! Acceptance suite: one line per criterion, non-zero exit if any criterion fails.

mod common;

use std::time::Instant;

use common::{central_diff4, random_field, rel_err, ungauged_flow};
use fnls_core::dynamics::{
    conservation_report, evolve, flow, gauge_signed, linear_propagator, rhs_gauged, rhs_interaction,
};
use fnls_core::energy::{correction_r, energy_ratios, NormalFormKernel};
use fnls_core::measure::{
    default_radius, density_with, flow_jacobian_det, gauge_invariance_check, moment_growth, pushforward_check,
    r_convergence, sample_mu, Ensemble, Statistic, TransportSet, Weighting,
};
use fnls_core::phase::{dispersion, verify_dmvt_bound, verify_phase_lower_bound};
use fnls_core::spectral::cubic_term;
use fnls_core::{Complex64, SimParams, SpectralField};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ratio_spread(xs: &[f64]) -> f64 {
    let hi = xs.iter().cloned().fold(f64::MIN, f64::max);
    let lo = xs.iter().cloned().fold(f64::MAX, f64::min);
    hi / lo
}

fn phase_lower_bound() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.6, 0.75, 1.0, 1.5, 2.0] {
        let start = Instant::now();
        let rep = verify_phase_lower_bound(alpha, 64).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let ok = rep.min_ratio() > 0.0 && (alpha != 1.0 || rep.min_ratio() == 2.0) && secs <= 60.0;
        pass &= ok;
        parts.push(format!("a={alpha}: min={:.4} ({secs:.1}s)", rep.min_ratio()));
    }
    outcome(pass, parts.join(", "))
}

fn dmvt_bound() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in [1.25, 1.5, 2.0] {
        let r32 = verify_dmvt_bound(s, 32).unwrap().max_ratio();
        let r64 = verify_dmvt_bound(s, 64).unwrap().max_ratio();
        let change = ratio_spread(&[r32, r64]);
        pass &= r64.is_finite() && change < 1.5;
        parts.push(format!("s={s}: {r32:.4} -> {r64:.4}"));
    }
    outcome(pass, parts.join(", "))
}

fn integrator() -> Outcome {
    // Single mode: v̂(t) = c exp(i(|n|^{2α} + σ|c|²)t).
    let mut closed = 0.0f64;
    for (alpha, n, c) in [(1.0, 3, Complex64::new(0.8, 0.3)), (2.0, -2, Complex64::new(-0.5, 1.1))] {
        let p = SimParams::new(alpha, 1.0, 4).with_dt(1e-3);
        let f = SpectralField::single_mode(4, n, c).unwrap();
        let out = evolve(&f, &p, 1000).unwrap();
        let rate = dispersion(n, alpha) + c.norm_sqr();
        let exact = SpectralField::single_mode(4, n, c * Complex64::from_polar(1.0, rate)).unwrap();
        closed = closed.max(out.final_state().max_abs_diff(&exact));
    }
    let p = SimParams::new(1.0, 1.0, 8);
    let v = random_field(8, 21, 0.8, 0.8);
    let at = |dt: f64| flow(&v, &p.with_dt(dt), 1.0).unwrap();
    let (a, b, c) = (at(2e-2), at(1e-2), at(5e-3));
    let factor = a.max_abs_diff(&b) / b.max_abs_diff(&c);
    outcome(
        closed <= 1e-9 && (factor - 16.0).abs() <= 0.2 * 16.0,
        format!("single-mode err {closed:.2e}, self-convergence factor {factor:.2}"),
    )
}

fn conservation() -> Outcome {
    let v = random_field(16, 7, 0.3, 1.0);
    let p = SimParams::new(1.0, 1.0, 16);
    let drift = |dt: f64| conservation_report(&evolve(&v, &p.with_dt(dt), 10).unwrap(), &p).unwrap();
    let d1 = drift(1e-3);
    let coarse = drift(4e-3);
    let fine = drift(2e-3);
    let order_e = (coarse.energy_drift / d1.energy_drift).log2() / 2.0;
    let order_m = (coarse.mass_drift / d1.mass_drift).log2() / 2.0;
    let halving = fine.energy_drift / d1.energy_drift;
    let pass = d1.mass_drift <= 1e-8
        && d1.energy_drift <= 1e-8
        && (3.5..=5.5).contains(&order_e)
        && (3.5..=5.5).contains(&order_m);
    outcome(
        pass,
        format!(
            "mass {:.2e}, energy {:.2e}, fitted order mass {order_m:.2} energy {order_e:.2}, halving ratio {halving:.1}",
            d1.mass_drift, d1.energy_drift
        ),
    )
}

fn gauge_equivalence() -> Outcome {
    let mut flow_err = 0.0f64;
    for cutoff in [4usize, 8, 16] {
        let u0 = random_field(cutoff, 3, 0.3, 1.0);
        let p = SimParams::new(1.0, 1.0, cutoff).with_dt(1e-3);
        let v = flow(&u0, &p, 1.0).unwrap();
        let u = ungauged_flow(&u0, 1.0, 1.0, 1e-3, 1.0);
        flow_err = flow_err.max(v.max_abs_diff(&gauge_signed(&u, 1.0, p.sign)));
    }
    let p = SimParams::new(2.0, 0.8, 4);
    let mut rhs_err = 0.0f64;
    for seed in 0..5 {
        let w = random_field(4, seed, 1.0, 0.5);
        let t = 0.3 + seed as f64;
        let v = linear_propagator(&w, t, p.alpha);
        let mut rebuilt = linear_propagator(&rhs_interaction(&w, t, &p).unwrap(), t, p.alpha);
        for (n, c) in v.modes() {
            rebuilt.set(n, rebuilt.get(n) + Complex64::new(0.0, dispersion(n, p.alpha)) * c);
        }
        rhs_err = rhs_err.max(rhs_gauged(&v, &p).unwrap().max_abs_diff(&rebuilt));
    }
    outcome(
        flow_err <= 1e-8 && rhs_err <= 1e-10,
        format!("flow {flow_err:.2e}, rhs {rhs_err:.2e}"),
    )
}

fn normal_form_identity() -> Outcome {
    let h = 1e-5;
    let mut worst = 0.0f64;
    for (alpha, s) in [(1.0, 1.1), (2.0, 0.8)] {
        for cutoff in [4usize, 8] {
            let p = SimParams::new(alpha, s, cutoff).with_dt(h);
            let kernel = NormalFormKernel::new(s, alpha, cutoff).unwrap();
            for seed in 0..20 {
                let v = sample_mu(&p, seed, 0);
                let fd = central_diff4(|t| kernel.energy(&flow(&v, &p, t).unwrap()).total, h);
                let sum = kernel.derivative_terms_lab(&v, p.sign.value()).sum();
                worst = worst.max(rel_err(sum, fd));
            }
        }
    }
    outcome(worst <= 1e-5, format!("max relative error {worst:.2e} over 80 cases"))
}

fn brute_force() -> Outcome {
    let mut worst = 0.0f64;
    for cutoff in 1..=8usize {
        let f = random_field(cutoff, cutoff as u64, 1.0, 0.3);
        let fast = cubic_term(&f, cutoff).unwrap();
        for (k, z) in common::brute_cubic(&f, cutoff).iter().enumerate() {
            worst = worst.max((fast.coeffs()[k] - z).norm() / z.norm().max(1.0));
        }
        for (alpha, s) in [(1.0, 1.0), (2.0, 0.8)] {
            let r = correction_r(&f, s, alpha, cutoff).unwrap();
            let b = common::brute_correction(&f, s, alpha, cutoff).re;
            worst = worst.max((r - b).abs() / b.abs().max(1.0));
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let ones = SpectralField::from_modes(1, &[(-1, one), (0, one), (1, one)]).unwrap();
    let r = correction_r(&ones, 1.0, 1.0, 1).unwrap();
    outcome(
        worst <= 1e-12 && (r + 2.0).abs() <= 1e-12,
        format!("max deviation {worst:.2e}, all-ones R = {r}"),
    )
}

fn energy_boundedness() -> Outcome {
    let mut strong = Vec::new();
    let mut weak = Vec::new();
    for cutoff in [8usize, 16, 32, 64] {
        let p = SimParams::new(2.0, 0.8, cutoff);
        let kernel = NormalFormKernel::new(p.s, p.alpha, cutoff).unwrap();
        let e = Ensemble::new(p, 2024, 1000);
        let pairs = e.map(|_, f| energy_ratios(&kernel, f, &p, 0.5 * p.eps));
        strong.push(pairs.iter().map(|r| r.strong).fold(0.0, f64::max));
        weak.push(pairs.iter().map(|r| r.weak).fold(0.0, f64::max));
    }
    let (ss, sw) = (ratio_spread(&strong), ratio_spread(&weak));
    outcome(
        ss < 3.0 && sw < 3.0,
        format!("strong max {strong:.3?} (x{ss:.2}), weak max {weak:.3?} (x{sw:.2})"),
    )
}

fn measure_construction() -> Outcome {
    // One radius for every cutoff: the default radius of the finest truncation. The same
    // seeded ensemble is reused, so samples are nested across cutoffs.
    let r = default_radius(&SimParams::new(2.0, 0.8, 32));
    let mut norms = Vec::new();
    let mut top_share = 0.0f64;
    for cutoff in [8usize, 16, 32] {
        let p = SimParams::new(2.0, 0.8, cutoff);
        let kernel = NormalFormKernel::new(p.s, p.alpha, cutoff).unwrap();
        let e = Ensemble::new(p, 77, 10_000);
        let sq = e.map(|_, f| density_with(&kernel, f, r).value().powi(2));
        let total: f64 = sq.iter().sum();
        top_share = top_share.max(sq.iter().cloned().fold(0.0, f64::max) / total);
        norms.push((total / sq.len() as f64).sqrt());
    }
    let spread = ratio_spread(&norms);
    let shown: Vec<String> = norms.iter().map(|x| format!("{x:.4e}")).collect();
    let e = Ensemble::new(SimParams::new(2.0, 0.8, 64), 78, 1000);
    let rows = r_convergence(&e, &[4, 8, 16, 32, 64], 2.0).unwrap();
    let column: Vec<f64> = rows.iter().map(|row| row.norm.value).collect();
    let decreasing = column.windows(2).all(|w| w[1] < w[0]);
    let cauchy: Vec<String> = column.iter().map(|x| format!("{x:.3e}")).collect();
    outcome(
        spread <= 1.2 && decreasing,
        format!(
            "r = {r:.3}, ||F||_L2 [{}] (x{spread:.3}, largest sample share {top_share:.2}), Cauchy column [{}]",
            shown.join(", "),
            cauchy.join(", ")
        ),
    )
}

fn moment_growth_check() -> Outcome {
    let p = SimParams::new(2.0, 0.8, 32);
    let e = Ensemble::new(p, 5, 10_000);
    let exps = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let g = moment_growth(Statistic::FlNorm(p.s - 0.1), &exps, &e, Weighting::Gaussian).unwrap();
    outcome(g.beta <= 0.6, format!("fitted exponent {:.3}", g.beta))
}

fn transport() -> Outcome {
    let p = SimParams::new(2.0, 0.8, 1);
    let mut det_err = 0.0f64;
    for t in [0.05, 0.1, 0.2] {
        let f0 = sample_mu(&p, 3, 0);
        det_err = det_err.max((flow_jacobian_det(&f0, &p, t).unwrap() - 1.0).abs());
    }
    let e = Ensemble::new(p, 11, 100_000);
    let set = TransportSet::half_space(1);
    let r = 3.0;
    let moved = pushforward_check(&set, &p, r, 0.2, &e).unwrap();
    let still = pushforward_check(&set, &p, r, 0.0, &e).unwrap();
    let exact = (still.ratio - 1.0).abs().max(still.max_sample_gap);
    // Without a resolved estimate the interval-overlap test is vacuous.
    let rel_se = (moved.direct.std_error / moved.direct.value)
        .max(moved.transported.std_error / moved.transported.value);
    outcome(
        det_err <= 1e-5 && moved.consistent() && rel_se <= 0.1 && exact <= 1e-12,
        format!(
            "|det-1| {det_err:.2e}, t=0.2 ratio {:.4} ({:.4e}±{:.1e} vs {:.4e}±{:.1e}), t=0 gap {exact:.1e}",
            moved.ratio,
            moved.direct.value,
            moved.direct.std_error,
            moved.transported.value,
            moved.transported.std_error
        ),
    )
}

fn gauge_invariance() -> Outcome {
    let p = SimParams::new(2.0, 0.8, 16);
    let e = Ensemble::new(p, 99, 100_000);
    let rep = gauge_invariance_check(&p, 0.7, &e).unwrap();
    outcome(
        rep.passes(),
        format!("max KS {:.2e} < critical {:.2e}", rep.max_distance, rep.critical_1pct),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("phase lower bound", phase_lower_bound),
        ("double mean value bound", dmvt_bound),
        ("integrator correctness", integrator),
        ("conservation", conservation),
        ("gauge equivalence", gauge_equivalence),
        ("normal-form identity", normal_form_identity),
        ("brute-force oracles", brute_force),
        ("energy-estimate boundedness", energy_boundedness),
        ("measure construction", measure_construction),
        ("moment growth", moment_growth_check),
        ("transport", transport),
        ("gauge invariance of the measure", gauge_invariance),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {tag} {name}: {} [{:.1}s]",
            k + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
        if !out.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
