//! Gaussian measures on Fourier coefficients, the weighted densities built from the
//! normal-form correction, and Monte-Carlo transport diagnostics.
//!
//! Samples follow `u = Σ_{|n|≤N} g_n ⟨n⟩^{−s} e^{inx}` with `g_n = a + ib`, `a, b`
//! independent standard normals, so `E|g_n|² = 2`. The sampler cutoff always equals the
//! dynamics cutoff; normalisation constants are never formed and every comparison is a
//! ratio or a self-normalised average.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{flow, gauge_forward, SimParams};
use crate::energy::NormalFormKernel;
use crate::error::{LabError, Result};
use crate::rng::SampleStream;
use crate::spectral::{bracket, bracket_pow2, fourier_lebesgue_norm, sobolev_norm, sobolev_norm_sq, SpectralField};
use crate::stats::{jackknife_se, ks_critical, ks_distance, linear_fit, mean_se};

/// One draw from `μ_s` truncated to `|n| ≤ p.cutoff`, keyed by `(seed, index, n)`.
pub fn sample_mu(p: &SimParams, seed: u64, index: u64) -> SpectralField {
    let mut stream = SampleStream::new(seed, index);
    let mut f = SpectralField::zeros(p.cutoff);
    let m = p.cutoff as i64;
    for n in -m..=m {
        let (a, b) = stream.normal_pair(n);
        f.set(n, Complex64::new(a, b) / bracket_pow2(n, p.s / 2.0));
    }
    f
}

/// `E‖u‖²_{L²} = Σ_{|n|≤N} 2⟨n⟩^{−2s}`.
pub fn expected_mass(p: &SimParams) -> f64 {
    let m = p.cutoff as i64;
    (-m..=m).map(|n| 2.0 * bracket_pow2(n, -p.s)).sum()
}

/// Default density radius `r = 3 (E‖u‖²_{L²})^{1/2}`.
pub fn default_radius(p: &SimParams) -> f64 {
    3.0 * expected_mass(p).sqrt()
}

/// Seeded, reproducible collection of `μ_s` samples. Sample `k` is a pure function of
/// `(seed, k)` and is generated on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ensemble {
    pub params: SimParams,
    pub seed: u64,
    pub size: usize,
}

impl Ensemble {
    pub fn new(params: SimParams, seed: u64, size: usize) -> Self {
        Self { params, seed, size }
    }

    pub fn sample(&self, k: usize) -> SpectralField {
        sample_mu(&self.params, self.seed, k as u64)
    }

    /// Evaluates `f` on every sample in parallel, returning results in sample order.
    pub fn map<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &SpectralField) -> T + Sync + Send,
    {
        (0..self.size)
            .into_par_iter()
            .map(|k| f(k, &self.sample(k)))
            .collect()
    }
}

/// `F_{N,r}(f) = 1_{‖P_N f‖_{L²} ≤ r} e^{−½R_{s,N}(P_N f)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub indicator: bool,
    pub weight: f64,
}

impl DensityValue {
    /// Indicator times weight.
    pub fn value(&self) -> f64 {
        if self.indicator {
            self.weight
        } else {
            0.0
        }
    }
}

pub fn density_f(f: &SpectralField, p: &SimParams, r: f64) -> Result<DensityValue> {
    let kernel = NormalFormKernel::new(p.s, p.alpha, p.cutoff)?;
    if f.cutoff() < p.cutoff {
        return Err(LabError::invalid("field cutoff below N"));
    }
    Ok(density_with(&kernel, f, r))
}

pub fn density_with(kernel: &NormalFormKernel, f: &SpectralField, r: f64) -> DensityValue {
    let pf = f.project(kernel.cutoff());
    DensityValue {
        indicator: pf.mass().sqrt() <= r,
        weight: (-0.5 * kernel.correction(&pf)).exp(),
    }
}

/// Point estimate with a standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn ci95(&self) -> (f64, f64) {
        (
            self.value - 1.959_963_984_540_054 * self.std_error,
            self.value + 1.959_963_984_540_054 * self.std_error,
        )
    }

    pub fn overlaps(&self, other: &Estimate) -> bool {
        let (a0, a1) = self.ci95();
        let (b0, b1) = other.ci95();
        a0 <= b1 && b0 <= a1
    }
}

/// Scalar statistics of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    /// `‖u‖_{FL^{σ,∞}}`.
    FlNorm(f64),
    /// `‖u‖_{H^σ}`.
    SobolevNorm(f64),
    /// `|û(n)|`.
    AbsCoeff(i64),
    /// `(Σ_{n=1}^{M} |g_n|²)^{1/2}` with `g_n = ⟨n⟩^s û(n)`.
    L2Block(usize),
}

impl Statistic {
    pub fn eval(&self, f: &SpectralField, s: f64) -> f64 {
        match *self {
            Statistic::FlNorm(sigma) => {
                fourier_lebesgue_norm(f, sigma, f64::INFINITY).expect("q = inf is valid")
            }
            Statistic::SobolevNorm(sigma) => sobolev_norm(f, sigma),
            Statistic::AbsCoeff(n) => f.get(n).norm(),
            Statistic::L2Block(m) => (1..=m as i64)
                .map(|n| bracket_pow2(n, s) * f.get(n).norm_sqr())
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// How ensemble averages are weighted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weighting {
    /// Plain `μ_s` average.
    Gaussian,
    /// Self-normalised importance weights `F_{N,r}`.
    Density { r: f64 },
}

/// Sample weights for an ensemble; all ones for [`Weighting::Gaussian`].
pub fn ensemble_weights(e: &Ensemble, weighting: Weighting) -> Result<Vec<f64>> {
    match weighting {
        Weighting::Gaussian => Ok(vec![1.0; e.size]),
        Weighting::Density { r } => {
            let p = &e.params;
            let kernel = NormalFormKernel::new(p.s, p.alpha, p.cutoff)?;
            Ok(e.map(|_, f| density_with(&kernel, f, r).value()))
        }
    }
}

/// `(Σ w_k x_k^p / Σ w_k)^{1/p}` with a jackknife standard error.
pub fn weighted_lp(values: &[f64], weights: &[f64], p: f64) -> Result<Estimate> {
    if values.is_empty() {
        return Err(LabError::DegenerateEstimator("empty ensemble".into()));
    }
    if !(p >= 1.0) {
        return Err(LabError::invalid(format!("moment exponent must be >= 1, got {p}")));
    }
    let powered: Vec<f64> = values.iter().map(|x| x.abs().powf(p)).collect();
    let sw: f64 = weights.iter().sum();
    if !(sw > 0.0) {
        return Err(LabError::DegenerateEstimator("all weights vanish".into()));
    }
    let swx: f64 = weights.iter().zip(&powered).map(|(w, x)| w * x).sum();
    let value = (swx / sw).powf(1.0 / p);
    let loo: Vec<f64> = weights
        .iter()
        .zip(&powered)
        .map(|(w, x)| {
            let d = sw - w;
            if d > 0.0 {
                ((swx - w * x) / d).powf(1.0 / p)
            } else {
                value
            }
        })
        .collect();
    Ok(Estimate {
        value,
        std_error: jackknife_se(&loo),
    })
}

/// `‖stat‖_{L^p}` over the ensemble under the chosen weighting.
pub fn lp_moment(stat: Statistic, p: f64, e: &Ensemble, weighting: Weighting) -> Result<Estimate> {
    if e.size == 0 {
        return Err(LabError::DegenerateEstimator("empty ensemble".into()));
    }
    let s = e.params.s;
    let values = e.map(|_, f| stat.eval(f, s));
    let weights = ensemble_weights(e, weighting)?;
    weighted_lp(&values, &weights, p)
}

/// Moments over a list of exponents and the fitted growth exponent `β` in
/// `‖stat‖_{L^p} ≈ C p^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentGrowth {
    pub exponents: Vec<f64>,
    pub moments: Vec<Estimate>,
    pub beta: f64,
}

pub fn moment_growth(
    stat: Statistic,
    exponents: &[f64],
    e: &Ensemble,
    weighting: Weighting,
) -> Result<MomentGrowth> {
    if e.size == 0 || exponents.len() < 2 {
        return Err(LabError::DegenerateEstimator(
            "moment growth needs samples and at least two exponents".into(),
        ));
    }
    let s = e.params.s;
    let values = e.map(|_, f| stat.eval(f, s));
    let weights = ensemble_weights(e, weighting)?;
    let moments = exponents
        .iter()
        .map(|&p| weighted_lp(&values, &weights, p))
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = exponents.iter().map(|p| p.ln()).collect();
    let ly: Vec<f64> = moments.iter().map(|m| m.value.ln()).collect();
    let (beta, _) = linear_fit(&lx, &ly);
    Ok(MomentGrowth {
        exponents: exponents.to_vec(),
        moments,
        beta,
    })
}

/// Empirical tail `P[stat ≥ K]` and the largest `c` with `P ≤ e^{−cK²}` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    pub points: Vec<(f64, f64)>,
    pub c: f64,
}

pub fn tail_fit(stat: Statistic, thresholds: &[f64], e: &Ensemble) -> Result<TailFit> {
    if e.size == 0 {
        return Err(LabError::DegenerateEstimator("empty ensemble".into()));
    }
    let s = e.params.s;
    let values = e.map(|_, f| stat.eval(f, s));
    let m = values.len() as f64;
    let points: Vec<(f64, f64)> = thresholds
        .iter()
        .map(|&k| (k, values.iter().filter(|&&x| x >= k).count() as f64 / m))
        .collect();
    let c = points
        .iter()
        .filter(|(_, prob)| *prob > 0.0)
        .map(|(k, prob)| -prob.ln() / (k * k))
        .fold(f64::INFINITY, f64::min);
    if !c.is_finite() {
        return Err(LabError::DegenerateEstimator(
            "no threshold with a positive empirical tail".into(),
        ));
    }
    Ok(TailFit { points, c })
}

/// One row of the `R_{s,N}` Cauchy table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub cutoff: usize,
    pub norm: Estimate,
}

/// `‖R_{s,N}(P_N u) − R_{s,N_max}(P_{N_max} u)‖_{L^q(μ_s)}` for each `N < N_max` in the list.
pub fn r_convergence(
    e: &Ensemble,
    cutoffs: &[usize],
    q: f64,
) -> Result<Vec<ConvergenceRow>> {
    if cutoffs.is_empty() {
        return Err(LabError::invalid("empty cutoff list"));
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::invalid("cutoff list must be strictly ascending"));
    }
    let n_max = *cutoffs.last().unwrap();
    if n_max > e.params.cutoff {
        return Err(LabError::invalid(format!(
            "cutoff {n_max} exceeds the sampler cutoff {}",
            e.params.cutoff
        )));
    }
    if cutoffs.len() == 1 {
        return Ok(Vec::new());
    }
    let p = &e.params;
    let kernels = cutoffs
        .iter()
        .map(|&n| NormalFormKernel::new(p.s, p.alpha, n))
        .collect::<Result<Vec<_>>>()?;
    let per_sample: Vec<Vec<f64>> = e.map(|_, f| kernels.iter().map(|k| k.correction(f)).collect());
    let ones = vec![1.0; e.size];
    let last = cutoffs.len() - 1;
    (0..last)
        .map(|j| {
            let diffs: Vec<f64> = per_sample.iter().map(|r| (r[j] - r[last]).abs()).collect();
            Ok(ConvergenceRow {
                cutoff: cutoffs[j],
                norm: weighted_lp(&diffs, &ones, q)?,
            })
        })
        .collect()
}

/// Largest cutoff accepted by [`flow_jacobian_det`] (phase-space dimension 18).
pub const JACOBIAN_MAX_CUTOFF: usize = 4;

/// Central finite-difference step for [`flow_jacobian_det`].
pub const JACOBIAN_STEP: f64 = 1e-5;

fn to_real(f: &SpectralField) -> Vec<f64> {
    f.coeffs().iter().flat_map(|c| [c.re, c.im]).collect()
}

fn from_real(cutoff: usize, x: &[f64]) -> SpectralField {
    let coeffs = x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    SpectralField::from_coeffs(cutoff, coeffs).expect("length matches cutoff")
}

/// Determinant of the central-difference Jacobian of `Φ_N(t)` in real coordinates
/// `(Re û_n, Im û_n)_{|n|≤N}`.
pub fn flow_jacobian_det(f0: &SpectralField, p: &SimParams, t: f64) -> Result<f64> {
    if p.cutoff > JACOBIAN_MAX_CUTOFF {
        return Err(LabError::UnsupportedDimension {
            cutoff: p.cutoff,
            max: JACOBIAN_MAX_CUTOFF,
        });
    }
    if t == 0.0 {
        // Φ_N(0) is the identity.
        return Ok(1.0);
    }
    let base = to_real(&f0.with_cutoff(p.cutoff));
    let dim = base.len();
    let columns: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut plus = base.clone();
            let mut minus = base.clone();
            plus[j] += JACOBIAN_STEP;
            minus[j] -= JACOBIAN_STEP;
            let fp = to_real(&flow(&from_real(p.cutoff, &plus), p, t)?);
            let fm = to_real(&flow(&from_real(p.cutoff, &minus), p, t)?);
            Ok(fp
                .iter()
                .zip(&fm)
                .map(|(a, b)| (a - b) / (2.0 * JACOBIAN_STEP))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let jac = DMatrix::from_fn(dim, dim, |i, j| columns[j][i]);
    Ok(jac.determinant())
}

/// Test set `A = {H^σ-ball(c, R)} ∩ {Re û(n₀) ≥ 0}`; either part may be absent.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportSet {
    pub ball: Option<SobolevBall>,
    pub half_space: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevBall {
    pub center: SpectralField,
    pub radius: f64,
    pub sigma: f64,
}

impl TransportSet {
    pub fn half_space(n0: i64) -> Self {
        Self {
            ball: None,
            half_space: Some(n0),
        }
    }

    pub fn contains(&self, f: &SpectralField) -> bool {
        let in_ball = self.ball.as_ref().is_none_or(|b| {
            let m = f.cutoff().max(b.center.cutoff()) as i64;
            let mut d = SpectralField::zeros(m as usize);
            for n in -m..=m {
                d.set(n, f.get(n) - b.center.get(n));
            }
            sobolev_norm(&d, b.sigma) <= b.radius
        });
        let in_half = self.half_space.is_none_or(|n0| f.get(n0).re >= 0.0);
        in_ball && in_half
    }
}

/// Two un-normalised estimates of `ρ_{s,N,r}(Φ_N(t)(A))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushforwardReport {
    /// Mean of `F_{N,r}(v) 1[Φ_N(−t)v ∈ A]`.
    pub direct: Estimate,
    /// Mean of `1_A(v) 1[‖v‖ ≤ r] exp(−½E_s(Φ_N(t)v) + ½‖v‖²_{H^s})`.
    pub transported: Estimate,
    /// `direct / transported`.
    pub ratio: f64,
    /// Largest per-sample `|direct_k − transported_k|`; zero up to rounding at `t = 0`.
    pub max_sample_gap: f64,
}

impl PushforwardReport {
    pub fn consistent(&self) -> bool {
        self.direct.overlaps(&self.transported)
    }
}

pub fn pushforward_check(
    set: &TransportSet,
    p: &SimParams,
    r: f64,
    t: f64,
    e: &Ensemble,
) -> Result<PushforwardReport> {
    if e.params.cutoff != p.cutoff {
        return Err(LabError::invalid("sampler cutoff must equal the dynamics cutoff"));
    }
    if e.size < 2 {
        return Err(LabError::DegenerateEstimator("need at least two samples".into()));
    }
    let kernel = NormalFormKernel::new(p.s, p.alpha, p.cutoff)?;
    let pairs: Vec<Result<(f64, f64)>> = e.map(|_, v| {
        let ball = v.mass().sqrt() <= r;
        if !ball {
            return Ok((0.0, 0.0));
        }
        let back = if t == 0.0 { v.clone() } else { flow(v, p, -t)? };
        let direct = if set.contains(&back) {
            (-0.5 * kernel.correction(v)).exp()
        } else {
            0.0
        };
        let transported = if set.contains(v) {
            let fwd = if t == 0.0 { v.clone() } else { flow(v, p, t)? };
            let e_s = kernel.energy(&fwd).total;
            (-0.5 * e_s + 0.5 * sobolev_norm_sq(v, p.s)).exp()
        } else {
            0.0
        };
        Ok((direct, transported))
    });
    let pairs = pairs.into_iter().collect::<Result<Vec<_>>>()?;
    let direct: Vec<f64> = pairs.iter().map(|x| x.0).collect();
    let transported: Vec<f64> = pairs.iter().map(|x| x.1).collect();
    if direct.iter().all(|&x| x == 0.0) && transported.iter().all(|&x| x == 0.0) {
        return Err(LabError::DegenerateEstimator("no sample falls in the test set".into()));
    }
    let (dm, dse) = mean_se(&direct);
    let (tm, tse) = mean_se(&transported);
    let max_sample_gap = pairs
        .iter()
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(PushforwardReport {
        direct: Estimate {
            value: dm,
            std_error: dse,
        },
        transported: Estimate {
            value: tm,
            std_error: tse,
        },
        ratio: dm / tm,
        max_sample_gap,
    })
}

/// Two-sample KS distance per statistic between an ensemble and its image under `G_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeReport {
    pub rows: Vec<(String, f64)>,
    pub max_distance: f64,
    /// Asymptotic 1% critical value for two samples of the ensemble size.
    pub critical_1pct: f64,
}

impl GaugeReport {
    pub fn passes(&self) -> bool {
        self.max_distance < self.critical_1pct
    }
}

fn gauge_statistics(f: &SpectralField) -> Vec<f64> {
    let mut out: Vec<f64> = (-3..=3).map(|n| f.get(n).norm_sqr()).collect();
    out.push(f.mass().sqrt());
    out.push(f.get(1).re);
    out
}

fn gauge_statistic_names() -> Vec<String> {
    let mut names: Vec<String> = (-3..=3).map(|n| format!("abs_sq_coeff({n})")).collect();
    names.push("l2_norm".into());
    names.push("re_coeff(1)".into());
    names
}

pub fn gauge_invariance_check(p: &SimParams, t: f64, e: &Ensemble) -> Result<GaugeReport> {
    if !(p.s > 0.5) {
        return Err(LabError::regime(format!(
            "gauge invariance needs s > 1/2, got {}",
            p.s
        )));
    }
    if e.size == 0 {
        return Err(LabError::DegenerateEstimator("empty ensemble".into()));
    }
    let stats: Vec<(Vec<f64>, Vec<f64>)> =
        e.map(|_, f| (gauge_statistics(f), gauge_statistics(&gauge_forward(f, t))));
    let names = gauge_statistic_names();
    let rows: Vec<(String, f64)> = names
        .into_iter()
        .enumerate()
        .map(|(j, name)| {
            let a: Vec<f64> = stats.iter().map(|s| s.0[j]).collect();
            let b: Vec<f64> = stats.iter().map(|s| s.1[j]).collect();
            (name, ks_distance(&a, &b))
        })
        .collect();
    let max_distance = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(GaugeReport {
        rows,
        max_distance,
        critical_1pct: ks_critical(0.01, e.size, e.size),
    })
}

/// `⟨n⟩^{−s}` amplitude scale of mode `n`, exposed for diagnostics.
pub fn mode_scale(n: i64, s: f64) -> f64 {
    bracket(n).powf(-s)
}
