//! Time evolution of the Galerkin-truncated gauged equation
//!
//! ```text
//! i ∂t v + (−∂x²)^α v = σ P_{≤N}[(|P_{≤N}v|² − 2⨍|P_{≤N}v|²) P_{≤N}v]
//! ```
//!
//! together with the gauge maps, the interaction picture `w = S(−t)v` with
//! `S(t) = e^{it(−∂x²)^α}`, and conservation diagnostics.
//!
//! In Fourier variables the lab-frame right-hand side is
//! `∂t v̂_n = i|n|^{2α} v̂_n − iσ C_n(v)` where `C` is [`cubic_term`].

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::phase::{dispersion, for_each_hyperplane, phase, FrequencyQuad};
use crate::spectral::{cubic_term, quartic_mean, SpectralField};

/// Coefficient modulus treated as numerical blowup.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Sign in front of the cubic nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Defocusing,
    Focusing,
    /// Nonlinearity switched off; the flow is the free propagator. Diagnostic use.
    Linear,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
            Sign::Linear => 0.0,
        }
    }
}

/// Physics and discretisation of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// Dispersion exponent `α`.
    pub alpha: f64,
    /// Gaussian-measure regularity `s`.
    pub s: f64,
    /// `ε` in `σ = s − 1/2 − ε`.
    pub eps: f64,
    /// Galerkin cutoff `N`.
    pub cutoff: usize,
    pub sign: Sign,
    pub dt: f64,
    pub horizon: f64,
}

impl SimParams {
    pub fn new(alpha: f64, s: f64, cutoff: usize) -> Self {
        Self {
            alpha,
            s,
            eps: 0.05,
            cutoff,
            sign: Sign::Defocusing,
            dt: 1e-3,
            horizon: 1.0,
        }
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(LabError::invalid(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !self.s.is_finite() {
            return Err(LabError::invalid("s must be finite"));
        }
        if !(self.eps > 0.0 && self.eps <= 0.25) {
            return Err(LabError::invalid(format!("eps must lie in (0, 1/4], got {}", self.eps)));
        }
        if self.cutoff < 1 {
            return Err(LabError::invalid("cutoff N must be >= 1"));
        }
        if !(self.dt > 0.0) || !(self.horizon > 0.0) || self.dt > self.horizon {
            return Err(LabError::invalid(format!(
                "need 0 < dt <= horizon, got dt = {}, horizon = {}",
                self.dt, self.horizon
            )));
        }
        Ok(())
    }

    /// `σ = s − 1/2 − ε`.
    pub fn sigma(&self) -> f64 {
        self.s - 0.5 - self.eps
    }
}

/// Whether samples are lab-frame `v` or interaction-frame `w = S(−t)v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Interaction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub frame: Frame,
}

impl Trajectory {
    pub fn final_state(&self) -> &SpectralField {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    /// Re-expresses every state in the other frame.
    pub fn to_frame(&self, frame: Frame, alpha: f64) -> Trajectory {
        if frame == self.frame {
            return self.clone();
        }
        let dir = match frame {
            Frame::Interaction => -1.0,
            Frame::Lab => 1.0,
        };
        Trajectory {
            times: self.times.clone(),
            states: self
                .times
                .iter()
                .zip(&self.states)
                .map(|(&t, f)| linear_propagator(f, dir * t, alpha))
                .collect(),
            frame,
        }
    }
}

/// `S(t)`: multiplies mode `n` by `e^{it|n|^{2α}}`.
pub fn linear_propagator(f: &SpectralField, t: f64, alpha: f64) -> SpectralField {
    let mut out = f.clone();
    let off = f.cutoff() as i64;
    for (k, c) in out.coeffs_mut().iter_mut().enumerate() {
        let w = dispersion(k as i64 - off, alpha);
        *c *= Complex64::from_polar(1.0, t * w);
    }
    out
}

/// `G_t[f] = e^{2it⨍|f|²} f`.
pub fn gauge_forward(f: &SpectralField, t: f64) -> SpectralField {
    f.scale(Complex64::from_polar(1.0, 2.0 * t * f.mass()))
}

/// `G_{−t}`.
pub fn gauge_inverse(f: &SpectralField, t: f64) -> SpectralField {
    gauge_forward(f, -t)
}

/// Gauge adapted to the sign of the nonlinearity, `e^{2iσt⨍|f|²} f`. It maps solutions
/// of `i∂t u + (−∂x²)^α u = σ P_N(|P_N u|² P_N u)` onto solutions of the gauged equation.
pub fn gauge_signed(f: &SpectralField, t: f64, sign: Sign) -> SpectralField {
    gauge_forward(f, sign.value() * t)
}

fn check_cutoff(f: &SpectralField, p: &SimParams) -> Result<()> {
    if f.cutoff() < p.cutoff {
        return Err(LabError::invalid(format!(
            "field cutoff {} is below the dynamics cutoff {}",
            f.cutoff(),
            p.cutoff
        )));
    }
    Ok(())
}

/// Nonlinear part `−iσ C(v)` of the lab-frame vector field.
fn nonlinear_rate(v: &SpectralField, p: &SimParams) -> SpectralField {
    let sigma = p.sign.value();
    if sigma == 0.0 {
        return SpectralField::zeros(v.cutoff());
    }
    let c = cubic_term(v, p.cutoff).expect("cutoff checked by caller");
    c.scale(Complex64::new(0.0, -sigma))
}

/// Lab-frame vector field `∂t v̂_n = i|n|^{2α} v̂_n − iσ C_n(v)`.
///
/// Fields may carry modes above `N`; those evolve linearly.
pub fn rhs_gauged(f: &SpectralField, p: &SimParams) -> Result<SpectralField> {
    check_cutoff(f, p)?;
    let mut out = nonlinear_rate(f, p);
    let off = f.cutoff() as i64;
    for (k, c) in out.coeffs_mut().iter_mut().enumerate() {
        let n = k as i64 - off;
        *c += Complex64::new(0.0, dispersion(n, p.alpha)) * f.get(n);
    }
    Ok(out)
}

/// Interaction-frame vector field evaluated literally over `Γ_N(n)`:
/// `∂t ŵ_n = σ 1_{|n|≤N} [−i Σ_{Γ_N(n)} e^{itφ} ŵ_{n₁} conj(ŵ_{n₂}) ŵ_{n₃} + i|ŵ_n|² ŵ_n]`.
pub fn rhs_interaction(w: &SpectralField, t: f64, p: &SimParams) -> Result<SpectralField> {
    check_cutoff(w, p)?;
    let mut out = SpectralField::zeros(w.cutoff());
    let sigma = p.sign.value();
    if sigma == 0.0 {
        return Ok(out);
    }
    let m = p.cutoff as i64;
    for n in -m..=m {
        let mut acc = Complex64::new(0.0, 0.0);
        for_each_hyperplane(n, p.cutoff, |n1, n2, n3| {
            let ph = phase(&FrequencyQuad { n1, n2, n3, n }, p.alpha);
            acc += Complex64::from_polar(1.0, t * ph) * w.get(n1) * w.get(n2).conj() * w.get(n3);
        })?;
        let wn = w.get(n);
        let rate = Complex64::new(0.0, -1.0) * acc + Complex64::new(0.0, wn.norm_sqr()) * wn;
        out.set(n, sigma * rate);
    }
    Ok(out)
}

fn axpy(y: &SpectralField, a: f64, x: &SpectralField) -> SpectralField {
    let mut out = y.clone();
    for (o, xi) in out.coeffs_mut().iter_mut().zip(x.coeffs()) {
        *o += a * xi;
    }
    out
}

/// One Lawson–RK4 step of signed size `h`: classical RK4 on the interaction variable
/// anchored at the current time, with the linear part carried exactly by [`linear_propagator`].
pub fn lawson_rk4_step(v: &SpectralField, h: f64, p: &SimParams) -> SpectralField {
    let alpha = p.alpha;
    let half = |f: &SpectralField| linear_propagator(f, 0.5 * h, alpha);
    let full = |f: &SpectralField| linear_propagator(f, h, alpha);

    let k1 = nonlinear_rate(v, p);
    let k2 = nonlinear_rate(&half(&axpy(v, 0.5 * h, &k1)), p);
    let v_half = half(v);
    let k3 = nonlinear_rate(&axpy(&v_half, 0.5 * h, &k2), p);
    let k4 = nonlinear_rate(&axpy(&full(v), h, &half(&k3)), p);

    let k1f = full(&k1);
    let k23 = half(&axpy(&k2, 1.0, &k3));
    let mut out = full(v);
    for (((o, a), b), c) in out
        .coeffs_mut()
        .iter_mut()
        .zip(k1f.coeffs())
        .zip(k23.coeffs())
        .zip(k4.coeffs())
    {
        *o += h / 6.0 * (a + 2.0 * b + c);
    }
    out
}

fn blown_up(v: &SpectralField) -> bool {
    v.coeffs()
        .iter()
        .any(|c| !c.re.is_finite() || !c.im.is_finite() || c.norm() > BLOWUP_THRESHOLD)
}

/// Number of uniform steps of size at most `dt` covering `|t|`.
fn step_count(t: f64, dt: f64) -> usize {
    ((t.abs() / dt) - 1e-9).ceil().max(1.0) as usize
}

/// `Φ_N(t) f0` for signed `t`, using uniform steps no larger than `p.dt`.
pub fn flow(f0: &SpectralField, p: &SimParams, t: f64) -> Result<SpectralField> {
    check_cutoff(f0, p)?;
    if t == 0.0 {
        return Ok(f0.clone());
    }
    let steps = step_count(t, p.dt);
    let h = t / steps as f64;
    let mut v = f0.clone();
    for k in 1..=steps {
        v = lawson_rk4_step(&v, h, p);
        if blown_up(&v) {
            return Err(LabError::BlowupDetected { time: k as f64 * h });
        }
    }
    Ok(v)
}

/// Integrates from `t = 0` to `p.horizon` with uniform steps `h = horizon / ⌈horizon/dt⌉`,
/// recording the lab-frame state every `record_every` steps and at the final time.
pub fn evolve(f0: &SpectralField, p: &SimParams, record_every: usize) -> Result<Trajectory> {
    p.validate()?;
    check_cutoff(f0, p)?;
    if !f0.is_finite() {
        return Err(LabError::invalid("initial data is not finite"));
    }
    let record_every = record_every.max(1);
    let steps = step_count(p.horizon, p.dt);
    let h = p.horizon / steps as f64;
    let mut times = vec![0.0];
    let mut states = vec![f0.clone()];
    let mut v = f0.clone();
    for k in 1..=steps {
        v = lawson_rk4_step(&v, h, p);
        let t = k as f64 * h;
        if blown_up(&v) {
            return Err(LabError::BlowupDetected { time: t });
        }
        if k % record_every == 0 || k == steps {
            times.push(t);
            states.push(v.clone());
        }
    }
    Ok(Trajectory {
        times,
        states,
        frame: Frame::Lab,
    })
}

/// Truncated mass `Σ |v̂_n|²`.
pub fn mass(v: &SpectralField) -> f64 {
    v.mass()
}

/// Truncated Hamiltonian `½ Σ |n|^{2α}|v̂_n|² − σ/4 ⨍|P_N v|⁴`.
///
/// With the `+(−∂x²)^α` dispersion the quartic term enters with the opposite sign of
/// the nonlinearity.
pub fn hamiltonian(v: &SpectralField, p: &SimParams) -> f64 {
    let kinetic: f64 = v
        .modes()
        .map(|(n, c)| dispersion(n, p.alpha) * c.norm_sqr())
        .sum();
    0.5 * kinetic - 0.25 * p.sign.value() * quartic_mean(&v.project(p.cutoff))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    pub mass_drift: f64,
    pub energy_drift: f64,
}

/// Maximum over recorded states of `|Q(t) − Q(0)| / max(1, |Q(0)|)` for mass and energy.
pub fn conservation_report(tr: &Trajectory, p: &SimParams) -> Result<ConservationReport> {
    if tr.states.is_empty() {
        return Err(LabError::invalid("empty trajectory"));
    }
    let lab = tr.to_frame(Frame::Lab, p.alpha);
    let m0 = mass(&lab.states[0]);
    let h0 = hamiltonian(&lab.states[0], p);
    let mut report = ConservationReport {
        mass_drift: 0.0,
        energy_drift: 0.0,
    };
    for v in &lab.states {
        report.mass_drift = report.mass_drift.max((mass(v) - m0).abs() / m0.abs().max(1.0));
        report.energy_drift = report
            .energy_drift
            .max((hamiltonian(v, p) - h0).abs() / h0.abs().max(1.0));
    }
    Ok(report)
}

/// `min(10⁻², 0.1 / (1 + ‖f0‖²_{L²}))`.
pub fn suggested_dt(f0: &SpectralField) -> f64 {
    (0.1 / (1.0 + f0.mass())).min(1e-2)
}
