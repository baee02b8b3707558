//! Normal-form correction, modified energy and the decomposition of its time
//! derivative along the truncated flow.
//!
//! For a lab-frame state `y` the correction is
//!
//! ```text
//! R_{s,N}(y) = −½ Re Σ_{Γ_N(n̄)} ψ_s(n̄)/φ(n̄) · y_{n₁} conj(y_{n₂}) y_{n₃} conj(y_n)
//! ```
//!
//! and `E_s(y) = ‖P_N y‖²_{H^s} + R_{s,N}(y)`. Along the truncated flow, with
//! `w = S(−t)v` and `ẇ = A + B` split into its non-resonant part `A` and resonant part
//! `B = iσ|w|²w`,
//!
//! ```text
//! d/dt E_s(v(t)) = N₁ + R₁ + N₂ + R₂,
//! N₁ = −Re Q(A, w, w, w),  R₁ = −Re Q(B, w, w, w),
//! N₂ = −Re Q(w, A, w, w),  R₂ = −Re Q(w, B, w, w),
//! ```
//!
//! where `Q(a,b,c,d) = Σ_{Γ_N(n̄)} (ψ_s/φ) e^{itφ} a_{n₁} conj(b_{n₂}) c_{n₃} conj(d_n)`.
//! The `n₁ ↔ n₃` and `(n₁,n₃) ↔ (n₂,n)` symmetries of the kernel fold the four
//! product-rule terms into these two pairs.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{linear_propagator, rhs_gauged, SimParams};
use crate::error::{LabError, Result};
use crate::phase::{phase, psi, FrequencyQuad};
use crate::spectral::{cubic_term, fourier_lebesgue_norm, sobolev_norm, sobolev_norm_sq, SpectralField};

/// Tabulated kernel `ψ_s/φ` on `Γ_N(n̄)`, indexed by `(n, n₁, n₃)`.
#[derive(Debug, Clone)]
pub struct NormalFormKernel {
    s: f64,
    alpha: f64,
    cutoff: usize,
    values: Vec<f64>,
}

impl NormalFormKernel {
    pub fn new(s: f64, alpha: f64, cutoff: usize) -> Result<Self> {
        if !(alpha > 0.5) {
            return Err(LabError::regime(format!(
                "normal-form kernel needs alpha > 1/2, got {alpha}"
            )));
        }
        let m = cutoff as i64;
        let width = 2 * cutoff + 1;
        let values: Vec<f64> = (-m..=m)
            .into_par_iter()
            .flat_map_iter(|n| {
                let mut slab = vec![0.0; width * width];
                for n1 in -m..=m {
                    for n3 in -m..=m {
                        let q = FrequencyQuad::from_outer(n1, n3, n);
                        if q.n2.abs() > m || !q.is_nonresonant() {
                            continue;
                        }
                        slab[((n1 + m) as usize) * width + (n3 + m) as usize] =
                            psi(&q, s) / phase(&q, alpha);
                    }
                }
                slab
            })
            .collect();
        Ok(Self {
            s,
            alpha,
            cutoff,
            values,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Kernel at `(n₁, n₃, n)`; zero off `Γ_N`.
    #[inline]
    pub fn at(&self, n1: i64, n3: i64, n: i64) -> f64 {
        let m = self.cutoff as i64;
        let w = 2 * self.cutoff + 1;
        self.values[(((n + m) as usize) * w + (n1 + m) as usize) * w + (n3 + m) as usize]
    }

    /// Visits `(n, n₁, n₂, n₃, kernel)` for one outer mode `n` over `Γ_N(n)`.
    #[inline]
    fn for_slice<F: FnMut(i64, i64, i64, f64)>(&self, n: i64, mut visit: F) {
        let m = self.cutoff as i64;
        let w = 2 * self.cutoff + 1;
        let base = ((n + m) as usize) * w * w;
        for n1 in -m..=m {
            if n1 == n {
                continue;
            }
            let row = base + ((n1 + m) as usize) * w;
            let lo = (-m).max(n - n1 - m);
            let hi = m.min(n - n1 + m);
            for n3 in lo..=hi {
                if n3 == n {
                    continue;
                }
                visit(n1, n1 + n3 - n, n3, self.values[row + (n3 + m) as usize]);
            }
        }
    }

    /// `Q(a,b,c,d) = Σ_{Γ_N} K a_{n₁} conj(b_{n₂}) c_{n₃} conj(d_n)` at `t = 0`, reduced
    /// over `n` in ascending order.
    pub fn quartic_form(
        &self,
        a: &SpectralField,
        b: &SpectralField,
        c: &SpectralField,
        d: &SpectralField,
    ) -> Complex64 {
        let m = self.cutoff as i64;
        let partial: Vec<Complex64> = (-m..=m)
            .into_par_iter()
            .map(|n| {
                let mut acc = Complex64::new(0.0, 0.0);
                self.for_slice(n, |n1, n2, n3, k| {
                    acc += k * a.get(n1) * b.get(n2).conj() * c.get(n3);
                });
                acc * d.get(n).conj()
            })
            .collect();
        partial.into_iter().sum()
    }

    /// `R_{s,N}(y)` using modes `|n| ≤ N` of `y`.
    pub fn correction(&self, y: &SpectralField) -> f64 {
        -0.5 * self.quartic_form(y, y, y, y).re
    }

    /// Imaginary part of the unsymmetrised accumulator behind [`Self::correction`].
    pub fn correction_residue(&self, y: &SpectralField) -> f64 {
        self.quartic_form(y, y, y, y).im
    }

    pub fn energy(&self, y: &SpectralField) -> EnergyReport {
        let h_s_sq = sobolev_norm_sq(&y.project(self.cutoff), self.s);
        let correction = self.correction(y);
        EnergyReport {
            h_s_sq,
            correction,
            total: h_s_sq + correction,
            terms: None,
        }
    }

    /// The four terms of `d/dt E_s` for the lab-frame state `v` of a flow with sign `sigma`.
    pub fn derivative_terms_lab(&self, v: &SpectralField, sigma: f64) -> DerivativeTerms {
        let (a, b) = split_rate(v, self.cutoff, sigma);
        let m = self.cutoff as i64;
        let partial: Vec<[f64; 4]> = (-m..=m)
            .into_par_iter()
            .map(|n| {
                let mut acc = [Complex64::new(0.0, 0.0); 4];
                self.for_slice(n, |n1, n2, n3, k| {
                    let tail = k * v.get(n3);
                    let v1 = v.get(n1);
                    let v2c = v.get(n2).conj();
                    acc[0] += tail * a.get(n1) * v2c;
                    acc[1] += tail * b.get(n1) * v2c;
                    acc[2] += tail * v1 * a.get(n2).conj();
                    acc[3] += tail * v1 * b.get(n2).conj();
                });
                let dn = v.get(n).conj();
                acc.map(|z| -(z * dn).re)
            })
            .collect();
        let mut t = [0.0; 4];
        for row in partial {
            for (x, y) in t.iter_mut().zip(row) {
                *x += y;
            }
        }
        DerivativeTerms {
            n1: t[0],
            r1: t[1],
            n2: t[2],
            r2: t[3],
        }
    }

    /// `−½ Re` of the four unsymmetrised product-rule terms, plus the imaginary part of
    /// their sum. Used as a cross-check of [`Self::derivative_terms_lab`].
    pub fn derivative_unsymmetrised(&self, v: &SpectralField, sigma: f64) -> (f64, f64) {
        let (a, b) = split_rate(v, self.cutoff, sigma);
        let mut rate = a;
        for (x, y) in rate.coeffs_mut().iter_mut().zip(b.coeffs()) {
            *x += y;
        }
        let total = self.quartic_form(&rate, v, v, v)
            + self.quartic_form(v, &rate, v, v)
            + self.quartic_form(v, v, &rate, v)
            + self.quartic_form(v, v, v, &rate);
        (-0.5 * total.re, total.im)
    }
}

/// Interaction-frame rate split at `t = 0`: `A = −iσ Σ_{Γ_N(n)} v v̄ v` and
/// `B = iσ|v_n|²v_n`, both for `|n| ≤ N`.
fn split_rate(v: &SpectralField, cutoff: usize, sigma: f64) -> (SpectralField, SpectralField) {
    let pv = v.project(cutoff);
    // The gauged cubic term equals Σ_Γ − |v_n|² v_n on |n| ≤ N.
    let c = cubic_term(&pv, cutoff).expect("projected field has the cutoff");
    let mut a = SpectralField::zeros(v.cutoff());
    let mut b = SpectralField::zeros(v.cutoff());
    let m = cutoff as i64;
    for n in -m..=m {
        let vn = pv.get(n);
        let gamma_sum = c.get(n) + vn.norm_sqr() * vn;
        a.set(n, Complex64::new(0.0, -sigma) * gamma_sum);
        b.set(n, Complex64::new(0.0, sigma * vn.norm_sqr()) * vn);
    }
    (a, b)
}

/// `E_s = ‖P_N y‖²_{H^s} + R_{s,N}(y)` with optional derivative terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub h_s_sq: f64,
    pub correction: f64,
    pub total: f64,
    pub terms: Option<DerivativeTerms>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DerivativeTerms {
    pub n1: f64,
    pub r1: f64,
    pub n2: f64,
    pub r2: f64,
}

impl DerivativeTerms {
    pub fn sum(&self) -> f64 {
        self.n1 + self.r1 + self.n2 + self.r2
    }
}

fn check_field(f: &SpectralField, cutoff: usize) -> Result<()> {
    if f.cutoff() < cutoff {
        return Err(LabError::invalid(format!(
            "field cutoff {} is below N = {cutoff}",
            f.cutoff()
        )));
    }
    Ok(())
}

pub fn correction_r(f: &SpectralField, s: f64, alpha: f64, cutoff: usize) -> Result<f64> {
    let kernel = NormalFormKernel::new(s, alpha, cutoff)?;
    check_field(f, cutoff)?;
    Ok(kernel.correction(f))
}

pub fn energy_e(f: &SpectralField, s: f64, alpha: f64, cutoff: usize) -> Result<EnergyReport> {
    let kernel = NormalFormKernel::new(s, alpha, cutoff)?;
    check_field(f, cutoff)?;
    Ok(kernel.energy(f))
}

/// `(N₁, R₁, N₂, R₂)` for the interaction-frame state `w` at time `t`.
pub fn derivative_terms(w: &SpectralField, t: f64, p: &SimParams) -> Result<DerivativeTerms> {
    let kernel = NormalFormKernel::new(p.s, p.alpha, p.cutoff)?;
    check_field(w, p.cutoff)?;
    let v = linear_propagator(w, t, p.alpha);
    Ok(kernel.derivative_terms_lab(&v, p.sign.value()))
}

/// Centred five-point difference of `E_s` along the vector field at the lab-frame state
/// `v`, i.e. `d/dh E_s(v + h F(v))` at `h = 0` with `F` = [`rhs_gauged`].
///
/// `h ↦ E_s(v + hF)` is a quartic polynomial, on which the stencil is exact, so the
/// result differs from the derivative terms by rounding only. The step is
/// `0.1 ‖v‖_∞ / ‖F‖_∞`.
pub fn tangent_derivative(kernel: &NormalFormKernel, v: &SpectralField, p: &SimParams) -> Result<f64> {
    check_field(v, kernel.cutoff)?;
    let v = v.project(kernel.cutoff);
    let f = rhs_gauged(&v, p)?.project(kernel.cutoff);
    if f.is_zero() {
        return Ok(0.0);
    }
    let h = 0.1 * v.max_abs() / f.max_abs();
    let at = |t: f64| {
        let mut y = v.clone();
        for (a, b) in y.coeffs_mut().iter_mut().zip(f.coeffs()) {
            *a += t * b;
        }
        kernel.energy(&y).total
    };
    Ok((-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h))
}

/// Parameter regions in which the strong energy estimate is proved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateRegion {
    /// `s > 1`, `α > 1/2`.
    HighRegularity,
    /// `max(2/3, 25/12 − α) < s ≤ 1`, `α ≥ 5/4`.
    StrongDispersion,
    /// `(3 − α)/2 < s ≤ 1`, `1 < α < 5/4`.
    IntermediateDispersion,
}

pub fn estimate_region(alpha: f64, s: f64) -> Option<EstimateRegion> {
    if s > 1.0 && alpha > 0.5 {
        Some(EstimateRegion::HighRegularity)
    } else if alpha >= 1.25 && s <= 1.0 && s > (2.0f64 / 3.0).max(25.0 / 12.0 - alpha) {
        Some(EstimateRegion::StrongDispersion)
    } else if alpha > 1.0 && alpha < 1.25 && s <= 1.0 && s > (3.0 - alpha) / 2.0 {
        Some(EstimateRegion::IntermediateDispersion)
    } else {
        None
    }
}

fn warn_outside_region(p: &SimParams) {
    if estimate_region(p.alpha, p.s).is_none() {
        log::warn!(
            "(alpha, s) = ({}, {}) lies outside the proven energy-estimate regions",
            p.alpha,
            p.s
        );
    }
}

/// `|d/dt E_s| / ‖f‖⁶_{H^{s−1/2−ε}}` at the lab-frame state `f`; zero for `f = 0`.
pub fn energy_ratio_strong(f: &SpectralField, p: &SimParams) -> Result<f64> {
    let kernel = NormalFormKernel::new(p.s, p.alpha, p.cutoff)?;
    check_field(f, p.cutoff)?;
    warn_outside_region(p);
    Ok(ratio_strong_with(&kernel, f, p))
}

pub(crate) fn ratio_strong_with(kernel: &NormalFormKernel, f: &SpectralField, p: &SimParams) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let num = kernel.derivative_terms_lab(f, p.sign.value()).sum().abs();
    num / sobolev_norm(f, p.sigma()).powi(6)
}

/// `|d/dt E_s| / (‖f‖²_{FL^{s−ε̃,∞}} ‖f‖⁴_{H^{s−1/2−ε}})` at `t = 0`; zero for `f = 0`.
pub fn energy_ratio_weak(f: &SpectralField, p: &SimParams, eps_tilde: f64) -> Result<f64> {
    if !(eps_tilde > 0.0 && eps_tilde < p.eps) {
        return Err(LabError::invalid(format!(
            "need 0 < eps_tilde < eps, got eps_tilde = {eps_tilde}, eps = {}",
            p.eps
        )));
    }
    let kernel = NormalFormKernel::new(p.s, p.alpha, p.cutoff)?;
    check_field(f, p.cutoff)?;
    Ok(ratio_weak_with(&kernel, f, p, eps_tilde))
}

pub(crate) fn ratio_weak_with(
    kernel: &NormalFormKernel,
    f: &SpectralField,
    p: &SimParams,
    eps_tilde: f64,
) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let num = kernel.derivative_terms_lab(f, p.sign.value()).sum().abs();
    let fl = fourier_lebesgue_norm(f, p.s - eps_tilde, f64::INFINITY).expect("q = inf is valid");
    num / (fl * fl * sobolev_norm(f, p.sigma()).powi(4))
}

/// Both energy-estimate ratios from one evaluation of the derivative terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPair {
    pub strong: f64,
    pub weak: f64,
    pub terms: DerivativeTerms,
}

pub fn energy_ratios(
    kernel: &NormalFormKernel,
    f: &SpectralField,
    p: &SimParams,
    eps_tilde: f64,
) -> RatioPair {
    if f.is_zero() {
        return RatioPair {
            strong: 0.0,
            weak: 0.0,
            terms: DerivativeTerms::default(),
        };
    }
    let terms = kernel.derivative_terms_lab(f, p.sign.value());
    let num = terms.sum().abs();
    let hs = sobolev_norm(f, p.sigma());
    let fl = fourier_lebesgue_norm(f, p.s - eps_tilde, f64::INFINITY).expect("q = inf is valid");
    RatioPair {
        strong: num / hs.powi(6),
        weak: num / (fl * fl * hs.powi(4)),
        terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn all_ones() -> SpectralField {
        SpectralField::from_modes(1, &[(-1, c(1.0, 0.0)), (0, c(1.0, 0.0)), (1, c(1.0, 0.0))])
            .unwrap()
    }

    #[test]
    fn all_ones_correction_and_energy() {
        assert_eq!(correction_r(&all_ones(), 1.0, 1.0, 1).unwrap(), -2.0);
        let e = energy_e(&all_ones(), 1.0, 1.0, 1).unwrap();
        assert_eq!((e.h_s_sq, e.correction, e.total), (5.0, -2.0, 3.0));
    }

    #[test]
    fn single_mode_and_zero() {
        let f = SpectralField::single_mode(4, 2, c(0.7, -0.1)).unwrap();
        assert_eq!(correction_r(&f, 1.3, 2.0, 4).unwrap(), 0.0);
        let e = energy_e(&SpectralField::zeros(3), 0.8, 2.0, 3).unwrap();
        assert_eq!((e.h_s_sq, e.correction, e.total), (0.0, 0.0, 0.0));
        let p = SimParams::new(2.0, 0.8, 4);
        let t = derivative_terms(&f, 0.3, &p).unwrap();
        assert_eq!(t, DerivativeTerms::default());
        assert_eq!(energy_ratio_strong(&f, &p).unwrap(), 0.0);
        assert_eq!(energy_ratio_strong(&SpectralField::zeros(4), &p).unwrap(), 0.0);
        assert_eq!(energy_ratio_weak(&SpectralField::zeros(4), &p, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn regime_errors() {
        assert!(matches!(
            correction_r(&all_ones(), 1.0, 0.5, 1),
            Err(LabError::UnsupportedRegime(_))
        ));
        let p = SimParams::new(2.0, 0.8, 4).with_eps(0.05);
        assert!(energy_ratio_weak(&SpectralField::zeros(4), &p, 0.05).is_err());
        assert!(energy_ratio_weak(&SpectralField::zeros(4), &p, 0.0).is_err());
        assert!(correction_r(&all_ones(), 1.0, 1.0, 2).is_err());
    }

    #[test]
    fn regions() {
        assert_eq!(estimate_region(2.0, 0.8), Some(EstimateRegion::StrongDispersion));
        assert_eq!(estimate_region(1.0, 1.1), Some(EstimateRegion::HighRegularity));
        assert_eq!(estimate_region(1.1, 0.98), Some(EstimateRegion::IntermediateDispersion));
        assert_eq!(estimate_region(1.0, 0.9), None);
    }

    #[test]
    fn kernel_identity_at_s1_alpha1() {
        let k = NormalFormKernel::new(1.0, 1.0, 6).unwrap();
        for n in -6i64..=6 {
            k.for_slice(n, |_, _, _, v| assert_eq!(v, 1.0));
        }
    }
}
