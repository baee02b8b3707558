//! Fields on the torus stored as Fourier coefficients, their norms, and the
//! dealiased gauged cubic nonlinearity.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{LabError, Result};

/// Japanese bracket `⟨n⟩ = (1 + n²)^{1/2}`.
#[inline]
pub fn bracket(n: i64) -> f64 {
    let n = n as f64;
    (1.0 + n * n).sqrt()
}

/// `⟨n⟩^{2σ} = (1 + n²)^σ`, exact for integer σ.
#[inline]
pub fn bracket_pow2(n: i64, sigma: f64) -> f64 {
    let base = 1.0 + (n as f64) * (n as f64);
    if sigma.fract() == 0.0 && sigma.abs() <= 64.0 {
        base.powi(sigma as i32)
    } else {
        base.powf(sigma)
    }
}

/// Regularity exponent of a Sobolev or Fourier–Lebesgue weight `⟨n⟩^σ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevIndex(pub f64);

impl SobolevIndex {
    #[inline]
    pub fn weight(self, n: i64) -> f64 {
        bracket_pow2(n, self.0 / 2.0)
    }
}

impl From<f64> for SobolevIndex {
    fn from(sigma: f64) -> Self {
        SobolevIndex(sigma)
    }
}

/// Complex Fourier coefficients `û(n)` for `|n| ≤ cutoff`, stored contiguously in
/// mode order `−N, …, N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(cutoff: usize) -> Self {
        Self {
            cutoff,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1],
        }
    }

    /// Wraps a coefficient vector of length `2N + 1`.
    pub fn from_coeffs(cutoff: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * cutoff + 1 {
            return Err(LabError::invalid(format!(
                "expected {} coefficients for cutoff {cutoff}, got {}",
                2 * cutoff + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(LabError::invalid("non-finite coefficient"));
        }
        Ok(Self { cutoff, coeffs })
    }

    /// Builds a field from sparse `(mode, coefficient)` pairs.
    pub fn from_modes(cutoff: usize, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut f = Self::zeros(cutoff);
        for &(n, c) in modes {
            if n.unsigned_abs() as usize > cutoff {
                return Err(LabError::invalid(format!(
                    "mode {n} outside cutoff {cutoff}"
                )));
            }
            f.set(n, c);
        }
        Ok(f)
    }

    pub fn single_mode(cutoff: usize, n: i64, c: Complex64) -> Result<Self> {
        Self::from_modes(cutoff, &[(n, c)])
    }

    #[inline]
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of mode `n`; zero outside the stored range.
    #[inline]
    pub fn get(&self, n: i64) -> Complex64 {
        let k = n + self.cutoff as i64;
        if k < 0 || k as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Panics if `n` is outside the stored range.
    #[inline]
    pub fn set(&mut self, n: i64, c: Complex64) {
        let k = (n + self.cutoff as i64) as usize;
        self.coeffs[k] = c;
    }

    /// `(n, û_n)` in ascending mode order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let off = self.cutoff as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, &c)| (k as i64 - off, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `P_{≤N}`: zeroes every mode with `|n| > n_max`, keeping the storage cutoff.
    pub fn project(&self, n_max: usize) -> Self {
        let mut out = self.clone();
        let off = self.cutoff as i64;
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            if (k as i64 - off).unsigned_abs() as usize > n_max {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Re-stores the field with a new cutoff, dropping or zero-padding modes.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut out = Self::zeros(cutoff);
        let m = cutoff.min(self.cutoff) as i64;
        for n in -m..=m {
            out.set(n, self.get(n));
        }
        out
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        Self {
            cutoff: self.cutoff,
            coeffs: self.coeffs.iter().map(|c| c * lambda).collect(),
        }
    }

    /// Normalised mass `⨍|f|² = Σ |f̂_n|²`.
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max_n |a_n − b_n|` over the union of both ranges.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let m = self.cutoff.max(other.cutoff) as i64;
        (-m..=m)
            .map(|n| (self.get(n) - other.get(n)).norm())
            .fold(0.0, f64::max)
    }
}

/// `(Σ ⟨n⟩^{2σ} |f̂_n|²)^{1/2}`.
pub fn sobolev_norm(f: &SpectralField, sigma: impl Into<SobolevIndex>) -> f64 {
    sobolev_norm_sq(f, sigma).sqrt()
}

pub fn sobolev_norm_sq(f: &SpectralField, sigma: impl Into<SobolevIndex>) -> f64 {
    let sigma = sigma.into();
    f.modes()
        .map(|(n, c)| bracket_pow2(n, sigma.0) * c.norm_sqr())
        .sum()
}

/// `‖⟨n⟩^σ f̂_n‖_{ℓ^q}`; pass `f64::INFINITY` for the weighted supremum.
pub fn fourier_lebesgue_norm(
    f: &SpectralField,
    sigma: impl Into<SobolevIndex>,
    q: f64,
) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(LabError::invalid(format!(
            "Fourier-Lebesgue exponent must be >= 1, got {q}"
        )));
    }
    let sigma = sigma.into();
    let weighted = f.modes().map(|(n, c)| sigma.weight(n) * c.norm());
    if q.is_infinite() {
        return Ok(weighted.fold(0.0, f64::max));
    }
    if q == 2.0 {
        return Ok(sobolev_norm(f, sigma));
    }
    Ok(weighted.map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q))
}

/// Physical Lebesgue exponent supported by [`physical_lp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lebesgue {
    L2,
    L4,
}

/// `(⨍ |f|^p dx)^{1/p}` under the normalised measure.
pub fn physical_lp(f: &SpectralField, p: Lebesgue) -> f64 {
    match p {
        Lebesgue::L2 => f.mass().sqrt(),
        Lebesgue::L4 => quartic_mean(f).powf(0.25),
    }
}

/// `⨍ |f|⁴ dx`, exact for trigonometric polynomials of degree `N` on a grid of at least
/// `2(2N+1)` points.
pub fn quartic_mean(f: &SpectralField) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let len = padded_len(f.cutoff);
    let grid = to_grid(f, f.cutoff, len);
    grid.iter().map(|u| u.norm_sqr() * u.norm_sqr()).sum::<f64>() / len as f64
}

/// Smallest power of two holding `2(2N+1)` points.
pub fn padded_len(cutoff: usize) -> usize {
    (2 * (2 * cutoff + 1)).next_power_of_two().max(4)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Physical samples `u(2πj/L) = Σ_{|n|≤N} û_n e^{inx_j}`.
fn to_grid(f: &SpectralField, n_max: usize, len: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let m = n_max.min(f.cutoff) as i64;
    for n in -m..=m {
        buf[n.rem_euclid(len as i64) as usize] = f.get(n);
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len).process(&mut buf));
    buf
}

/// Fourier coefficients of grid values, normalised by `1/L`.
fn from_grid(mut buf: Vec<Complex64>) -> Vec<Complex64> {
    let len = buf.len();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len).process(&mut buf));
    let inv = 1.0 / len as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// Below this cutoff the cubic term is summed directly instead of through the FFT.
const DIRECT_CUBIC_MAX: usize = 3;

/// `P_{≤N}[(|P_{≤N}f|² − 2⨍|P_{≤N}f|²) P_{≤N}f]`, returned with `f`'s storage cutoff.
pub fn cubic_term(f: &SpectralField, n_max: usize) -> Result<SpectralField> {
    if n_max > f.cutoff {
        return Err(LabError::invalid(format!(
            "projection cutoff {n_max} exceeds field cutoff {}",
            f.cutoff
        )));
    }
    if n_max <= DIRECT_CUBIC_MAX {
        Ok(cubic_term_direct(f, n_max))
    } else {
        Ok(cubic_term_fft(f, n_max))
    }
}

pub(crate) fn cubic_term_fft(f: &SpectralField, n_max: usize) -> SpectralField {
    let mut out = SpectralField::zeros(f.cutoff);
    let mass = f.project(n_max).mass();
    if mass == 0.0 {
        return out;
    }
    let len = padded_len(n_max);
    let mut grid = to_grid(f, n_max, len);
    for u in grid.iter_mut() {
        *u *= u.norm_sqr();
    }
    let spec = from_grid(grid);
    let m = n_max as i64;
    for n in -m..=m {
        let conv = spec[n.rem_euclid(len as i64) as usize];
        out.set(n, conv - 2.0 * mass * f.get(n));
    }
    out
}

pub(crate) fn cubic_term_direct(f: &SpectralField, n_max: usize) -> SpectralField {
    let mut out = SpectralField::zeros(f.cutoff);
    let m = n_max as i64;
    let mass = f.project(n_max).mass();
    for n in -m..=m {
        let mut acc = Complex64::new(0.0, 0.0);
        for n1 in -m..=m {
            let a = f.get(n1);
            for n3 in -m..=m {
                let n2 = n1 + n3 - n;
                if n2.abs() <= m {
                    acc += a * f.get(n2).conj() * f.get(n3);
                }
            }
        }
        out.set(n, acc - 2.0 * mass * f.get(n));
    }
    out
}

/// `‖f‖⁴_{L⁴} / (A^{1/α} ‖f‖_{L²}^{4−1/α})` with `A = (Σ ⟨n⟩^{2α} |f̂_n|²)^{1/2}`.
pub fn gn_ratio(f: &SpectralField, alpha: f64) -> Result<f64> {
    if alpha < 0.25 {
        return Err(LabError::invalid(format!(
            "Gagliardo-Nirenberg ratio needs alpha >= 1/4, got {alpha}"
        )));
    }
    if f.is_zero() {
        return Err(LabError::UndefinedRatio);
    }
    let l4 = quartic_mean(f);
    let a = sobolev_norm(f, alpha);
    let l2 = f.mass().sqrt();
    Ok(l4 / (a.powf(1.0 / alpha) * l2.powf(4.0 - 1.0 / alpha)))
}
