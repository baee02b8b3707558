//! Phase function, the `ψ_s` weight, the non-resonant hyperplane
//!
//! ```text
//! Γ(n) = {(n₁, n₂, n₃) : n₁ − n₂ + n₃ = n,  n₁ ≠ n,  n₃ ≠ n}
//! ```
//!
//! and exhaustive lattice verifiers for the arithmetic lemmas the normal-form
//! analysis rests on.

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::spectral::bracket_pow2;

/// Integer quadruple `(n₁, n₂, n₃, n)` with `n₁ − n₂ + n₃ = n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FrequencyQuad {
    pub n1: i64,
    pub n2: i64,
    pub n3: i64,
    pub n: i64,
}

impl FrequencyQuad {
    pub fn new(n1: i64, n2: i64, n3: i64, n: i64) -> Result<Self> {
        if n1 - n2 + n3 != n {
            return Err(LabError::invalid(format!(
                "({n1},{n2},{n3},{n}) violates n1 - n2 + n3 = n"
            )));
        }
        Ok(Self { n1, n2, n3, n })
    }

    /// The quad determined by `(n₁, n₃, n)`.
    #[inline]
    pub fn from_outer(n1: i64, n3: i64, n: i64) -> Self {
        Self {
            n1,
            n2: n1 + n3 - n,
            n3,
            n,
        }
    }

    /// Membership in `Γ(n̄)`: `n₁ ≠ n` and `n₃ ≠ n`.
    #[inline]
    pub fn is_nonresonant(&self) -> bool {
        self.n1 != self.n && self.n3 != self.n
    }

    #[inline]
    pub fn max_abs(&self) -> i64 {
        self.n1
            .abs()
            .max(self.n2.abs())
            .max(self.n3.abs())
            .max(self.n.abs())
    }

    pub fn negated(&self) -> Self {
        Self {
            n1: -self.n1,
            n2: -self.n2,
            n3: -self.n3,
            n: -self.n,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            n1: self.n3,
            n2: self.n2,
            n3: self.n1,
            n: self.n,
        }
    }

    /// `|n − n₁| |n − n₃|`, the factor both lattice bounds are measured against.
    #[inline]
    pub fn gap_product(&self) -> f64 {
        ((self.n - self.n1).abs() as f64) * ((self.n - self.n3).abs() as f64)
    }
}

/// `|n|^{p}` with `0^p = 0`, exact for integer `p`.
#[inline]
pub fn abs_pow(n: i64, p: f64) -> f64 {
    if n == 0 {
        return if p == 0.0 { 1.0 } else { 0.0 };
    }
    let x = n.unsigned_abs() as f64;
    if p.fract() == 0.0 && p.abs() <= 64.0 {
        x.powi(p as i32)
    } else {
        (p * x.ln()).exp()
    }
}

/// Dispersion `|n|^{2α}`.
#[inline]
pub fn dispersion(n: i64, alpha: f64) -> f64 {
    abs_pow(n, 2.0 * alpha)
}

/// `φ(n̄) = |n₁|^{2α} − |n₂|^{2α} + |n₃|^{2α} − |n|^{2α}`.
#[inline]
pub fn phase(q: &FrequencyQuad, alpha: f64) -> f64 {
    dispersion(q.n1, alpha) - dispersion(q.n2, alpha) + dispersion(q.n3, alpha)
        - dispersion(q.n, alpha)
}

/// `ψ_s(n̄) = ⟨n₁⟩^{2s} − ⟨n₂⟩^{2s} + ⟨n₃⟩^{2s} − ⟨n⟩^{2s}`.
#[inline]
pub fn psi(q: &FrequencyQuad, s: f64) -> f64 {
    bracket_pow2(q.n1, s) - bracket_pow2(q.n2, s) + bracket_pow2(q.n3, s) - bracket_pow2(q.n, s)
}

/// Normal-form kernel `ψ_s / φ` on `Γ(n̄)`.
pub fn multiplier(q: &FrequencyQuad, s: f64, alpha: f64) -> Result<f64> {
    let ph = phase(q, alpha);
    if !q.is_nonresonant() || ph == 0.0 {
        return Err(LabError::ResonantQuad(*q));
    }
    Ok(psi(q, s) / ph)
}

/// Visits `Γ_N(n)` in `(n₁ ascending, n₃ ascending)` order as `(n₁, n₂, n₃)`.
pub fn for_each_hyperplane<F>(n: i64, cutoff: usize, mut visit: F) -> Result<()>
where
    F: FnMut(i64, i64, i64),
{
    let m = cutoff as i64;
    if n.abs() > m {
        return Err(LabError::invalid(format!("|n| = {} exceeds cutoff {m}", n.abs())));
    }
    for n1 in -m..=m {
        if n1 == n {
            continue;
        }
        // |n1 + n3 - n| <= m
        let lo = (-m).max(n - n1 - m);
        let hi = m.min(n - n1 + m);
        for n3 in lo..=hi {
            if n3 != n {
                visit(n1, n1 + n3 - n, n3);
            }
        }
    }
    Ok(())
}

/// Materialised `Γ_N(n)`.
pub fn enumerate_hyperplane(n: i64, cutoff: usize) -> Result<Vec<(i64, i64, i64)>> {
    let mut out = Vec::new();
    for_each_hyperplane(n, cutoff, |a, b, c| out.push((a, b, c)))?;
    Ok(out)
}

/// Whether a scan reports a lower or an upper constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
}

/// Certificate from an exhaustive lattice scan.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// `α` for the phase scan, `s` for the double-mean-value scan.
    pub parameter: f64,
    pub scan_radius: usize,
    pub extremal_ratio: f64,
    pub witness: FrequencyQuad,
    pub quads_scanned: u64,
}

impl BoundReport {
    pub fn min_ratio(&self) -> f64 {
        self.extremal_ratio
    }

    pub fn max_ratio(&self) -> f64 {
        self.extremal_ratio
    }
}

#[derive(Clone, Copy)]
struct Extremum {
    ratio: f64,
    witness: FrequencyQuad,
    count: u64,
}

/// Scans every non-resonant quad with all entries in `[−R, R]`, sliced by `n₁` and
/// reduced in slice order so ties resolve to the first quad in scan order.
fn scan_gamma<F>(radius: usize, kind: BoundKind, ratio: F) -> Option<Extremum>
where
    F: Fn(&FrequencyQuad) -> f64 + Sync,
{
    let m = radius as i64;
    let better = |a: f64, b: f64| match kind {
        BoundKind::Lower => a < b,
        BoundKind::Upper => a > b,
    };
    let slices: Vec<Option<Extremum>> = (-m..=m)
        .into_par_iter()
        .map(|n1| {
            let mut best: Option<Extremum> = None;
            let mut count = 0u64;
            for n3 in -m..=m {
                for n in -m..=m {
                    if n1 == n || n3 == n {
                        continue;
                    }
                    let q = FrequencyQuad::from_outer(n1, n3, n);
                    if q.n2.abs() > m {
                        continue;
                    }
                    count += 1;
                    let r = ratio(&q);
                    match best {
                        Some(b) if !better(r, b.ratio) => {}
                        _ => {
                            best = Some(Extremum {
                                ratio: r,
                                witness: q,
                                count: 0,
                            })
                        }
                    }
                }
            }
            best.map(|b| Extremum { count, ..b })
        })
        .collect();
    let mut total = 0u64;
    let mut best: Option<Extremum> = None;
    for e in slices.into_iter().flatten() {
        total += e.count;
        match best {
            Some(b) if !better(e.ratio, b.ratio) => {}
            _ => best = Some(e),
        }
    }
    best.map(|b| Extremum { count: total, ..b })
}

/// Empirical constant in `|φ(n̄)| ≳ |n − n₁||n − n₃| n_max^{2α−2}` over `Γ` with entries
/// bounded by `radius`. `n_max` is the plain maximum of absolute values.
pub fn verify_phase_lower_bound(alpha: f64, radius: usize) -> Result<BoundReport> {
    if !(alpha > 0.5) {
        return Err(LabError::regime(format!(
            "phase lower bound needs alpha > 1/2, got {alpha}"
        )));
    }
    if radius < 1 {
        return Err(LabError::invalid("scan radius must be >= 1"));
    }
    let ext = scan_gamma(radius, BoundKind::Lower, |q| {
        let nmax = q.max_abs().max(1);
        phase(q, alpha).abs() / (q.gap_product() * abs_pow(nmax, 2.0 * alpha - 2.0))
    })
    .expect("radius >= 1 gives a nonempty scan");
    Ok(BoundReport {
        kind: BoundKind::Lower,
        parameter: alpha,
        scan_radius: radius,
        extremal_ratio: ext.ratio,
        witness: ext.witness,
        quads_scanned: ext.count,
    })
}

/// Empirical constant in `|ψ_s(n̄)| ≲ |n − n₁||n − n₃| ⟨n_max⟩^{2s−2}`. Quads with
/// `n₁ = n` or `n₃ = n`, where both sides vanish, are skipped.
pub fn verify_dmvt_bound(s: f64, radius: usize) -> Result<BoundReport> {
    if !(s > 1.0) {
        return Err(LabError::regime(format!(
            "double mean value bound needs s > 1, got {s}"
        )));
    }
    if radius < 1 {
        return Err(LabError::invalid("scan radius must be >= 1"));
    }
    let ext = scan_gamma(radius, BoundKind::Upper, |q| {
        psi(q, s).abs() / (q.gap_product() * bracket_pow2(q.max_abs(), s - 1.0))
    })
    .expect("radius >= 1 gives a nonempty scan");
    Ok(BoundReport {
        kind: BoundKind::Upper,
        parameter: s,
        scan_radius: radius,
        extremal_ratio: ext.ratio,
        witness: ext.witness,
        quads_scanned: ext.count,
    })
}

/// Number of positive divisors, by trial division up to `√m`.
pub fn divisor_count(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(LabError::invalid("divisor count of 0"));
    }
    let mut count = 0;
    let mut d = 1u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            count += if d * d == m { 1 } else { 2 };
        }
        d += 1;
    }
    Ok(count)
}

/// All ordered integer pairs `(a, b)` with `ab = ρ`, negative factors included.
/// Ordered by positive `a` ascending, then negative `a` descending.
pub fn factor_pairs(rho: i64) -> Result<Vec<(i64, i64)>> {
    if rho == 0 {
        return Err(LabError::invalid("factor pairs of 0"));
    }
    let m = rho.unsigned_abs();
    let mut pos: Vec<i64> = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            pos.push(d as i64);
            if d * d != m {
                pos.push((m / d) as i64);
            }
        }
        d += 1;
    }
    pos.sort_unstable();
    let mut out: Vec<(i64, i64)> = pos.iter().map(|&a| (a, rho / a)).collect();
    out.extend(pos.iter().map(|&a| (-a, rho / -a)));
    Ok(out)
}

/// `max_{m ≤ limit} d(m)/m^δ` and its witness.
pub fn divisor_bound_constant(delta: f64, limit: u64) -> Result<(f64, u64)> {
    if !(delta > 0.0) || limit == 0 {
        return Err(LabError::invalid("divisor scan needs delta > 0 and limit >= 1"));
    }
    // Sieve of divisor counts: O(limit log limit).
    let mut d = vec![0u32; limit as usize + 1];
    for a in 1..=limit as usize {
        let mut k = a;
        while k <= limit as usize {
            d[k] += 1;
            k += a;
        }
    }
    let mut best = (0.0, 1);
    for (m, &count) in d.iter().enumerate().skip(1) {
        let r = count as f64 / (m as f64).powf(delta);
        if r > best.0 {
            best = (r, m as u64);
        }
    }
    Ok(best)
}

/// `φ_β(k) = Σ_{1≤|n|≤|k|} |n|^{−β}`.
pub fn varphi_beta(k: i64, beta: f64) -> f64 {
    let k = k.unsigned_abs();
    2.0 * (1..=k).map(|n| (n as f64).powf(-beta)).sum::<f64>()
}

/// Asymptotic profile of `φ_β`: `1`, `log(1 + ⟨k⟩)` or `⟨k⟩^{1−β}`.
pub fn varphi_profile(k: i64, beta: f64) -> f64 {
    let jb = crate::spectral::bracket(k);
    if beta > 1.0 {
        1.0
    } else if beta == 1.0 {
        (1.0 + jb).ln()
    } else {
        jb.powf(1.0 - beta)
    }
}

/// Range of `φ_β(k) / profile(k)` over `1 ≤ k ≤ k_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRange {
    pub min: f64,
    pub max: f64,
    pub argmin: i64,
    pub argmax: i64,
}

pub fn verify_varphi_regime(beta: f64, k_max: i64) -> Result<RatioRange> {
    if !(beta >= 0.0) || k_max < 1 {
        return Err(LabError::invalid("varphi scan needs beta >= 0 and k_max >= 1"));
    }
    let mut partial = 0.0;
    let mut out = RatioRange {
        min: f64::INFINITY,
        max: 0.0,
        argmin: 1,
        argmax: 1,
    };
    for k in 1..=k_max {
        partial += 2.0 * (k as f64).powf(-beta);
        let r = partial / varphi_profile(k, beta);
        if r < out.min {
            out.min = r;
            out.argmin = k;
        }
        if r > out.max {
            out.max = r;
            out.argmax = k;
        }
    }
    Ok(out)
}

/// Range over `1 ≤ |k| ≤ k_max` of
/// `Σ_{|n|≤L} ⟨n−k⟩^{−β}⟨n⟩^{−γ}  /  (φ_β(k) ⟨k⟩^{−γ})`, the summing estimate
/// with `k₁ = k`, `k₂ = 0`. The lattice sum is truncated at `L = window`.
pub fn verify_sum_estimate(beta: f64, gamma: f64, k_max: i64, window: i64) -> Result<RatioRange> {
    if !(beta >= gamma && gamma >= 0.0 && beta + gamma > 1.0) {
        return Err(LabError::regime(format!(
            "summing estimate needs beta >= gamma >= 0 and beta + gamma > 1, got ({beta}, {gamma})"
        )));
    }
    if k_max < 1 || window < k_max {
        return Err(LabError::invalid("sum estimate needs 1 <= k_max <= window"));
    }
    let jb = crate::spectral::bracket;
    let rows: Vec<(i64, f64)> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let lhs: f64 = (-window..=window)
                .map(|n| jb(n - k).powf(-beta) * jb(n).powf(-gamma))
                .sum();
            (k, lhs / (varphi_beta(k, beta) * jb(k).powf(-gamma)))
        })
        .collect();
    let mut out = RatioRange {
        min: f64::INFINITY,
        max: 0.0,
        argmin: 1,
        argmax: 1,
    };
    for (k, r) in rows {
        if r < out.min {
            out.min = r;
            out.argmin = k;
        }
        if r > out.max {
            out.max = r;
            out.argmax = k;
        }
    }
    Ok(out)
}
