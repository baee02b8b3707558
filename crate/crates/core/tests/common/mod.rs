//! Test-only oracles, kept independent of the library's optimised paths.
#![allow(dead_code)]

use fnls_core::phase::{phase, psi, FrequencyQuad};
use fnls_core::{Complex64, SpectralField};

/// Deterministic pseudo-random field with `|û_n| ~ amp ⟨n⟩^{-decay}`.
pub fn random_field(cutoff: usize, seed: u64, amp: f64, decay: f64) -> SpectralField {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
    };
    let mut f = SpectralField::zeros(cutoff);
    let m = cutoff as i64;
    for n in -m..=m {
        let scale = amp * (1.0 + (n * n) as f64).powf(-decay / 2.0);
        f.set(n, Complex64::new(next(), next()) * scale);
    }
    f
}

/// Brute-force gauged cubic term: `Σ_{n₁−n₂+n₃=n} f₁ f̄₂ f₃ − 2(Σ|f|²) f_n` on `|n| ≤ N`.
pub fn brute_cubic(f: &SpectralField, cutoff: usize) -> Vec<Complex64> {
    let m = cutoff as i64;
    let mass: f64 = (-m..=m).map(|n| f.get(n).norm_sqr()).sum();
    (-m..=m)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for n1 in -m..=m {
                for n2 in -m..=m {
                    for n3 in -m..=m {
                        if n1 - n2 + n3 == n {
                            acc += f.get(n1) * f.get(n2).conj() * f.get(n3);
                        }
                    }
                }
            }
            acc - 2.0 * mass * f.get(n)
        })
        .collect()
}

/// Brute-force `−½ Re Σ_{Γ_N(n̄)} ψ_s/φ y₁ȳ₂y₃ȳ` over a full quadruple loop. Returns the
/// complex accumulator so callers can also inspect its imaginary part.
pub fn brute_correction(y: &SpectralField, s: f64, alpha: f64, cutoff: usize) -> Complex64 {
    let m = cutoff as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for n1 in -m..=m {
        for n2 in -m..=m {
            for n3 in -m..=m {
                for n in -m..=m {
                    if n1 - n2 + n3 != n || n1 == n || n3 == n {
                        continue;
                    }
                    let q = FrequencyQuad { n1, n2, n3, n };
                    let k = psi(&q, s) / phase(&q, alpha);
                    acc += k * y.get(n1) * y.get(n2).conj() * y.get(n3) * y.get(n).conj();
                }
            }
        }
    }
    -0.5 * acc
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Direct `P_N(|u|²u)` without the mass correction.
pub fn brute_plain_cubic(u: &SpectralField, cutoff: usize) -> SpectralField {
    let m = cutoff as i64;
    let mut out = SpectralField::zeros(u.cutoff());
    for n in -m..=m {
        let mut acc = Complex64::new(0.0, 0.0);
        for n1 in -m..=m {
            for n3 in -m..=m {
                let n2 = n1 + n3 - n;
                if n2.abs() <= m {
                    acc += u.get(n1) * u.get(n2).conj() * u.get(n3);
                }
            }
        }
        out.set(n, acc);
    }
    out
}

/// Integrates `i∂t u + (−∂x²)^α u = σ P_N(|u|²u)` with a Lawson–RK4 scheme written out
/// independently of the library stepper.
pub fn ungauged_flow(u0: &SpectralField, alpha: f64, sigma: f64, dt: f64, horizon: f64) -> SpectralField {
    let cutoff = u0.cutoff();
    let steps = (horizon / dt).round() as usize;
    let h = horizon / steps as f64;
    let rot = |f: &SpectralField, t: f64| {
        let mut g = f.clone();
        for (n, c) in f.modes() {
            g.set(n, c * Complex64::from_polar(1.0, t * (n.unsigned_abs() as f64).powf(2.0 * alpha)));
        }
        g
    };
    let rate = |f: &SpectralField| brute_plain_cubic(f, cutoff).scale(Complex64::new(0.0, -sigma));
    let add = |a: &SpectralField, k: f64, b: &SpectralField| {
        let coeffs = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x + k * y).collect();
        SpectralField::from_coeffs(cutoff, coeffs).unwrap()
    };
    // Interaction variable z(τ) = S(−τ)u(t+τ) over one step.
    let mut u = u0.clone();
    for _ in 0..steps {
        let g = |tau: f64, z: &SpectralField| rot(&rate(&rot(z, tau)), -tau);
        let k1 = g(0.0, &u);
        let k2 = g(0.5 * h, &add(&u, 0.5 * h, &k1));
        let k3 = g(0.5 * h, &add(&u, 0.5 * h, &k2));
        let k4 = g(h, &add(&u, h, &k3));
        let mut z = u.clone();
        for (i, c) in z.coeffs_mut().iter_mut().enumerate() {
            *c += h / 6.0 * (k1.coeffs()[i] + 2.0 * k2.coeffs()[i] + 2.0 * k3.coeffs()[i] + k4.coeffs()[i]);
        }
        u = rot(&z, h);
    }
    u
}

/// Fourth-order centred difference of `g` at 0 with step `h`.
pub fn central_diff4(g: impl Fn(f64) -> f64, h: f64) -> f64 {
    (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h)
}
