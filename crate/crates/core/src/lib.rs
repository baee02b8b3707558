//! Spectral laboratory for the cubic fractional nonlinear Schrödinger equation
//!
//! ```text
//! i ∂t u + (−∂x²)^α u = ± |u|² u,   x ∈ T = R / 2πZ
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: Fourier-coefficient fields, Sobolev / Fourier–Lebesgue / Lebesgue
//!   norms and the dealiased gauged cubic nonlinearity.
//! - [`phase`]: the phase function, the weight `ψ_s`, the non-resonant hyperplane and
//!   exhaustive lattice verifiers for the phase lower bound, the double mean value bound,
//!   partial sums `φ_β` and divisor counting.
//! - [`dynamics`]: the Galerkin-truncated gauged flow, gauge maps, interaction picture,
//!   a Lawson RK4 integrator and conservation diagnostics.
//! - [`energy`]: the normal-form correction `R_{s,N}`, the modified energy and the
//!   four-term decomposition of its time derivative.
//! - [`measure`]: counter-based sampling of Gaussian Fourier series, weighted densities,
//!   moment/tail estimators and measure-transport experiments.
//!
//! Conventions: `‖u‖²_{H^σ} = Σ ⟨n⟩^{2σ} |û_n|²` with `⟨n⟩ = (1+n²)^{1/2}`, and physical
//! integrals use the normalised measure `(1/2π)∫`, so `‖u‖_{L²} = ‖û‖_{ℓ²}`.

// `!(x > 0.0)` guards are written that way so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod measure;
pub mod phase;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use dynamics::{SimParams, Sign, Trajectory};
pub use energy::{DerivativeTerms, EnergyReport, NormalFormKernel};
pub use error::{LabError, Result};
pub use measure::{DensityValue, Ensemble, Estimate};
pub use num_complex::Complex64;
pub use phase::{BoundReport, FrequencyQuad};
pub use spectral::{SobolevIndex, SpectralField};
