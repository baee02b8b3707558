//! Inputs shared by the benchmarks.

use fnls_core::measure::sample_mu;
use fnls_core::{SimParams, SpectralField};

/// Seeded sample of the Gaussian measure at (α, s) = (2, 0.8) with the given cutoff.
pub fn sample_field(cutoff: usize) -> (SimParams, SpectralField) {
    let p = SimParams::new(2.0, 0.8, cutoff);
    (p, sample_mu(&p, 7, 0))
}
