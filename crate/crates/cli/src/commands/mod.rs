pub mod energy;
pub mod measure;
pub mod report;
pub mod simulate;
pub mod verify;

use clap::Args;
use fnls_core::{SimParams, Sign};

use crate::exit::CliResult;
use crate::{Context, SignArg};

/// Physics shared by the dynamic and measure commands.
#[derive(Args, Debug, Clone, Default)]
pub struct PhysicsArgs {
    /// Dispersion exponent α.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Regularity s of the Gaussian measure and of the modified energy.
    #[arg(long)]
    pub s: Option<f64>,
    /// ε in σ = s − 1/2 − ε.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,
}

pub const DEFAULT_ALPHA: f64 = 2.0;
pub const DEFAULT_S: f64 = 0.8;

impl PhysicsArgs {
    pub fn params(&self, ctx: &Context, cutoff: usize) -> CliResult<SimParams> {
        let f = &ctx.file;
        let sign: Sign = f.pick(self.sign, "sign", SignArg::Defocusing)?.into();
        let p = SimParams::new(
            f.pick(self.alpha, "alpha", DEFAULT_ALPHA)?,
            f.pick(self.s, "s", DEFAULT_S)?,
            cutoff,
        )
        .with_eps(f.pick(self.eps, "eps", 0.05)?)
        .with_sign(sign);
        p.validate()?;
        Ok(p)
    }
}

pub fn fmt_quad(q: &fnls_core::FrequencyQuad) -> String {
    format!("({} {} {} {})", q.n1, q.n2, q.n3, q.n)
}
