use std::path::PathBuf;

use clap::Args;
use fnls_core::dynamics::{evolve, hamiltonian, mass, suggested_dt};
use fnls_core::measure::sample_mu;
use fnls_core::{Complex64, SpectralField};

use super::PhysicsArgs;
use crate::exit::{invalid, CliResult, Verdict};
use crate::output::{num, read_field, sibling_jsonl, snapshot_line, JsonLines, Table};
use crate::Context;

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Galerkin cutoff N.
    #[arg(long = "N", alias = "cutoff")]
    pub cutoff: Option<usize>,
    /// Time step; defaults to min(1e-2, 0.1 / (1 + mass)).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Initial field as a JSON snapshot line; otherwise a seeded sample of the Gaussian measure.
    #[arg(long)]
    pub initial: Option<PathBuf>,
    /// Multiplies the initial field.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Record a snapshot every this many steps (default: about 100 snapshots).
    #[arg(long)]
    pub record_every: Option<usize>,
    /// JSON-lines trajectory path; defaults to the CSV path with a .jsonl extension.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

const COLUMNS: &[&str] = &["time", "mass", "energy", "mass_drift", "energy_drift"];

pub fn run(ctx: &Context, a: SimulateArgs) -> CliResult<Verdict> {
    let f = &ctx.file;
    let initial = f.pick_opt(a.initial, "initial")?;
    let loaded = initial.as_deref().map(read_field).transpose()?;
    let default_cutoff = loaded.as_ref().map_or(16, SpectralField::cutoff);
    let cutoff = f.pick(a.cutoff, "N", default_cutoff)?;
    let mut p = a.physics.params(ctx, cutoff)?;
    let amplitude = f.pick(a.amplitude, "amplitude", 1.0)?;
    if !amplitude.is_finite() {
        return Err(invalid("amplitude must be finite"));
    }
    let f0 = match loaded {
        Some(field) if field.cutoff() < cutoff => field.with_cutoff(cutoff),
        Some(field) => field,
        None => sample_mu(&p, ctx.seed()?, 0),
    }
    .scale(Complex64::new(amplitude, 0.0));
    p = p
        .with_dt(f.pick(a.dt, "dt", suggested_dt(&f0))?)
        .with_horizon(f.pick(a.horizon, "horizon", 1.0)?);
    p.validate()?;

    let steps = (p.horizon / p.dt).ceil().max(1.0) as usize;
    let record_every = f.pick(a.record_every, "record_every", (steps / 100).max(1))?;
    log::info!("simulate: {p:?}, {steps} steps, recording every {record_every}");
    let tr = evolve(&f0, &p, record_every)?;

    let out = ctx.out()?;
    let traj_path = f
        .pick_opt(a.trajectory, "trajectory")?
        .or_else(|| out.as_deref().map(sibling_jsonl));
    if let Some(path) = traj_path {
        let mut jl = JsonLines::create(&path)?;
        for (t, v) in tr.times.iter().zip(&tr.states) {
            jl.write(&snapshot_line(*t, v))?;
        }
        jl.finish()?;
    }

    let m0 = mass(&tr.states[0]);
    let h0 = hamiltonian(&tr.states[0], &p);
    let mut table = Table::create(out.as_deref(), "simulate", COLUMNS)?;
    for (t, v) in tr.times.iter().zip(&tr.states) {
        let (m, h) = (mass(v), hamiltonian(v, &p));
        table.row([
            num(*t),
            num(m),
            num(h),
            num((m - m0).abs() / m0.abs().max(1.0)),
            num((h - h0).abs() / h0.abs().max(1.0)),
        ])?;
    }
    table.finish()?;
    Ok(Verdict::Pass)
}
