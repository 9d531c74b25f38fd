//! Subcommand bodies: read the config, run a pipeline, write its files and
//! turn failed residual checks into an error.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use log::info;
use swehdg_core::integrators::IntegratorRegistry;
use swehdg_core::swe::{Geometry, ProblemSpec};

use crate::config::RunConfig;
use crate::output;
use crate::pipeline::{self, ENERGY_TOL, INIT_RESIDUAL_TOL, MASS_TOL};

pub struct CommandArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

fn setup(args: &CommandArgs) -> Result<RunConfig> {
    let cfg = RunConfig::from_path(&args.config)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    Ok(cfg)
}

/// `specs[d][l]` over the configured degrees and uniform-square levels.
fn sweep_specs(cfg: &RunConfig) -> Result<Vec<Vec<ProblemSpec>>> {
    let levels = cfg.levels();
    if levels.is_empty() {
        bail!("no mesh levels configured");
    }
    cfg.degrees()
        .into_iter()
        .map(|k| {
            levels
                .iter()
                .map(|&l| {
                    let spec = cfg.problem(k, Some(l))?;
                    if !matches!(spec.geometry, Geometry::UniformSquare { .. }) {
                        bail!("convergence sweeps need a uniform_square mesh");
                    }
                    Ok(spec)
                })
                .collect()
        })
        .collect()
}

fn file_name(cfg: &RunConfig, default: &str) -> String {
    cfg.output.name.clone().unwrap_or_else(|| default.to_string())
}

pub fn converge_init(args: &CommandArgs) -> Result<()> {
    let cfg = setup(args)?;
    let pool = pipeline::build_pool(args.threads)?;
    let res = pipeline::run_init_convergence(&sweep_specs(&cfg)?, &pool)?;
    let path = args.out.join(file_name(&cfg, "init_convergence.csv"));
    output::write_convergence(&path, output::INIT_CONVERGENCE_HEADER, &res.rows)?;
    info!("wrote {}", path.display());
    let worst = res.worst_residual();
    pipeline::check("initialization residual", worst <= INIT_RESIDUAL_TOL, format!("{worst:.3e}"))
}

pub fn converge(args: &CommandArgs) -> Result<()> {
    let cfg = setup(args)?;
    let pool = pipeline::build_pool(args.threads)?;
    let registry = IntegratorRegistry::with_defaults();
    let res = pipeline::run_convergence(&sweep_specs(&cfg)?, &registry, &pool)?;
    let path = args.out.join(file_name(&cfg, "convergence.csv"));
    output::write_convergence(&path, output::CONVERGENCE_HEADER, &res.rows)?;
    info!("wrote {}", path.display());
    let worst = res.levels.iter().map(|l| l.init_residual).fold(0.0, f64::max);
    pipeline::check("initialization residual", worst <= INIT_RESIDUAL_TOL, format!("{worst:.3e}"))
}

pub fn run(args: &CommandArgs) -> Result<()> {
    let cfg = setup(args)?;
    let k = cfg.degrees()[0];
    let spec = cfg.problem(k, None)?;
    let registry = IntegratorRegistry::with_defaults();
    let snapshot_every = cfg.output.snapshot_every.unwrap_or(0);
    let out = args.out.clone();
    let mut snap = |n: usize, t: f64, spaces: &swehdg_core::fespace::Spaces, phi: &[f64], u: &[f64]| {
        let path = out.join(format!("snapshot_{n:06}.vtk"));
        output::write_vtk(&path, spaces, &format!("t = {t:e}"), phi, u)
    };
    let res = pipeline::run_series(&spec, &registry, cfg.time.steps, cfg.record_every(10), snapshot_every, &mut snap)?;
    let path = args.out.join(file_name(&cfg, "timeseries.csv"));
    output::write_time_series(&path, &res.records)?;
    info!("wrote {} ({} rows)", path.display(), res.records.len());

    pipeline::check("initialization residual", res.init_residual <= INIT_RESIDUAL_TOL, format!("{:.3e}", res.init_residual))?;
    pipeline::check("mass identity", res.worst_mass() <= MASS_TOL, format!("{:.3e}", res.worst_mass()))?;
    if spec.integrator == "midpoint" || spec.integrator.starts_with("sdirk") {
        let dev = res.energy_deviation();
        pipeline::check("energy conservation", dev <= ENERGY_TOL, format!("{dev:.3e}"))?;
    }
    Ok(())
}

pub fn compare_dissipative(args: &CommandArgs) -> Result<()> {
    let cfg = setup(args)?;
    let k = cfg.degrees()[0];
    let mut spec = cfg.problem(k, None)?;
    if cfg.time.integrator.is_none() {
        spec.integrator = "midpoint".into();
    }
    let registry = IntegratorRegistry::with_defaults();
    let steps = Some(cfg.time.steps.unwrap_or(500));
    let cmp = pipeline::run_comparison(&spec, &registry, steps)?;
    let path = args.out.join(file_name(&cfg, "dissipative.csv"));
    output::write_energy_comparison(&path, &cmp.rows)?;
    info!("wrote {}", path.display());
    let dev = cmp.uw_deviation();
    pipeline::check("(u, w) energy conservation", dev <= ENERGY_TOL, format!("{dev:.3e}"))?;
    let inc = cmp.phiu_worst_increase();
    pipeline::check("(phi, u) energy decay", inc <= 1e-12, format!("largest relative increase {inc:.3e}"))
}
