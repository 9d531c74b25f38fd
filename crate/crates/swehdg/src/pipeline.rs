//! The four batch pipelines, independent of argument parsing and file output.

use anyhow::{anyhow, bail, Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use swehdg_core::assembly::assemble_all;
use swehdg_core::diagnostics::{
    conserved_quantities, convergence_table, init_errors, l2_errors, max_relative_deviation, ConvergenceRow,
    ErrorTriple, QuantityRecord,
};
use swehdg_core::elliptic::VectorLaplacian;
use swehdg_core::integrators::{integrate, IntegratorRegistry};
use swehdg_core::swe::{
    build_phiu_system, build_uw_system, InitialData, ManufacturedSolution, ProblemSpec, State, TimeStepRule, UwSystem,
};

/// Relative residual accepted from the initialization solve.
pub const INIT_RESIDUAL_TOL: f64 = 1e-10;
/// `|mass| / (|phi_h| |Omega|^{1/2})` accepted at every recorded step.
pub const MASS_TOL: f64 = 1e-10;
/// Relative energy drift accepted from the midpoint rule.
pub const ENERGY_TOL: f64 = 1e-10;

/// One `(k, h)` initialization solve.
#[derive(Clone, Debug)]
pub struct InitLevel {
    pub k: usize,
    pub h: f64,
    /// `sigma, w, phi`.
    pub errors: [f64; 3],
    pub residual: f64,
}

pub fn init_level(spec: &ProblemSpec) -> Result<InitLevel> {
    let spaces = spec.build_spaces()?;
    let m = assemble_all(&spaces, &spec.params)?;
    let vl = VectorLaplacian::new(&spaces, &m)?;
    let ms = ManufacturedSolution;
    let load = spaces.project_vector(|p| ms.grad_phi(p, 0.0));
    let sol = vl.solve_load(&load);
    Ok(InitLevel {
        k: spec.degree,
        h: spaces.mesh.size_parameter,
        errors: init_errors(&spaces, &sol, &ms),
        residual: sol.residual,
    })
}

/// One `(k, h)` run of the full scheme against the standing wave.
#[derive(Clone, Debug)]
pub struct ConvergenceLevel {
    pub k: usize,
    pub h: f64,
    /// Maximum over the recorded steps.
    pub errors: ErrorTriple,
    pub steps: usize,
    pub init_residual: f64,
}

pub fn convergence_level(spec: &ProblemSpec, registry: &IntegratorRegistry) -> Result<ConvergenceLevel> {
    let integ = registry.get(&spec.integrator)?;
    let problem = build_uw_system(spec)?;
    let h = problem.system.spaces.mesh.size_parameter;
    let (dt, steps) = spec.time_grid(h)?;
    let zero = spec.initial == InitialData::Zero;
    let ms = ManufacturedSolution;
    let sys = problem.system.as_ref();
    let mut worst = ErrorTriple::default();
    let mut y = problem.state.y.clone();
    integrate(sys, integ.as_ref(), 0.0, &mut y, dt, steps, 1, |_, t, y| {
        let state = State { t, y: y.to_vec() };
        let e = if zero { zero_errors(sys, &state) } else { l2_errors(sys, &state, &ms) };
        worst = worst.max(e);
        Ok(())
    })?;
    Ok(ConvergenceLevel { k: spec.degree, h, errors: worst, steps, init_residual: problem.init.residual })
}

fn zero_errors(sys: &UwSystem, state: &State) -> ErrorTriple {
    let (w, u) = sys.split(&state.y);
    let (p, _) = sys.recover(&state.y);
    let s = &sys.spaces;
    ErrorTriple {
        phi: s.l2_error_scalar(&p, |_| 0.0),
        u: s.l2_error_vector(u, |_| [0.0, 0.0]),
        w: s.l2_error_vector(w, |_| [0.0, 0.0]),
    }
}

/// Runs independent jobs on `pool`, returning results in input order.
fn sweep<T: Send, J: Sync>(pool: &rayon::ThreadPool, jobs: &[J], f: impl Fn(&J) -> Result<T> + Sync) -> Result<Vec<T>> {
    pool.install(|| jobs.par_iter().map(&f).collect::<Result<Vec<_>>>())
}

pub fn build_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

pub struct InitConvergence {
    pub rows: Vec<ConvergenceRow>,
    pub levels: Vec<InitLevel>,
}

impl InitConvergence {
    pub fn worst_residual(&self) -> f64 {
        self.levels.iter().map(|l| l.residual).fold(0.0, f64::max)
    }
}

/// `specs[d][l]` holds degree `d`, level `l`.
pub fn run_init_convergence(specs: &[Vec<ProblemSpec>], pool: &rayon::ThreadPool) -> Result<InitConvergence> {
    let jobs: Vec<&ProblemSpec> = specs.iter().flatten().collect();
    let levels = sweep(pool, &jobs, |s| {
        init_level(s).with_context(|| format!("initialization failed for k = {}, {:?}", s.degree, s.geometry))
    })?;
    let mut rows = Vec::new();
    let mut at = 0;
    for group in specs {
        let chunk = &levels[at..at + group.len()];
        at += group.len();
        if let Some(first) = chunk.first() {
            let hs: Vec<f64> = chunk.iter().map(|l| l.h).collect();
            let errs: Vec<Vec<f64>> = chunk.iter().map(|l| l.errors.to_vec()).collect();
            rows.extend(convergence_table(first.k, &hs, &errs));
        }
    }
    for l in &levels {
        if l.residual > INIT_RESIDUAL_TOL {
            warn!("k = {}, h = {:e}: initialization residual {:e}", l.k, l.h, l.residual);
        }
    }
    Ok(InitConvergence { rows, levels })
}

pub struct FullConvergence {
    pub rows: Vec<ConvergenceRow>,
    pub levels: Vec<ConvergenceLevel>,
}

pub fn run_convergence(
    specs: &[Vec<ProblemSpec>],
    registry: &IntegratorRegistry,
    pool: &rayon::ThreadPool,
) -> Result<FullConvergence> {
    let jobs: Vec<&ProblemSpec> = specs.iter().flatten().collect();
    let levels = sweep(pool, &jobs, |s| {
        convergence_level(s, registry).with_context(|| format!("run failed for k = {}, {:?}", s.degree, s.geometry))
    })?;
    let mut rows = Vec::new();
    let mut at = 0;
    for group in specs {
        let chunk = &levels[at..at + group.len()];
        at += group.len();
        if let Some(first) = chunk.first() {
            let hs: Vec<f64> = chunk.iter().map(|l| l.h).collect();
            let errs: Vec<Vec<f64>> = chunk.iter().map(|l| vec![l.errors.phi, l.errors.u, l.errors.w]).collect();
            rows.extend(convergence_table(first.k, &hs, &errs));
        }
    }
    Ok(FullConvergence { rows, levels })
}

/// A recorded long run.
pub struct RunOutcome {
    pub records: Vec<QuantityRecord>,
    pub init_residual: f64,
    pub dt: f64,
    pub steps: usize,
}

impl RunOutcome {
    pub fn worst_mass(&self) -> f64 {
        self.records.iter().map(QuantityRecord::relative_mass).fold(0.0, f64::max)
    }

    pub fn energy_deviation(&self) -> f64 {
        max_relative_deviation(&self.records.iter().map(|r| r.energy).collect::<Vec<_>>())
    }
}

/// Snapshot hook: `(step, t, spaces, phi, u)`.
pub type SnapshotFn<'a> = dyn FnMut(usize, f64, &swehdg_core::fespace::Spaces, &[f64], &[f64]) -> Result<()> + 'a;

pub fn run_series(
    spec: &ProblemSpec,
    registry: &IntegratorRegistry,
    steps_override: Option<usize>,
    record_every: usize,
    snapshot_every: usize,
    snapshot: &mut SnapshotFn<'_>,
) -> Result<RunOutcome> {
    let integ = registry.get(&spec.integrator)?;
    let problem = build_uw_system(spec)?;
    let sys = problem.system.clone();
    let h = sys.spaces.mesh.size_parameter;
    let (dt, steps) = match steps_override {
        Some(n) => (step_size(spec, h)?, n),
        None => spec.time_grid(h)?,
    };
    info!("{}: dt = {dt:e}, {steps} steps, h = {h:e}", spec.integrator);
    let mut records = Vec::new();
    let cadence = if snapshot_every > 0 { gcd(record_every, snapshot_every) } else { record_every };
    let mut y = problem.state.y.clone();
    integrate(sys.as_ref(), integ.as_ref(), 0.0, &mut y, dt, steps, cadence, |n, t, y| {
        let state = State { t, y: y.to_vec() };
        if n % record_every == 0 || n == steps {
            records.push(conserved_quantities(&sys, &state));
        }
        if snapshot_every > 0 && (n % snapshot_every == 0 || n == steps) {
            let (p, _) = sys.recover(y);
            snapshot(n, t, &sys.spaces, &p, sys.split(y).1)
                .map_err(|e| swehdg_core::Error::Io(std::io::Error::other(format!("{e:#}"))))?;
        }
        Ok(())
    })?;
    Ok(RunOutcome { records, init_residual: problem.init.residual, dt, steps })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Per-step energies of both schemes from the same initial data.
pub struct Comparison {
    /// `(step, t, E_uw, E_phiu)`.
    pub rows: Vec<(usize, f64, f64, f64)>,
}

impl Comparison {
    pub fn uw_deviation(&self) -> f64 {
        max_relative_deviation(&self.rows.iter().map(|r| r.2).collect::<Vec<_>>())
    }

    /// Largest increase `E_{n+1} - E_n` of the dissipative scheme, relative to `E_0`.
    pub fn phiu_worst_increase(&self) -> f64 {
        let e0 = self.rows.first().map_or(1.0, |r| r.3.abs().max(f64::MIN_POSITIVE));
        self.rows.windows(2).map(|w| (w[1].3 - w[0].3) / e0).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn phiu_total_decay(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => a.3 - b.3,
            _ => 0.0,
        }
    }
}

pub fn run_comparison(spec: &ProblemSpec, registry: &IntegratorRegistry, steps: Option<usize>) -> Result<Comparison> {
    let integ = registry.get(&spec.integrator)?;
    if integ.implicit_shifts(1.0).is_empty() {
        bail!("the dissipative scheme has no (w, u) split; pick an implicit integrator, not `{}`", spec.integrator);
    }
    let uw = build_uw_system(spec)?;
    let pu = build_phiu_system(spec)?;
    let h = uw.system.spaces.mesh.size_parameter;
    let (dt, n) = match steps {
        Some(n) => (step_size(spec, h)?, n),
        None => spec.time_grid(h)?,
    };
    let mut y1 = uw.state.y.clone();
    let mut y2 = pu.state.y.clone();
    let mut energies1 = Vec::with_capacity(n + 1);
    integrate(uw.system.as_ref(), integ.as_ref(), 0.0, &mut y1, dt, n, 1, |_, _, y| {
        energies1.push(uw.system.energy(y));
        Ok(())
    })?;
    let mut rows = Vec::with_capacity(n + 1);
    integrate(pu.system.as_ref(), integ.as_ref(), 0.0, &mut y2, dt, n, 1, |k, t, y| {
        let e1 = *energies1.get(k).ok_or_else(|| swehdg_core::Error::InvalidParameter("step mismatch".into()))?;
        rows.push((k, t, e1, pu.system.energy(y)));
        Ok(())
    })?;
    Ok(Comparison { rows })
}

/// `dt` of the problem's step rule on a mesh of size `h`, ignoring the final time.
pub fn step_size(spec: &ProblemSpec, h: f64) -> Result<f64> {
    let dt = match spec.time_step {
        TimeStepRule::Courant(c) => c * h,
        TimeStepRule::Fixed(d) => d,
    };
    if !(dt > 0.0) {
        bail!("time step must be positive, got {dt}");
    }
    Ok(dt)
}

pub fn check(name: &str, ok: bool, detail: String) -> Result<()> {
    if ok {
        info!("{name}: {detail}");
        Ok(())
    } else {
        Err(anyhow!("{name} failed: {detail}"))
    }
}
