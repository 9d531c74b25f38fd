//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{ensure, Result};
use nalgebra::{DMatrix, DVector};
use swehdg::pipeline::{self, init_level, run_comparison, run_convergence, run_series};
use swehdg_core::assembly::{assemble_all, PhysicalParams};
use swehdg_core::diagnostics::{eoc, linear_fit_slope};
use swehdg_core::elliptic::VectorLaplacian;
use swehdg_core::fespace::Spaces;
use swehdg_core::integrators::{
    check_partitioned_symplectic, check_symplectic, forward_euler, make_sdirk, make_seprk, IntegratorRegistry,
    SemidiscreteSystem,
};
use swehdg_core::mesh::{generate_structured_rect, Rect};
use swehdg_core::sparse;
use swehdg_core::swe::{build_uw_system, build_uw_system_on, ProblemSpec, TimeStepRule, UwSystem};

// Reference errors on the uniform meshes, rows h = 1/2 .. 1/32.
const INIT_K1_SIGMA: [f64; 5] = [2.09e-2, 5.16e-3, 1.11e-3, 2.50e-4, 5.91e-5];
const INIT_K1_W: [f64; 5] = [8.28e-2, 2.15e-2, 5.65e-3, 1.45e-3, 3.67e-4];
const INIT_K1_PHI: [f64; 5] = [7.75e-2, 2.05e-2, 5.17e-3, 1.29e-3, 3.21e-4];
const FULL_K2_PHI: [f64; 5] = [2.10e-2, 2.08e-3, 1.84e-4, 2.62e-5, 2.72e-6];
const FULL_K2_U: [f64; 5] = [8.07e-2, 1.63e-2, 3.30e-3, 3.53e-4, 2.28e-5];
const FULL_K2_W: [f64; 5] = [1.11e-2, 8.80e-4, 1.53e-4, 4.88e-5, 3.63e-6];

const INIT_EOC_RANGE: (f64, f64) = (1.85, 2.2);
const INIT_FACTOR: f64 = 2.0;
const FULL_EOC_MIN: f64 = 2.7;
const FULL_FACTOR: f64 = 3.0;
const ENERGY_TOL: f64 = 1e-10;
const MIN_ENERGY_STEPS: usize = 1000;
const MASS_TOL: f64 = 1e-10;
const COMPARISON_STEPS: usize = 500;
const TABLEAU_TOL: f64 = 1e-14;
const ORACLE_TOL: f64 = 1e-11;
const ORDER_SLACK: f64 = 0.3;
const LAPLACIAN_RESIDUAL_TOL: f64 = 1e-10;
const ZERO_LOAD_TOL: f64 = 1e-12;
const DRIFT_STEPS: usize = 10_000;
const DRIFT_SLOPE_TOL: f64 = 1e-12;
const AMPLITUDE_ORDER_SLACK: f64 = 0.4;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { ok, detail: detail.into() })
}

fn within_factor(got: f64, want: f64, factor: f64) -> bool {
    got <= want * factor && got >= want / factor
}

fn worst_factor(got: &[f64], want: &[f64]) -> f64 {
    got.iter().zip(want).map(|(g, w)| (g / w).max(w / g)).fold(1.0, f64::max)
}

fn init_convergence() -> Result<Outcome> {
    let pool = pipeline::build_pool(None)?;
    let specs: Vec<ProblemSpec> = (1..=5).map(|l| ProblemSpec::standing_wave(l, 1)).collect();
    let levels = pool.install(|| {
        use rayon::prelude::*;
        specs.par_iter().map(init_level).collect::<Result<Vec<_>>>()
    })?;
    let hs: Vec<f64> = levels.iter().map(|l| l.h).collect();
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, (name, reference)) in [("sigma", INIT_K1_SIGMA), ("w", INIT_K1_W), ("phi", INIT_K1_PHI)].iter().enumerate() {
        let errs: Vec<f64> = levels.iter().map(|l| l.errors[i]).collect();
        let rate = eoc(&errs, &hs)[4].unwrap_or(f64::NAN);
        let factor = worst_factor(&errs, reference);
        ok &= rate >= INIT_EOC_RANGE.0 && rate <= INIT_EOC_RANGE.1;
        ok &= errs.iter().zip(reference).all(|(g, w)| within_factor(*g, *w, INIT_FACTOR));
        detail.push(format!("{name} eoc {rate:.3} err {:.3e} (x{factor:.2})", errs[4]));
    }
    outcome(ok, detail.join(", "))
}

fn full_convergence() -> Result<Outcome> {
    let pool = pipeline::build_pool(None)?;
    let specs: Vec<Vec<ProblemSpec>> = vec![(1..=5).map(|l| ProblemSpec::standing_wave(l, 2)).collect()];
    ensure!(specs[0].iter().all(|s| s.integrator == "seprk4"), "k = 2 runs must use seprk4");
    ensure!(
        specs[0].iter().all(|s| s.time_step == TimeStepRule::Courant(0.1 / 3.0) && s.final_time == 0.5),
        "k = 2 runs must use T = 0.5 and dt = h / 30"
    );
    let res = run_convergence(&specs, &IntegratorRegistry::with_defaults(), &pool)?;
    let hs: Vec<f64> = res.levels.iter().map(|l| l.h).collect();
    let mut ok = true;
    let mut detail = Vec::new();
    let columns: [(&str, fn(&swehdg_core::diagnostics::ErrorTriple) -> f64, [f64; 5]); 3] = [
        ("phi", |e| e.phi, FULL_K2_PHI),
        ("u", |e| e.u, FULL_K2_U),
        ("w", |e| e.w, FULL_K2_W),
    ];
    for (name, pick, reference) in columns {
        let errs: Vec<f64> = res.levels.iter().map(|l| pick(&l.errors)).collect();
        let rate = eoc(&errs, &hs)[4].unwrap_or(f64::NAN);
        let factor = worst_factor(&errs, &reference);
        ok &= rate >= FULL_EOC_MIN;
        ok &= errs.iter().zip(&reference).all(|(g, w)| within_factor(*g, *w, FULL_FACTOR));
        detail.push(format!("{name} eoc {rate:.3} err {:.3e} (x{factor:.2})", errs[4]));
    }
    outcome(ok, detail.join(", "))
}

struct LongRuns {
    pier_energy: f64,
    pier_steps: usize,
    pier_f0: f64,
    pier_mass: f64,
    shelf_mass: f64,
}

fn long_runs() -> Result<LongRuns> {
    let registry = IntegratorRegistry::with_defaults();
    let mut no_snapshots = |_: usize, _: f64, _: &Spaces, _: &[f64], _: &[f64]| Ok(());
    let mut pier = ProblemSpec::pier(1.0, 2);
    pier.final_time = 50.0;
    let p = run_series(&pier, &registry, None, 1, 0, &mut no_snapshots)?;
    let shelf = ProblemSpec::shelf(0.5, 1);
    let s = run_series(&shelf, &registry, None, 1, 0, &mut no_snapshots)?;
    Ok(LongRuns {
        pier_energy: p.energy_deviation(),
        pier_steps: p.steps,
        pier_f0: pier.params.f0,
        pier_mass: p.worst_mass(),
        shelf_mass: s.worst_mass(),
    })
}

fn energy_conservation(runs: &LongRuns) -> Result<Outcome> {
    let ok = runs.pier_energy <= ENERGY_TOL && runs.pier_steps >= MIN_ENERGY_STEPS && runs.pier_f0 == 0.5;
    outcome(
        ok,
        format!("pier k = 2, f0 = {}, {} steps: max relative deviation {:.3e}", runs.pier_f0, runs.pier_steps, runs.pier_energy),
    )
}

fn mass_identity(runs: &LongRuns) -> Result<Outcome> {
    let ok = runs.pier_mass <= MASS_TOL && runs.shelf_mass <= MASS_TOL;
    outcome(ok, format!("pier {:.3e}, shelf {:.3e}", runs.pier_mass, runs.shelf_mass))
}

fn dissipativity() -> Result<Outcome> {
    let mut spec = ProblemSpec::standing_wave(3, 1);
    spec.time_step = TimeStepRule::Courant(0.05);
    spec.integrator = "midpoint".into();
    let cmp = run_comparison(&spec, &IntegratorRegistry::with_defaults(), Some(COMPARISON_STEPS))?;
    ensure!(cmp.rows.len() == COMPARISON_STEPS + 1, "expected {} rows", COMPARISON_STEPS + 1);
    let increases = cmp.rows.windows(2).filter(|w| w[1].3 > w[0].3).count();
    let dev = cmp.uw_deviation();
    outcome(
        increases == 0 && dev <= ENERGY_TOL,
        format!(
            "(phi, u) increases at {increases} of {COMPARISON_STEPS} steps, total decay {:.3e}; (u, w) deviation {dev:.3e}",
            cmp.phiu_total_decay()
        ),
    )
}

fn tableau_residuals() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut names = Vec::new();
    for p in [2, 4] {
        let t = make_sdirk(p)?;
        worst = worst.max(check_symplectic(&t));
        names.push(t.name.clone());
    }
    for p in [1, 2, 3, 4, 6] {
        let t = make_seprk(p)?;
        worst = worst.max(check_partitioned_symplectic(&t));
        names.push(t.name.clone());
    }
    let euler = check_symplectic(&forward_euler());
    outcome(
        worst <= TABLEAU_TOL && (euler - 1.0).abs() <= TABLEAU_TOL,
        format!("worst shipped residual {worst:.2e} over {}; forward Euler {euler}", names.join("/")),
    )
}

fn dense(a: &sparse::SparseMatrix) -> DMatrix<f64> {
    let rows = sparse::to_dense(a);
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| rows[i][j])
}

/// `K` by eliminating `[[I + S, -E], [-E^T, G]]` with a dense inverse.
fn brute_force_k(sys: &UwSystem) -> DMatrix<f64> {
    let m = &sys.matrices;
    let (s, e, g, b, c) = (dense(&m.s), dense(&m.e), dense(&m.g), dense(&m.b), dense(&m.c));
    let (nw, nm) = (s.nrows(), g.nrows());
    let mut block = DMatrix::zeros(nw + nm, nw + nm);
    block.view_mut((0, 0), (nw, nw)).copy_from(&(DMatrix::identity(nw, nw) + s));
    block.view_mut((0, nw), (nw, nm)).copy_from(&(-&e));
    block.view_mut((nw, 0), (nm, nw)).copy_from(&(-e.transpose()));
    block.view_mut((nw, nw), (nm, nm)).copy_from(&g);
    let inv = block.try_inverse().expect("saddle block is invertible");
    let nv = b.nrows();
    let mut left = DMatrix::zeros(nv, nw + nm);
    left.view_mut((0, 0), (nv, nw)).copy_from(&(-&b));
    left.view_mut((0, nw), (nv, nm)).copy_from(&c);
    let mut right = DMatrix::zeros(nw + nm, nv);
    right.view_mut((0, 0), (nw, nv)).copy_from(&(-b.transpose()));
    right.view_mut((nw, 0), (nm, nv)).copy_from(&c.transpose());
    left * inv * right
}

fn small_system(k: usize, params: PhysicalParams) -> Result<Arc<UwSystem>> {
    let mesh = generate_structured_rect(2, 1, Rect::unit())?;
    ensure!(mesh.num_elements() <= 4, "oracle mesh has {} elements", mesh.num_elements());
    let spaces = Arc::new(Spaces::new(Arc::new(mesh), k)?);
    let mut spec = ProblemSpec::standing_wave(1, k);
    spec.params = params;
    Ok(build_uw_system_on(&spec, spaces)?.system)
}

fn dense_rhs(sys: &dyn SemidiscreteSystem) -> Result<DMatrix<f64>> {
    let n = sys.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut out = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        sys.rhs(&e, &mut out)?;
        m.column_mut(j).copy_from_slice(&out);
        e[j] = 0.0;
    }
    Ok(m)
}

/// Observed order on the last of three halvings against `exp(T M) y0`.
fn observed_order(sys: &dyn SemidiscreteSystem, name: &str, m: &DMatrix<f64>, dt0: f64) -> Result<(f64, f64)> {
    let integ = IntegratorRegistry::with_defaults().get(name)?;
    let n = sys.dim();
    let y0: Vec<f64> = (0..n).map(|i| (0.7 * i as f64 + 0.3).sin()).collect();
    let steps0 = 8usize;
    let t_end = dt0 * steps0 as f64;
    let exact = (m * t_end).exp() * DVector::from_column_slice(&y0);
    let mut errs = Vec::new();
    for r in 0..3 {
        let steps = steps0 << r;
        let dt = t_end / steps as f64;
        let mut y = y0.clone();
        for _ in 0..steps {
            integ.step(sys, dt, &mut y)?;
        }
        errs.push((DVector::from_column_slice(&y) - &exact).norm() / exact.norm());
    }
    Ok(((errs[1] / errs[2]).log2(), errs[2]))
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut ok = true;
    let mut detail = Vec::new();
    for k in [0, 1] {
        let sys = small_system(k, PhysicalParams::default())?;
        let nv = sys.dim_v();
        let mut applied = DMatrix::zeros(nv, nv);
        let mut e = vec![0.0; nv];
        for j in 0..nv {
            e[j] = 1.0;
            applied.column_mut(j).copy_from_slice(&sys.recovery.apply_k(&e));
            e[j] = 0.0;
        }
        let brute = brute_force_k(&sys);
        let scale = brute.amax();
        let diff = (&applied - &brute).amax() / scale;
        let asym = (&applied - applied.transpose()).amax() / scale;
        let sym = (&applied + applied.transpose()) * 0.5;
        let lmin = sym.symmetric_eigenvalues().min();
        ok &= diff <= ORACLE_TOL && asym <= ORACLE_TOL && lmin >= -ORACLE_TOL;
        detail.push(format!("k = {k}: K diff {diff:.1e}, asym {asym:.1e}, min eig {lmin:.1e}"));
    }
    // sDIRK(4) with rotation, sEPRK(4) on the rotation-free system.
    let rotating = small_system(1, PhysicalParams { f0: 0.5, beta: 0.2, ..PhysicalParams::default() })?;
    let plain = small_system(1, PhysicalParams::default())?;
    for (name, sys, p) in [("sdirk4", &rotating, 4.0), ("seprk4", &plain, 4.0)] {
        let m = dense_rhs(sys.as_ref())?;
        let omega = m.clone().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let dt0 = 0.5 / omega;
        let (q, err) = observed_order(sys.as_ref(), name, &m, dt0)?;
        ok &= (q - p).abs() <= ORDER_SLACK;
        detail.push(format!("{name} order {q:.2} (err {err:.1e})"));
    }
    outcome(ok, detail.join("; "))
}

fn laplacian_meshes() -> Vec<ProblemSpec> {
    let mut specs = Vec::new();
    for k in 0..=3 {
        for l in 1..=4 {
            specs.push(ProblemSpec::standing_wave(l, k));
        }
    }
    specs.push(ProblemSpec::pier(1.0, 2));
    specs.push(ProblemSpec::pier(2.0, 1));
    specs.push(ProblemSpec::shelf(0.5, 1));
    specs.push(ProblemSpec::shelf(1.0, 2));
    specs
}

fn well_posedness() -> Result<Outcome> {
    let mut worst_res: f64 = 0.0;
    let mut worst_zero: f64 = 0.0;
    let specs = laplacian_meshes();
    for spec in &specs {
        let spaces = spec.build_spaces()?;
        let m = assemble_all(&spaces, &spec.params)?;
        let vl = VectorLaplacian::new(&spaces, &m)?;
        let initial = spec.initial;
        let sol = vl.solve_load(&spaces.project_vector(|p| initial.grad_phi(p)));
        worst_res = worst_res.max(sol.residual);
        let zero = vl.solve_load(&vec![0.0; spaces.dim_v()]);
        let amax = [&zero.sigma, &zero.phi, &zero.w, &zero.phi_hat, &zero.w_check]
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0_f64, |a, v| a.max(v.abs()));
        worst_zero = worst_zero.max(amax);
    }
    outcome(
        worst_res <= LAPLACIAN_RESIDUAL_TOL && worst_zero <= ZERO_LOAD_TOL,
        format!("{} meshes: worst residual {worst_res:.2e}, zero-load max {worst_zero:.1e}", specs.len()),
    )
}

/// Relative linear-fit slope and relative oscillation amplitude of the energy.
fn energy_record(dt: f64) -> Result<(f64, f64)> {
    let spec = ProblemSpec::standing_wave(2, 1);
    let problem = build_uw_system(&spec)?;
    let sys = problem.system.as_ref();
    let integ = IntegratorRegistry::with_defaults().get("seprk3")?;
    let mut y = problem.state.y.clone();
    let mut energies = Vec::with_capacity(DRIFT_STEPS + 1);
    energies.push(sys.energy(&y));
    for _ in 0..DRIFT_STEPS {
        integ.step(sys, dt, &mut y)?;
        energies.push(sys.energy(&y));
    }
    let e0 = energies[0];
    let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((linear_fit_slope(&energies) / e0, (max - min) / e0))
}

fn no_drift() -> Result<Outcome> {
    let h = 0.25;
    let dt = 0.05 * h;
    let (slope, amp) = energy_record(dt)?;
    let (slope_half, amp_half) = energy_record(dt / 2.0)?;
    let ratio = amp / amp_half;
    let rate = ratio.log2();
    let ok = slope.abs() <= DRIFT_SLOPE_TOL && slope_half.abs() <= DRIFT_SLOPE_TOL && (rate - 3.0).abs() <= AMPLITUDE_ORDER_SLACK;
    outcome(
        ok,
        format!(
            "slopes {slope:.2e}, {slope_half:.2e} per step; amplitude {amp:.2e} -> {amp_half:.2e}, ratio {ratio:.2} (2^{rate:.2})"
        ),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let runs = long_runs();
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome>>)> = vec![
        ("1 initialization convergence (k = 1)", Box::new(init_convergence)),
        ("2 full-scheme convergence (k = 2, seprk4)", Box::new(full_convergence)),
        (
            "3 energy conservation (midpoint, pier)",
            Box::new(|| match &runs {
                Ok(r) => energy_conservation(r),
                Err(e) => Err(anyhow::anyhow!("{e:#}")),
            }),
        ),
        (
            "4 mass identity (pier, shelf)",
            Box::new(|| match &runs {
                Ok(r) => mass_identity(r),
                Err(e) => Err(anyhow::anyhow!("{e:#}")),
            }),
        ),
        ("5 dissipative vs Hamiltonian energy", Box::new(dissipativity)),
        ("6 symplecticity residuals", Box::new(tableau_residuals)),
        ("7 dense oracle equivalence", Box::new(oracle_equivalence)),
        ("8 vector-Laplacian well-posedness", Box::new(well_posedness)),
        ("9 seprk3 energy without drift", Box::new(no_drift)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let t = Instant::now();
        let (ok, detail) = match check() {
            Ok(o) => (o.ok, o.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        failed += usize::from(!ok);
        println!("{} [{name}] {detail} ({:.1}s)", if ok { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), started.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
