//! Symplectic time stepping for affine linear systems `y' = M y + c`.

pub mod dense;
pub mod tableau;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::{Error, Result};

pub use dense::DenseSystem;
pub use tableau::{
    check_partitioned_symplectic, check_symplectic, forward_euler, make_sdirk, make_seprk, midpoint_composition,
    triple_jump_gamma, ButcherTableau, PartitionedTableau,
};

/// An autonomous affine system `y' = M y + c`.
pub trait SemidiscreteSystem: Send + Sync {
    fn dim(&self) -> usize;

    /// `out = M y + c`.
    fn rhs(&self, y: &[f64], out: &mut [f64]) -> Result<()>;

    /// Solves `(I - theta M) Y = r + theta c`.
    fn solve_shifted(&self, theta: f64, r: &[f64]) -> Result<Vec<f64>>;

    /// The `(w, u)` split, when the system has one.
    fn partition(&self) -> Option<&dyn PartitionedSystem> {
        None
    }
}

/// `w' = drift(u)`, `u' = kick(w, u)` with `y = [w; u]`.
pub trait PartitionedSystem: Send + Sync {
    /// Length of the `w` block.
    fn split(&self) -> usize;

    fn drift(&self, u: &[f64], out: &mut [f64]) -> Result<()>;

    fn kick(&self, w: &[f64], u: &[f64], out: &mut [f64]) -> Result<()>;
}

pub trait Integrator: Send + Sync {
    fn name(&self) -> &str;
    fn order(&self) -> usize;
    fn step(&self, system: &dyn SemidiscreteSystem, dt: f64, y: &mut [f64]) -> Result<()>;

    /// Distinct `dt a_ii` values whose shifted solves this method will request.
    fn implicit_shifts(&self, _dt: f64) -> Vec<f64> {
        Vec::new()
    }
}

pub struct SdirkIntegrator {
    pub tableau: ButcherTableau,
}

impl SdirkIntegrator {
    pub fn new(tableau: ButcherTableau) -> Self {
        SdirkIntegrator { tableau }
    }
}

impl Integrator for SdirkIntegrator {
    fn name(&self) -> &str {
        &self.tableau.name
    }

    fn order(&self) -> usize {
        self.tableau.order
    }

    fn step(&self, system: &dyn SemidiscreteSystem, dt: f64, y: &mut [f64]) -> Result<()> {
        sdirk_step(system, &self.tableau, dt, y)
    }

    fn implicit_shifts(&self, dt: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for i in 0..self.tableau.stages() {
            let theta = dt * self.tableau.a[i][i];
            if theta != 0.0 && !out.iter().any(|t| t.to_bits() == theta.to_bits()) {
                out.push(theta);
            }
        }
        out
    }
}

pub struct SeprkIntegrator {
    pub tableau: PartitionedTableau,
}

impl SeprkIntegrator {
    pub fn new(tableau: PartitionedTableau) -> Self {
        SeprkIntegrator { tableau }
    }
}

impl Integrator for SeprkIntegrator {
    fn name(&self) -> &str {
        &self.tableau.name
    }

    fn order(&self) -> usize {
        self.tableau.order
    }

    fn step(&self, system: &dyn SemidiscreteSystem, dt: f64, y: &mut [f64]) -> Result<()> {
        seprk_step(system, &self.tableau, dt, y)
    }
}

/// One step of a diagonally implicit RK method.
pub fn sdirk_step(system: &dyn SemidiscreteSystem, t: &ButcherTableau, dt: f64, y: &mut [f64]) -> Result<()> {
    let n = system.dim();
    assert_eq!(y.len(), n);
    if dt == 0.0 {
        return Ok(());
    }
    let s = t.stages();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(s);
    for i in 0..s {
        let mut r = y.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = dt * t.a[i][j];
            if a != 0.0 {
                r.iter_mut().zip(kj).for_each(|(ri, kv)| *ri += a * kv);
            }
        }
        let theta = dt * t.a[i][i];
        let ki = if theta == 0.0 {
            let mut out = vec![0.0; n];
            system.rhs(&r, &mut out)?;
            out
        } else {
            let stage = system.solve_shifted(theta, &r)?;
            stage.iter().zip(&r).map(|(yv, rv)| (yv - rv) / theta).collect()
        };
        k.push(ki);
    }
    for (bi, ki) in t.b.iter().zip(&k) {
        let a = dt * bi;
        y.iter_mut().zip(ki).for_each(|(yv, kv)| *yv += a * kv);
    }
    Ok(())
}

/// One step of an explicit partitioned RK method, run as alternating drifts and kicks.
pub fn seprk_step(system: &dyn SemidiscreteSystem, t: &PartitionedTableau, dt: f64, y: &mut [f64]) -> Result<()> {
    let part = system.partition().ok_or_else(|| Error::NotPartitioned(t.name.clone()))?;
    if dt == 0.0 {
        return Ok(());
    }
    let m = part.split();
    let (w, u) = y.split_at_mut(m);
    let mut k = vec![0.0; w.len()];
    let mut l = vec![0.0; u.len()];
    for (bi, bhi) in t.b.iter().zip(&t.b_hat) {
        if *bi != 0.0 {
            part.drift(u, &mut k)?;
            w.iter_mut().zip(&k).for_each(|(wv, kv)| *wv += dt * bi * kv);
        }
        if *bhi != 0.0 {
            part.kick(w, u, &mut l)?;
            u.iter_mut().zip(&l).for_each(|(uv, lv)| *uv += dt * bhi * lv);
        }
    }
    Ok(())
}

/// Takes `steps` steps of size `dt` from `t0`, calling `observe(step, t, y)` at step 0,
/// every `every` steps and at the last step.
#[allow(clippy::too_many_arguments)]
pub fn integrate(
    system: &dyn SemidiscreteSystem,
    integrator: &dyn Integrator,
    t0: f64,
    y: &mut [f64],
    dt: f64,
    steps: usize,
    every: usize,
    mut observe: impl FnMut(usize, f64, &[f64]) -> Result<()>,
) -> Result<()> {
    let every = every.max(1);
    observe(0, t0, y)?;
    for n in 1..=steps {
        integrator.step(system, dt, y)?;
        if n % every == 0 || n == steps {
            observe(n, t0 + n as f64 * dt, y)?;
        }
    }
    Ok(())
}

/// Name-keyed collection of integrators.
#[derive(Clone, Default)]
pub struct IntegratorRegistry {
    entries: BTreeMap<String, Arc<dyn Integrator>>,
}

impl IntegratorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// midpoint, sdirk2, sdirk4 and seprk1/2/3/4/6.
    pub fn with_defaults() -> Self {
        let mut reg = Self::new();
        let mid = make_sdirk(2).expect("order 2 exists");
        reg.register_as("midpoint", Arc::new(SdirkIntegrator::new(mid.clone())));
        reg.register(Arc::new(SdirkIntegrator::new(mid)));
        reg.register(Arc::new(SdirkIntegrator::new(make_sdirk(4).expect("order 4 exists"))));
        for order in [1, 2, 3, 4, 6] {
            reg.register(Arc::new(SeprkIntegrator::new(make_seprk(order).expect("listed order"))));
        }
        reg
    }

    pub fn register(&mut self, integrator: Arc<dyn Integrator>) {
        let name = integrator.name().to_string();
        self.entries.insert(name, integrator);
    }

    pub fn register_as(&mut self, name: &str, integrator: Arc<dyn Integrator>) {
        self.entries.insert(name.to_string(), integrator);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Integrator>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownIntegrator(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// `sdirk{order}` or `seprk{order}`.
    pub fn by_family(&self, explicit: bool, order: usize) -> Result<Arc<dyn Integrator>> {
        let name = if explicit { format!("seprk{order}") } else { format!("sdirk{order}") };
        self.get(&name)
    }
}

impl std::fmt::Debug for IntegratorRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator() -> DenseSystem {
        DenseSystem::harmonic_oscillator(1.0, 1.0)
    }

    #[test]
    fn zero_step_is_identity() {
        let reg = IntegratorRegistry::with_defaults();
        let sys = oscillator();
        for name in reg.names() {
            let mut y = vec![0.3, -0.7];
            reg.get(name).unwrap().step(&sys, 0.0, &mut y).unwrap();
            assert_eq!(y, vec![0.3, -0.7], "{name}");
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let reg = IntegratorRegistry::with_defaults();
        let sys = oscillator();
        for name in reg.names() {
            let mut y = vec![0.0, 0.0];
            reg.get(name).unwrap().step(&sys, 0.1, &mut y).unwrap();
            assert_eq!(y, vec![0.0, 0.0], "{name}");
        }
    }

    #[test]
    fn unknown_and_unpartitioned() {
        let reg = IntegratorRegistry::with_defaults();
        assert!(matches!(reg.get("rk45"), Err(Error::UnknownIntegrator(_))));
        let sys = DenseSystem::new(nalgebra::DMatrix::identity(2, 2), vec![0.0; 2], None);
        let mut y = vec![1.0, 1.0];
        let r = reg.get("seprk2").unwrap().step(&sys, 0.1, &mut y);
        assert!(matches!(r, Err(Error::NotPartitioned(_))));
    }

    fn observed_order(name: &str) -> f64 {
        let reg = IntegratorRegistry::with_defaults();
        let sys = oscillator();
        let integ = reg.get(name).unwrap();
        let t_end = 1.0;
        let exact = sys.exact(&[1.0, 0.0], t_end);
        let err = |n: usize| {
            let mut y = vec![1.0, 0.0];
            let dt = t_end / n as f64;
            for _ in 0..n {
                integ.step(&sys, dt, &mut y).unwrap();
            }
            ((y[0] - exact[0]).powi(2) + (y[1] - exact[1]).powi(2)).sqrt()
        };
        let n = if integ.order() >= 6 { 8 } else { 16 };
        (err(n) / err(2 * n)).log2()
    }

    #[test]
    fn orders_on_oscillator() {
        for (name, p) in [
            ("midpoint", 2.0),
            ("sdirk4", 4.0),
            ("seprk1", 1.0),
            ("seprk2", 2.0),
            ("seprk3", 3.0),
            ("seprk4", 4.0),
            ("seprk6", 6.0),
        ] {
            let q = observed_order(name);
            assert!((q - p).abs() < 0.25, "{name}: observed {q}");
        }
    }

    #[test]
    fn midpoint_conserves_quadratic_energy() {
        let sys = oscillator();
        let integ = IntegratorRegistry::with_defaults().get("midpoint").unwrap();
        let mut y = vec![1.0, 0.5];
        let e0 = y[0] * y[0] + y[1] * y[1];
        for _ in 0..1000 {
            integ.step(&sys, 0.37, &mut y).unwrap();
        }
        let e1 = y[0] * y[0] + y[1] * y[1];
        assert!((e1 - e0).abs() / e0 < 1e-13);
    }
}
