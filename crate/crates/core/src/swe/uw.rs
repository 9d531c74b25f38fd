use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::assembly::SystemMatrices;
use crate::elliptic::PhiRecovery;
use crate::fespace::Spaces;
use crate::integrators::{PartitionedSystem, SemidiscreteSystem};
use crate::sparse::{self, SparseLu, SparseMatrix, TripletBuilder};
use crate::Result;

/// Energy split of a `(w, u)` state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub potential: f64,
    pub trace_term: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential + self.trace_term
    }
}

/// The Hamiltonian `(u, w)` system
///
/// ```text
/// w' = Phi u
/// u' = -K w + A_f u + c_u
/// ```
///
/// with `K w = -B p + C p_hat` and `(p, p_hat)` the recovered geopotential.
pub struct UwSystem {
    pub spaces: Arc<Spaces>,
    pub matrices: SystemMatrices,
    pub recovery: PhiRecovery,
    /// `(Phi grad phi_s, z_k)`.
    pub load: Vec<f64>,
    /// `-load / Phi`.
    pub c_u: Vec<f64>,
    stages: Mutex<HashMap<u64, Arc<SparseLu>>>,
}

impl std::fmt::Debug for UwSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UwSystem").field("matrices", &self.matrices).finish()
    }
}

impl UwSystem {
    pub fn new(spaces: Arc<Spaces>, matrices: SystemMatrices, load: Option<Vec<f64>>) -> Result<Self> {
        let recovery = PhiRecovery::new(&matrices)?;
        let dim_v = spaces.dim_v();
        let load = load.unwrap_or_else(|| vec![0.0; dim_v]);
        assert_eq!(load.len(), dim_v);
        let phi_mean = matrices.params.phi_mean;
        let c_u = load.iter().map(|v| -v / phi_mean).collect();
        Ok(UwSystem { spaces, matrices, recovery, load, c_u, stages: Mutex::new(HashMap::new()) })
    }

    pub fn dim_v(&self) -> usize {
        self.spaces.dim_v()
    }

    pub fn phi_mean(&self) -> f64 {
        self.matrices.params.phi_mean
    }

    pub fn split<'a>(&self, y: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        y.split_at(self.dim_v())
    }

    pub fn has_forcing(&self) -> bool {
        self.load.iter().any(|v| *v != 0.0)
    }

    /// `(p, p_hat)` of the state's `w`.
    pub fn recover(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.recovery.recover_phi(self.split(y).0)
    }

    /// `1/2 |p|^2 (+ load.w / Phi)`, `1/2 Phi |u|^2`, `1/2 |phi - phi_hat|^2_tau`.
    ///
    /// With bathymetry the pairing `load.w / Phi` is part of the potential so that
    /// the total is the conserved quantity of the affine system.
    pub fn energy_parts(&self, y: &[f64], p: &[f64], p_hat: &[f64]) -> EnergyParts {
        let (w, u) = self.split(y);
        let kinetic = 0.5 * self.phi_mean() * dot(u, u);
        let bottom: f64 = dot(&self.load, w) / self.phi_mean();
        EnergyParts { kinetic, potential: 0.5 * dot(p, p) + bottom, trace_term: trace_energy(&self.matrices, p, p_hat) }
    }

    pub fn energy(&self, y: &[f64]) -> f64 {
        let (p, ph) = self.recover(y);
        self.energy_parts(y, &p, &ph).total()
    }

    /// Monolithic stage matrix in `[W | U | p | p_hat]`.
    fn stage_matrix(&self, theta: f64) -> SparseMatrix {
        let m = &self.matrices;
        let nv = self.dim_v();
        let nw = m.s.nrows();
        let nm = m.g.nrows();
        let (ow, ou, op, oh) = (0, nv, 2 * nv, 2 * nv + nw);
        let n = oh + nm;
        let phi = self.phi_mean();
        let mut t = TripletBuilder::new(n, n);
        for i in 0..nv {
            t.push(ow + i, ow + i, 1.0);
            t.push(ow + i, ou + i, -theta * phi);
            t.push(ou + i, ou + i, 1.0);
        }
        for (r, c, v) in sparse::entries(&m.a_f) {
            t.push(ou + r, ou + c, -theta * v);
        }
        for (r, c, v) in sparse::entries(&m.b) {
            t.push(ou + r, op + c, -theta * v);
            t.push(op + c, ow + r, v);
        }
        for (r, c, v) in sparse::entries(&m.c) {
            t.push(ou + r, oh + c, theta * v);
            t.push(oh + c, ow + r, -v);
        }
        for i in 0..nw {
            t.push(op + i, op + i, 1.0);
        }
        for (r, c, v) in sparse::entries(&m.s) {
            t.push(op + r, op + c, v);
        }
        for (r, c, v) in sparse::entries(&m.e) {
            t.push(op + r, oh + c, -v);
            t.push(oh + c, op + r, -v);
        }
        for (r, c, v) in sparse::entries(&m.g) {
            t.push(oh + r, oh + c, v);
        }
        t.build()
    }

    fn stage_lu(&self, theta: f64) -> Result<Arc<SparseLu>> {
        let key = theta.to_bits();
        if let Some(lu) = self.stages.lock().expect("stage cache").get(&key) {
            return Ok(lu.clone());
        }
        log::debug!("factorizing (w, u) stage matrix for theta = {theta:e}");
        let lu = Arc::new(SparseLu::new(&self.stage_matrix(theta))?);
        self.stages.lock().expect("stage cache").insert(key, lu.clone());
        Ok(lu)
    }

    /// Number of cached stage factorizations.
    pub fn cached_stages(&self) -> usize {
        self.stages.lock().expect("stage cache").len()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `1/2 (p, p_hat)^T [[S, -E], [-E^T, G]] (p, p_hat)`.
pub(crate) fn trace_energy(m: &SystemMatrices, p: &[f64], p_hat: &[f64]) -> f64 {
    let sp = sparse::matvec(&m.s, p);
    let ep = sparse::matvec(&m.e, p_hat);
    let gp = sparse::matvec(&m.g, p_hat);
    0.5 * (dot(p, &sp) - 2.0 * dot(p, &ep) + dot(p_hat, &gp))
}

impl SemidiscreteSystem for UwSystem {
    fn dim(&self) -> usize {
        2 * self.dim_v()
    }

    fn rhs(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        let nv = self.dim_v();
        let (w, u) = self.split(y);
        let (ow, ou) = out.split_at_mut(nv);
        self.drift(u, ow)?;
        self.kick(w, u, ou)
    }

    fn solve_shifted(&self, theta: f64, r: &[f64]) -> Result<Vec<f64>> {
        let nv = self.dim_v();
        let lu = self.stage_lu(theta)?;
        let n = 2 * nv + self.matrices.s.nrows() + self.matrices.g.nrows();
        let mut rhs = vec![0.0; n];
        rhs[..2 * nv].copy_from_slice(r);
        for (x, c) in rhs[nv..2 * nv].iter_mut().zip(&self.c_u) {
            *x += theta * c;
        }
        let mut x = lu.solve(&rhs);
        x.truncate(2 * nv);
        Ok(x)
    }

    fn partition(&self) -> Option<&dyn PartitionedSystem> {
        Some(self)
    }
}

impl PartitionedSystem for UwSystem {
    fn split(&self) -> usize {
        self.dim_v()
    }

    fn drift(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let phi = self.phi_mean();
        out.iter_mut().zip(u).for_each(|(o, v)| *o = phi * v);
        Ok(())
    }

    fn kick(&self, w: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
        let kw = self.recovery.apply_k(w);
        for ((o, k), c) in out.iter_mut().zip(&kw).zip(&self.c_u) {
            *o = c - k;
        }
        sparse::matvec_add(&self.matrices.a_f, u, 1.0, out);
        Ok(())
    }
}
