use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::uw::{dot, trace_energy};
use crate::assembly::SystemMatrices;
use crate::fespace::Spaces;
use crate::integrators::SemidiscreteSystem;
use crate::sparse::{self, SparseCholesky, SparseLu, SparseMatrix, TripletBuilder};
use crate::Result;

/// The dissipative `(phi, u)` HDG system
///
/// ```text
/// phi' = -Phi B^T u - S phi + E phi_hat
/// u'   =  B phi - C phi_hat + A_f u + c_u
/// 0    =  Phi C^T u + E^T phi - G phi_hat
/// ```
///
/// Its energy `1/2 |phi|^2 + 1/2 Phi |u|^2` decays at the rate `|phi - phi_hat|^2_tau`.
pub struct PhiuSystem {
    pub spaces: Arc<Spaces>,
    pub matrices: SystemMatrices,
    pub c_u: Vec<f64>,
    g: SparseCholesky,
    stages: Mutex<HashMap<u64, Arc<SparseLu>>>,
}

impl std::fmt::Debug for PhiuSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhiuSystem").field("matrices", &self.matrices).finish()
    }
}

impl PhiuSystem {
    pub fn new(spaces: Arc<Spaces>, matrices: SystemMatrices, load: Option<Vec<f64>>) -> Result<Self> {
        let g = SparseCholesky::new(&matrices.g)?;
        let phi_mean = matrices.params.phi_mean;
        let c_u = match load {
            Some(l) => l.iter().map(|v| -v / phi_mean).collect(),
            None => vec![0.0; spaces.dim_v()],
        };
        Ok(PhiuSystem { spaces, matrices, c_u, g, stages: Mutex::new(HashMap::new()) })
    }

    pub fn dim_w(&self) -> usize {
        self.spaces.dim_w()
    }

    pub fn split<'a>(&self, y: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        y.split_at(self.dim_w())
    }

    /// Trace `phi_hat` from the flux-continuity constraint.
    pub fn trace(&self, phi: &[f64], u: &[f64]) -> Vec<f64> {
        let mut rhs = sparse::matvec_transpose(&self.matrices.e, phi);
        sparse::matvec_transpose_add(&self.matrices.c, u, self.matrices.params.phi_mean, &mut rhs);
        self.g.solve(&rhs)
    }

    pub fn energy(&self, y: &[f64]) -> f64 {
        let (phi, u) = self.split(y);
        0.5 * dot(phi, phi) + 0.5 * self.matrices.params.phi_mean * dot(u, u)
    }

    /// `|phi - phi_hat|^2_tau`, the instantaneous energy loss rate.
    pub fn dissipation_rate(&self, y: &[f64]) -> f64 {
        let (phi, u) = self.split(y);
        let ph = self.trace(phi, u);
        2.0 * trace_energy(&self.matrices, phi, &ph)
    }

    /// Monolithic stage matrix in `[phi | u | phi_hat]`.
    fn stage_matrix(&self, theta: f64) -> SparseMatrix {
        let m = &self.matrices;
        let nw = self.dim_w();
        let nv = self.spaces.dim_v();
        let nm = m.g.nrows();
        let (of, ou, oh) = (0, nw, nw + nv);
        let phi_mean = m.params.phi_mean;
        let mut t = TripletBuilder::new(oh + nm, oh + nm);
        for i in 0..nw {
            t.push(of + i, of + i, 1.0);
        }
        for i in 0..nv {
            t.push(ou + i, ou + i, 1.0);
        }
        for (r, c, v) in sparse::entries(&m.s) {
            t.push(of + r, of + c, theta * v);
        }
        for (r, c, v) in sparse::entries(&m.e) {
            t.push(of + r, oh + c, -theta * v);
            t.push(oh + c, of + r, -v);
        }
        for (r, c, v) in sparse::entries(&m.b) {
            t.push(of + c, ou + r, theta * phi_mean * v);
            t.push(ou + r, of + c, -theta * v);
        }
        for (r, c, v) in sparse::entries(&m.c) {
            t.push(ou + r, oh + c, theta * v);
            t.push(oh + c, ou + r, -phi_mean * v);
        }
        for (r, c, v) in sparse::entries(&m.a_f) {
            t.push(ou + r, ou + c, -theta * v);
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
        log::debug!("factorizing (phi, u) stage matrix for theta = {theta:e}");
        let lu = Arc::new(SparseLu::new(&self.stage_matrix(theta))?);
        self.stages.lock().expect("stage cache").insert(key, lu.clone());
        Ok(lu)
    }
}

impl SemidiscreteSystem for PhiuSystem {
    fn dim(&self) -> usize {
        self.dim_w() + self.spaces.dim_v()
    }

    fn rhs(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        let m = &self.matrices;
        let (phi, u) = self.split(y);
        let ph = self.trace(phi, u);
        let (of, ou) = out.split_at_mut(self.dim_w());
        let sphi = sparse::matvec(&m.s, phi);
        of.iter_mut().zip(&sphi).for_each(|(o, s)| *o = -s);
        sparse::matvec_add(&m.e, &ph, 1.0, of);
        sparse::matvec_transpose_add(&m.b, u, -m.params.phi_mean, of);
        ou.copy_from_slice(&self.c_u);
        sparse::matvec_add(&m.b, phi, 1.0, ou);
        sparse::matvec_add(&m.c, &ph, -1.0, ou);
        sparse::matvec_add(&m.a_f, u, 1.0, ou);
        Ok(())
    }

    fn solve_shifted(&self, theta: f64, r: &[f64]) -> Result<Vec<f64>> {
        let n0 = self.dim();
        let lu = self.stage_lu(theta)?;
        let mut rhs = vec![0.0; n0 + self.matrices.g.nrows()];
        rhs[..n0].copy_from_slice(r);
        for (x, c) in rhs[self.dim_w()..n0].iter_mut().zip(&self.c_u) {
            *x += theta * c;
        }
        let mut x = lu.solve(&rhs);
        x.truncate(n0);
        Ok(x)
    }
}
