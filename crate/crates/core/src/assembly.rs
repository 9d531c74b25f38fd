//! Global HDG operators.
//!
//! With orthonormal bases `z_k` of `V_h`, `phi_i` of `W_h` and `eta_m` of `M_h`:
//!
//! ```text
//! B[k, i]   = (phi_i, div z_k)
//! C[k, m]   = <eta_m, z_k . n>
//! S[i, j]   = tau <phi_j, phi_i>      (boundary of each element)
//! E[i, m]   = tau <eta_m, phi_i>
//! G[m, n]   = tau <eta_n, eta_m>
//! A_f[k, l] = (f z_l^perp, z_k)       with z^perp = (z2, -z1)
//! ```

use crate::fespace::{Accuracy, Spaces};
use crate::mesh::Point2;
use crate::sparse::{SparseMatrix, TripletBuilder};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Mean geopotential height `Phi`.
    pub phi_mean: f64,
    pub f0: f64,
    pub beta: f64,
    pub y_m: f64,
    /// Gravitational acceleration; recorded only, the linear operator does not use it.
    pub g: f64,
    /// HDG stabilization.
    pub tau: f64,
    /// Tangential stabilization of the initialization solve.
    pub alpha: f64,
    /// Bottom friction; only zero is supported.
    pub gamma: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams { phi_mean: 1.0, f0: 0.0, beta: 0.0, y_m: 0.0, g: 1.0, tau: 1.0, alpha: 1.0, gamma: 0.0 }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [("Phi", self.phi_mean), ("g", self.g), ("tau", self.tau), ("alpha", self.alpha)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("f0", self.f0), ("beta", self.beta), ("y_m", self.y_m)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        if self.gamma != 0.0 {
            return Err(Error::InvalidParameter("bottom friction gamma must be 0".into()));
        }
        Ok(())
    }

    /// Coriolis parameter `f0 + beta (y - y_m)`.
    pub fn coriolis(&self, p: Point2) -> f64 {
        self.f0 + self.beta * (p.y - self.y_m)
    }

    pub fn has_rotation(&self) -> bool {
        self.f0 != 0.0 || self.beta != 0.0
    }
}

#[derive(Clone)]
pub struct SystemMatrices {
    pub b: SparseMatrix,
    pub c: SparseMatrix,
    pub s: SparseMatrix,
    pub e: SparseMatrix,
    pub g: SparseMatrix,
    pub a_f: SparseMatrix,
    /// Element blocks of `S`, row-major `nw x nw`.
    pub s_blocks: Vec<Vec<f64>>,
    pub params: PhysicalParams,
}

impl std::fmt::Debug for SystemMatrices {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SystemMatrices")
            .field("dim_v", &self.b.nrows())
            .field("dim_w", &self.b.ncols())
            .field("dim_m", &self.c.ncols())
            .finish()
    }
}

pub fn assemble_all(spaces: &Spaces, params: &PhysicalParams) -> Result<SystemMatrices> {
    params.validate()?;
    let (nw, nm) = (spaces.nw, spaces.nm);
    let (dim_w, dim_v, dim_m) = (spaces.dim_w(), spaces.dim_v(), spaces.dim_m());
    let tau = params.tau;
    let coriolis_accuracy = if params.beta != 0.0 { Accuracy::High } else { Accuracy::Standard };

    let mut tb = TripletBuilder::new(dim_v, dim_w);
    let mut tc = TripletBuilder::new(dim_v, dim_m);
    let mut ts = TripletBuilder::new(dim_w, dim_w);
    let mut te = TripletBuilder::new(dim_w, dim_m);
    let mut tg = TripletBuilder::new(dim_m, dim_m);
    let mut ta = TripletBuilder::new(dim_v, dim_v);
    let mut s_blocks = Vec::with_capacity(spaces.num_elements());

    let mut b_loc = vec![0.0; 2 * nw * nw];
    let mut m_loc = vec![0.0; nw * nw];
    let mut s_loc = vec![0.0; nw * nw];
    let mut e_loc = vec![0.0; nw * nm];
    let mut c_loc = vec![0.0; 2 * nw * nm];
    let mut g_loc = vec![0.0; nm * nm];

    for el in 0..spaces.num_elements() {
        b_loc.fill(0.0);
        s_loc.fill(0.0);
        spaces.for_each_volume_point(el, Accuracy::Standard, |qp| {
            for k in 0..nw {
                for c in 0..2 {
                    let d = qp.weight * qp.grad[k][c];
                    let row = &mut b_loc[(c * nw + k) * nw..(c * nw + k + 1) * nw];
                    row.iter_mut().zip(qp.phi).for_each(|(r, p)| *r += d * p);
                }
            }
        });
        let vrows: Vec<usize> = (0..2).flat_map(|c| (0..nw).map(move |i| (c, i))).map(|(c, i)| spaces.v_dof(el, c, i)).collect();
        let wcols: Vec<usize> = (0..nw).map(|i| spaces.w_dof(el, i)).collect();
        tb.push_block(&vrows, &wcols, &b_loc);

        if params.has_rotation() {
            m_loc.fill(0.0);
            spaces.for_each_volume_point(el, coriolis_accuracy, |qp| {
                let fw = qp.weight * params.coriolis(qp.x);
                for k in 0..nw {
                    for l in 0..nw {
                        m_loc[k * nw + l] += fw * qp.phi[k] * qp.phi[l];
                    }
                }
            });
            mirror_upper(&mut m_loc, nw);
            for k in 0..nw {
                for l in 0..nw {
                    let v = m_loc[k * nw + l];
                    ta.push(spaces.v_dof(el, 0, k), spaces.v_dof(el, 1, l), v);
                    ta.push(spaces.v_dof(el, 1, k), spaces.v_dof(el, 0, l), -v);
                }
            }
        }

        for j in 0..3 {
            e_loc.fill(0.0);
            c_loc.fill(0.0);
            g_loc.fill(0.0);
            let mut facet = 0;
            spaces.for_each_edge_point(el, j, |ep| {
                facet = ep.facet;
                let tw = tau * ep.weight;
                for i in 0..nw {
                    for jj in 0..nw {
                        s_loc[i * nw + jj] += tw * ep.phi[i] * ep.phi[jj];
                    }
                    for m in 0..nm {
                        e_loc[i * nm + m] += tw * ep.phi[i] * ep.eta[m];
                    }
                    for c in 0..2 {
                        let d = ep.weight * ep.phi[i] * [ep.normal.x, ep.normal.y][c];
                        for m in 0..nm {
                            c_loc[(c * nw + i) * nm + m] += d * ep.eta[m];
                        }
                    }
                }
                for m in 0..nm {
                    for n in 0..nm {
                        g_loc[m * nm + n] += tw * ep.eta[m] * ep.eta[n];
                    }
                }
            });
            mirror_upper(&mut g_loc, nm);
            let mcols: Vec<usize> = (0..nm).map(|m| spaces.m_dof(facet, m)).collect();
            te.push_block(&wcols, &mcols, &e_loc);
            tc.push_block(&vrows, &mcols, &c_loc);
            tg.push_block(&mcols, &mcols, &g_loc);
        }
        mirror_upper(&mut s_loc, nw);
        ts.push_block(&wcols, &wcols, &s_loc);
        s_blocks.push(s_loc.clone());
    }

    Ok(SystemMatrices {
        b: tb.build(),
        c: tc.build(),
        s: ts.build(),
        e: te.build(),
        g: tg.build(),
        a_f: ta.build(),
        s_blocks,
        params: *params,
    })
}

/// Copies the upper triangle onto the lower one so roundoff cannot break symmetry.
fn mirror_upper(block: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..i {
            block[i * n + j] = block[j * n + i];
        }
    }
}

/// Load vector with entries `(Phi grad phi_s, z_k)`.
pub fn assemble_bathymetry_load(spaces: &Spaces, grad_phi_s: impl Fn(Point2) -> [f64; 2], phi_mean: f64) -> Vec<f64> {
    let nw = spaces.nw;
    let mut out = vec![0.0; spaces.dim_v()];
    for e in 0..spaces.num_elements() {
        spaces.for_each_volume_point(e, Accuracy::High, |qp| {
            let g = grad_phi_s(qp.x);
            for i in 0..nw {
                out[spaces.v_dof(e, 0, i)] += qp.weight * phi_mean * g[0] * qp.phi[i];
                out[spaces.v_dof(e, 1, i)] += qp.weight * phi_mean * g[1] * qp.phi[i];
            }
        });
    }
    out
}

/// Central-difference gradient, for fields given without an analytic derivative.
pub fn fd_gradient(f: impl Fn(Point2) -> f64, p: Point2, step: f64) -> [f64; 2] {
    let dx = (f(Point2::new(p.x + step, p.y)) - f(Point2::new(p.x - step, p.y))) / (2.0 * step);
    let dy = (f(Point2::new(p.x, p.y + step)) - f(Point2::new(p.x, p.y - step))) / (2.0 * step);
    [dx, dy]
}
