//! Steady solves: geopotential recovery from `w` and the vector-Laplacian
//! initialization.
//!
//! Recovery solves, for given `w`,
//!
//! ```text
//! (I + S) p - E p_hat = -B^T w
//!  -E^T p + G p_hat   =  C^T w
//! ```
//!
//! by eliminating `p` element by element and factorizing the SPD trace
//! system `H = G - E^T (I + S)^{-1} E` once.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::assembly::SystemMatrices;
use crate::fespace::Spaces;
use crate::mesh::Point2;
use crate::sparse::{self, SparseCholesky, SparseLu, SparseMatrix, TripletBuilder};
use crate::{Error, Result};

struct ElementBlock {
    /// `(I + S_e)^{-1}`, row-major.
    inv: Vec<f64>,
}

pub struct PhiRecovery {
    nw: usize,
    blocks: Vec<ElementBlock>,
    h: SparseCholesky,
    b: SparseMatrix,
    c: SparseMatrix,
    e: SparseMatrix,
}

impl std::fmt::Debug for PhiRecovery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhiRecovery").field("elements", &self.blocks.len()).finish()
    }
}

impl PhiRecovery {
    pub fn new(m: &SystemMatrices) -> Result<Self> {
        let ne = m.s_blocks.len();
        let dim_w = m.s.nrows();
        if ne == 0 || dim_w % ne != 0 {
            return Err(Error::InvalidParameter("stabilization blocks do not match W_h".into()));
        }
        let nw = dim_w / ne;

        let mut e_rows: Vec<BTreeMap<usize, Vec<f64>>> = (0..ne).map(|_| BTreeMap::new()).collect();
        for (r, c, v) in sparse::entries(&m.e) {
            let row = e_rows[r / nw].entry(c).or_insert_with(|| vec![0.0; nw]);
            row[r % nw] += v;
        }

        let dim_m = m.g.nrows();
        let mut th = TripletBuilder::new(dim_m, dim_m);
        for (r, c, v) in sparse::entries(&m.g) {
            th.push(r, c, v);
        }
        let mut blocks = Vec::with_capacity(ne);
        for (el, s_loc) in m.s_blocks.iter().enumerate() {
            let mut a = DMatrix::from_row_slice(nw, nw, s_loc);
            for i in 0..nw {
                a[(i, i)] += 1.0;
            }
            let chol = a
                .cholesky()
                .ok_or_else(|| Error::Factorization(format!("I + S is not positive definite on element {el}")))?;
            let inv = chol.inverse();
            let cols: Vec<usize> = e_rows[el].keys().copied().collect();
            let nc = cols.len();
            let mut e_block = vec![0.0; nw * nc];
            for (j, col) in e_rows[el].values().enumerate() {
                for i in 0..nw {
                    e_block[i * nc + j] = col[i];
                }
            }
            let eb = DMatrix::from_row_slice(nw, nc, &e_block);
            let local = eb.transpose() * &inv * &eb;
            for (a, &ca) in cols.iter().enumerate() {
                for (b, &cb) in cols.iter().enumerate() {
                    th.push(ca, cb, -local[(a, b)]);
                }
            }
            let inv_rm: Vec<f64> = (0..nw * nw).map(|idx| inv[(idx / nw, idx % nw)]).collect();
            blocks.push(ElementBlock { inv: inv_rm });
        }
        let h = SparseCholesky::new(&th.build())?;
        Ok(PhiRecovery { nw, blocks, h, b: m.b.clone(), c: m.c.clone(), e: m.e.clone() })
    }

    fn apply_inv(&self, x: &mut [f64]) {
        let nw = self.nw;
        let mut tmp = vec![0.0; nw];
        for (el, blk) in self.blocks.iter().enumerate() {
            let seg = &mut x[el * nw..(el + 1) * nw];
            for (i, t) in tmp.iter_mut().enumerate() {
                *t = blk.inv[i * nw..(i + 1) * nw].iter().zip(seg.iter()).map(|(a, b)| a * b).sum();
            }
            seg.copy_from_slice(&tmp);
        }
    }

    /// Solves `(I+S) p - E p_hat = a`, `-E^T p + G p_hat = b`.
    pub fn solve_block(&self, a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut inv_a = a.to_vec();
        self.apply_inv(&mut inv_a);
        let mut rhs = b.to_vec();
        sparse::matvec_transpose_add(&self.e, &inv_a, 1.0, &mut rhs);
        let p_hat = self.h.solve(&rhs);
        let mut p = a.to_vec();
        sparse::matvec_add(&self.e, &p_hat, 1.0, &mut p);
        self.apply_inv(&mut p);
        (p, p_hat)
    }

    /// Geopotential coefficients `(p, p_hat)` of a given `w`.
    pub fn recover_phi(&self, w: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let a = sparse::matvec_transpose(&self.b, w).into_iter().map(|v| -v).collect::<Vec<_>>();
        let b = sparse::matvec_transpose(&self.c, w);
        self.solve_block(&a, &b)
    }

    /// `K w = -B p + C p_hat`.
    pub fn apply_k(&self, w: &[f64]) -> Vec<f64> {
        let (p, p_hat) = self.recover_phi(w);
        self.k_from_phi(&p, &p_hat)
    }

    pub fn k_from_phi(&self, p: &[f64], p_hat: &[f64]) -> Vec<f64> {
        let mut out = sparse::matvec(&self.c, p_hat);
        sparse::matvec_add(&self.b, p, -1.0, &mut out);
        out
    }
}

pub fn recover_phi(recovery: &PhiRecovery, w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    recovery.recover_phi(w)
}

pub fn apply_k(recovery: &PhiRecovery, w: &[f64]) -> Vec<f64> {
    recovery.apply_k(w)
}

/// Discrete solution of the vector-Laplacian problem.
#[derive(Clone, Debug)]
pub struct InitSolution {
    pub sigma: Vec<f64>,
    pub phi: Vec<f64>,
    pub w: Vec<f64>,
    pub phi_hat: Vec<f64>,
    /// Coefficients of `w_check = lambda t_F` in `N_h^perp`.
    pub w_check: Vec<f64>,
    /// `|A x - b| / max(|b|, 1e-300)` of the monolithic system.
    pub residual: f64,
}

/// Monolithic HDG system of the vector Laplacian with magnetic boundary conditions.
pub struct VectorLaplacian {
    matrix: SparseMatrix,
    lu: SparseLu,
    dims: [usize; 5],
}

impl VectorLaplacian {
    pub fn new(spaces: &Spaces, m: &SystemMatrices) -> Result<Self> {
        let alpha = m.params.alpha;
        let (nw, nm) = (spaces.nw, spaces.nm);
        let (dim_w, dim_v, dim_m) = (spaces.dim_w(), spaces.dim_v(), spaces.dim_m());
        let o_sig = 0;
        let o_phi = dim_w;
        let o_w = 2 * dim_w;
        let o_hat = 2 * dim_w + dim_v;
        let o_lam = o_hat + dim_m;
        let n = o_lam + dim_m;
        let mut t = TripletBuilder::new(n, n);

        // Unknowns: [sigma | phi | w | phi_hat | lambda]. The phi and phi_hat rows repeat the
        // recovery constraints; the w rows are the weak vector Laplacian.
        for i in 0..dim_w {
            t.push(o_phi + i, o_phi + i, 1.0);
        }
        for (r, c, v) in sparse::entries(&m.s) {
            t.push(o_phi + r, o_phi + c, v);
        }
        for (r, c, v) in sparse::entries(&m.e) {
            t.push(o_phi + r, o_hat + c, -v);
            t.push(o_hat + c, o_phi + r, v);
        }
        for (r, c, v) in sparse::entries(&m.b) {
            t.push(o_phi + c, o_w + r, v);
            t.push(o_w + r, o_phi + c, -v);
        }
        for (r, c, v) in sparse::entries(&m.c) {
            t.push(o_hat + c, o_w + r, v);
            t.push(o_w + r, o_hat + c, v);
        }
        for (r, c, v) in sparse::entries(&m.g) {
            t.push(o_hat + r, o_hat + c, -v);
        }

        for el in 0..spaces.num_elements() {
            let wrow = |i: usize| o_sig + spaces.w_dof(el, i);
            let vdof = |c: usize, i: usize| o_w + spaces.v_dof(el, c, i);
            // (sigma, chi) - (w, curl chi)
            t.push_block(&(0..nw).map(wrow).collect::<Vec<_>>(), &(0..nw).map(wrow).collect::<Vec<_>>(), &identity(nw));
            let mut curl = vec![0.0; nw * 2 * nw];
            spaces.for_each_volume_point(el, crate::fespace::Accuracy::Standard, |qp| {
                for i in 0..nw {
                    for k in 0..nw {
                        // curl chi_i = (d_y chi_i, -d_x chi_i)
                        curl[i * 2 * nw + k] += qp.weight * qp.phi[k] * qp.grad[i][1];
                        curl[i * 2 * nw + nw + k] -= qp.weight * qp.phi[k] * qp.grad[i][0];
                    }
                }
            });
            for i in 0..nw {
                for c in 0..2 {
                    for k in 0..nw {
                        let v = curl[i * 2 * nw + c * nw + k];
                        t.push(wrow(i), vdof(c, k), -v);
                    }
                }
            }
            // (sigma, rot z_k) with rot(phi e_0) = -d_y phi, rot(phi e_1) = d_x phi
            let mut rot = vec![0.0; 2 * nw * nw];
            spaces.for_each_volume_point(el, crate::fespace::Accuracy::Standard, |qp| {
                for k in 0..nw {
                    for i in 0..nw {
                        rot[k * nw + i] -= qp.weight * qp.grad[k][1] * qp.phi[i];
                        rot[(nw + k) * nw + i] += qp.weight * qp.grad[k][0] * qp.phi[i];
                    }
                }
            });
            for c in 0..2 {
                for k in 0..nw {
                    for i in 0..nw {
                        t.push(vdof(c, k), wrow(i), rot[(c * nw + k) * nw + i]);
                    }
                }
            }

            for j in 0..3 {
                let mut facet = 0;
                // local blocks over the edge
                let mut chi_lam = vec![0.0; nw * nm]; // <lambda t.n_perp, chi>
                let mut z_sig = vec![0.0; 2 * nw * nw]; // <sigma, z.n_perp>
                let mut z_w = vec![0.0; 2 * nw * 2 * nw]; // alpha^-1 <w.n_perp, z.n_perp>
                let mut z_lam = vec![0.0; 2 * nw * nm]; // -alpha^-1 <lambda t.n_perp, z.n_perp>
                let mut mu_sig = vec![0.0; nm * nw]; // <sigma, mu t.n_perp>
                let mut mu_w = vec![0.0; nm * 2 * nw];
                let mut mu_lam = vec![0.0; nm * nm];
                spaces.for_each_edge_point(el, j, |ep| {
                    facet = ep.facet;
                    let tang = spaces.trace_tangent(ep.facet);
                    let np = ep.normal.perp();
                    let tn = tang.dot(np);
                    let npc = [np.x, np.y];
                    let wq = ep.weight;
                    for i in 0..nw {
                        for m in 0..nm {
                            chi_lam[i * nm + m] += wq * tn * ep.eta[m] * ep.phi[i];
                        }
                    }
                    for c in 0..2 {
                        for k in 0..nw {
                            let zk = wq * ep.phi[k] * npc[c];
                            for i in 0..nw {
                                z_sig[(c * nw + k) * nw + i] += zk * ep.phi[i];
                            }
                            for c2 in 0..2 {
                                for l in 0..nw {
                                    z_w[(c * nw + k) * 2 * nw + c2 * nw + l] += zk * ep.phi[l] * npc[c2] / alpha;
                                }
                            }
                            for m in 0..nm {
                                z_lam[(c * nw + k) * nm + m] -= zk * tn * ep.eta[m] / alpha;
                            }
                        }
                    }
                    for m in 0..nm {
                        let mu = wq * ep.eta[m] * tn;
                        for i in 0..nw {
                            mu_sig[m * nw + i] += mu * ep.phi[i];
                        }
                        for c in 0..2 {
                            for l in 0..nw {
                                mu_w[m * 2 * nw + c * nw + l] += mu * ep.phi[l] * npc[c] / alpha;
                            }
                        }
                        for n2 in 0..nm {
                            mu_lam[m * nm + n2] -= mu * tn * ep.eta[n2] / alpha;
                        }
                    }
                });
                let lam: Vec<usize> = (0..nm).map(|m| o_lam + spaces.m_dof(facet, m)).collect();
                let wr: Vec<usize> = (0..nw).map(wrow).collect();
                let vr: Vec<usize> = (0..2).flat_map(|c| (0..nw).map(move |k| (c, k))).map(|(c, k)| vdof(c, k)).collect();
                t.push_block(&wr, &lam, &chi_lam);
                t.push_block(&vr, &wr, &z_sig);
                t.push_block(&vr, &vr, &z_w);
                t.push_block(&vr, &lam, &z_lam);
                t.push_block(&lam, &wr, &mu_sig);
                t.push_block(&lam, &vr, &mu_w);
                t.push_block(&lam, &lam, &mu_lam);
            }
        }
        let matrix = t.build();
        let lu = SparseLu::new(&matrix)?;
        Ok(VectorLaplacian { matrix, lu, dims: [dim_w, dim_w, dim_v, dim_m, dim_m] })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Solves with load `(f, z_k)` given as a `V_h` vector.
    pub fn solve_load(&self, load: &[f64]) -> InitSolution {
        let [dim_w, _, dim_v, dim_m, _] = self.dims;
        let n = self.matrix.nrows();
        let mut rhs = vec![0.0; n];
        rhs[2 * dim_w..2 * dim_w + dim_v].copy_from_slice(load);
        let x = self.lu.solve(&rhs);
        let ax = sparse::matvec(&self.matrix, &x);
        let rnorm = ax.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let bnorm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let residual = if bnorm > 0.0 { rnorm / bnorm } else { rnorm };
        let mut at = 0;
        let mut take = |len: usize| {
            let v = x[at..at + len].to_vec();
            at += len;
            v
        };
        InitSolution {
            sigma: take(dim_w),
            phi: take(dim_w),
            w: take(dim_v),
            phi_hat: take(dim_m),
            w_check: take(dim_m),
            residual,
        }
    }
}

fn identity(n: usize) -> Vec<f64> {
    (0..n * n).map(|i| f64::from(u8::from(i / n == i % n))).collect()
}

/// Solves the vector Laplacian for `curl rot w - grad div w = f`.
pub fn solve_vector_laplacian(spaces: &Spaces, m: &SystemMatrices, f: impl Fn(Point2) -> [f64; 2]) -> Result<InitSolution> {
    let system = VectorLaplacian::new(spaces, m)?;
    let load = spaces.project_vector(f);
    Ok(system.solve_load(&load))
}

/// Initial `(w, u)`: `w` from the vector Laplacian with `f = grad phi_0`, `u` by L2 projection.
pub fn initialize_state(
    spaces: &Spaces,
    m: &SystemMatrices,
    grad_phi0: impl Fn(Point2) -> [f64; 2],
    u0: impl Fn(Point2) -> [f64; 2],
) -> Result<(Vec<f64>, Vec<f64>, InitSolution)> {
    let init = solve_vector_laplacian(spaces, m, grad_phi0)?;
    log::debug!("vector Laplacian residual {:e}", init.residual);
    let u = spaces.project_vector(u0);
    Ok((init.w.clone(), u, init))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_all, PhysicalParams};
    use crate::mesh::{generate_uniform_square, Rect};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn setup(levels: u32, k: usize) -> (Spaces, SystemMatrices) {
        let mesh = generate_uniform_square(levels, Rect::unit()).unwrap();
        let spaces = Spaces::new(Arc::new(mesh), k).unwrap();
        let m = assemble_all(&spaces, &PhysicalParams::default()).unwrap();
        (spaces, m)
    }

    fn w_exact(p: Point2) -> [f64; 2] {
        let s = -1.0 / (2.0 * PI);
        [s * (PI * p.x).sin() * (PI * p.y).cos(), s * (PI * p.x).cos() * (PI * p.y).sin()]
    }

    fn phi_exact(p: Point2) -> f64 {
        (PI * p.x).cos() * (PI * p.y).cos()
    }

    #[test]
    fn zero_w_gives_zero_phi() {
        let (spaces, m) = setup(2, 1);
        let r = PhiRecovery::new(&m).unwrap();
        let (p, ph) = r.recover_phi(&vec![0.0; spaces.dim_v()]);
        assert!(p.iter().chain(&ph).all(|&v| v == 0.0));
    }

    #[test]
    fn recovery_satisfies_constraints() {
        let (spaces, m) = setup(2, 2);
        let r = PhiRecovery::new(&m).unwrap();
        let w: Vec<f64> = (0..spaces.dim_v()).map(|i| ((i * 37 % 101) as f64 / 50.0) - 1.0).collect();
        let (p, ph) = r.recover_phi(&w);
        let mut r1 = sparse::matvec(&m.s, &p);
        r1.iter_mut().zip(&p).for_each(|(a, b)| *a += b);
        sparse::matvec_add(&m.e, &ph, -1.0, &mut r1);
        sparse::matvec_transpose_add(&m.b, &w, 1.0, &mut r1);
        let mut r2 = sparse::matvec(&m.g, &ph);
        sparse::matvec_transpose_add(&m.e, &p, -1.0, &mut r2);
        sparse::matvec_transpose_add(&m.c, &w, -1.0, &mut r2);
        let scale = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let res = r1.iter().chain(&r2).map(|v| v * v).sum::<f64>().sqrt();
        assert!(res < 1e-11 * scale);
        // mass identity
        assert!(spaces.integral_scalar(&p).abs() < 1e-12 * scale);
    }

    #[test]
    fn recovered_phi_approximates_minus_div_w() {
        let (spaces, m) = setup(3, 3);
        let r = PhiRecovery::new(&m).unwrap();
        let w = spaces.project_vector(w_exact);
        let (p, _) = r.recover_phi(&w);
        let err = spaces.l2_error_scalar(&p, phi_exact);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn vector_laplacian_zero_load() {
        let (spaces, m) = setup(2, 1);
        let init = solve_vector_laplacian(&spaces, &m, |_| [0.0, 0.0]).unwrap();
        let all = init.sigma.iter().chain(&init.phi).chain(&init.w).chain(&init.phi_hat).chain(&init.w_check);
        assert!(all.into_iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn vector_laplacian_matches_manufactured_fields() {
        let (spaces, m) = setup(3, 2);
        let grad_phi = |p: Point2| [-PI * (PI * p.x).sin() * (PI * p.y).cos(), -PI * (PI * p.x).cos() * (PI * p.y).sin()];
        let init = solve_vector_laplacian(&spaces, &m, grad_phi).unwrap();
        assert!(init.residual < 1e-10, "{}", init.residual);
        assert!(spaces.l2_error_scalar(&init.sigma, |_| 0.0) < 1e-3);
        assert!(spaces.l2_error_vector(&init.w, w_exact) < 1e-3);
        assert!(spaces.l2_error_scalar(&init.phi, phi_exact) < 1e-3);
        // the recovery reproduces the init geopotential
        let r = PhiRecovery::new(&m).unwrap();
        let (p, _) = r.recover_phi(&init.w);
        let diff = p.iter().zip(&init.phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }
}
