//! Discrete spaces: `W_h` (scalar), `V_h` (vector), `M_h` (facet traces) and
//! the tangential trace space `N_h^perp`.
//!
//! Degree-of-freedom layout:
//!
//! * `W_h`: `e * nw + i`
//! * `V_h`: `e * 2 nw + c * nw + i` (component `c` of the vector basis)
//! * `M_h`, `N_h^perp`: `slot * (k + 1) + m`, where `slot` numbers the facets
//!   that own trace unknowns (periodic slaves borrow their master's slot)
//!
//! `N_h^perp` members are `lambda(s) t_F` with `t_F` the unit tangent of the
//! owning facet, so they are normal-free and single valued by construction.

mod basis;
mod quadrature;

use std::sync::Arc;

pub use basis::{legendre_unit, scalar_dim, ReferenceBasis, MAX_DEGREE};
pub use quadrature::{gauss_legendre, quadrature, Domain, QuadratureRule, MAX_QUADRATURE_DEGREE};

use crate::mesh::{Mesh, Point2};
use crate::{Error, Result};

/// Affine map `x = origin + J xi` from the reference triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub origin: Point2,
    pub jac: [[f64; 2]; 2],
    pub inv: [[f64; 2]; 2],
    pub area: f64,
    /// `1 / sqrt(2 |K|)`, the factor turning reference basis values into physical ones.
    pub scale: f64,
}

impl ElementGeometry {
    pub fn new(v: [Point2; 3]) -> Result<Self> {
        let a = v[1] - v[0];
        let b = v[2] - v[0];
        let det = a.cross(b);
        if !(det > 0.0) {
            return Err(Error::Mesh(format!("element with nonpositive Jacobian {det}")));
        }
        let jac = [[a.x, b.x], [a.y, b.y]];
        let inv = [[b.y / det, -b.x / det], [-a.y / det, a.x / det]];
        let area = 0.5 * det;
        Ok(ElementGeometry { origin: v[0], jac, inv, area, scale: 1.0 / det.sqrt() })
    }

    pub fn to_physical(&self, xi: [f64; 2]) -> Point2 {
        let j = &self.jac;
        Point2::new(
            self.origin.x + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin.y + j[1][0] * xi[0] + j[1][1] * xi[1],
        )
    }

    pub fn to_reference(&self, p: Point2) -> [f64; 2] {
        let d = p - self.origin;
        let m = &self.inv;
        [m[0][0] * d.x + m[0][1] * d.y, m[1][0] * d.x + m[1][1] * d.y]
    }

    /// Physical gradient `J^{-T} g` of a reference gradient, times `scale`.
    pub fn physical_grad(&self, g: [f64; 2]) -> [f64; 2] {
        let m = &self.inv;
        [
            self.scale * (m[0][0] * g[0] + m[1][0] * g[1]),
            self.scale * (m[0][1] * g[0] + m[1][1] * g[1]),
        ]
    }
}

/// Reference point of local edge `j` at parameter `t` (edge `j` runs from vertex `j` to `j + 1`).
pub fn reference_edge_point(j: usize, t: f64) -> [f64; 2] {
    match j {
        0 => [t, 0.0],
        1 => [1.0 - t, t],
        2 => [0.0, 1.0 - t],
        _ => unreachable!("triangles have three edges"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Accuracy {
    /// Degree `2k + 3`.
    Standard,
    /// Degree `2k + 6`, for projections, error norms and variable coefficients.
    High,
}

#[derive(Clone, Debug)]
struct Table {
    rule: QuadratureRule,
    vals: Vec<f64>,
    grads: Vec<[f64; 2]>,
}

impl Table {
    fn new(basis: &ReferenceBasis, rule: QuadratureRule, points: &[[f64; 2]]) -> Self {
        let n = basis.dim();
        let mut vals = vec![0.0; points.len() * n];
        let mut grads = vec![[0.0; 2]; points.len() * n];
        for (q, &p) in points.iter().enumerate() {
            basis.eval_with_grad(p, &mut vals[q * n..(q + 1) * n], &mut grads[q * n..(q + 1) * n]);
        }
        Table { rule, vals, grads }
    }
}

/// Quadrature point on an element with physical basis data.
pub struct VolumePoint<'a> {
    pub x: Point2,
    pub weight: f64,
    pub phi: &'a [f64],
    pub grad: &'a [[f64; 2]],
}

/// Quadrature point on local edge `j` of an element.
pub struct EdgePoint<'a> {
    pub x: Point2,
    pub weight: f64,
    /// Outward unit normal of the element.
    pub normal: Point2,
    pub facet: usize,
    /// Element basis values.
    pub phi: &'a [f64],
    /// Trace basis values in the owning facet's parametrization.
    pub eta: &'a [f64],
}

#[derive(Clone, Debug)]
pub struct Spaces {
    pub mesh: Arc<Mesh>,
    pub k: usize,
    pub basis: ReferenceBasis,
    pub geometry: Vec<ElementGeometry>,
    /// Scalar basis size per element.
    pub nw: usize,
    /// Trace basis size per facet.
    pub nm: usize,
    trace_slot: Vec<usize>,
    trace_flip: Vec<bool>,
    slot_facet: Vec<usize>,
    standard: Table,
    high: Table,
    edges: [Table; 3],
}

impl Spaces {
    pub fn new(mesh: Arc<Mesh>, k: usize) -> Result<Self> {
        let basis = ReferenceBasis::new(k)?;
        let geometry = (0..mesh.num_elements())
            .map(|e| ElementGeometry::new(mesh.vertices(e)))
            .collect::<Result<Vec<_>>>()?;

        let mut trace_slot = vec![usize::MAX; mesh.num_facets()];
        let mut trace_flip = vec![false; mesh.num_facets()];
        let mut is_slave = vec![false; mesh.num_facets()];
        for pair in &mesh.periodic_pairs {
            is_slave[pair.slave] = true;
        }
        let mut slot_facet = Vec::new();
        for f in 0..mesh.num_facets() {
            if !is_slave[f] {
                trace_slot[f] = slot_facet.len();
                slot_facet.push(f);
            }
        }
        for pair in &mesh.periodic_pairs {
            trace_slot[pair.slave] = trace_slot[pair.master];
            trace_flip[pair.slave] = pair.reversed;
        }

        let vol = |degree: usize| -> Result<Table> {
            let rule = quadrature(Domain::Triangle, degree)?;
            let pts = rule.points.clone();
            Ok(Table::new(&basis, rule, &pts))
        };
        let standard = vol(2 * k + 3)?;
        let high = vol(2 * k + 6)?;
        let seg = quadrature(Domain::Segment, 2 * k + 3)?;
        let edge = |j: usize| {
            let pts: Vec<[f64; 2]> = seg.points.iter().map(|p| reference_edge_point(j, p[0])).collect();
            Table::new(&basis, seg.clone(), &pts)
        };
        let edges = [edge(0), edge(1), edge(2)];

        Ok(Spaces {
            nw: basis.dim(),
            nm: k + 1,
            mesh,
            k,
            basis,
            geometry,
            trace_slot,
            trace_flip,
            slot_facet,
            standard,
            high,
            edges,
        })
    }

    pub fn num_elements(&self) -> usize {
        self.geometry.len()
    }

    pub fn dim_w(&self) -> usize {
        self.num_elements() * self.nw
    }

    pub fn dim_v(&self) -> usize {
        2 * self.dim_w()
    }

    pub fn dim_m(&self) -> usize {
        self.slot_facet.len() * self.nm
    }

    pub fn num_trace_slots(&self) -> usize {
        self.slot_facet.len()
    }

    #[inline]
    pub fn w_dof(&self, e: usize, i: usize) -> usize {
        e * self.nw + i
    }

    #[inline]
    pub fn v_dof(&self, e: usize, c: usize, i: usize) -> usize {
        e * 2 * self.nw + c * self.nw + i
    }

    #[inline]
    pub fn m_dof(&self, facet: usize, m: usize) -> usize {
        self.trace_slot[facet] * self.nm + m
    }

    pub fn trace_slot(&self, facet: usize) -> usize {
        self.trace_slot[facet]
    }

    /// Facet that owns trace slot `slot`.
    pub fn slot_facet(&self, slot: usize) -> usize {
        self.slot_facet[slot]
    }

    /// Unit tangent carried by `N_h^perp` functions on `facet`.
    pub fn trace_tangent(&self, facet: usize) -> Point2 {
        self.mesh.facets[self.slot_facet[self.trace_slot[facet]]].tangent
    }

    /// Parameter in the owning facet's frame for parameter `t` along local edge `j` of `e`.
    pub fn owner_parameter(&self, e: usize, j: usize, t: f64) -> f64 {
        let ef = self.mesh.element_facets[e][j];
        let mut s = if ef.sign > 0.0 { t } else { 1.0 - t };
        if self.trace_flip[ef.facet] {
            s = 1.0 - s;
        }
        s
    }

    /// Trace basis values at parameter `s` of the owning facet of `facet`.
    pub fn trace_basis(&self, facet: usize, s: f64, out: &mut [f64]) {
        legendre_unit(self.k, s, out);
        let inv = 1.0 / self.mesh.facets[facet].length.sqrt();
        out.iter_mut().take(self.nm).for_each(|v| *v *= inv);
    }

    pub fn rule(&self, accuracy: Accuracy) -> &QuadratureRule {
        match accuracy {
            Accuracy::Standard => &self.standard.rule,
            Accuracy::High => &self.high.rule,
        }
    }

    pub fn for_each_volume_point(&self, e: usize, accuracy: Accuracy, mut f: impl FnMut(&VolumePoint)) {
        let table = match accuracy {
            Accuracy::Standard => &self.standard,
            Accuracy::High => &self.high,
        };
        let g = &self.geometry[e];
        let n = self.nw;
        let mut phi = vec![0.0; n];
        let mut grad = vec![[0.0; 2]; n];
        for (q, (p, w)) in table.rule.points.iter().zip(&table.rule.weights).enumerate() {
            for i in 0..n {
                phi[i] = g.scale * table.vals[q * n + i];
                grad[i] = g.physical_grad(table.grads[q * n + i]);
            }
            f(&VolumePoint { x: g.to_physical(*p), weight: w * 2.0 * g.area, phi: &phi, grad: &grad });
        }
    }

    pub fn for_each_edge_point(&self, e: usize, j: usize, mut f: impl FnMut(&EdgePoint)) {
        let table = &self.edges[j];
        let g = &self.geometry[e];
        let ef = self.mesh.element_facets[e][j];
        let facet = &self.mesh.facets[ef.facet];
        let normal = facet.normal * ef.sign;
        let n = self.nw;
        let mut phi = vec![0.0; n];
        let mut eta = vec![0.0; self.nm];
        for (q, (p, w)) in table.rule.points.iter().zip(&table.rule.weights).enumerate() {
            for i in 0..n {
                phi[i] = g.scale * table.vals[q * n + i];
            }
            let t = p[0];
            self.trace_basis(ef.facet, self.owner_parameter(e, j, t), &mut eta);
            f(&EdgePoint {
                x: g.to_physical(reference_edge_point(j, t)),
                weight: w * facet.length,
                normal,
                facet: ef.facet,
                phi: &phi,
                eta: &eta,
            });
        }
    }

    /// L2 projection onto `W_h`.
    pub fn project_scalar(&self, f: impl Fn(Point2) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_w()];
        for e in 0..self.num_elements() {
            let block = &mut out[e * self.nw..(e + 1) * self.nw];
            self.for_each_volume_point(e, Accuracy::High, |qp| {
                let v = f(qp.x) * qp.weight;
                block.iter_mut().zip(qp.phi).for_each(|(b, p)| *b += v * p);
            });
        }
        out
    }

    /// L2 projection onto `V_h`.
    pub fn project_vector(&self, f: impl Fn(Point2) -> [f64; 2]) -> Vec<f64> {
        let nw = self.nw;
        let mut out = vec![0.0; self.dim_v()];
        for e in 0..self.num_elements() {
            let block = &mut out[2 * e * nw..2 * (e + 1) * nw];
            self.for_each_volume_point(e, Accuracy::High, |qp| {
                let v = f(qp.x);
                for i in 0..nw {
                    block[i] += qp.weight * v[0] * qp.phi[i];
                    block[nw + i] += qp.weight * v[1] * qp.phi[i];
                }
            });
        }
        out
    }

    fn reference_point(&self, e: usize, p: Point2) -> Result<[f64; 2]> {
        if !self.mesh.contains(e, p) {
            return Err(Error::PointOutside { element: e, x: p.x, y: p.y });
        }
        Ok(self.geometry[e].to_reference(p))
    }

    fn physical_data(&self, e: usize, xi: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let g = &self.geometry[e];
        let mut v = vec![0.0; self.nw];
        let mut d = vec![[0.0; 2]; self.nw];
        self.basis.eval_with_grad(xi, &mut v, &mut d);
        v.iter_mut().for_each(|x| *x *= g.scale);
        d.iter_mut().for_each(|x| *x = g.physical_grad(*x));
        (v, d)
    }

    /// Value of a `W_h` function at a reference point of element `e`.
    pub fn eval_scalar_reference(&self, coeffs: &[f64], e: usize, xi: [f64; 2]) -> f64 {
        let mut v = vec![0.0; self.nw];
        self.basis.eval(xi, &mut v);
        let c = &coeffs[e * self.nw..(e + 1) * self.nw];
        self.geometry[e].scale * v.iter().zip(c).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Value of a `V_h` function at a reference point of element `e`.
    pub fn eval_vector_reference(&self, coeffs: &[f64], e: usize, xi: [f64; 2]) -> [f64; 2] {
        let nw = self.nw;
        let mut v = vec![0.0; nw];
        self.basis.eval(xi, &mut v);
        let c = &coeffs[2 * e * nw..2 * (e + 1) * nw];
        let s = self.geometry[e].scale;
        let x: f64 = v.iter().zip(&c[..nw]).map(|(a, b)| a * b).sum();
        let y: f64 = v.iter().zip(&c[nw..]).map(|(a, b)| a * b).sum();
        [s * x, s * y]
    }

    pub fn eval_scalar(&self, coeffs: &[f64], e: usize, p: Point2) -> Result<f64> {
        let xi = self.reference_point(e, p)?;
        Ok(self.eval_scalar_reference(coeffs, e, xi))
    }

    pub fn eval_grad(&self, coeffs: &[f64], e: usize, p: Point2) -> Result<[f64; 2]> {
        let (_, d) = self.physical_data(e, self.reference_point(e, p)?);
        let c = &coeffs[e * self.nw..(e + 1) * self.nw];
        Ok(d.iter().zip(c).fold([0.0; 2], |acc, (g, c)| [acc[0] + c * g[0], acc[1] + c * g[1]]))
    }

    pub fn eval_vector(&self, coeffs: &[f64], e: usize, p: Point2) -> Result<[f64; 2]> {
        let xi = self.reference_point(e, p)?;
        Ok(self.eval_vector_reference(coeffs, e, xi))
    }

    /// `(d z1/dx, d z1/dy, d z2/dx, d z2/dy)` of a `V_h` function.
    fn vector_jacobian(&self, coeffs: &[f64], e: usize, p: Point2) -> Result<[f64; 4]> {
        let nw = self.nw;
        let (_, d) = self.physical_data(e, self.reference_point(e, p)?);
        let c = &coeffs[2 * e * nw..2 * (e + 1) * nw];
        let mut out = [0.0; 4];
        for i in 0..nw {
            out[0] += c[i] * d[i][0];
            out[1] += c[i] * d[i][1];
            out[2] += c[nw + i] * d[i][0];
            out[3] += c[nw + i] * d[i][1];
        }
        Ok(out)
    }

    pub fn eval_div(&self, coeffs: &[f64], e: usize, p: Point2) -> Result<f64> {
        let j = self.vector_jacobian(coeffs, e, p)?;
        Ok(j[0] + j[3])
    }

    /// `rot z = d z2/dx - d z1/dy`.
    pub fn eval_rot(&self, coeffs: &[f64], e: usize, p: Point2) -> Result<f64> {
        let j = self.vector_jacobian(coeffs, e, p)?;
        Ok(j[2] - j[1])
    }

    /// Evaluates at an arbitrary point by locating its element first.
    pub fn eval_scalar_at(&self, coeffs: &[f64], p: Point2) -> Option<f64> {
        let e = self.mesh.locate(p)?;
        self.eval_scalar(coeffs, e, p).ok()
    }

    pub fn l2_error_scalar(&self, coeffs: &[f64], exact: impl Fn(Point2) -> f64) -> f64 {
        let mut sum = 0.0;
        for e in 0..self.num_elements() {
            let c = &coeffs[e * self.nw..(e + 1) * self.nw];
            self.for_each_volume_point(e, Accuracy::High, |qp| {
                let v: f64 = qp.phi.iter().zip(c).map(|(a, b)| a * b).sum();
                let d = v - exact(qp.x);
                sum += qp.weight * d * d;
            });
        }
        sum.sqrt()
    }

    pub fn l2_error_vector(&self, coeffs: &[f64], exact: impl Fn(Point2) -> [f64; 2]) -> f64 {
        let nw = self.nw;
        let mut sum = 0.0;
        for e in 0..self.num_elements() {
            let c = &coeffs[2 * e * nw..2 * (e + 1) * nw];
            self.for_each_volume_point(e, Accuracy::High, |qp| {
                let x: f64 = qp.phi.iter().zip(&c[..nw]).map(|(a, b)| a * b).sum();
                let y: f64 = qp.phi.iter().zip(&c[nw..]).map(|(a, b)| a * b).sum();
                let ex = exact(qp.x);
                sum += qp.weight * ((x - ex[0]).powi(2) + (y - ex[1]).powi(2));
            });
        }
        sum.sqrt()
    }

    /// `int_Omega v` for a `W_h` function.
    pub fn integral_scalar(&self, coeffs: &[f64]) -> f64 {
        let mut sum = 0.0;
        for e in 0..self.num_elements() {
            let c = &coeffs[e * self.nw..(e + 1) * self.nw];
            self.for_each_volume_point(e, Accuracy::Standard, |qp| {
                sum += qp.weight * qp.phi.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
            });
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_uniform_square, pair_periodic, PeriodicDirection, Rect};

    fn spaces(levels: u32, k: usize) -> Spaces {
        let mesh = generate_uniform_square(levels, Rect::unit()).unwrap();
        Spaces::new(Arc::new(mesh), k).unwrap()
    }

    #[test]
    fn k0_basis_is_inverse_sqrt_area() {
        let s = spaces(1, 0);
        let area = s.geometry[3].area;
        s.for_each_volume_point(3, Accuracy::Standard, |qp| {
            assert!((qp.phi[0] - 1.0 / area.sqrt()).abs() < 1e-14);
        });
    }

    #[test]
    fn physical_gram_is_identity() {
        let nodes = vec![Point2::new(0.1, -0.3), Point2::new(2.5, 0.4), Point2::new(-0.7, 1.9)];
        let mesh = Mesh::from_triangles(nodes, vec![[0, 1, 2]], 1.0).unwrap();
        let s = Spaces::new(Arc::new(mesh), 4).unwrap();
        let n = s.nw;
        let mut gram = vec![0.0; n * n];
        s.for_each_volume_point(0, Accuracy::Standard, |qp| {
            for i in 0..n {
                for j in 0..n {
                    gram[i * n + j] += qp.weight * qp.phi[i] * qp.phi[j];
                }
            }
        });
        for i in 0..n {
            for j in 0..n {
                assert!((gram[i * n + j] - f64::from(u8::from(i == j))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_basis_is_orthonormal_on_every_edge() {
        let s = spaces(2, 3);
        for e in [0, 5, 17] {
            for j in 0..3 {
                let mut gram = vec![0.0; s.nm * s.nm];
                s.for_each_edge_point(e, j, |ep| {
                    for a in 0..s.nm {
                        for b in 0..s.nm {
                            gram[a * s.nm + b] += ep.weight * ep.eta[a] * ep.eta[b];
                        }
                    }
                });
                for a in 0..s.nm {
                    for b in 0..s.nm {
                        assert!((gram[a * s.nm + b] - f64::from(u8::from(a == b))).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn neighbours_see_the_same_trace_function() {
        let s = spaces(2, 2);
        let mesh = s.mesh.clone();
        let mut eta = vec![0.0; s.nm];
        for (f, facet) in mesh.facets.iter().enumerate() {
            let Some(r) = facet.right else { continue };
            for (e, local) in [(facet.left, 0usize), (r, 0usize)] {
                let _ = local;
                let j = (0..3).find(|&j| mesh.element_facets[e][j].facet == f).unwrap();
                // parameter t = 0.3 along the element's edge, mapped to the owner frame
                let t = 0.3;
                let x = s.geometry[e].to_physical(reference_edge_point(j, t));
                s.trace_basis(f, s.owner_parameter(e, j, t), &mut eta);
                let a = mesh.nodes[facet.nodes[0]];
                let sp = (x - a).norm() / facet.length;
                let mut direct = vec![0.0; s.nm];
                s.trace_basis(f, sp, &mut direct);
                for m in 0..s.nm {
                    assert!((eta[m] - direct[m]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn periodic_slave_shares_master_values() {
        let mesh = generate_uniform_square(2, Rect::unit()).unwrap();
        let mesh = Arc::new(pair_periodic(mesh, PeriodicDirection::Both).unwrap());
        let s = Spaces::new(mesh.clone(), 2).unwrap();
        assert_eq!(s.num_trace_slots(), mesh.num_facets() - mesh.periodic_pairs.len());
        let mut a = vec![0.0; s.nm];
        let mut b = vec![0.0; s.nm];
        for pair in &mesh.periodic_pairs {
            assert_eq!(s.trace_slot(pair.master), s.trace_slot(pair.slave));
            // same physical point modulo the offset gives the same trace values
            let eval = |f: usize, out: &mut [f64], x: Point2| {
                let e = mesh.facets[f].left;
                let j = (0..3).find(|&j| mesh.element_facets[e][j].facet == f).unwrap();
                let v = mesh.vertices(e);
                let t = (x - v[j]).norm() / mesh.facets[f].length;
                s.trace_basis(f, s.owner_parameter(e, j, t), out);
            };
            let m0 = mesh.nodes[mesh.facets[pair.master].nodes[0]];
            let m1 = mesh.nodes[mesh.facets[pair.master].nodes[1]];
            let x = m0 * 0.7 + m1 * 0.3;
            eval(pair.master, &mut a, x);
            eval(pair.slave, &mut b, x + pair.offset);
            for m in 0..s.nm {
                assert!((a[m] - b[m]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_reproduces_polynomials() {
        let s = spaces(2, 3);
        let f = |p: Point2| 1.0 + p.x - 2.0 * p.y * p.y + p.x * p.x * p.y;
        let c = s.project_scalar(f);
        assert!(s.l2_error_scalar(&c, f) < 1e-12);
        for e in [0, 9] {
            let p = s.mesh.centroid(e);
            assert!((s.eval_scalar(&c, e, p).unwrap() - f(p)).abs() < 1e-12);
        }
        assert!(s.project_scalar(|_| 0.0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn projection_converges_at_order_k_plus_one() {
        let f = |p: Point2| (std::f64::consts::PI * p.x).cos() * (std::f64::consts::PI * p.y).cos();
        let e1 = {
            let s = spaces(3, 3);
            s.l2_error_scalar(&s.project_scalar(f), f)
        };
        let e2 = {
            let s = spaces(4, 3);
            s.l2_error_scalar(&s.project_scalar(f), f)
        };
        let ratio = e1 / e2;
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rot_of_rotation_field() {
        let s = spaces(2, 1);
        let c = s.project_vector(|p| [-0.5 * p.y, 0.5 * p.x]);
        for e in 0..s.num_elements() {
            let p = s.mesh.centroid(e);
            assert!((s.eval_rot(&c, e, p).unwrap() - 1.0).abs() < 1e-12);
            assert!(s.eval_div(&c, e, p).unwrap().abs() < 1e-12);
        }
        let one = s.project_scalar(|_| 3.0);
        let g = s.eval_grad(&one, 4, s.mesh.centroid(4)).unwrap();
        assert!(g[0].abs() < 1e-12 && g[1].abs() < 1e-12);
    }

    #[test]
    fn outside_point_is_an_error() {
        let s = spaces(1, 1);
        let c = vec![0.0; s.dim_w()];
        assert!(matches!(s.eval_scalar(&c, 0, Point2::new(5.0, 5.0)), Err(Error::PointOutside { .. })));
    }
}
