use super::quadrature::{quadrature, Domain};
use crate::{Error, Result};

pub const MAX_DEGREE: usize = 6;

/// Orthonormal `P_k` basis on the reference triangle (0,0), (1,0), (0,1).
///
/// Each function is stored as coefficients over the monomials
/// `(xi - 1/3)^a (eta - 1/3)^b`, `a + b <= k`, and normalized so that
/// `int_ref phi_i phi_j = delta_ij`. Mapped to a physical element `K` and
/// divided by `sqrt(2 |K|)` the functions stay exactly orthonormal.
#[derive(Clone, Debug)]
pub struct ReferenceBasis {
    pub degree: usize,
    exponents: Vec<(i32, i32)>,
    /// Row `i` holds the monomial coefficients of basis function `i`.
    coef: Vec<Vec<f64>>,
}

pub fn scalar_dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

const CENTER: f64 = 1.0 / 3.0;

impl ReferenceBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(degree));
        }
        let mut exponents = Vec::with_capacity(scalar_dim(degree));
        for d in 0..=degree as i32 {
            for a in (0..=d).rev() {
                exponents.push((a, d - a));
            }
        }
        let n = exponents.len();
        let rule = quadrature(Domain::Triangle, 2 * degree)?;
        let mono = |e: (i32, i32), p: [f64; 2]| (p[0] - CENTER).powi(e.0) * (p[1] - CENTER).powi(e.1);
        // values[i][q] tracks basis function i at quadrature point q
        let mut values: Vec<Vec<f64>> = exponents.iter().map(|&e| rule.points.iter().map(|&p| mono(e, p)).collect()).collect();
        let mut coef: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&rule.weights).map(|((x, y), w)| x * y * w).sum::<f64>();

        for i in 0..n {
            // Modified Gram-Schmidt, applied twice for stability.
            for _ in 0..2 {
                for j in 0..i {
                    let r = dot(&values[i], &values[j]);
                    let (lo, hi) = values.split_at_mut(i);
                    hi[0].iter_mut().zip(&lo[j]).for_each(|(v, u)| *v -= r * u);
                    let (lo, hi) = coef.split_at_mut(i);
                    hi[0].iter_mut().zip(&lo[j]).for_each(|(v, u)| *v -= r * u);
                }
            }
            let norm = dot(&values[i], &values[i]).sqrt();
            values[i].iter_mut().for_each(|v| *v /= norm);
            coef[i].iter_mut().for_each(|v| *v /= norm);
        }
        Ok(ReferenceBasis { degree, exponents, coef })
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn monomials(&self, p: [f64; 2], vals: &mut [f64], grads: Option<&mut [[f64; 2]]>) {
        let (x, y) = (p[0] - CENTER, p[1] - CENTER);
        let k = self.degree as i32;
        let mut px = [1.0; MAX_DEGREE + 1];
        let mut py = [1.0; MAX_DEGREE + 1];
        for i in 1..=k as usize {
            px[i] = px[i - 1] * x;
            py[i] = py[i - 1] * y;
        }
        for (m, &(a, b)) in self.exponents.iter().enumerate() {
            vals[m] = px[a as usize] * py[b as usize];
        }
        if let Some(grads) = grads {
            for (m, &(a, b)) in self.exponents.iter().enumerate() {
                let dx = if a > 0 { f64::from(a) * px[a as usize - 1] * py[b as usize] } else { 0.0 };
                let dy = if b > 0 { f64::from(b) * px[a as usize] * py[b as usize - 1] } else { 0.0 };
                grads[m] = [dx, dy];
            }
        }
    }

    /// Values of all basis functions at a reference point.
    pub fn eval(&self, p: [f64; 2], out: &mut [f64]) {
        let n = self.dim();
        let mut mono = [0.0; scalar_dim_max()];
        self.monomials(p, &mut mono[..n], None);
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = self.coef[i][..=i].iter().zip(&mono).map(|(c, m)| c * m).sum();
        }
    }

    /// Values and reference gradients at a reference point.
    pub fn eval_with_grad(&self, p: [f64; 2], vals: &mut [f64], grads: &mut [[f64; 2]]) {
        let n = self.dim();
        let mut mono = [0.0; scalar_dim_max()];
        let mut dmono = [[0.0; 2]; scalar_dim_max()];
        self.monomials(p, &mut mono[..n], Some(&mut dmono[..n]));
        for i in 0..n {
            let c = &self.coef[i][..=i];
            vals[i] = c.iter().zip(&mono).map(|(c, m)| c * m).sum();
            let mut g = [0.0; 2];
            for (cj, dm) in c.iter().zip(&dmono) {
                g[0] += cj * dm[0];
                g[1] += cj * dm[1];
            }
            grads[i] = g;
        }
    }
}

const fn scalar_dim_max() -> usize {
    (MAX_DEGREE + 1) * (MAX_DEGREE + 2) / 2
}

/// Orthonormal Legendre polynomials on `[0, 1]`: `sqrt(2m + 1) P_m(2s - 1)`.
pub fn legendre_unit(k: usize, s: f64, out: &mut [f64]) {
    let z = 2.0 * s - 1.0;
    let mut p0 = 1.0;
    let mut p1 = z;
    for m in 0..=k {
        let p = match m {
            0 => 1.0,
            1 => z,
            _ => {
                let mf = m as f64;
                let p2 = ((2.0 * mf - 1.0) * z * p1 - (mf - 1.0) * p0) / mf;
                p0 = p1;
                p1 = p2;
                p2
            }
        };
        out[m] = (2.0 * m as f64 + 1.0).sqrt() * p;
    }
}
