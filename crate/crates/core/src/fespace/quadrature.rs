use crate::{Error, Result};

pub const MAX_QUADRATURE_DEGREE: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Reference triangle with vertices (0,0), (1,0), (0,1).
    Triangle,
    /// Unit interval; points are stored as `[t, 0]`.
    Segment,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub domain: Domain,
    pub degree: usize,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn([f64; 2]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = if (z * z - 1.0).abs() < 1e-300 {
        0.5 * nf * (nf + 1.0) * z.powi(n as i32 + 1)
    } else {
        nf * (z * p1 - p0) / (z * z - 1.0)
    };
    (p1, d)
}

/// Rule exact for polynomials of total degree `degree`.
pub fn quadrature(domain: Domain, degree: usize) -> Result<QuadratureRule> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(Error::UnsupportedQuadrature(degree));
    }
    match domain {
        Domain::Segment => {
            let n = (degree + 2) / 2;
            let (x, w) = gauss_legendre(n.max(1));
            Ok(QuadratureRule {
                domain,
                degree,
                points: x.iter().map(|&xi| [0.5 * (xi + 1.0), 0.0]).collect(),
                weights: w.iter().map(|wi| 0.5 * wi).collect(),
            })
        }
        Domain::Triangle => {
            // Collapsed map (u, v) -> (u, v (1 - u)); the Jacobian adds one degree in u.
            let n = (degree + 3) / 2;
            let (x, w) = gauss_legendre(n.max(1));
            let mut points = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for (xu, wu) in x.iter().zip(&w) {
                let u = 0.5 * (xu + 1.0);
                for (xv, wv) in x.iter().zip(&w) {
                    let v = 0.5 * (xv + 1.0);
                    points.push([u, v * (1.0 - u)]);
                    weights.push(0.25 * wu * wv * (1.0 - u));
                }
            }
            Ok(QuadratureRule { domain, degree, points, weights })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn triangle_weights_sum_to_half() {
        let q = quadrature(Domain::Triangle, 1).unwrap();
        assert!((q.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        assert!(q.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn segment_t5() {
        let q = quadrature(Domain::Segment, 5).unwrap();
        assert!((q.integrate(|p| p[0].powi(5)) - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_monomials_exact() {
        // int_T x^a y^b = a! b! / (a + b + 2)!
        for degree in [0, 3, 7, 12, 20] {
            let q = quadrature(Domain::Triangle, degree).unwrap();
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let got = q.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    assert!((got - exact).abs() <= 1e-13 * exact, "deg {degree} a {a} b {b}");
                }
            }
        }
    }

    #[test]
    fn segment_monomials_exact() {
        for degree in 0..=MAX_QUADRATURE_DEGREE {
            let q = quadrature(Domain::Segment, degree).unwrap();
            let exact = 1.0 / (degree as f64 + 1.0);
            assert!((q.integrate(|p| p[0].powi(degree as i32)) - exact).abs() < 1e-13 * exact);
        }
    }

    #[test]
    fn rejects_huge_degree() {
        assert!(matches!(quadrature(Domain::Segment, 31), Err(Error::UnsupportedQuadrature(31))));
    }
}
