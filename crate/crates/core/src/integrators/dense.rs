use nalgebra::{DMatrix, DVector};

use super::{PartitionedSystem, SemidiscreteSystem};
use crate::{Error, Result};

/// Small dense `y' = M y + c`, used as an oracle in tests.
#[derive(Clone, Debug)]
pub struct DenseSystem {
    pub m: DMatrix<f64>,
    pub c: Vec<f64>,
    /// Length of the `w` block when `M` has the form `[[0, D], [L, N]]`.
    pub split: Option<usize>,
}

impl DenseSystem {
    pub fn new(m: DMatrix<f64>, c: Vec<f64>, split: Option<usize>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        assert_eq!(m.nrows(), c.len());
        if let Some(s) = split {
            assert!(m.view((0, 0), (s, s)).iter().all(|v| *v == 0.0), "w block must not feed back on itself");
        }
        DenseSystem { m, c, split }
    }

    /// `q' = omega p / mass`, `p' = -omega mass q`.
    pub fn harmonic_oscillator(omega: f64, mass: f64) -> Self {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, omega / mass, -omega * mass, 0.0]);
        Self::new(m, vec![0.0; 2], Some(1))
    }

    /// `exp(t M) y0`, ignoring `c`.
    pub fn exact(&self, y0: &[f64], t: f64) -> Vec<f64> {
        let e = (&self.m * t).exp();
        (e * DVector::from_column_slice(y0)).iter().copied().collect()
    }
}

impl SemidiscreteSystem for DenseSystem {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn rhs(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        let v = &self.m * DVector::from_column_slice(y);
        for ((o, a), c) in out.iter_mut().zip(v.iter()).zip(&self.c) {
            *o = a + c;
        }
        Ok(())
    }

    fn solve_shifted(&self, theta: f64, r: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        let a = DMatrix::identity(n, n) - &self.m * theta;
        let rhs = DVector::from_iterator(n, r.iter().zip(&self.c).map(|(r, c)| r + theta * c));
        let x = a.lu().solve(&rhs).ok_or_else(|| Error::Factorization("singular shifted matrix".into()))?;
        Ok(x.iter().copied().collect())
    }

    fn partition(&self) -> Option<&dyn PartitionedSystem> {
        self.split.map(|_| self as &dyn PartitionedSystem)
    }
}

impl PartitionedSystem for DenseSystem {
    fn split(&self) -> usize {
        self.split.expect("partitioned")
    }

    fn drift(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let s = self.split();
        let n = self.dim();
        let v = self.m.view((0, s), (s, n - s)) * DVector::from_column_slice(u);
        for (i, o) in out.iter_mut().enumerate() {
            *o = v[i] + self.c[i];
        }
        Ok(())
    }

    fn kick(&self, w: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
        let s = self.split();
        let n = self.dim();
        let v = self.m.view((s, 0), (n - s, s)) * DVector::from_column_slice(w)
            + self.m.view((s, s), (n - s, n - s)) * DVector::from_column_slice(u);
        for (i, o) in out.iter_mut().enumerate() {
            *o = v[i] + self.c[s + i];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rotation() {
        let sys = DenseSystem::harmonic_oscillator(1.0, 1.0);
        let y = sys.exact(&[1.0, 0.0], std::f64::consts::FRAC_PI_2);
        assert!((y[0]).abs() < 1e-14 && (y[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn shifted_solve_inverts() {
        let sys = DenseSystem::new(DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -1.0, 0.3]), vec![0.1, -0.2], Some(1));
        let y = sys.solve_shifted(0.25, &[1.0, 2.0]).unwrap();
        let mut my = vec![0.0; 2];
        sys.rhs(&y, &mut my).unwrap();
        // (I - θM)Y - θc = r
        for i in 0..2 {
            let r = y[i] - 0.25 * my[i];
            assert!((r - [1.0, 2.0][i]).abs() < 1e-14);
        }
    }
}
