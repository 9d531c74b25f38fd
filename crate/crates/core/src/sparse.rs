//! Thin wrappers around `faer` sparse matrices and factorizations.

use faer::linalg::solvers::Solve;
use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;

use crate::{Error, Result};

pub type SparseMatrix = SparseColMat<usize, f64>;

/// Accumulates `(row, col, value)` entries; duplicates are summed on build.
#[derive(Clone, Debug)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<Triplet<usize, usize, f64>>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletBuilder { nrows, ncols, entries: Vec::new() }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        if value != 0.0 {
            self.entries.push(Triplet::new(row, col, value));
        }
    }

    /// Adds a dense block stored row-major with the given global row and column ids.
    pub fn push_block(&mut self, rows: &[usize], cols: &[usize], block: &[f64]) {
        debug_assert_eq!(block.len(), rows.len() * cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                self.push(r, c, block[i * cols.len() + j]);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(&self) -> SparseMatrix {
        // Indices are checked by `push` in debug builds and by construction elsewhere.
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &self.entries)
            .expect("triplet indices are in range")
    }
}

pub fn zeros(nrows: usize, ncols: usize) -> SparseMatrix {
    TripletBuilder::new(nrows, ncols).build()
}

/// `y = A x`
pub fn matvec(a: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    matvec_add(a, x, 1.0, &mut y);
    y
}

/// `y += alpha A x`
pub fn matvec_add(a: &SparseMatrix, x: &[f64], alpha: f64, y: &mut [f64]) {
    assert_eq!(x.len(), a.ncols());
    assert_eq!(y.len(), a.nrows());
    let col_ptr = a.col_ptr();
    let row_idx = a.row_idx();
    let val = a.val();
    for j in 0..a.ncols() {
        let xj = alpha * x[j];
        if xj == 0.0 {
            continue;
        }
        for p in col_ptr[j]..col_ptr[j + 1] {
            y[row_idx[p]] += val[p] * xj;
        }
    }
}

/// `y = A^T x`
pub fn matvec_transpose(a: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.ncols()];
    matvec_transpose_add(a, x, 1.0, &mut y);
    y
}

/// `y += alpha A^T x`
pub fn matvec_transpose_add(a: &SparseMatrix, x: &[f64], alpha: f64, y: &mut [f64]) {
    assert_eq!(x.len(), a.nrows());
    assert_eq!(y.len(), a.ncols());
    let col_ptr = a.col_ptr();
    let row_idx = a.row_idx();
    let val = a.val();
    for (j, yj) in y.iter_mut().enumerate() {
        let mut s = 0.0;
        for p in col_ptr[j]..col_ptr[j + 1] {
            s += val[p] * x[row_idx[p]];
        }
        *yj += alpha * s;
    }
}

/// Iterates stored entries as `(row, col, value)`.
pub fn entries(a: &SparseMatrix) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
    let col_ptr = a.col_ptr();
    let row_idx = a.row_idx();
    let val = a.val();
    (0..a.ncols()).flat_map(move |j| (col_ptr[j]..col_ptr[j + 1]).map(move |p| (row_idx[p], j, val[p])))
}

/// Row-major dense copy, for tests and small oracles.
pub fn to_dense(a: &SparseMatrix) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; a.ncols()]; a.nrows()];
    for (i, j, v) in entries(a) {
        d[i][j] += v;
    }
    d
}

pub fn max_abs(a: &SparseMatrix) -> f64 {
    entries(a).fold(0.0, |m, (_, _, v)| m.max(v.abs()))
}

/// Largest entry of `|A - s A^T|`; `s = 1` tests symmetry, `s = -1` antisymmetry.
pub fn asymmetry(a: &SparseMatrix, s: f64) -> f64 {
    let mut map = std::collections::HashMap::new();
    for (i, j, v) in entries(a) {
        *map.entry((i, j)).or_insert(0.0) += v;
    }
    let mut worst: f64 = 0.0;
    for (&(i, j), &v) in &map {
        let t = map.get(&(j, i)).copied().unwrap_or(0.0);
        worst = worst.max((v - s * t).abs());
    }
    worst
}

pub struct SparseLu {
    lu: Lu<usize, f64>,
    n: usize,
}

impl SparseLu {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Factorization(format!("LU of a {}x{} matrix", a.nrows(), a.ncols())));
        }
        let lu = a.sp_lu().map_err(|e| Error::Factorization(format!("sparse LU: {e:?}")))?;
        Ok(SparseLu { lu, n: a.nrows() })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let rhs = ColRef::from_slice(b);
        let x = self.lu.solve(rhs);
        x.iter().copied().collect()
    }
}

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
pub struct SparseCholesky {
    llt: Llt<usize, f64>,
    n: usize,
}

impl SparseCholesky {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Factorization(format!("Cholesky of a {}x{} matrix", a.nrows(), a.ncols())));
        }
        let llt = a
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization(format!("sparse Cholesky: {e:?}")))?;
        Ok(SparseCholesky { llt, n: a.nrows() })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = Col::<f64>::from_fn(self.n, |i| b[i]);
        self.llt.solve_in_place(x.as_mut());
        x.iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SparseMatrix {
        let mut t = TripletBuilder::new(3, 3);
        t.push(0, 0, 4.0);
        t.push(0, 0, 1.0);
        t.push(1, 1, 3.0);
        t.push(2, 2, 2.0);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        t.push(2, 1, -0.5);
        t.push(1, 2, -0.5);
        t.build()
    }

    #[test]
    fn duplicates_are_summed() {
        let d = to_dense(&sample());
        assert_eq!(d[0][0], 5.0);
        assert_eq!(asymmetry(&sample(), 1.0), 0.0);
    }

    #[test]
    fn matvec_agrees_with_dense() {
        let a = sample();
        let d = to_dense(&a);
        let x = [1.0, -2.0, 0.5];
        let y = matvec(&a, &x);
        let yt = matvec_transpose(&a, &x);
        for i in 0..3 {
            let expect: f64 = (0..3).map(|j| d[i][j] * x[j]).sum();
            let expect_t: f64 = (0..3).map(|j| d[j][i] * x[j]).sum();
            assert!((y[i] - expect).abs() < 1e-15);
            assert!((yt[i] - expect_t).abs() < 1e-15);
        }
    }

    #[test]
    fn factorizations_solve() {
        let a = sample();
        let b = [1.0, 2.0, 3.0];
        for x in [SparseLu::new(&a).unwrap().solve(&b), SparseCholesky::new(&a).unwrap().solve(&b)] {
            let r = matvec(&a, &x);
            for i in 0..3 {
                assert!((r[i] - b[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(1, 1, -1.0);
        assert!(SparseCholesky::new(&t.build()).is_err());
    }
}
