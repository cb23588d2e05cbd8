use crate::error::{Error, Result};

use super::PIVOT_REL_TOL;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::DimensionMismatch("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("rows have unequal lengths".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Computes `A^T x` without forming the transpose.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec_transpose dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (j, out_j) in out.iter_mut().enumerate() {
                *out_j += self.get(i, j) * xi;
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum())
            .fold(0.0, f64::max)
    }

    /// `max |A_ij - A_ji|` over all pairs; zero for an exactly symmetric matrix.
    pub fn max_asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// LU factorization with partial pivoting, stored packed (unit lower / upper).
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    #[allow(clippy::needless_range_loop)] // triangular sweeps read best indexed
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut x = vec![0.0; n];
        // apply permutation, then forward substitution with unit lower factor
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s / self.lu.get(i, i);
        }
        x
    }
}

/// Factors a square matrix as `PA = LU` with partial pivoting.
///
/// Elimination stops with [`Error::SingularMatrix`] when the chosen pivot
/// falls below `1e-14` times the original magnitude of its row.
pub fn lu_factor(m: &DenseMatrix) -> Result<LuFactors> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "lu_factor needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut scale: Vec<f64> = (0..n)
        .map(|i| m.row(i).iter().fold(0.0f64, |a, v| a.max(v.abs())))
        .collect();

    // row-index indirection is avoided: rows are swapped physically, and the
    // permutation records the original rhs ordering
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot = lu.get(k, k).abs();
        for r in (k + 1)..n {
            let cand = lu.get(r, k).abs();
            if cand > pivot {
                pivot = cand;
                pivot_row = r;
            }
        }
        if pivot_row != k {
            for j in 0..n {
                let a = lu.get(k, j);
                lu.set(k, j, lu.get(pivot_row, j));
                lu.set(pivot_row, j, a);
            }
            perm.swap(k, pivot_row);
            scale.swap(k, pivot_row);
        }
        if pivot < PIVOT_REL_TOL * scale[k] || scale[k] == 0.0 {
            return Err(Error::SingularMatrix { step: k, pivot });
        }
        let pk = lu.get(k, k);
        for r in (k + 1)..n {
            let factor = lu.get(r, k) / pk;
            lu.set(r, k, factor);
            for j in (k + 1)..n {
                lu.set(r, j, lu.get(r, j) - factor * lu.get(k, j));
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

/// Solves `Mx = b` by dense LU and verifies the residual bound
/// `|Mx - b|_inf <= 1e-10 (|M|_inf |x|_inf + |b|_inf)`.
pub fn lu_solve(m: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let x = lu_factor(m)?.solve(b);
    let r = m.matvec(&x);
    let residual = r
        .iter()
        .zip(b)
        .fold(0.0f64, |a, (ri, bi)| a.max((ri - bi).abs()));
    let x_inf = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let b_inf = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tolerance = 1e-10 * (m.inf_norm() * x_inf + b_inf);
    if residual > tolerance && tolerance > 0.0 {
        return Err(Error::SolveFailed { residual, tolerance });
    }
    Ok(x)
}
