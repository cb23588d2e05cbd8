use crate::error::{Error, Result};

use super::DenseMatrix;

/// Maximum number of cyclic Jacobi sweeps before giving up.
const MAX_SWEEPS: usize = 100;

/// Orthogonal diagonalization `A = P D P^T` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DenseMatrix,
}

impl EigenDecomposition {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthogonal matrix whose columns are the eigenvectors, ordered to match
    /// the eigenvalues.
    pub fn eigenvectors(&self) -> &DenseMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Coordinates of `v` in the eigenbasis, `P^T v`.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        self.eigenvectors.matvec_transpose(v)
    }

    /// Reconstructs `P diag(d) P^T`, mainly for verification.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim();
        let p = &self.eigenvectors;
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for (k, d) in self.eigenvalues.iter().enumerate() {
                    s += p.get(i, k) * d * p.get(j, k);
                }
                out.set(i, j, s);
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j) * a.get(i, j);
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps run until the off-diagonal Frobenius norm drops below
/// `1e-12 * |A|_F`, at most 100 sweeps. Input asymmetry beyond
/// `1e-12 * |A|_max` is rejected.
pub fn sym_eigen(a: &DenseMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "sym_eigen needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let asymmetry = a.max_asymmetry();
    let tolerance = 1e-12 * a.max_norm();
    if asymmetry > tolerance {
        return Err(Error::NotSymmetric { asymmetry, tolerance });
    }

    let mut m = a.clone();
    let mut p = DenseMatrix::identity(n);
    let target = 1e-12 * a.frobenius_norm();

    let mut converged = off_diagonal_norm(&m) <= target;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for q in 1..n {
            for r in 0..q {
                let apq = m.get(r, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(r, r);
                let aqq = m.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e150 {
                    // rotation angle underflows; 1/(2 theta) is exact enough
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    let aip = m.get(i, r);
                    let aiq = m.get(i, q);
                    m.set(i, r, c * aip - s * aiq);
                    m.set(i, q, s * aip + c * aiq);
                }
                for j in 0..n {
                    let apj = m.get(r, j);
                    let aqj = m.get(q, j);
                    m.set(r, j, c * apj - s * aqj);
                    m.set(q, j, s * apj + c * aqj);
                }
                // rotation annihilates the target pair exactly
                m.set(r, q, 0.0);
                m.set(q, r, 0.0);

                for i in 0..n {
                    let vip = p.get(i, r);
                    let viq = p.get(i, q);
                    p.set(i, r, c * vip - s * viq);
                    p.set(i, q, s * vip + c * viq);
                }
            }
        }
        converged = off_diagonal_norm(&m) <= target;
    }
    if !converged {
        return Err(Error::EigenNoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut eigenvectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors.set(i, dst, p.get(i, src));
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
