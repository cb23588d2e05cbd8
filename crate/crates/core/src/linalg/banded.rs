use crate::error::{Error, Result};

use super::{DenseMatrix, PIVOT_REL_TOL};

/// Band matrix in compact storage: row `i` keeps logical columns
/// `i-bl ..= i+bu` at offsets `0 ..= bl+bu` of its slice.
///
/// Entries outside the band are implicitly zero. Setting one is an assembly
/// bug and panics.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    bl: usize,
    bu: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, bl: usize, bu: usize) -> Self {
        assert!(n > 0, "empty banded matrix");
        assert!(bl < n && bu < n, "bandwidths must be below the dimension");
        Self {
            n,
            bl,
            bu,
            data: vec![0.0; n * (bl + bu + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.bl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.bu
    }

    #[inline]
    fn width(&self) -> usize {
        self.bl + self.bu + 1
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.bl >= i && j <= i + self.bu
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + (j + self.bl - i)]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i},{j}) is outside the band");
        let w = self.width();
        self.data[i * w + (j + self.bl - i)] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i},{j}) is outside the band");
        let w = self.width();
        self.data[i * w + (j + self.bl - i)] += v;
    }

    #[allow(clippy::needless_range_loop)] // band windows read best indexed
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bl);
            let hi = (i + self.bu).min(self.n - 1);
            let mut s = 0.0;
            for j in lo..=hi {
                s += self.data[i * self.width() + (j + self.bl - i)] * x[j];
            }
            out[i] = s;
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.data[i * self.width()..(i + 1) * self.width()]
                    .iter()
                    .map(|v| v.abs())
                    .sum()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bl);
            let hi = (i + self.bu).min(self.n - 1);
            for j in lo..=hi {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    /// Band LU with partial pivoting restricted to the band.
    ///
    /// Fill stays inside `bl + bu + 1` columns for the upper factor plus `bl`
    /// multiplier columns, the classic compact scheme.
    pub fn factor(&self) -> Result<BandedLu> {
        let n = self.n;
        let bl = self.bl;
        let mm = self.width();
        let mut upper = self.data.clone();
        let mut lower = vec![0.0; n * bl.max(1)];
        let mut pivots = vec![0usize; n];
        let mut scale: Vec<f64> = (0..n)
            .map(|i| {
                upper[i * mm..(i + 1) * mm]
                    .iter()
                    .fold(0.0f64, |a, v| a.max(v.abs()))
            })
            .collect();

        // left-justify the first bl rows so column 0 always holds the
        // current pivot candidate
        for i in 0..bl {
            let shift = bl - i;
            for k in shift..mm {
                upper[i * mm + k - shift] = upper[i * mm + k];
            }
            for k in (mm - shift)..mm {
                upper[i * mm + k] = 0.0;
            }
        }

        for k in 0..n {
            let lim = (k + bl).min(n - 1);
            let mut pivot_row = k;
            let mut pivot = upper[k * mm].abs();
            for r in (k + 1)..=lim {
                let cand = upper[r * mm].abs();
                if cand > pivot {
                    pivot = cand;
                    pivot_row = r;
                }
            }
            pivots[k] = pivot_row;
            if pivot_row != k {
                for j in 0..mm {
                    upper.swap(k * mm + j, pivot_row * mm + j);
                }
                scale.swap(k, pivot_row);
            }
            if pivot < PIVOT_REL_TOL * scale[k] || scale[k] == 0.0 {
                return Err(Error::SingularMatrix { step: k, pivot });
            }
            let pk = upper[k * mm];
            for r in (k + 1)..=lim {
                let factor = upper[r * mm] / pk;
                lower[k * bl.max(1) + (r - k - 1)] = factor;
                for j in 1..mm {
                    upper[r * mm + j - 1] = upper[r * mm + j] - factor * upper[k * mm + j];
                }
                upper[r * mm + mm - 1] = 0.0;
            }
        }

        Ok(BandedLu {
            n,
            bl,
            mm,
            upper,
            lower,
            pivots,
        })
    }
}

/// Factored band matrix; `solve` is reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    bl: usize,
    mm: usize,
    upper: Vec<f64>,
    lower: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bl, mm) = (self.n, self.bl, self.mm);
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let lim = (k + bl).min(n - 1);
            for r in (k + 1)..=lim {
                x[r] -= self.lower[k * bl.max(1) + (r - k - 1)] * x[k];
            }
        }
        let mut l = 1usize;
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in 1..l {
                s -= self.upper[i * mm + k] * x[i + k];
            }
            x[i] = s / self.upper[i * mm];
            if l < mm {
                l += 1;
            }
        }
        x
    }
}

/// Solves `Mx = b` in band storage and verifies the residual bound
/// `|Mx - b|_inf <= 1e-10 (|M|_inf |x|_inf + |b|_inf)`.
pub fn banded_solve(m: &BandedMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let x = m.factor()?.solve(b);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu_solve;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tridiag(n: usize, sub: f64, diag: f64, sup: f64) -> BandedMatrix {
        let mut m = BandedMatrix::zeros(n, 1, 1);
        for i in 0..n {
            m.set(i, i, diag);
            if i > 0 {
                m.set(i, i - 1, sub);
            }
            if i + 1 < n {
                m.set(i, i + 1, sup);
            }
        }
        m
    }

    #[test]
    fn tridiagonal_matches_dense_solve() {
        let m = tridiag(12, -1.0, 2.0, -1.0);
        let b = vec![1.0; 12];
        let xb = banded_solve(&m, &b).unwrap();
        let xd = lu_solve(&m.to_dense(), &b).unwrap();
        for (a, c) in xb.iter().zip(&xd) {
            assert!((a - c).abs() <= 1e-12 * c.abs().max(1.0));
        }
    }

    #[test]
    fn scalar_division() {
        let mut m = BandedMatrix::zeros(1, 0, 0);
        m.set(0, 0, 4.0);
        let x = banded_solve(&m, &[2.0]).unwrap();
        assert_eq!(x, vec![0.5]);
    }

    #[test]
    fn singular_band_is_rejected() {
        // second row duplicates the first within the band
        let mut m = BandedMatrix::zeros(3, 1, 1);
        m.set(0, 0, 1.0);
        m.set(0, 1, 2.0);
        m.set(1, 0, 1.0);
        m.set(1, 1, 2.0);
        m.set(2, 1, 0.0);
        m.set(2, 2, 1.0);
        assert!(matches!(m.factor(), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn out_of_band_read_is_zero() {
        let m = tridiag(5, -1.0, 2.0, -1.0);
        assert_eq!(m.get(0, 4), 0.0);
        assert_eq!(m.get(4, 0), 0.0);
    }

    #[test]
    fn pivoting_handles_small_leading_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        let (bl, bu) = (3, 2);
        let mut m = BandedMatrix::zeros(n, bl, bu);
        for i in 0..n {
            for j in i.saturating_sub(bl)..=(i + bu).min(n - 1) {
                m.set(i, j, rng.gen_range(-1.0..1.0));
            }
            // weak diagonal forces genuine row interchanges
            m.add(i, i, 0.01);
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let xb = banded_solve(&m, &b).unwrap();
        let xd = lu_solve(&m.to_dense(), &b).unwrap();
        for (a, c) in xb.iter().zip(&xd) {
            assert!((a - c).abs() <= 1e-8 * c.abs().max(1.0), "{a} vs {c}");
        }
    }

    proptest! {
        // any system representable both ways must agree between the two solvers
        #[test]
        fn banded_and_dense_agree(seed in 0u64..500, n in 1usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bl = rng.gen_range(0..n.min(4));
            let bu = rng.gen_range(0..n.min(4));
            let mut m = BandedMatrix::zeros(n, bl, bu);
            for i in 0..n {
                for j in i.saturating_sub(bl)..=(i + bu).min(n - 1) {
                    m.set(i, j, rng.gen_range(-1.0..1.0));
                }
                m.add(i, i, 4.0);
            }
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let xb = banded_solve(&m, &b).unwrap();
            let xd = lu_solve(&m.to_dense(), &b).unwrap();
            for (a, c) in xb.iter().zip(&xd) {
                prop_assert!((a - c).abs() <= 1e-10 * c.abs().max(1.0));
            }
        }
    }
}
