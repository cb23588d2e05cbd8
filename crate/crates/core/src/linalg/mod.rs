//! Self-contained dense and banded linear algebra.
//!
//! Everything here operates on plain `f64` buffers: dense LU with partial
//! pivoting, banded LU for the all-at-once time-stepping systems, and a
//! cyclic Jacobi eigensolver for symmetric matrices.

mod banded;
mod dense;
mod eigen;

pub use banded::{banded_solve, BandedLu, BandedMatrix};
pub use dense::{lu_factor, lu_solve, DenseMatrix, LuFactors};
pub use eigen::{sym_eigen, EigenDecomposition};

/// Relative pivot threshold below which elimination declares the matrix
/// singular rather than dividing by a vanishing pivot.
pub(crate) const PIVOT_REL_TOL: f64 = 1e-14;
