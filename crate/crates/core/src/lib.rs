//! Non-overlapping Schwarz methods in time for parabolic optimal control.
//!
//! The library centers on the reduced first-order optimality system of the
//! tracking problem for `y' + A y = u`: a forward equation for the state `y`
//! coupled to a backward equation for the adjoint `lambda`, with `u`
//! eliminated through `u = lambda / nu`. The time interval is split at an
//! interface `alpha` into two subdomains that exchange Dirichlet or Neumann
//! data for either field, giving eight iteration variants (SD1-SD4 and
//! SN1-SN4).
//!
//! Modules:
//! - [`model`]: problem data, time grids, the variant table, the 1D heat
//!   test case.
//! - [`linalg`]: dense and banded LU with partial pivoting, and a Jacobi
//!   eigensolver for the orthogonal diagonalization `A = P D P^T`.
//! - [`spectral`]: analytic per-eigenvalue convergence factors, relaxation,
//!   optimal relaxation parameters and theorem bounds.
//! - [`discretize`]: Crank-Nicolson all-at-once discretization of the
//!   coupled system, on the full interval and on subdomains with pluggable
//!   interface conditions.
//! - [`schwarz`]: the two-subdomain iteration driver, error tracking against
//!   the monolithic reference, and a scalar contraction oracle.
//! - [`experiments`]: canned experiments writing CSV artifacts, plus the
//!   randomized property suites.

pub mod discretize;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod schwarz;
pub mod spectral;

pub use discretize::{
    assemble_monolithic, extract_interface, interface_row, solve_monolithic, solve_subdomain,
    BoundaryPair, EndCondition, GridEnd, SubdomainSolver, Trajectory,
};
pub use error::{Error, Result};
pub use linalg::{banded_solve, lu_solve, sym_eigen, BandedMatrix, DenseMatrix, EigenDecomposition};
pub use model::{
    heat_problem_1d, recover_control, transmission_table, ConditionKind, ControlProblem,
    Decomposition, InterfaceCondition, SpatialMesh, TimeGrid, TransmissionSpec, VariantId,
};
pub use schwarz::{
    initial_payload, measured_contraction, run_schwarz, scalar_contraction_oracle, InitStrategy,
    SchwarzConfig, SchwarzReport, SweepOrder,
};
pub use spectral::{
    optimal_theta, rho, rho_at_zero, rho_bound, rho_core_sd1, rho_core_sn1, rho_max, rho_relaxed,
    sigma, sweep, RhoBound, RhoTable, SpectralParams,
};
