//! Problem data for the tracking-type parabolic control problem, the time
//! decomposition, and the table of the eight transmission variants.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Identifier of a Schwarz-in-time variant.
///
/// The `SD` family passes nodal values at the interface, the `SN` family
/// passes time derivatives; the digit selects which field goes to which
/// subdomain (see [`transmission_table`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VariantId {
    Sd1,
    Sd2,
    Sd3,
    Sd4,
    Sn1,
    Sn2,
    Sn3,
    Sn4,
}

impl VariantId {
    pub const ALL: [VariantId; 8] = [
        VariantId::Sd1,
        VariantId::Sd2,
        VariantId::Sd3,
        VariantId::Sd4,
        VariantId::Sn1,
        VariantId::Sn2,
        VariantId::Sn3,
        VariantId::Sn4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantId::Sd1 => "SD1",
            VariantId::Sd2 => "SD2",
            VariantId::Sd3 => "SD3",
            VariantId::Sd4 => "SD4",
            VariantId::Sn1 => "SN1",
            VariantId::Sn2 => "SN2",
            VariantId::Sn3 => "SN3",
            VariantId::Sn4 => "SN4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SD1" => Ok(VariantId::Sd1),
            "SD2" => Ok(VariantId::Sd2),
            "SD3" => Ok(VariantId::Sd3),
            "SD4" => Ok(VariantId::Sd4),
            "SN1" => Ok(VariantId::Sn1),
            "SN2" => Ok(VariantId::Sn2),
            "SN3" => Ok(VariantId::Sn3),
            "SN4" => Ok(VariantId::Sn4),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant '{other}', expected one of SD1-SD4, SN1-SN4"
            ))),
        }
    }

    /// Variants that exchange the same field on both sides; their iteration
    /// reproduces the interface datum verbatim and cannot progress.
    pub fn stagnates(self) -> bool {
        matches!(
            self,
            VariantId::Sd3 | VariantId::Sd4 | VariantId::Sn3 | VariantId::Sn4
        )
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What kind of datum a subdomain receives at the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionKind {
    StateValue,
    AdjointValue,
    StateDerivative,
    AdjointDerivative,
}

impl ConditionKind {
    pub fn is_derivative(self) -> bool {
        matches!(
            self,
            ConditionKind::StateDerivative | ConditionKind::AdjointDerivative
        )
    }
}

/// The pair of interface conditions a variant imposes: `at_i1` is received by
/// subdomain 1 at its right end, `at_i2` by subdomain 2 at its left end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TransmissionSpec {
    pub at_i1: ConditionKind,
    pub at_i2: ConditionKind,
}

/// Interface condition table:
///
/// | variant | I1 receives | I2 receives |
/// |---------|-------------|-------------|
/// | SD1     | lambda      | y           |
/// | SD2     | y           | lambda      |
/// | SD3     | y           | y           |
/// | SD4     | lambda      | lambda      |
/// | SN1     | lambda'     | y'          |
/// | SN2     | y'          | lambda'     |
/// | SN3     | y'          | y'          |
/// | SN4     | lambda'     | lambda'     |
pub fn transmission_table(v: VariantId) -> TransmissionSpec {
    use ConditionKind::*;
    let (at_i1, at_i2) = match v {
        VariantId::Sd1 => (AdjointValue, StateValue),
        VariantId::Sd2 => (StateValue, AdjointValue),
        VariantId::Sd3 => (StateValue, StateValue),
        VariantId::Sd4 => (AdjointValue, AdjointValue),
        VariantId::Sn1 => (AdjointDerivative, StateDerivative),
        VariantId::Sn2 => (StateDerivative, AdjointDerivative),
        VariantId::Sn3 => (StateDerivative, StateDerivative),
        VariantId::Sn4 => (AdjointDerivative, AdjointDerivative),
    };
    TransmissionSpec { at_i1, at_i2 }
}

/// Interface datum: a condition kind together with its n-vector payload.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceCondition {
    pub kind: ConditionKind,
    pub data: Vec<f64>,
}

/// Uniform time mesh on `[t_start, t_end]` with `nt` intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    nt: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, nt: usize) -> Result<Self> {
        if nt < 1 {
            return Err(Error::InvalidParameter("time grid needs nt >= 1".into()));
        }
        if !t_end.is_finite() || !t_start.is_finite() || t_end <= t_start {
            return Err(Error::InvalidParameter(format!(
                "time grid needs t_end > t_start, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self { t_start, t_end, nt })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn intervals(&self) -> usize {
        self.nt
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / self.nt as f64
    }

    pub fn node(&self, m: usize) -> f64 {
        debug_assert!(m <= self.nt);
        self.t_start + m as f64 * self.step()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.nt).map(|m| self.node(m))
    }
}

/// Two non-overlapping time subdomains `(0, alpha)` and `(alpha, T)` sharing
/// the step of a global grid.
///
/// `alpha` must coincide with a node of the global grid: interface data
/// lives at a node, and silent interpolation would contaminate contraction
/// measurements. The constructor snaps within a relative tolerance of
/// `5e-10 * step` and rejects anything farther out.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    alpha: f64,
    grid1: TimeGrid,
    grid2: TimeGrid,
    interface_index: usize,
}

impl Decomposition {
    pub fn new(grid: &TimeGrid, alpha: f64) -> Result<Self> {
        let h = grid.step();
        let m = ((alpha - grid.t_start()) / h).round();
        let nearest = grid.t_start() + m * h;
        if (alpha - nearest).abs() > 0.5e-9 * h {
            return Err(Error::AlphaOffGrid { alpha, nearest });
        }
        let m = m as isize;
        if m < 1 || m as usize >= grid.intervals() {
            return Err(Error::InvalidParameter(format!(
                "interface {alpha} must lie strictly inside ({}, {})",
                grid.t_start(),
                grid.t_end()
            )));
        }
        let m = m as usize;
        let snapped = grid.node(m);
        Ok(Self {
            alpha: snapped,
            grid1: TimeGrid::new(grid.t_start(), snapped, m)?,
            grid2: TimeGrid::new(snapped, grid.t_end(), grid.intervals() - m)?,
            interface_index: m,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid1(&self) -> &TimeGrid {
        &self.grid1
    }

    pub fn grid2(&self) -> &TimeGrid {
        &self.grid2
    }

    /// Index of the interface node in the global grid.
    pub fn interface_index(&self) -> usize {
        self.interface_index
    }
}

/// Uniform spatial mesh on `(0, L)` with homogeneous Dirichlet ends; the
/// interior carries `nx - 1` unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialMesh {
    length: f64,
    nx: usize,
}

impl SpatialMesh {
    pub fn new(length: f64, nx: usize) -> Result<Self> {
        if length <= 0.0 {
            return Err(Error::InvalidParameter("mesh length must be positive".into()));
        }
        if nx < 2 {
            return Err(Error::InvalidParameter(format!(
                "spatial mesh needs nx >= 2, got {nx}"
            )));
        }
        Ok(Self { length, nx })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn intervals(&self) -> usize {
        self.nx
    }

    pub fn step(&self) -> f64 {
        self.length / self.nx as f64
    }

    pub fn interior_points(&self) -> usize {
        self.nx - 1
    }

    /// Coordinate of interior node `j` (0-based), i.e. `x = (j+1) h`.
    pub fn interior_node(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.step()
    }
}

type TargetFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// Semi-discrete optimal control data: system operator `A`, initial state,
/// desired state `target(t)`, control penalty `nu`, terminal penalty `gamma`
/// and horizon `T`.
///
/// Immutable after construction; the target is sampled on demand so grids
/// may vary per experiment.
#[derive(Clone)]
pub struct ControlProblem {
    a: DenseMatrix,
    y0: Vec<f64>,
    target: Arc<TargetFn>,
    nu: f64,
    gamma: f64,
    horizon: f64,
}

impl fmt::Debug for ControlProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlProblem")
            .field("dim", &self.dim())
            .field("nu", &self.nu)
            .field("gamma", &self.gamma)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

impl ControlProblem {
    /// Validated constructor; this is the `build_problem` entry point.
    pub fn new(
        a: DenseMatrix,
        y0: Vec<f64>,
        target: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        nu: f64,
        gamma: f64,
        horizon: f64,
    ) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "system operator must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if a.rows() == 0 {
            return Err(Error::InvalidParameter("dim must be at least 1".into()));
        }
        if y0.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "initial state has length {}, operator dimension is {}",
                y0.len(),
                a.rows()
            )));
        }
        if !nu.is_finite() || nu <= 0.0 {
            return Err(Error::InvalidParameter("nu must be positive".into()));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParameter("gamma must be non-negative".into()));
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        let problem = Self {
            a,
            y0,
            target: Arc::new(target),
            nu,
            gamma,
            horizon,
        };
        // one sample up-front catches targets of the wrong dimension
        let probe = (problem.target)(0.0);
        if probe.len() != problem.dim() {
            return Err(Error::DimensionMismatch(format!(
                "target returns length {}, expected {}",
                probe.len(),
                problem.dim()
            )));
        }
        Ok(problem)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn operator(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.y0
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Desired state sampled at time `t`.
    pub fn target_at(&self, t: f64) -> Vec<f64> {
        let v = (self.target)(t);
        assert_eq!(v.len(), self.dim(), "target dimension changed at t={t}");
        v
    }
}

/// One-dimensional heat control test case: `A` is the Dirichlet
/// finite-difference Laplacian `(1/h^2) tridiag(-1, 2, -1)` on `nx - 1`
/// interior nodes, the initial state is zero, and the target function is
/// sampled at the interior nodes.
pub fn heat_problem_1d(
    length: f64,
    nx: usize,
    nu: f64,
    gamma: f64,
    horizon: f64,
    target_fn: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
) -> Result<(ControlProblem, SpatialMesh)> {
    let mesh = SpatialMesh::new(length, nx)?;
    let n = mesh.interior_points();
    let h = mesh.step();
    let scale = 1.0 / (h * h);
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        a.set(i, i, 2.0 * scale);
        if i > 0 {
            a.set(i, i - 1, -scale);
        }
        if i + 1 < n {
            a.set(i, i + 1, -scale);
        }
    }
    let xs: Vec<f64> = (0..n).map(|j| mesh.interior_node(j)).collect();
    let target = move |t: f64| xs.iter().map(|&x| target_fn(x, t)).collect::<Vec<f64>>();
    let problem = ControlProblem::new(a, vec![0.0; n], target, nu, gamma, horizon)?;
    Ok((problem, mesh))
}

/// Recovers the eliminated control from adjoint nodal values, `u = lambda / nu`.
pub fn recover_control(lambda_nodes: &[Vec<f64>], nu: f64) -> Result<Vec<Vec<f64>>> {
    if !nu.is_finite() || nu <= 0.0 {
        return Err(Error::InvalidParameter("nu must be positive".into()));
    }
    Ok(lambda_nodes
        .iter()
        .map(|node| node.iter().map(|v| v / nu).collect())
        .collect())
}
