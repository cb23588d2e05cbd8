//! Crank-Nicolson all-at-once discretization of the coupled forward-backward
//! optimality system, on the full interval and on time subdomains.
//!
//! Unknowns are ordered node-major, `(y_m, lambda_m)` per node, which keeps
//! the bandwidth of the coupled system at `3n - 1`. Boundary and interface
//! conditions are imposed as exact algebraic rows; Neumann (derivative)
//! interface data enters through the semi-discrete identities
//! `y' = -A y + lambda / nu` and `lambda' = y + A^T lambda - target`, so a
//! derivative datum is exact with respect to the semi-discrete dynamics
//! rather than a one-sided difference.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::linalg::{BandedLu, BandedMatrix, DenseMatrix};
use crate::model::{recover_control, ConditionKind, ControlProblem, InterfaceCondition, TimeGrid};

/// Nodal values of the state and adjoint over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub y: Vec<Vec<f64>>,
    pub lambda: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.y.first().map_or(0, Vec::len)
    }

    pub fn node_count(&self) -> usize {
        self.y.len()
    }

    /// Control recovered from the adjoint, `u = lambda / nu`.
    pub fn control(&self, nu: f64) -> Result<Vec<Vec<f64>>> {
        recover_control(&self.lambda, nu)
    }

    /// CSV with header `t,y_1..y_n,lambda_1..lambda_n`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.dim();
        write!(w, "t")?;
        for j in 1..=n {
            write!(w, ",y_{j}")?;
        }
        for j in 1..=n {
            write!(w, ",lambda_{j}")?;
        }
        writeln!(w)?;
        for (m, t) in self.grid.nodes().enumerate() {
            write!(w, "{t:.16e}")?;
            for v in &self.y[m] {
                write!(w, ",{v:.16e}")?;
            }
            for v in &self.lambda[m] {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Which end of a subdomain grid an interface operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridEnd {
    First,
    Last,
}

/// Condition closing the system at one end of a (sub)interval.
#[derive(Debug, Clone, PartialEq)]
pub enum EndCondition {
    /// `y(t_start) = y0`; only valid on the left.
    InitialState(Vec<f64>),
    /// `lambda(T) + gamma y(T) = gamma target(T)`; only valid on the right.
    TerminalRobin { gamma: f64, target_end: Vec<f64> },
    /// Transmission datum received from the neighboring subdomain.
    Interface(InterfaceCondition),
}

/// Pair of end conditions for a subdomain solve.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    pub left: EndCondition,
    pub right: EndCondition,
}

impl BoundaryPair {
    pub fn new(left: EndCondition, right: EndCondition) -> Result<Self> {
        if matches!(left, EndCondition::TerminalRobin { .. }) {
            return Err(Error::BadBoundary(
                "the terminal Robin condition belongs on the right end".into(),
            ));
        }
        if matches!(right, EndCondition::InitialState(_)) {
            return Err(Error::BadBoundary(
                "the initial state belongs on the left end".into(),
            ));
        }
        Ok(Self { left, right })
    }
}

/// Coefficients of the `n` interface rows for one condition kind at time `t`:
/// `y_coeff * y + lambda_coeff * lambda = g + rhs_offset`.
///
/// Value kinds pin the nodal unknown directly; derivative kinds use the
/// semi-discrete identities, e.g. a state-derivative datum `y'(t) = g`
/// becomes `-A y(t) + lambda(t)/nu = g`.
#[derive(Debug, Clone)]
pub struct InterfaceRows {
    pub y_coeff: DenseMatrix,
    pub lambda_coeff: DenseMatrix,
    pub rhs_offset: Vec<f64>,
}

impl InterfaceRows {
    /// Evaluates the row expression on nodal values and subtracts the offset,
    /// recovering the datum `g` the rows would impose. Extraction therefore
    /// uses exactly the coefficients of imposition.
    pub fn evaluate(&self, y: &[f64], lambda: &[f64]) -> Vec<f64> {
        let ay = self.y_coeff.matvec(y);
        let al = self.lambda_coeff.matvec(lambda);
        ay.iter()
            .zip(&al)
            .zip(&self.rhs_offset)
            .map(|((a, b), c)| a + b - c)
            .collect()
    }
}

/// Builds the interface rows for a condition kind at interface time `t`.
pub fn interface_row(kind: ConditionKind, prob: &ControlProblem, t: f64) -> InterfaceRows {
    let n = prob.dim();
    match kind {
        ConditionKind::StateValue => InterfaceRows {
            y_coeff: DenseMatrix::identity(n),
            lambda_coeff: DenseMatrix::zeros(n, n),
            rhs_offset: vec![0.0; n],
        },
        ConditionKind::AdjointValue => InterfaceRows {
            y_coeff: DenseMatrix::zeros(n, n),
            lambda_coeff: DenseMatrix::identity(n),
            rhs_offset: vec![0.0; n],
        },
        ConditionKind::StateDerivative => {
            let mut y_coeff = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    y_coeff.set(i, j, -prob.operator().get(i, j));
                }
            }
            let mut lambda_coeff = DenseMatrix::zeros(n, n);
            for i in 0..n {
                lambda_coeff.set(i, i, 1.0 / prob.nu());
            }
            InterfaceRows {
                y_coeff,
                lambda_coeff,
                rhs_offset: vec![0.0; n],
            }
        }
        ConditionKind::AdjointDerivative => InterfaceRows {
            y_coeff: DenseMatrix::identity(n),
            lambda_coeff: prob.operator().transpose(),
            rhs_offset: prob.target_at(t),
        },
    }
}

/// Reads an interface datum of the given kind off a trajectory end.
pub fn extract_interface(
    traj: &Trajectory,
    end: GridEnd,
    kind: ConditionKind,
    prob: &ControlProblem,
) -> Vec<f64> {
    let (node, t) = match end {
        GridEnd::First => (0, traj.grid.node(0)),
        GridEnd::Last => (traj.node_count() - 1, traj.grid.node(traj.grid.intervals())),
    };
    interface_row(kind, prob, t).evaluate(&traj.y[node], &traj.lambda[node])
}

fn end_kind_rows(
    prob: &ControlProblem,
    cond: &EndCondition,
    t: f64,
) -> (InterfaceRows, Option<Vec<f64>>) {
    let n = prob.dim();
    match cond {
        EndCondition::InitialState(y0) => (
            InterfaceRows {
                y_coeff: DenseMatrix::identity(n),
                lambda_coeff: DenseMatrix::zeros(n, n),
                rhs_offset: vec![0.0; n],
            },
            Some(y0.clone()),
        ),
        EndCondition::TerminalRobin { gamma, target_end } => {
            let mut y_coeff = DenseMatrix::zeros(n, n);
            for i in 0..n {
                y_coeff.set(i, i, *gamma);
            }
            (
                InterfaceRows {
                    y_coeff,
                    lambda_coeff: DenseMatrix::identity(n),
                    rhs_offset: vec![0.0; n],
                },
                Some(target_end.iter().map(|v| gamma * v).collect()),
            )
        }
        EndCondition::Interface(cond) => {
            let rows = interface_row(cond.kind, prob, t);
            let data = if cond.data.is_empty() {
                None
            } else {
                Some(cond.data.clone())
            };
            (rows, data)
        }
    }
}

/// Prefactored Crank-Nicolson solver for one (sub)interval.
///
/// The system matrix depends only on the problem, the grid and the *kinds*
/// of the end conditions, so a Schwarz iteration factors once and re-solves
/// with fresh interface payloads.
pub struct SubdomainSolver {
    prob: ControlProblem,
    grid: TimeGrid,
    matrix: BandedMatrix,
    factors: BandedLu,
    base_rhs: Vec<f64>,
    left_needs_payload: bool,
    right_needs_payload: bool,
    left_offset: Vec<f64>,
    right_offset: Vec<f64>,
    matrix_inf_norm: f64,
}

/// Residual acceptance for all-at-once solves, relative to
/// `|M|_inf |x|_inf + |b|_inf`.
const SOLVE_RESIDUAL_TOL: f64 = 1e-9;

impl SubdomainSolver {
    #[allow(clippy::needless_range_loop)] // stencil assembly reads best indexed
    pub fn new(prob: &ControlProblem, grid: &TimeGrid, bc: &BoundaryPair) -> Result<Self> {
        validate_end_data(prob, &bc.left)?;
        validate_end_data(prob, &bc.right)?;

        let n = prob.dim();
        let nt = grid.intervals();
        let size = 2 * n * (nt + 1);
        let bw = if n == 1 { 2 } else { 3 * n - 1 };
        let mut m = BandedMatrix::zeros(size, bw, bw);
        let mut rhs = vec![0.0; size];

        let h = grid.step();
        let a = prob.operator();
        let iy = |node: usize, j: usize| 2 * n * node + j;
        let il = |node: usize, j: usize| 2 * n * node + n + j;

        // interior Crank-Nicolson rows for each interval m -> m+1:
        //   state rows at n + 2nm, adjoint rows at 2n(m+1)
        for k in 0..nt {
            let target_avg: Vec<f64> = {
                let t0 = prob.target_at(grid.node(k));
                let t1 = prob.target_at(grid.node(k + 1));
                t0.iter().zip(&t1).map(|(u, v)| 0.5 * (u + v)).collect()
            };
            for i in 0..n {
                let rs = 2 * n * k + n + i;
                m.add(rs, iy(k, i), -1.0 / h);
                m.add(rs, iy(k + 1, i), 1.0 / h);
                for j in 0..n {
                    m.add(rs, iy(k, j), 0.5 * a.get(i, j));
                    m.add(rs, iy(k + 1, j), 0.5 * a.get(i, j));
                }
                m.add(rs, il(k, i), -0.5 / prob.nu());
                m.add(rs, il(k + 1, i), -0.5 / prob.nu());

                let ra = 2 * n * (k + 1) + i;
                m.add(ra, il(k, i), -1.0 / h);
                m.add(ra, il(k + 1, i), 1.0 / h);
                m.add(ra, iy(k, i), -0.5);
                m.add(ra, iy(k + 1, i), -0.5);
                for j in 0..n {
                    // A^T block
                    m.add(ra, il(k, j), -0.5 * a.get(j, i));
                    m.add(ra, il(k + 1, j), -0.5 * a.get(j, i));
                }
                rhs[ra] = -target_avg[i];
            }
        }

        let (left_rows, left_data) = end_kind_rows(prob, &bc.left, grid.t_start());
        for i in 0..n {
            for j in 0..n {
                let cy = left_rows.y_coeff.get(i, j);
                if cy != 0.0 {
                    m.add(i, iy(0, j), cy);
                }
                let cl = left_rows.lambda_coeff.get(i, j);
                if cl != 0.0 {
                    m.add(i, il(0, j), cl);
                }
            }
        }
        let (right_rows, right_data) = end_kind_rows(prob, &bc.right, grid.t_end());
        for i in 0..n {
            let r = 2 * n * nt + n + i;
            for j in 0..n {
                let cy = right_rows.y_coeff.get(i, j);
                if cy != 0.0 {
                    m.add(r, iy(nt, j), cy);
                }
                let cl = right_rows.lambda_coeff.get(i, j);
                if cl != 0.0 {
                    m.add(r, il(nt, j), cl);
                }
            }
        }

        let left_needs_payload = matches!(bc.left, EndCondition::Interface(_));
        let right_needs_payload = matches!(bc.right, EndCondition::Interface(_));
        // non-interface ends have fixed data; bake it into the base rhs
        if let (false, Some(data)) = (left_needs_payload, &left_data) {
            for i in 0..n {
                rhs[i] = data[i] + left_rows.rhs_offset[i];
            }
        }
        if let (false, Some(data)) = (right_needs_payload, &right_data) {
            for i in 0..n {
                rhs[2 * n * nt + n + i] = data[i] + right_rows.rhs_offset[i];
            }
        }

        let factors = m.factor()?;
        let matrix_inf_norm = m.inf_norm();
        Ok(Self {
            prob: prob.clone(),
            grid: grid.clone(),
            matrix: m,
            factors,
            base_rhs: rhs,
            left_needs_payload,
            right_needs_payload,
            left_offset: left_rows.rhs_offset,
            right_offset: right_rows.rhs_offset,
            matrix_inf_norm,
        })
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    /// Solves with the given interface payloads. A payload is required for
    /// each end declared as an interface and rejected otherwise.
    pub fn solve(&self, left: Option<&[f64]>, right: Option<&[f64]>) -> Result<Trajectory> {
        let n = self.prob.dim();
        let nt = self.grid.intervals();
        let mut rhs = self.base_rhs.clone();

        match (self.left_needs_payload, left) {
            (true, Some(g)) => {
                if g.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "left payload has length {}, expected {n}",
                        g.len()
                    )));
                }
                for i in 0..n {
                    rhs[i] = g[i] + self.left_offset[i];
                }
            }
            (true, None) => {
                return Err(Error::BadBoundary(
                    "left end is an interface and needs a payload".into(),
                ))
            }
            (false, Some(_)) => {
                return Err(Error::BadBoundary(
                    "left end is not an interface, payload not accepted".into(),
                ))
            }
            (false, None) => {}
        }
        match (self.right_needs_payload, right) {
            (true, Some(g)) => {
                if g.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "right payload has length {}, expected {n}",
                        g.len()
                    )));
                }
                for i in 0..n {
                    rhs[2 * n * nt + n + i] = g[i] + self.right_offset[i];
                }
            }
            (true, None) => {
                return Err(Error::BadBoundary(
                    "right end is an interface and needs a payload".into(),
                ))
            }
            (false, Some(_)) => {
                return Err(Error::BadBoundary(
                    "right end is not an interface, payload not accepted".into(),
                ))
            }
            (false, None) => {}
        }

        let x = self.factors.solve(&rhs);
        let residual = self
            .matrix
            .matvec(&x)
            .iter()
            .zip(&rhs)
            .fold(0.0f64, |acc, (r, b)| acc.max((r - b).abs()));
        let x_inf = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let b_inf = rhs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let tolerance = SOLVE_RESIDUAL_TOL * (self.matrix_inf_norm * x_inf + b_inf);
        if residual > tolerance && tolerance > 0.0 {
            return Err(Error::SolveFailed { residual, tolerance });
        }

        let mut y = Vec::with_capacity(nt + 1);
        let mut lambda = Vec::with_capacity(nt + 1);
        for node in 0..=nt {
            y.push(x[2 * n * node..2 * n * node + n].to_vec());
            lambda.push(x[2 * n * node + n..2 * n * node + 2 * n].to_vec());
        }
        Ok(Trajectory {
            grid: self.grid.clone(),
            y,
            lambda,
        })
    }
}

fn validate_end_data(prob: &ControlProblem, cond: &EndCondition) -> Result<()> {
    let n = prob.dim();
    let len = match cond {
        EndCondition::InitialState(v) => v.len(),
        EndCondition::TerminalRobin { target_end, .. } => target_end.len(),
        EndCondition::Interface(c) => {
            if c.data.is_empty() {
                return Ok(()); // payload supplied per solve
            }
            c.data.len()
        }
    };
    if len != n {
        return Err(Error::DimensionMismatch(format!(
            "end condition data has length {len}, expected {n}"
        )));
    }
    Ok(())
}

fn physical_boundary(prob: &ControlProblem) -> BoundaryPair {
    BoundaryPair {
        left: EndCondition::InitialState(prob.initial_state().to_vec()),
        right: EndCondition::TerminalRobin {
            gamma: prob.gamma(),
            target_end: prob.target_at(prob.horizon()),
        },
    }
}

fn check_spans_horizon(prob: &ControlProblem, grid: &TimeGrid) -> Result<()> {
    let ok = grid.t_start().abs() <= 1e-12 * prob.horizon()
        && (grid.t_end() - prob.horizon()).abs() <= 1e-9 * prob.horizon();
    if !ok {
        return Err(Error::BadBoundary(format!(
            "monolithic grid [{}, {}] does not span (0, {})",
            grid.t_start(),
            grid.t_end(),
            prob.horizon()
        )));
    }
    Ok(())
}

/// Assembles the all-at-once system on the full interval: size
/// `2 n (nt + 1)`, unknowns node-major `(y_m, lambda_m)`, initial rows
/// `y_0 = y0` and terminal rows `lambda_nt + gamma y_nt = gamma target(T)`.
pub fn assemble_monolithic(
    prob: &ControlProblem,
    grid: &TimeGrid,
) -> Result<(BandedMatrix, Vec<f64>)> {
    check_spans_horizon(prob, grid)?;
    let solver = SubdomainSolver::new(prob, grid, &physical_boundary(prob))?;
    Ok((solver.matrix.clone(), solver.base_rhs.clone()))
}

/// Solves the monolithic reference problem on the full interval.
pub fn solve_monolithic(prob: &ControlProblem, grid: &TimeGrid) -> Result<Trajectory> {
    check_spans_horizon(prob, grid)?;
    SubdomainSolver::new(prob, grid, &physical_boundary(prob))?.solve(None, None)
}

/// One-shot subdomain solve with fully specified boundary data.
pub fn solve_subdomain(
    prob: &ControlProblem,
    subgrid: &TimeGrid,
    bc: &BoundaryPair,
) -> Result<Trajectory> {
    for (cond, side) in [(&bc.left, "left"), (&bc.right, "right")] {
        if let EndCondition::Interface(c) = cond {
            if c.data.is_empty() {
                return Err(Error::BadBoundary(format!(
                    "{side} interface condition carries no data"
                )));
            }
        }
    }
    let solver = SubdomainSolver::new(prob, subgrid, bc)?;
    let left = match &bc.left {
        EndCondition::Interface(c) => Some(c.data.as_slice()),
        _ => None,
    };
    let right = match &bc.right {
        EndCondition::Interface(c) => Some(c.data.as_slice()),
        _ => None,
    };
    solver.solve(left, right)
}
