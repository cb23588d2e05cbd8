//! Python bindings for the schwarz-time library.
//!
//! Exposes the spectral convergence-factor engine, the scalar contraction
//! oracle and the heat-control Schwarz runs. Build as a cdylib and import as
//! `schwarz_time_py`; see python/smoke_test.py for usage.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use schwarz_time::experiments::reference_target;
use schwarz_time::model::{heat_problem_1d, Decomposition, TimeGrid, VariantId};
use schwarz_time::schwarz::{
    measured_contraction, run_schwarz, scalar_contraction_oracle, InitStrategy, SchwarzConfig,
    DEFAULT_REL_TOL, DEFAULT_SEED,
};
use schwarz_time::spectral;
use schwarz_time::{solve_monolithic, sym_eigen};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn variant(name: &str) -> PyResult<VariantId> {
    VariantId::parse(name).map_err(err)
}

/// Scalar parameters of the spectral analysis.
#[pyclass(name = "SpectralParams", frozen)]
#[derive(Clone)]
struct PySpectralParams {
    inner: spectral::SpectralParams,
}

#[pymethods]
impl PySpectralParams {
    #[new]
    #[pyo3(signature = (nu=0.1, gamma=10.0, horizon=1.0, alpha=0.4))]
    fn new(nu: f64, gamma: f64, horizon: f64, alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: spectral::SpectralParams::new(nu, gamma, horizon, alpha).map_err(err)?,
        })
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.inner.horizon
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    fn __repr__(&self) -> String {
        format!(
            "SpectralParams(nu={}, gamma={}, horizon={}, alpha={})",
            self.inner.nu, self.inner.gamma, self.inner.horizon, self.inner.alpha
        )
    }
}

/// sigma = sqrt(d^2 + 1/nu)
#[pyfunction]
fn sigma(d: f64, nu: f64) -> f64 {
    spectral::sigma(d, nu)
}

/// Convergence factor of a variant at eigenvalue d.
#[pyfunction]
fn rho(variant_name: &str, d: f64, params: &PySpectralParams) -> PyResult<f64> {
    Ok(spectral::rho(variant(variant_name)?, d, &params.inner))
}

/// Relaxed convergence factor |1 - theta (1 + F)| for SD1 or SN1.
#[pyfunction]
fn rho_relaxed(variant_name: &str, d: f64, theta: f64, params: &PySpectralParams) -> PyResult<f64> {
    spectral::rho_relaxed(variant(variant_name)?, d, theta, &params.inner).map_err(err)
}

/// Closed-form convergence factor at d = 0 for SD1, SD2 or SN1.
#[pyfunction]
fn rho_at_zero(variant_name: &str, params: &PySpectralParams) -> PyResult<f64> {
    spectral::rho_at_zero(variant(variant_name)?, &params.inner).map_err(err)
}

/// Optimal relaxation parameter 2 / (2 + rho(0)).
#[pyfunction]
fn optimal_theta(variant_name: &str, params: &PySpectralParams) -> PyResult<f64> {
    spectral::optimal_theta(variant(variant_name)?, &params.inner).map_err(err)
}

/// Gamma-free theorem bound; returns (bound, loose_bound_or_None).
#[pyfunction]
fn rho_bound(
    variant_name: &str,
    d_min: f64,
    params: &PySpectralParams,
) -> PyResult<(f64, Option<f64>)> {
    let b = spectral::rho_bound(variant(variant_name)?, d_min, &params.inner).map_err(err)?;
    Ok((b.bound, b.loose))
}

/// Convergence factors over an ascending eigenvalue grid.
#[pyfunction]
#[pyo3(signature = (variant_name, d_grid, params, theta=None))]
fn rho_sweep(
    variant_name: &str,
    d_grid: Vec<f64>,
    params: &PySpectralParams,
    theta: Option<f64>,
) -> PyResult<Vec<(f64, f64)>> {
    let table =
        spectral::sweep(variant(variant_name)?, &d_grid, &params.inner, theta).map_err(err)?;
    Ok(table.rows)
}

/// Eigenvalues of the finite-difference Laplacian of the heat test case.
#[pyfunction]
#[pyo3(signature = (nx=32, length=1.0))]
fn heat_eigenvalues(nx: usize, length: f64) -> PyResult<Vec<f64>> {
    let (prob, _) = heat_problem_1d(length, nx, 0.1, 10.0, 1.0, |_, _| 0.0).map_err(err)?;
    Ok(sym_eigen(prob.operator()).map_err(err)?.eigenvalues().to_vec())
}

/// Scalar Schwarz contraction measurement; returns (measured, analytic).
#[pyfunction]
#[pyo3(signature = (variant_name, d, params, nt=4096, theta=1.0))]
fn scalar_oracle(
    variant_name: &str,
    d: f64,
    params: &PySpectralParams,
    nt: usize,
    theta: f64,
) -> PyResult<(f64, f64)> {
    scalar_contraction_oracle(d, &params.inner, variant(variant_name)?, nt, theta).map_err(err)
}

/// Full Schwarz run on the 1D heat control problem.
///
/// Returns a dict with keys: errors, iterations, converged, diverged,
/// measured_contraction.
#[pyfunction]
#[pyo3(signature = (variant_name, theta=1.0, nx=32, nt=40, params=None, init="zeros", seed=DEFAULT_SEED, max_iter=15, tol=DEFAULT_REL_TOL))]
#[allow(clippy::too_many_arguments)]
fn run_heat_schwarz<'py>(
    py: Python<'py>,
    variant_name: &str,
    theta: f64,
    nx: usize,
    nt: usize,
    params: Option<PySpectralParams>,
    init: &str,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let v = variant(variant_name)?;
    let p = match params {
        Some(p) => p.inner,
        None => spectral::SpectralParams::new(0.1, 10.0, 1.0, 0.4).map_err(err)?,
    };
    let (prob, _) =
        heat_problem_1d(1.0, nx, p.nu, p.gamma, p.horizon, reference_target).map_err(err)?;
    let grid = TimeGrid::new(0.0, p.horizon, nt).map_err(err)?;
    let decomp = Decomposition::new(&grid, p.alpha).map_err(err)?;
    let reference = solve_monolithic(&prob, &grid).map_err(err)?;
    let cfg = SchwarzConfig {
        theta,
        max_iter,
        tol,
        init: match init {
            "zeros" => InitStrategy::Zeros,
            "random" => InitStrategy::SeededRandom { scale: 1.0, seed },
            other => return Err(PyValueError::new_err(format!("unknown init '{other}'"))),
        },
        ..SchwarzConfig::new(v)
    };
    let report = run_schwarz(&prob, &decomp, &cfg, &reference).map_err(err)?;

    let out = PyDict::new(py);
    out.set_item("errors", &report.errors)?;
    out.set_item("iterations", report.iterations)?;
    out.set_item("converged", report.converged)?;
    out.set_item("diverged", report.diverged)?;
    out.set_item(
        "measured_contraction",
        measured_contraction(&report).ok(),
    )?;
    Ok(out)
}

#[pymodule]
fn schwarz_time_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectralParams>()?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(rho_relaxed, m)?)?;
    m.add_function(wrap_pyfunction!(rho_at_zero, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_theta, m)?)?;
    m.add_function(wrap_pyfunction!(rho_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rho_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(heat_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(scalar_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(run_heat_schwarz, m)?)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add("DEFAULT_REL_TOL", DEFAULT_REL_TOL)?;
    Ok(())
}
