//! Python module `radmoser_py`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use radmoser::cli::{ExperimentConfig, Overrides};
use radmoser::corpus::random_smooth_source;
use radmoser::functions::RadialFunction;
use radmoser::moser::{self, MaximizeConfig};
use radmoser::pde::{self, Coefficient, ExpProblem, MDeltaConfig, Nonlinearity, PowerProblem, SolveConfig};
use radmoser::spaces::{self, SpaceParams};
use radmoser::{operators, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::Domain(_) | Error::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Weighted space `X^{k,p}_R(α_0..α_k)` with target weight `r^θ`.
#[pyclass(name = "Space", frozen)]
#[derive(Clone)]
struct Space {
    inner: SpaceParams,
}

#[pymethods]
impl Space {
    #[new]
    #[pyo3(signature = (k, p, radius, alpha, theta=0.0))]
    fn new(k: usize, p: f64, radius: f64, alpha: Vec<f64>, theta: f64) -> PyResult<Self> {
        Ok(Space { inner: SpaceParams::new(k, p, radius, alpha, theta).map_err(py_err)? })
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }

    #[getter]
    fn regime(&self) -> String {
        self.inner.regime().to_string()
    }

    /// Sobolev norm of the polynomial `Σ c_i r^i`.
    fn polynomial_norm(&self, coeffs: Vec<f64>) -> PyResult<f64> {
        let u = RadialFunction::polynomial(self.inner.radius, &coeffs, self.inner.k).map_err(py_err)?;
        spaces::sobolev_norm(&u, &self.inner).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!("Space(k={}, p={}, radius={}, alpha={:?}, theta={})", s.k, s.p, s.radius, s.alpha, s.theta)
    }
}

#[pyfunction]
fn mu0(theta: f64, k: usize, p: f64) -> PyResult<f64> {
    moser::mu0(theta, k, p).map_err(py_err)
}

#[pyfunction]
fn mu0_navier(theta: f64, k: usize, gamma: f64, p: f64) -> PyResult<f64> {
    operators::mu0_navier(theta, k, gamma, p).map_err(py_err)
}

#[pyfunction]
fn hardy_constant(p: f64, alpha: f64) -> PyResult<f64> {
    spaces::hardy_constant(p, alpha).map_err(py_err)
}

#[pyfunction]
fn c1n_closed_form(gamma: f64, n: usize) -> PyResult<f64> {
    operators::c1n_closed_form(gamma, n).map_err(py_err)
}

#[pyfunction]
fn coefficient_table(gamma: f64, n_max: usize) -> Vec<Vec<f64>> {
    operators::coefficient_table(gamma, n_max)
}

/// `(relative error, |G v(R)|)` for a seeded random smooth source.
#[pyfunction]
#[pyo3(signature = (seed, gamma, n=2000, radius=1.0))]
fn green_roundtrip(seed: u64, gamma: f64, n: usize, radius: f64) -> PyResult<(f64, f64)> {
    operators::green_roundtrip_error(random_smooth_source(seed, radius), gamma, radius, n).map_err(py_err)
}

/// Rows `{m, norm, value, lower_bound, growth, predicted}`.
#[pyfunction]
#[pyo3(signature = (mu, space, m, eps=0.05))]
fn blowup_table<'py>(py: Python<'py>, mu: f64, space: &Space, m: Vec<f64>, eps: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let rows = moser::blowup_table(mu, &space.inner, &m, eps).map_err(py_err)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("m", r.m)?;
            d.set_item("norm", r.norm)?;
            d.set_item("value", r.value)?;
            d.set_item("lower_bound", r.lower_bound)?;
            d.set_item("growth", r.growth)?;
            d.set_item("predicted", r.predicted)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
#[pyo3(signature = (mu, space, seed, n=400, restarts=3))]
fn maximize_lmu<'py>(py: Python<'py>, mu: f64, space: &Space, seed: u64, n: usize, restarts: usize) -> PyResult<Bound<'py, PyDict>> {
    let cfg = MaximizeConfig { seed, n, restarts, ..Default::default() };
    let r = moser::maximize_lmu(mu, &space.inner, &cfg).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("norm", r.norm)?;
    d.set_item("converged", r.converged)?;
    d.set_item("restart_values", r.restart_values)?;
    d.set_item("r", r.maximizer.grid().nodes().to_vec())?;
    d.set_item("u", r.maximizer.values().to_vec())?;
    Ok(d)
}

fn report_dict<'py>(py: Python<'py>, r: &pde::SolveReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lambda", r.lambda)?;
    d.set_item("lambda_integral", r.lambda_integral)?;
    d.set_item("rayleigh", r.rayleigh)?;
    d.set_item("residual", r.residual)?;
    d.set_item("origin_defect", r.endpoints.origin_defect)?;
    d.set_item("weak_defects", r.weak_defects.clone())?;
    d.set_item("converged", r.converged)?;
    d.set_item("restart_values", r.restart_values.clone())?;
    d.set_item("r", r.solution.grid().nodes().to_vec())?;
    d.set_item("u", r.solution.u.values().to_vec())?;
    Ok(d)
}

/// `Δ_α² u = λ r^{θ−α} g |u|^{p−2} u` with constant `g`.
#[pyfunction]
#[pyo3(signature = (alpha, theta, p=2.0, g=1.0, radius=1.0, n=2000))]
fn solve_power<'py>(py: Python<'py>, alpha: f64, theta: f64, p: f64, g: f64, radius: f64, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let problem = PowerProblem::new(alpha, theta, p, Coefficient::Constant(g), radius).map_err(py_err)?;
    let r = pde::solve_power(&problem, &SolveConfig { n, ..Default::default() }).map_err(py_err)?;
    report_dict(py, &r)
}

/// `Δ_3² u = λ r^{θ−3} u e^{a (m_Δ u)²}`; `a = 0` is the linear case.
#[pyfunction]
#[pyo3(signature = (theta, a, seed, radius=1.0, n=2000, m_delta=None))]
fn solve_exp<'py>(
    py: Python<'py>,
    theta: f64,
    a: f64,
    seed: u64,
    radius: f64,
    n: usize,
    m_delta: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let md = match m_delta {
        Some(m) => m,
        None => pde::estimate_m_delta(radius, &MDeltaConfig::default()).map_err(py_err)?.value,
    };
    let f = if a == 0.0 { Nonlinearity::Linear } else { Nonlinearity::ExpQuadratic { a } };
    let problem = ExpProblem::new(theta, f, md, radius).map_err(py_err)?;
    let r = pde::solve_exp(&problem, &SolveConfig { n, seed, ..Default::default() }).map_err(py_err)?;
    let d = report_dict(py, &r)?;
    d.set_item("m_delta", md)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (radius=1.0, n=2000, r_min=1e-6))]
fn estimate_m_delta(radius: f64, n: usize, r_min: f64) -> PyResult<f64> {
    let cfg = MDeltaConfig { n, r_min, ..Default::default() };
    Ok(pde::estimate_m_delta(radius, &cfg).map_err(py_err)?.value)
}

/// Runs a CLI experiment in memory and returns `(passed, csv, summary)`.
#[pyfunction]
#[pyo3(signature = (experiment, config="", seed=None, tol=None, grid_n=None))]
fn run_experiment(
    experiment: String,
    config: &str,
    seed: Option<u64>,
    tol: Option<f64>,
    grid_n: Option<usize>,
) -> PyResult<(bool, String, String)> {
    let over = Overrides { experiment: Some(experiment), seed, tol, grid_n, out: None };
    let cfg = ExperimentConfig::resolve(Some(config), over).map_err(|e| PyValueError::new_err(e.0))?;
    let rep = radmoser::cli::run(&cfg).map_err(|e| PyValueError::new_err(e.0))?;
    Ok((rep.summary.passed(), rep.table.to_csv(), rep.summary.render()))
}

#[pymodule]
fn radmoser_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Space>()?;
    m.add_function(wrap_pyfunction!(mu0, m)?)?;
    m.add_function(wrap_pyfunction!(mu0_navier, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_constant, m)?)?;
    m.add_function(wrap_pyfunction!(c1n_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(coefficient_table, m)?)?;
    m.add_function(wrap_pyfunction!(green_roundtrip, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_table, m)?)?;
    m.add_function(wrap_pyfunction!(maximize_lmu, m)?)?;
    m.add_function(wrap_pyfunction!(solve_power, m)?)?;
    m.add_function(wrap_pyfunction!(solve_exp, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_m_delta, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
