//! Python bindings: network and scenario types, analytic coverage and rate,
//! threshold optimization and a Monte-Carlo coverage estimate.

use cellwait::analytic::{self, AccessEvent};
use cellwait::numerics::QuadratureSpec;
use cellwait::optimize::{self, OptimizationReport};
use cellwait::simulate;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn optimize_err(e: cellwait::OptimizeError) -> PyErr {
    match e {
        cellwait::OptimizeError::Analytic(cellwait::AnalyticError::Numerics(_)) => runtime_err(e),
        other => value_err(other),
    }
}

fn analytic_err(e: cellwait::AnalyticError) -> PyErr {
    match e {
        cellwait::AnalyticError::Numerics(_) => runtime_err(e),
        other => value_err(other),
    }
}

/// Small-cell network: density, mode fractions, clocks and radio parameters.
#[pyclass(name = "NetworkConfig", frozen, skip_from_py_object, module = "cellwait")]
#[derive(Clone)]
pub struct PyNetworkConfig {
    pub inner: cellwait::NetworkConfig,
}

#[pymethods]
impl PyNetworkConfig {
    #[new]
    #[pyo3(signature = (rho_f, p_a, p_i, p_s, mu, lambda_s, alpha = 4.0, p_tx = cellwait::model::dbm_to_watts(23.0), sigma2 = 0.0, zeta = 1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        rho_f: f64,
        p_a: f64,
        p_i: f64,
        p_s: f64,
        mu: f64,
        lambda_s: f64,
        alpha: f64,
        p_tx: f64,
        sigma2: f64,
        zeta: f64,
    ) -> PyResult<Self> {
        let inner = cellwait::NetworkConfig::new(rho_f, p_a, p_i, p_s, mu, lambda_s, alpha, p_tx, sigma2, zeta).map_err(value_err)?;
        Ok(PyNetworkConfig { inner })
    }

    /// Reference deployment with `(p_A, p_I, p_S) = (0.1, 0.1, 0.8)`.
    #[staticmethod]
    fn reference() -> Self {
        PyNetworkConfig {
            inner: cellwait::NetworkConfig::reference(),
        }
    }

    fn noiseless(&self) -> Self {
        PyNetworkConfig {
            inner: self.inner.noiseless(),
        }
    }

    fn with_mode_fractions(&self, p_a: f64, p_i: f64, p_s: f64) -> PyResult<Self> {
        let inner = self.inner.with_mode_fractions(p_a, p_i, p_s).map_err(value_err)?;
        Ok(PyNetworkConfig { inner })
    }

    /// Availability `β_w`: probability a cell is idle by `w` seconds.
    fn beta_w(&self, w: f64) -> f64 {
        self.inner.beta_w(w)
    }

    #[getter]
    fn rho_f(&self) -> f64 {
        self.inner.rho_f()
    }
    #[getter]
    fn p_a(&self) -> f64 {
        self.inner.p_a()
    }
    #[getter]
    fn p_i(&self) -> f64 {
        self.inner.p_i()
    }
    #[getter]
    fn p_s(&self) -> f64 {
        self.inner.p_s()
    }
    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }
    #[getter]
    fn lambda_s(&self) -> f64 {
        self.inner.lambda_s()
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }
    #[getter]
    fn p_tx(&self) -> f64 {
        self.inner.p_tx()
    }
    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.sigma2()
    }
    #[getter]
    fn zeta(&self) -> f64 {
        self.inner.zeta()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "NetworkConfig(rho_f={}, p_a={}, p_i={}, p_s={}, mu={}, lambda_s={}, alpha={}, p_tx={}, sigma2={}, zeta={})",
            c.rho_f(),
            c.p_a(),
            c.p_i(),
            c.p_s(),
            c.mu(),
            c.lambda_s(),
            c.alpha(),
            c.p_tx(),
            c.sigma2(),
            c.zeta()
        )
    }
}

/// Threshold distance `r_th` (m) and tolerable delay `w` (s).
#[pyclass(name = "AccessScenario", frozen, skip_from_py_object, module = "cellwait")]
#[derive(Clone)]
pub struct PyAccessScenario {
    pub inner: cellwait::AccessScenario,
}

#[pymethods]
impl PyAccessScenario {
    #[new]
    fn new(r_th: f64, w: f64) -> PyResult<Self> {
        Ok(PyAccessScenario {
            inner: cellwait::AccessScenario::new(r_th, w).map_err(value_err)?,
        })
    }

    #[getter]
    fn r_th(&self) -> f64 {
        self.inner.r_th()
    }
    #[getter]
    fn w(&self) -> f64 {
        self.inner.w()
    }

    fn __repr__(&self) -> String {
        format!("AccessScenario(r_th={}, w={})", self.inner.r_th(), self.inner.w())
    }
}

#[pyclass(name = "OptimizationResult", frozen, get_all, skip_from_py_object, module = "cellwait")]
#[derive(Clone)]
pub struct PyOptimizationResult {
    pub r_star: f64,
    pub objective_value: f64,
    pub method: String,
    pub iterations: usize,
    pub candidate_radii: Vec<f64>,
    pub grid_optimum: Option<(f64, f64)>,
    pub degenerate: bool,
    pub taylor_valid: bool,
}

#[pymethods]
impl PyOptimizationResult {
    fn __repr__(&self) -> String {
        format!(
            "OptimizationResult(r_star={}, objective_value={}, method='{}', iterations={})",
            self.r_star, self.objective_value, self.method, self.iterations
        )
    }
}

impl From<OptimizationReport> for PyOptimizationResult {
    fn from(r: OptimizationReport) -> Self {
        let method = match r.method {
            optimize::OptimizationMethod::TaylorQuadratic => "taylor_quadratic",
            optimize::OptimizationMethod::Bisection => "bisection",
            optimize::OptimizationMethod::GridOracle => "grid_oracle",
        };
        PyOptimizationResult {
            r_star: r.r_star,
            objective_value: r.objective_value,
            method: method.to_string(),
            iterations: r.iterations,
            candidate_radii: r.candidate_radii,
            grid_optimum: r.grid_optimum,
            degenerate: r.degenerate,
            taylor_valid: r.taylor_valid,
        }
    }
}

fn parse_event(code: &str) -> PyResult<AccessEvent> {
    AccessEvent::ALL
        .into_iter()
        .find(|e| e.code().eq_ignore_ascii_case(code))
        .ok_or_else(|| PyValueError::new_err(format!("unknown access event {code:?}; expected IA, DA or OA")))
}

#[pyfunction]
fn db_to_linear(db: f64) -> f64 {
    cellwait::model::db_to_linear(db)
}

/// `{"IA": .., "DA": .., "OA": ..}` for the scenario.
#[pyfunction]
fn access_probabilities<'py>(py: Python<'py>, cfg: &PyNetworkConfig, scen: &PyAccessScenario) -> PyResult<Bound<'py, PyDict>> {
    let p = analytic::access_probabilities(&cfg.inner, &scen.inner);
    let d = PyDict::new(py);
    for e in AccessEvent::ALL {
        d.set_item(e.code(), p.get(e))?;
    }
    Ok(d)
}

/// Serving-distance CDF of one access event.
#[pyfunction]
fn distance_cdf(cfg: &PyNetworkConfig, scen: &PyAccessScenario, event: &str, r: f64) -> PyResult<f64> {
    analytic::distance_cdf(&cfg.inner, &scen.inner, parse_event(event)?, r).map_err(analytic_err)
}

/// Coverage probability at linear SIR target `gamma`.
///
/// `method` is "auto" (closed form when α = 4 and σ² = 0), "closed" or
/// "quadrature".
#[pyfunction]
#[pyo3(signature = (cfg, scen, gamma, method = "auto"))]
fn coverage(cfg: &PyNetworkConfig, scen: &PyAccessScenario, gamma: f64, method: &str) -> PyResult<f64> {
    let r = match method {
        "auto" => analytic::coverage(&cfg.inner, &scen.inner, gamma, &QuadratureSpec::default()),
        "closed" => analytic::coverage_closed_form(&cfg.inner, &scen.inner, gamma),
        "quadrature" => analytic::coverage_quadrature(&cfg.inner, &scen.inner, gamma),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    Ok(r.map_err(analytic_err)?.value)
}

/// Coverage with `r_th = 0` (no waiting).
#[pyfunction]
fn baseline_coverage(cfg: &PyNetworkConfig, gamma: f64) -> f64 {
    analytic::baseline_coverage(&cfg.inner, gamma)
}

/// Coverage of a link at distance `r`.
#[pyfunction]
fn conditional_coverage(cfg: &PyNetworkConfig, r: f64, gamma: f64) -> f64 {
    analytic::conditional_coverage(&cfg.inner, r, gamma)
}

/// Ergodic rate in bits/s/Hz.
#[pyfunction]
fn capacity(py: Python<'_>, cfg: &PyNetworkConfig, scen: &PyAccessScenario) -> PyResult<f64> {
    let (c, s) = (cfg.inner, scen.inner);
    py.detach(|| analytic::capacity(&c, &s)).map_err(analytic_err)
}

#[pyfunction]
fn optimal_threshold_coverage(cfg: &PyNetworkConfig, w: f64, gamma: f64) -> PyResult<PyOptimizationResult> {
    optimize::optimal_threshold_coverage(&cfg.inner, w, gamma)
        .map(Into::into)
        .map_err(optimize_err)
}

/// Rate-optimal threshold by bisection; `r_upper` is derived when omitted.
#[pyfunction]
#[pyo3(signature = (cfg, w, r_upper = None, epsilon = optimize::DEFAULT_EPSILON))]
fn optimal_threshold_rate(
    py: Python<'_>,
    cfg: &PyNetworkConfig,
    w: f64,
    r_upper: Option<f64>,
    epsilon: f64,
) -> PyResult<PyOptimizationResult> {
    let c = cfg.inner;
    py.detach(|| {
        let upper = match r_upper {
            Some(u) => u,
            None => optimize::default_rate_upper_bound(&c, w)?,
        };
        optimize::optimal_threshold_rate(&c, w, upper, epsilon)
    })
    .map(Into::into)
    .map_err(optimize_err)
}

/// Energy efficiency relative to the no-wait baseline.
#[pyfunction]
fn normalized_energy_efficiency(py: Python<'_>, cfg: &PyNetworkConfig, scen: &PyAccessScenario) -> PyResult<f64> {
    let (c, s) = (cfg.inner, scen.inner);
    py.detach(|| optimize::normalized_energy_efficiency(&c, &s)).map_err(optimize_err)
}

/// Monte-Carlo coverage: `(mean, 95% CI half-width)`.
#[pyfunction]
#[pyo3(signature = (cfg, scen, gamma, n_trials = 10_000, seed = 42))]
fn simulate_coverage(
    py: Python<'_>,
    cfg: &PyNetworkConfig,
    scen: &PyAccessScenario,
    gamma: f64,
    n_trials: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let (c, s) = (cfg.inner, scen.inner);
    let est = py
        .detach(|| simulate::estimate_coverage(&c, &s, gamma, n_trials, seed))
        .map_err(value_err)?;
    Ok((est.mean, est.ci_halfwidth))
}

/// Add the classes and functions to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetworkConfig>()?;
    m.add_class::<PyAccessScenario>()?;
    m.add_class::<PyOptimizationResult>()?;
    m.add_function(wrap_pyfunction!(db_to_linear, m)?)?;
    m.add_function(wrap_pyfunction!(access_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(distance_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(coverage, m)?)?;
    m.add_function(wrap_pyfunction!(baseline_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_threshold_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_threshold_rate, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_energy_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_coverage, m)?)?;
    Ok(())
}

#[pymodule]
#[pyo3(name = "cellwait")]
fn cellwait_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
