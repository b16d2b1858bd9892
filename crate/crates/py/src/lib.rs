//! Python bindings for `nomasim`.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use nomasim::scheduler::{PairGains, RoleAssignment};
use nomasim::{BspoConfig, Error, ScenarioConfig, Scheme};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Config(_) | Error::Parse { .. } | Error::Domain(_) => {
            PyValueError::new_err(err.to_string())
        }
        Error::NonConvergence(_) => PyRuntimeError::new_err(err.to_string()),
        Error::Io { .. } => PyOSError::new_err(err.to_string()),
    }
}

#[pyclass(name = "PowerAllocation", module = "nomasim", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPowerAllocation {
    rho1: f64,
    rho2: f64,
    outage: bool,
}

impl From<nomasim::PowerAllocation> for PyPowerAllocation {
    fn from(a: nomasim::PowerAllocation) -> Self {
        PyPowerAllocation {
            rho1: a.rho1,
            rho2: a.rho2,
            outage: a.outage,
        }
    }
}

#[pymethods]
impl PyPowerAllocation {
    fn __repr__(&self) -> String {
        format!(
            "PowerAllocation(rho1={}, rho2={}, outage={})",
            self.rho1,
            self.rho2,
            if self.outage { "True" } else { "False" }
        )
    }
}

#[pyclass(name = "RatePair", module = "nomasim", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyRatePair {
    r_near: f64,
    r_far: f64,
    psc: f64,
}

impl From<nomasim::RatePair> for PyRatePair {
    fn from(r: nomasim::RatePair) -> Self {
        PyRatePair {
            r_near: r.r_near,
            r_far: r.r_far,
            psc: r.psc,
        }
    }
}

#[pymethods]
impl PyRatePair {
    fn __repr__(&self) -> String {
        format!(
            "RatePair(r_near={}, r_far={}, psc={})",
            self.r_near, self.r_far, self.psc
        )
    }
}

#[pyclass(name = "Decision", module = "nomasim", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDecision {
    near_user: usize,
    far_user: usize,
    switched: bool,
    rho1: f64,
    rho2: f64,
    outage: bool,
    branch: Option<String>,
}

impl From<nomasim::Decision> for PyDecision {
    fn from(d: nomasim::Decision) -> Self {
        PyDecision {
            near_user: d.roles.near_user,
            far_user: d.roles.far_user,
            switched: d.roles.switched_this_step,
            rho1: d.alloc.rho1,
            rho2: d.alloc.rho2,
            outage: d.alloc.outage,
            branch: d.branch.map(|b| b.tag().to_string()),
        }
    }
}

#[pyclass(name = "StepRecord", module = "nomasim", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyStepRecord {
    t: usize,
    d1: f64,
    d2: f64,
    gain1: f64,
    gain2: f64,
    near_user: usize,
    rho1: f64,
    rho2: f64,
    r_near: f64,
    r_far: f64,
    psc: f64,
    switched: bool,
    outage: bool,
    branch: Option<String>,
}

impl From<&nomasim::StepRecord> for PyStepRecord {
    fn from(r: &nomasim::StepRecord) -> Self {
        PyStepRecord {
            t: r.t,
            d1: r.d1,
            d2: r.d2,
            gain1: r.gain1,
            gain2: r.gain2,
            near_user: r.near_user,
            rho1: r.rho1,
            rho2: r.rho2,
            r_near: r.r_near,
            r_far: r.r_far,
            psc: r.psc,
            switched: r.switched,
            outage: r.outage,
            branch: r.branch.map(|b| b.tag().to_string()),
        }
    }
}

impl PyStepRecord {
    fn to_core(&self) -> PyResult<nomasim::StepRecord> {
        let branch = match &self.branch {
            None => None,
            Some(tag) => Some(
                nomasim::Branch::from_tag(tag)
                    .ok_or_else(|| PyValueError::new_err(format!("unknown branch `{tag}`")))?,
            ),
        };
        Ok(nomasim::StepRecord {
            t: self.t,
            d1: self.d1,
            d2: self.d2,
            gain1: self.gain1,
            gain2: self.gain2,
            near_user: self.near_user,
            rho1: self.rho1,
            rho2: self.rho2,
            r_near: self.r_near,
            r_far: self.r_far,
            psc: self.psc,
            switched: self.switched,
            outage: self.outage,
            branch,
        })
    }
}

#[pyclass(name = "RunSummary", module = "nomasim", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyRunSummary {
    scheme: String,
    seed: u64,
    n_records: usize,
    mean_psc: f64,
    mean_r_near: f64,
    mean_r_far: f64,
    n_switches: usize,
    outage_fraction: f64,
    switch_positions: Vec<usize>,
}

impl From<&nomasim::RunSummary> for PyRunSummary {
    fn from(s: &nomasim::RunSummary) -> Self {
        PyRunSummary {
            scheme: s.scheme.name().to_string(),
            seed: s.seed,
            n_records: s.n_records,
            mean_psc: s.mean_psc,
            mean_r_near: s.mean_r_near,
            mean_r_far: s.mean_r_far,
            n_switches: s.n_switches,
            outage_fraction: s.outage_fraction,
            switch_positions: s.switch_positions.clone(),
        }
    }
}

#[pymethods]
impl PyRunSummary {
    fn __repr__(&self) -> String {
        format!(
            "RunSummary(scheme='{}', mean_psc={}, n_switches={}, outage_fraction={})",
            self.scheme, self.mean_psc, self.n_switches, self.outage_fraction
        )
    }
}

#[pyclass(name = "KsReport", module = "nomasim", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyKsReport {
    n: usize,
    statistic: f64,
    critical_value: f64,
    alpha: f64,
    max_distance: f64,
    passed: bool,
}

/// Scenario configuration. Keys and values use the config-file vocabulary.
#[pyclass(name = "Scenario", module = "nomasim", skip_from_py_object)]
#[derive(Clone)]
pub struct PyScenario {
    inner: ScenarioConfig,
}

#[pymethods]
impl PyScenario {
    #[new]
    #[pyo3(signature = (text = None))]
    fn new(text: Option<&str>) -> PyResult<Self> {
        let inner = match text {
            Some(t) => nomasim::parse_config(t).map_err(to_py)?,
            None => ScenarioConfig::default(),
        };
        Ok(PyScenario { inner })
    }

    fn set(&mut self, key: &str, value: &Bound<'_, PyAny>) -> PyResult<()> {
        let text = value.str()?.to_string();
        self.inner.set_key(key, &text).map_err(to_py)
    }

    fn get(&self, key: &str) -> PyResult<String> {
        self.inner.get_key(key).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_config_string()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.n_steps
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        self.inner.scheduler.scheme.name()
    }

    #[getter]
    fn snr_linear(&self) -> f64 {
        self.inner.channel.snr_linear()
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(scheme='{}', seed={}, steps={})",
            self.scheme(),
            self.inner.seed,
            self.inner.n_steps
        )
    }
}

fn bspo_config(
    target_rate: f64,
    rho_th: f64,
    cap_epsilon: f64,
    bisection_tol: f64,
    max_iters: usize,
) -> PyResult<BspoConfig> {
    let cfg = BspoConfig {
        target_rate,
        rho_th,
        cap_epsilon,
        bisection_tol,
        max_iters,
    };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn alloc(rho1: f64) -> nomasim::PowerAllocation {
    nomasim::PowerAllocation::new(rho1, false)
}

#[pyfunction]
fn rate_near(gamma1: f64, rho1: f64) -> f64 {
    nomasim::rate_near(gamma1, &alloc(rho1))
}

#[pyfunction]
fn rate_far(gamma2: f64, rho1: f64) -> f64 {
    nomasim::rate_far(gamma2, &alloc(rho1))
}

#[pyfunction]
fn pair_sum_capacity(gamma1: f64, gamma2: f64, rho1: f64) -> PyRatePair {
    nomasim::pair_sum_capacity(gamma1, gamma2, &alloc(rho1)).into()
}

#[pyfunction]
fn oma_rates(gamma1: f64, gamma2: f64) -> PyRatePair {
    nomasim::oma_rates(gamma1, gamma2).into()
}

#[pyfunction]
#[pyo3(signature = (thresholded, rho_th = 0.02, cap_epsilon = 0.01))]
fn rho1_upper_bound(thresholded: bool, rho_th: f64, cap_epsilon: f64) -> PyResult<f64> {
    let cfg = bspo_config(1.0, rho_th, cap_epsilon, 1e-9, 200)?;
    Ok(nomasim::rho1_upper_bound(thresholded, &cfg))
}

#[pyfunction]
#[pyo3(signature = (gamma_near, gamma_far, thresholded = false, target_rate = 1.0,
    rho_th = 0.02, cap_epsilon = 0.01, bisection_tol = 1e-9, max_iters = 200))]
#[allow(clippy::too_many_arguments)]
fn bspo(
    gamma_near: f64,
    gamma_far: f64,
    thresholded: bool,
    target_rate: f64,
    rho_th: f64,
    cap_epsilon: f64,
    bisection_tol: f64,
    max_iters: usize,
) -> PyResult<PyPowerAllocation> {
    let cfg = bspo_config(target_rate, rho_th, cap_epsilon, bisection_tol, max_iters)?;
    nomasim::bspo(gamma_near, gamma_far, thresholded, &cfg)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (gamma_near, gamma_far, thresholded = false, grid_n = 100_000,
    target_rate = 1.0, rho_th = 0.02, cap_epsilon = 0.01))]
fn brute_force_pa(
    gamma_near: f64,
    gamma_far: f64,
    thresholded: bool,
    grid_n: usize,
    target_rate: f64,
    rho_th: f64,
    cap_epsilon: f64,
) -> PyResult<PyPowerAllocation> {
    let cfg = bspo_config(target_rate, rho_th, cap_epsilon, 1e-9, 200)?;
    nomasim::brute_force_pa(gamma_near, gamma_far, thresholded, &cfg, grid_n)
        .map(Into::into)
        .map_err(to_py)
}

/// Role-switching decision for gains given in current-role order.
#[pyfunction]
#[pyo3(signature = (gain_near, gain_far, scenario = None, near_user = 1, far_user = 2))]
fn oprs_decide(
    gain_near: f64,
    gain_far: f64,
    scenario: Option<PyRef<'_, PyScenario>>,
    near_user: usize,
    far_user: usize,
) -> PyResult<PyDecision> {
    let cfg = scenario.map(|s| s.inner.clone()).unwrap_or_default();
    nomasim::oprs_decide(
        PairGains::new(gain_near, gain_far),
        cfg.channel.snr_linear(),
        RoleAssignment::new(near_user, far_user),
        &cfg.scheduler,
    )
    .map(Into::into)
    .map_err(to_py)
}

#[pyfunction]
fn rwp_pdf(d: f64, max_distance: f64) -> PyResult<f64> {
    nomasim::rwp_pdf(d, &nomasim::RwpPdfParams::with_max_distance(max_distance)).map_err(to_py)
}

#[pyfunction]
fn rwp_cdf(d: f64, max_distance: f64) -> PyResult<f64> {
    nomasim::rwp_cdf(d, &nomasim::RwpPdfParams::with_max_distance(max_distance)).map_err(to_py)
}

#[pyfunction]
fn parse_config(text: &str) -> PyResult<PyScenario> {
    PyScenario::new(Some(text))
}

/// Returns `(records, summary)`.
#[pyfunction]
fn run(py: Python<'_>, scenario: PyRef<'_, PyScenario>) -> PyResult<(Vec<PyStepRecord>, PyRunSummary)> {
    let cfg = scenario.inner.clone();
    let out = py.detach(|| nomasim::run(&cfg)).map_err(to_py)?;
    Ok((
        out.records.iter().map(Into::into).collect(),
        (&out.summary).into(),
    ))
}

/// Same-seed runs of several schemes; returns `{scheme: summary}`.
#[pyfunction]
#[pyo3(signature = (scenario, schemes = None))]
fn run_matrix(
    py: Python<'_>,
    scenario: PyRef<'_, PyScenario>,
    schemes: Option<Vec<String>>,
) -> PyResult<BTreeMap<String, PyRunSummary>> {
    let schemes: Vec<Scheme> = match schemes {
        Some(names) => names
            .iter()
            .map(|n| n.parse::<Scheme>())
            .collect::<Result<_, _>>()
            .map_err(to_py)?,
        None => Scheme::ALL.to_vec(),
    };
    let cfg = scenario.inner.clone();
    let out = py
        .detach(|| nomasim::run_matrix(&cfg, &schemes))
        .map_err(to_py)?;
    Ok(out
        .iter()
        .map(|(s, o)| (s.name().to_string(), (&o.summary).into()))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (scenario, samples = 100_000))]
fn pdf_check(py: Python<'_>, scenario: PyRef<'_, PyScenario>, samples: usize) -> PyResult<PyKsReport> {
    let cfg = scenario.inner.clone();
    let r = py
        .detach(|| nomasim::pdf_check(samples, &cfg))
        .map_err(to_py)?;
    Ok(PyKsReport {
        n: r.n,
        statistic: r.statistic,
        critical_value: r.critical_value,
        alpha: r.alpha,
        max_distance: r.max_distance,
        passed: r.passed,
    })
}

/// Renders records in the CSV output format.
#[pyfunction]
fn records_to_csv(records: Vec<PyRef<'_, PyStepRecord>>) -> PyResult<String> {
    let core: Vec<nomasim::StepRecord> = records
        .iter()
        .map(|r| r.to_core())
        .collect::<PyResult<_>>()?;
    let mut buf = Vec::new();
    nomasim::write_records(&core, &mut buf, "<memory>").map_err(to_py)?;
    String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
#[pyo3(name = "nomasim")]
fn nomasim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPowerAllocation>()?;
    m.add_class::<PyRatePair>()?;
    m.add_class::<PyDecision>()?;
    m.add_class::<PyStepRecord>()?;
    m.add_class::<PyRunSummary>()?;
    m.add_class::<PyKsReport>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(rate_near, m)?)?;
    m.add_function(wrap_pyfunction!(rate_far, m)?)?;
    m.add_function(wrap_pyfunction!(pair_sum_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(oma_rates, m)?)?;
    m.add_function(wrap_pyfunction!(rho1_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bspo, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_pa, m)?)?;
    m.add_function(wrap_pyfunction!(oprs_decide, m)?)?;
    m.add_function(wrap_pyfunction!(rwp_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(rwp_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(pdf_check, m)?)?;
    m.add_function(wrap_pyfunction!(records_to_csv, m)?)?;
    m.add("CSV_HEADER", nomasim::CSV_HEADER)?;
    m.add("SCHEMES", Scheme::ALL.iter().map(|s| s.name()).collect::<Vec<_>>())?;
    Ok(())
}
