//! Python bindings for `maxseq`.
//!
//! Series are passed as lists of floats; panels travel as [`Panel`]
//! objects holding one list per series. Invalid arguments raise
//! `ValueError`, numerical failures raise `RuntimeError`.

use maxseq::io::{panel_to_csv, parse_panel_csv};
use maxseq::{
    CrossDependence, Dependence, ErrorDist, ErrorSpec, ExperimentConfig, LagRule, LrvKernel,
    PanelData, PanelSpec, RngSeed, UnitRootConfig, UnitRootMode, WnConfig, WnMethod,
};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: maxseq::Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_rule(rule: &str) -> PyResult<LagRule> {
    rule.parse().map_err(py_err)
}

fn error_spec(dist: &str, rho: Option<f64>, scale: f64) -> PyResult<ErrorSpec> {
    let dist: ErrorDist = dist.parse().map_err(py_err)?;
    Ok(ErrorSpec {
        dist,
        dependence: rho.map_or(Dependence::Iid, Dependence::Ar1),
        scale,
    })
}

/// A balanced panel: `k` labelled series of common length `n`.
#[pyclass(name = "Panel", module = "pymaxseq", frozen)]
struct PyPanel {
    inner: PanelData,
}

#[pymethods]
impl PyPanel {
    #[new]
    #[pyo3(signature = (columns, labels=None))]
    fn new(columns: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let inner = match labels {
            Some(labels) => PanelData::new(labels, columns),
            None => PanelData::from_columns(columns),
        }
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Parse CSV text with a header row of labels.
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        parse_panel_csv(text)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    fn to_csv(&self) -> String {
        panel_to_csv(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn columns(&self) -> Vec<Vec<f64>> {
        self.inner.columns().to_vec()
    }

    fn series(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.inner.k() {
            return Err(PyValueError::new_err(format!(
                "series index {i} out of range"
            )));
        }
        Ok(self.inner.series(i).to_vec())
    }

    fn __len__(&self) -> usize {
        self.inner.k()
    }

    fn __repr__(&self) -> String {
        format!("Panel(n={}, k={})", self.inner.n(), self.inner.k())
    }
}

/// Outcome of the panel unit-root test.
#[pyclass(name = "UnitRootResult", module = "pymaxseq", frozen, get_all)]
struct PyUnitRootResult {
    stat: f64,
    l_used: usize,
    per_series: Vec<f64>,
    critical_value: f64,
    p_value: f64,
    level: f64,
    reject: bool,
    bandwidth: usize,
}

#[pymethods]
impl PyUnitRootResult {
    fn __repr__(&self) -> String {
        format!(
            "UnitRootResult(stat={:.4}, L={}, critical_value={:.4}, p_value={:.4}, reject={})",
            self.stat,
            self.l_used,
            self.critical_value,
            self.p_value,
            if self.reject { "True" } else { "False" }
        )
    }
}

/// Outcome of the residual white-noise test.
#[pyclass(name = "WhiteNoiseResult", module = "pymaxseq", frozen, get_all)]
struct PyWhiteNoiseResult {
    stat: f64,
    lags: usize,
    per_lag: Vec<f64>,
    p_value: Option<f64>,
    reject: Option<bool>,
}

#[pymethods]
impl PyWhiteNoiseResult {
    fn __repr__(&self) -> String {
        format!(
            "WhiteNoiseResult(stat={:.4}, lags={}, p_value={}, reject={})",
            self.stat,
            self.lags,
            self.p_value.map_or("None".into(), |p| format!("{p:.4}")),
            self.reject
                .map_or("None".into(), |r| if r { "True" } else { "False" }
                    .to_string()),
        )
    }
}

impl From<maxseq::WnTestResult> for PyWhiteNoiseResult {
    fn from(r: maxseq::WnTestResult) -> Self {
        Self {
            stat: r.max_stat,
            lags: r.lags,
            per_lag: r.per_lag,
            p_value: r.p_value,
            reject: r.reject,
        }
    }
}

/// Least-squares AR(p) fit with intercept.
#[pyclass(name = "ArFit", module = "pymaxseq", frozen, get_all)]
struct PyArFit {
    /// `[c, phi_1, .., phi_p]`
    theta: Vec<f64>,
    residuals: Vec<f64>,
    sigma2: f64,
}

/// Simulate `k` AR(1) series of length `n`; `phi` is one root for all
/// series or one root per series.
#[pyfunction]
#[pyo3(signature = (n, k, phi=vec![1.0], rho=None, dist="gaussian", scale=1.0, factor=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn simulate_panel(
    n: usize,
    k: usize,
    phi: Vec<f64>,
    rho: Option<f64>,
    dist: &str,
    scale: f64,
    factor: Option<f64>,
    seed: u64,
) -> PyResult<PyPanel> {
    let spec = PanelSpec {
        n,
        k,
        phis: phi,
        errors: error_spec(dist, rho, scale)?,
        cross_dependence: factor
            .map_or(CrossDependence::Independent, CrossDependence::CommonFactor),
    };
    maxseq::simulate_ar1_panel(&spec, RngSeed::new(seed))
        .map(|inner| PyPanel { inner })
        .map_err(py_err)
}

/// Simulate a stationary AR(p) series with intercept.
#[pyfunction]
#[pyo3(signature = (coeffs, n, intercept=0.0, rho=None, dist="gaussian", scale=1.0, seed=0))]
fn simulate_arp(
    coeffs: Vec<f64>,
    n: usize,
    intercept: f64,
    rho: Option<f64>,
    dist: &str,
    scale: f64,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let spec = maxseq::ArpSpec {
        intercept,
        coeffs,
        errors: error_spec(dist, rho, scale)?,
    };
    maxseq::simulate_arp(&spec, n, RngSeed::new(seed)).map_err(py_err)
}

/// Max unit-root test over the first `L_n` series of the panel.
#[pyfunction]
#[pyo3(signature = (
    panel, rule="power:1:0.25", level=0.05, reps=10_000, m_steps=10_000,
    bandwidth=None, kernel="prewhitened_bartlett", raw=false, ratio=1.0, seed=0,
))]
#[allow(clippy::too_many_arguments)]
fn unit_root_test(
    py: Python<'_>,
    panel: &PyPanel,
    rule: &str,
    level: f64,
    reps: usize,
    m_steps: usize,
    bandwidth: Option<usize>,
    kernel: &str,
    raw: bool,
    ratio: f64,
    seed: u64,
) -> PyResult<PyUnitRootResult> {
    let kernel = match kernel {
        "bartlett" => LrvKernel::Bartlett,
        "prewhitened_bartlett" | "prewhitened-bartlett" => LrvKernel::PrewhitenedBartlett,
        other => return Err(PyValueError::new_err(format!("unknown kernel {other:?}"))),
    };
    let cfg = UnitRootConfig {
        rule: parse_rule(rule)?,
        level,
        reps,
        m_steps,
        bandwidth,
        kernel,
        mode: if raw {
            UnitRootMode::Raw
        } else {
            UnitRootMode::Adjusted
        },
        ratio,
    };
    let r = py
        .detach(|| maxseq::unit_root_test(&panel.inner, &cfg, RngSeed::new(seed)))
        .map_err(py_err)?;
    Ok(PyUnitRootResult {
        stat: r.max_stat,
        l_used: r.l_used,
        per_series: r.per_series,
        critical_value: r.critical_value,
        p_value: r.p_value,
        level: r.level,
        reject: r.reject,
        bandwidth: r.bandwidth,
    })
}

/// Max residual autocorrelation test after an AR(p) filter.
#[pyfunction]
#[pyo3(signature = (
    series, p=1, lags=5, block_len=None, reps=500, level=0.05,
    method="bootstrap", bandwidth=None, seed=0,
))]
#[allow(clippy::too_many_arguments)]
fn white_noise_test(
    py: Python<'_>,
    series: Vec<f64>,
    p: usize,
    lags: usize,
    block_len: Option<usize>,
    reps: usize,
    level: f64,
    method: &str,
    bandwidth: Option<usize>,
    seed: u64,
) -> PyResult<PyWhiteNoiseResult> {
    let method = match method {
        "bootstrap" => WnMethod::Bootstrap,
        "gaussian_kernel" | "gaussian-kernel" => WnMethod::GaussianKernel,
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    let cfg = WnConfig {
        p,
        lags,
        block_len,
        reps,
        level,
        method,
        bandwidth,
    };
    py.detach(|| maxseq::white_noise_test(&series, &cfg, RngSeed::new(seed)))
        .map(Into::into)
        .map_err(py_err)
}

/// The statistic `max_h |X_n(h)|` without a resampled null.
#[pyfunction]
fn max_corr_stat(series: Vec<f64>, p: usize, lags: usize) -> PyResult<PyWhiteNoiseResult> {
    maxseq::max_corr_stat(&series, p, lags)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
fn ols_arp(series: Vec<f64>, p: usize) -> PyResult<PyArFit> {
    let fit = maxseq::ols_arp(&series, p).map_err(py_err)?;
    Ok(PyArFit {
        theta: fit.theta_hat,
        residuals: fit.residuals,
        sigma2: fit.sigma2_eps_hat,
    })
}

/// Evaluate a lag rule such as `"power:1:0.25"` or `"log:2/10"` at `n`.
#[pyfunction]
fn lag_sequence(rule: &str, n: usize) -> PyResult<usize> {
    Ok(maxseq::lag_sequence(&parse_rule(rule)?, n))
}

#[pyfunction]
fn running_max_abs(values: Vec<f64>) -> PyResult<Vec<f64>> {
    maxseq::running_max_abs(&values).map_err(py_err)
}

/// `1 - exp(-max |x|)`.
#[pyfunction]
fn bounded_max_transform(values: Vec<f64>) -> PyResult<f64> {
    maxseq::bounded_max_transform(&values).map_err(py_err)
}

/// Bartlett long-run variance; `prewhiten` applies an AR(1) filter first.
#[pyfunction]
#[pyo3(signature = (series, bandwidth, prewhiten=false))]
fn long_run_variance(series: Vec<f64>, bandwidth: usize, prewhiten: bool) -> PyResult<f64> {
    if prewhiten {
        maxseq::prewhitened_long_run_variance(&series, bandwidth)
    } else {
        maxseq::long_run_variance(&series, bandwidth)
    }
    .map_err(py_err)
}

/// Sorted draws of the null limit law of the max unit-root statistic.
#[pyfunction]
#[pyo3(signature = (k, m_steps=10_000, reps=10_000, ratio=1.0, seed=0))]
fn simulate_limit_law(
    py: Python<'_>,
    k: usize,
    m_steps: usize,
    reps: usize,
    ratio: f64,
    seed: u64,
) -> PyResult<Vec<f64>> {
    py.detach(|| maxseq::simulate_limit_law(k, m_steps, reps, RngSeed::new(seed), ratio))
        .map(|law| law.draws)
        .map_err(py_err)
}

/// Run a Monte Carlo experiment from TOML text; returns the report as
/// JSON text (or CSV with `as_csv=True`).
#[pyfunction]
#[pyo3(signature = (config, as_csv=false))]
fn run_experiment(py: Python<'_>, config: &str, as_csv: bool) -> PyResult<String> {
    let cfg = ExperimentConfig::from_toml(config).map_err(py_err)?;
    let report = py.detach(|| cfg.run()).map_err(py_err)?;
    Ok(if as_csv {
        report.to_csv()
    } else {
        report.to_json()
    })
}

#[pymodule]
fn pymaxseq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPanel>()?;
    m.add_class::<PyUnitRootResult>()?;
    m.add_class::<PyWhiteNoiseResult>()?;
    m.add_class::<PyArFit>()?;
    m.add_function(wrap_pyfunction!(simulate_panel, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_arp, m)?)?;
    m.add_function(wrap_pyfunction!(unit_root_test, m)?)?;
    m.add_function(wrap_pyfunction!(white_noise_test, m)?)?;
    m.add_function(wrap_pyfunction!(max_corr_stat, m)?)?;
    m.add_function(wrap_pyfunction!(ols_arp, m)?)?;
    m.add_function(wrap_pyfunction!(lag_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(running_max_abs, m)?)?;
    m.add_function(wrap_pyfunction!(bounded_max_transform, m)?)?;
    m.add_function(wrap_pyfunction!(long_run_variance, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_limit_law, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
