use std::collections::HashMap;

use hawkes_smc::model::{CountData, EventHistory, ExcitationKernel, HawkesParams, KernelFamily};
use hawkes_smc::pmmh::{self, ChainOutput, PmmhConfig};
use hawkes_smc::simulator::{self, SimConfig};
use hawkes_smc::smc::{self, SmcConfig};
use hawkes_smc::Error;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::MissingFile { .. } | Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::RunawayPath { .. } | Error::FilterDegenerate => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn family(kernel: &str) -> PyResult<KernelFamily> {
    kernel.parse().map_err(to_py)
}

#[pyclass(name = "HawkesParams", module = "hawkes_smc_py")]
struct PyHawkesParams {
    inner: HawkesParams,
}

#[pymethods]
impl PyHawkesParams {
    #[new]
    #[pyo3(signature = (nu, eta, beta, kernel = "exp", alpha = None))]
    fn new(nu: f64, eta: f64, beta: f64, kernel: &str, alpha: Option<f64>) -> PyResult<Self> {
        let k = ExcitationKernel::new(family(kernel)?, eta, alpha, beta).map_err(to_py)?;
        Ok(Self {
            inner: HawkesParams::new(nu, k).map_err(to_py)?,
        })
    }

    #[getter]
    fn kernel(&self) -> &'static str {
        self.inner.family().as_str()
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu()
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.kernel().eta()
    }

    #[getter]
    fn alpha(&self) -> Option<f64> {
        self.inner.kernel().alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.kernel().beta()
    }

    /// Natural-scale values in the order `nu, eta[, alpha], beta`.
    fn values(&self) -> Vec<f64> {
        self.inner.values()
    }

    fn intensity(&self, events: Vec<f64>, t: f64) -> f64 {
        self.inner.intensity(&events, t)
    }

    fn compensator(&self, events: Vec<f64>, a: f64, b: f64) -> f64 {
        self.inner.compensator(&events, a, b)
    }

    fn full_loglik(&self, events: Vec<f64>, horizon: f64) -> PyResult<f64> {
        let h = EventHistory::new(events, horizon).map_err(to_py)?;
        Ok(self.inner.full_loglik(&h))
    }

    fn __repr__(&self) -> String {
        let names = self.inner.family().param_names();
        let vals: Vec<String> = names
            .iter()
            .zip(self.inner.values())
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        format!("HawkesParams(kernel='{}', {})", self.inner.family(), vals.join(", "))
    }
}

#[pyclass(name = "CountData", module = "hawkes_smc_py")]
struct PyCountData {
    inner: CountData,
}

#[pymethods]
impl PyCountData {
    /// `times` starts at 0 and has one more entry than `counts`.
    #[new]
    fn new(times: Vec<f64>, counts: Vec<u64>) -> PyResult<Self> {
        Ok(Self {
            inner: CountData::new(times, counts).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: hawkes_smc::io::load_counts(path).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        hawkes_smc::io::save_counts(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times().to_vec()
    }

    #[getter]
    fn counts(&self) -> Vec<u64> {
        self.inner.counts().to_vec()
    }

    fn collapse(&self) -> Self {
        Self {
            inner: smc::collapse_zero_runs(&self.inner),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "Chain", module = "hawkes_smc_py")]
struct PyChain {
    inner: ChainOutput,
}

#[pymethods]
impl PyChain {
    /// One row of natural-scale parameter values per iteration.
    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        self.inner.records.iter().map(|r| r.params.values()).collect()
    }

    #[getter]
    fn loglik(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.loglik).collect()
    }

    #[getter]
    fn accepted(&self) -> Vec<bool> {
        self.inner.records.iter().map(|r| r.accepted).collect()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        hawkes_smc::io::save_chain(&self.inner, path).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyfunction]
#[pyo3(signature = (params, horizon, seed = 0))]
fn simulate(py: Python<'_>, params: PyRef<'_, PyHawkesParams>, horizon: f64, seed: u64) -> PyResult<Vec<f64>> {
    let config = SimConfig::new(params.inner, horizon, seed).map_err(to_py)?;
    let h = py.detach(|| simulator::simulate_hawkes(&config)).map_err(to_py)?;
    Ok(h.into_times())
}

#[pyfunction]
fn discretize(events: Vec<f64>, horizon: f64, grid: Vec<f64>) -> PyResult<PyCountData> {
    let h = EventHistory::new(events, horizon).map_err(to_py)?;
    Ok(PyCountData {
        inner: simulator::discretize_counts(&h, &grid).map_err(to_py)?,
    })
}

#[pyfunction]
#[pyo3(signature = (params, data, particles = 256, seed = 0, fast_path = true))]
fn smc_loglik(
    py: Python<'_>,
    params: PyRef<'_, PyHawkesParams>,
    data: PyRef<'_, PyCountData>,
    particles: usize,
    seed: u64,
    fast_path: bool,
) -> PyResult<f64> {
    let cfg = SmcConfig::new(particles, seed).map_err(to_py)?.with_fast_path(fast_path);
    let (p, d) = (&params.inner, &data.inner);
    Ok(py.detach(|| smc::smc_loglik(p, d, &cfg)))
}

/// Brute-force probability of the observed counts: `(probability, se)`.
#[pyfunction]
#[pyo3(signature = (params, data, n_sims = 1_000_000, seed = 0))]
fn oracle(
    py: Python<'_>,
    params: PyRef<'_, PyHawkesParams>,
    data: PyRef<'_, PyCountData>,
    n_sims: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let target: Vec<i64> = data.inner.counts().iter().map(|&n| n as i64).collect();
    let (p, grid) = (&params.inner, data.inner.times());
    let est = py
        .detach(|| simulator::brute_force_prob(p, grid, &target, n_sims, seed))
        .map_err(to_py)?;
    Ok((est.probability, est.standard_error))
}

#[pyfunction]
#[pyo3(signature = (
    data, kernel = "exp", iterations = pmmh::DEFAULT_ITERATIONS, burn_in = pmmh::DEFAULT_BURN_IN,
    sigma = pmmh::DEFAULT_STEP_SIGMA, particles = 256, seed = 0, init = None
))]
#[allow(clippy::too_many_arguments)]
fn fit(
    py: Python<'_>,
    data: PyRef<'_, PyCountData>,
    kernel: &str,
    iterations: usize,
    burn_in: usize,
    sigma: f64,
    particles: usize,
    seed: u64,
    init: Option<Vec<f64>>,
) -> PyResult<PyChain> {
    let fam = family(kernel)?;
    let mut config = PmmhConfig::new(fam, seed);
    config.iterations = iterations;
    config.burn_in = burn_in;
    config.step_sigma = sigma;
    config.smc = SmcConfig::new(particles, seed).map_err(to_py)?;
    if let Some(v) = init {
        config.init = Some(HawkesParams::from_values(fam, &v).map_err(to_py)?.to_transformed());
    }
    let collapsed = smc::collapse_zero_runs(&data.inner);
    let chain = py.detach(|| pmmh::fit_counts(&config, &collapsed)).map_err(to_py)?;
    Ok(PyChain { inner: chain })
}

/// Median and 95% interval per parameter, keyed `"<name>.est"` and so on,
/// plus `acceptance_rate`.
#[pyfunction]
#[pyo3(signature = (chain, burn_in = pmmh::DEFAULT_BURN_IN))]
fn summarize(chain: PyRef<'_, PyChain>, burn_in: usize) -> PyResult<HashMap<String, f64>> {
    let s = pmmh::summarize_chain(&chain.inner, burn_in).map_err(to_py)?;
    let mut out = HashMap::new();
    for p in &s.params {
        out.insert(format!("{}.est", p.name), p.estimate);
        out.insert(format!("{}.lower", p.name), p.lower);
        out.insert(format!("{}.upper", p.name), p.upper);
        out.insert(format!("{}.se", p.name), p.se);
    }
    out.insert("acceptance_rate".into(), s.acceptance_rate);
    out.insert("n_draws".into(), s.n_draws as f64);
    Ok(out)
}

#[pymodule]
fn hawkes_smc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHawkesParams>()?;
    m.add_class::<PyCountData>()?;
    m.add_class::<PyChain>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(discretize, m)?)?;
    m.add_function(wrap_pyfunction!(smc_loglik, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    Ok(())
}
