//! Python bindings: model parameters, regime classification, spectra,
//! simulation, exact small-n laws, limit kernels and verification batteries.
//!
//! Structured results cross the boundary as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyString};
use serde::Serialize;

use merw::montecarlo::{
    exact_small_n_pmf, replica_rng, verify_center_of_mass, verify_critical, verify_diffusive_clt,
    verify_slln, verify_superdiffusive, CenterOfMassConfig, CltConfig, CriticalConfig, Engine,
    RunConfig, SllnConfig, SuperdiffusiveConfig, DEFAULT_STEP_BUDGET,
};
use merw::matrix::to_rows;
use merw::theory::{cm_covariance, critical_covariance, diffusive_covariance};
use merw::{classify_regime, mean_replacement_matrix, Error, Probability, StepDirection};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn probability(obj: &Bound<'_, PyAny>) -> PyResult<Probability> {
    if let Ok(s) = obj.cast::<PyString>() {
        return s.to_str()?.parse().map_err(py_err);
    }
    let v: f64 = obj.extract()?;
    Ok(Probability::from_f64(v))
}

fn engine(name: &str) -> PyResult<Engine> {
    name.parse().map_err(py_err)
}

/// Dimension `d`, memory `p`, first-step `q` and the designated first direction.
///
/// `p` and `q` accept floats or strings such as `"3/4"`; strings keep the
/// exact rational value.
#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: merw::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (d, p, q = None, designated = "+e1"))]
    fn new(d: usize, p: &Bound<'_, PyAny>, q: Option<&Bound<'_, PyAny>>, designated: &str) -> PyResult<Self> {
        let p = probability(p)?;
        let q = match q {
            Some(q) => probability(q)?,
            None => Probability::from_ratio(1, 2).map_err(py_err)?,
        };
        let dir: StepDirection = designated.parse().map_err(py_err)?;
        let inner = merw::ModelParams::new(d, p, q)
            .and_then(|m| m.with_designated(dir))
            .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p()
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q()
    }

    #[getter]
    fn designated(&self) -> String {
        self.inner.designated().to_string()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn critical_memory(&self) -> f64 {
        self.inner.critical_memory()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "ModelParams(d={}, p={}, q={}, designated='{}')",
            self.inner.dim(),
            self.inner.p(),
            self.inner.q(),
            self.inner.designated()
        )
    }
}

/// Critical parameter, regime and exponent.
#[pyfunction]
fn classify<'py>(py: Python<'py>, params: &PyModelParams) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &classify_regime(&params.inner))
}

/// Mean replacement matrix with its eigen-data.
#[pyfunction]
fn spectrum<'py>(py: Python<'py>, params: &PyModelParams) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &mean_replacement_matrix(&params.inner))
}

/// Positions at `times` for one replica stream of `seed`.
#[pyfunction]
#[pyo3(signature = (params, horizon, times, seed, replica = 0, engine = "walk"))]
fn simulate_path(
    params: &PyModelParams,
    horizon: u64,
    times: Vec<u64>,
    seed: u64,
    replica: u64,
    engine: &str,
) -> PyResult<Vec<Vec<i64>>> {
    let mut rng = replica_rng(seed, replica);
    let snap = match self::engine(engine)? {
        Engine::Walk => merw::walk::simulate_path(&params.inner, horizon, &times, &mut rng),
        Engine::Urn => merw::urn::simulate_urn_path(&params.inner, horizon, &times, &mut rng),
    }
    .map_err(py_err)?;
    Ok(snap.positions)
}

/// Exact law of `S_n` as `{position tuple: fractions.Fraction}`.
#[pyfunction]
#[pyo3(signature = (params, n, engine = "walk"))]
fn exact_pmf<'py>(py: Python<'py>, params: &PyModelParams, n: u64, engine: &str) -> PyResult<Bound<'py, PyDict>> {
    let pmf = exact_small_n_pmf(&params.inner, n, self::engine(engine)?).map_err(py_err)?;
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    let out = PyDict::new(py);
    for (x, pr) in pmf {
        let key = pyo3::types::PyTuple::new(py, x)?;
        out.set_item(key, fraction.call1((pr.to_string(),))?)?;
    }
    Ok(out)
}

/// Limit covariance kernel `K(s, t)` of the diffusive regime.
#[pyfunction]
fn diffusive_kernel(params: &PyModelParams, s: f64, t: f64) -> PyResult<Vec<Vec<f64>>> {
    diffusive_covariance(&params.inner, s, t).map(|m| to_rows(&m)).map_err(py_err)
}

/// Limit covariance kernel of the critical regime in exponent time.
#[pyfunction]
fn critical_kernel(params: &PyModelParams, s: f64, t: f64) -> PyResult<Vec<Vec<f64>>> {
    critical_covariance(&params.inner, s, t).map(|m| to_rows(&m)).map_err(py_err)
}

/// Limit covariance of the centre of mass in the diffusive regime.
#[pyfunction]
fn center_of_mass_covariance(params: &PyModelParams) -> PyResult<Vec<Vec<f64>>> {
    cm_covariance(&params.inner).map(|m| to_rows(&m)).map_err(py_err)
}

/// Runs one verification battery and returns its report.
///
/// `battery` is one of `slln`, `clt`, `critical`, `superdiffusive`, `cm`.
#[pyfunction]
#[pyo3(signature = (
    battery, params, replicas = 1000, seed = 0, horizon = 10_000, engine = "walk",
    n0 = 1000, doublings = 7, factor = 10, threshold = None, budget = DEFAULT_STEP_BUDGET,
))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    battery: &str,
    params: &PyModelParams,
    replicas: usize,
    seed: u64,
    horizon: u64,
    engine: &str,
    n0: u64,
    doublings: u32,
    factor: u64,
    threshold: Option<f64>,
    budget: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut run = RunConfig::new(params.inner, replicas, seed);
    run.engine = self::engine(engine)?;
    run.step_budget = budget;
    let report = py.detach(|| match battery {
        "clt" => verify_diffusive_clt(&CltConfig::new(run, horizon)),
        "critical" => verify_critical(&CriticalConfig::new(run, horizon)),
        "cm" => verify_center_of_mass(&CenterOfMassConfig { run, horizon }),
        "superdiffusive" => verify_superdiffusive(&SuperdiffusiveConfig::new(run, n0, doublings)),
        "slln" => {
            let mut rungs = 1;
            while factor >= 2 && n0 > 0 && n0 * factor.pow(rungs) <= horizon {
                rungs += 1;
            }
            let mut cfg = SllnConfig::new(run, n0, factor, rungs);
            cfg.threshold = threshold;
            verify_slln(&cfg)
        }
        other => Err(Error::Config(format!("unknown battery '{other}'"))),
    });
    to_py(py, &report.map_err(py_err)?)
}

#[pymodule]
#[pyo3(name = "merw")]
fn merw_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_path, m)?)?;
    m.add_function(wrap_pyfunction!(exact_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(diffusive_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(critical_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(center_of_mass_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
