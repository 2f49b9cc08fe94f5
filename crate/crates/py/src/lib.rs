//! Python bindings: problems, single runs of either scheme, the error-table
//! harness and the pole-crossing study.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use symscheme::experiments::{self, ExperimentSpec, Resolution, SchemeChoice, SchemeKind, STARTUP_TOL};
use symscheme::reference::startup_integrated;
use symscheme::schemes::SchemeConfig;
use symscheme::{Error, Ex3Variant, RootConfig, Trajectory};

fn to_py(e: Error) -> PyErr {
    if e.is_spec_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn variant(name: &str) -> PyResult<Ex3Variant> {
    match name {
        "blowup" => Ok(Ex3Variant::Blowup),
        "noblowup" => Ok(Ex3Variant::NoBlowup),
        other => Err(PyValueError::new_err(format!("unknown variant {other:?}"))),
    }
}

/// One of the model initial value problems.
#[pyclass(name = "OdeProblem", module = "pysymscheme", frozen)]
struct PyOdeProblem {
    inner: symscheme::OdeProblem,
}

#[pymethods]
impl PyOdeProblem {
    /// `example` in 1..=5; `variant` is used by example 3 only.
    #[new]
    #[pyo3(signature = (example, variant = "blowup", interval = None, initial = None))]
    fn new(example: u8, variant: &str, interval: Option<(f64, f64)>, initial: Option<Vec<f64>>) -> PyResult<Self> {
        let mut p = symscheme::OdeProblem::by_number(example, self::variant(variant)?).map_err(to_py)?;
        if let Some((a, b)) = interval {
            p = p.with_interval(a, b).map_err(to_py)?;
        }
        if let Some(init) = initial {
            p = p.with_initial(init).map_err(to_py)?;
        }
        Ok(Self { inner: p })
    }

    #[getter]
    fn example(&self) -> u8 {
        self.inner.model.number()
    }

    #[getter]
    fn interval(&self) -> (f64, f64) {
        (self.inner.x0, self.inner.xf)
    }

    #[getter]
    fn initial(&self) -> Vec<f64> {
        self.inner.initial.clone()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    /// Closed-form solution at `x`, when the problem has one.
    fn exact(&self, x: f64) -> Option<f64> {
        self.inner.exact.map(|f| f(x))
    }

    fn __repr__(&self) -> String {
        format!("OdeProblem(example={}, interval=({}, {}))", self.example(), self.inner.x0, self.inner.xf)
    }
}

/// Nodes of a finished run.
#[pyclass(name = "Trajectory", module = "pysymscheme", frozen)]
struct PyTrajectory {
    inner: Trajectory,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn xs(&self) -> Vec<f64> {
        self.inner.xs()
    }

    #[getter]
    fn ys(&self) -> Vec<f64> {
        self.inner.ys()
    }

    /// `(x, reason)` when the run stopped early.
    #[getter]
    fn stop(&self) -> Option<(f64, String)> {
        self.inner.stop.as_ref().map(|s| (s.x, s.reason.clone()))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn startups(problem: &symscheme::OdeProblem, h: f64) -> PyResult<Vec<symscheme::GridPoint>> {
    let nodes: Vec<f64> = (0..problem.order()).map(|i| problem.x0 + i as f64 * h).collect();
    startup_integrated(problem, &nodes, STARTUP_TOL).map_err(to_py)
}

/// Invariant scheme with start-up spacing `h`.
#[pyfunction]
fn run_scheme(problem: &PyOdeProblem, h: f64) -> PyResult<PyTrajectory> {
    let p = &problem.inner;
    let s = startups(p, h)?;
    let inner = symscheme::schemes::run_scheme(p, &SchemeConfig::new(p.model), &s).map_err(to_py)?;
    Ok(PyTrajectory { inner })
}

/// Standard scheme on the uniform mesh of step `h`.
#[pyfunction]
fn run_standard(problem: &PyOdeProblem, h: f64) -> PyResult<PyTrajectory> {
    let p = &problem.inner;
    let s = startups(p, h)?;
    let inner = symscheme::standard::run_standard(p, &s, &RootConfig::default()).map_err(to_py)?;
    Ok(PyTrajectory { inner })
}

/// Error table of one example.
#[pyclass(name = "ErrorReport", module = "pysymscheme", frozen)]
struct PyErrorReport {
    inner: experiments::ErrorReport,
}

#[pymethods]
impl PyErrorReport {
    /// `(scheme, h, N, max_error, endpoint_error, order)` per row.
    #[getter]
    #[allow(clippy::type_complexity)]
    fn rows(&self) -> Vec<(String, f64, usize, f64, Option<f64>, Option<f64>)> {
        self.inner
            .rows
            .iter()
            .map(|r| (r.scheme.name().to_string(), r.h, r.n, r.max_error, r.endpoint_error, r.order))
            .collect()
    }

    fn csv(&self) -> PyResult<String> {
        experiments::report_csv(&self.inner).map_err(to_py)
    }

    fn json(&self) -> String {
        experiments::report_json(&self.inner)
    }
}

#[pyfunction]
#[pyo3(signature = (example, steps = None, intervals = None, scheme = "both", variant = "blowup"))]
fn run_experiment(
    example: u8,
    steps: Option<Vec<f64>>,
    intervals: Option<Vec<usize>>,
    scheme: &str,
    variant: &str,
) -> PyResult<PyErrorReport> {
    let choice = match scheme {
        "invariant" => SchemeChoice::Invariant,
        "standard" => SchemeChoice::Standard,
        "both" => SchemeChoice::Both,
        other => return Err(PyValueError::new_err(format!("unknown scheme {other:?}"))),
    };
    let mut spec = ExperimentSpec::new(example, choice, &steps.unwrap_or_default()).with_variant(self::variant(variant)?);
    if let Some(n) = intervals {
        spec.resolutions.extend(n.into_iter().map(Resolution::Intervals));
    }
    let inner = experiments::run_experiment(&spec).map_err(to_py)?;
    Ok(PyErrorReport { inner })
}

/// Example 5 across its pole; returns the bundle as JSON text.
#[pyfunction]
fn singularity_run(steps: Vec<f64>) -> PyResult<String> {
    let bundle = experiments::singularity_run(&steps).map_err(to_py)?;
    Ok(experiments::bundle_json(&bundle))
}

/// Observed orders between consecutive `(h, error)` pairs.
#[pyfunction]
fn estimate_order(rows: Vec<(f64, f64)>) -> PyResult<Vec<f64>> {
    experiments::estimate_order(&rows).map_err(to_py)
}

#[pymodule]
fn pysymscheme(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOdeProblem>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyErrorReport>()?;
    m.add_function(wrap_pyfunction!(run_scheme, m)?)?;
    m.add_function(wrap_pyfunction!(run_standard, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(singularity_run, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_order, m)?)?;
    m.add("INVARIANT", SchemeKind::Invariant.name())?;
    m.add("STANDARD", SchemeKind::Standard.name())?;
    Ok(())
}
