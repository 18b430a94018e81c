//! Python bindings: parse, compile, render and measure pattern specs.

use ::pattern_forge::gallery;
use ::pattern_forge::spec::{validate_spec as advise, AdviceOptions};
use ::pattern_forge::{self as pf, CompileOptions, MetricsOptions, RasterOptions, RenderOptions};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(pattern_forge, SpecError, PyValueError, "Rejected pattern spec; `args[0]` is the error JSON.");
create_exception!(pattern_forge, PatternError, PyRuntimeError, "Pattern could not be compiled.");

const SCHEMA: &str = include_str!("../../../schema/pattern-spec.schema.json");

fn spec_err(e: pf::SpecError) -> PyErr {
    SpecError::new_err(e.to_json())
}

fn pattern_err(e: pf::PatternError) -> PyErr {
    match e {
        pf::PatternError::Spec(s) => spec_err(s),
        other => PatternError::new_err(other.to_string()),
    }
}

fn to_py(py: Python<'_>, json: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (json,))?.unbind())
}

fn metrics_options(supersample: u32) -> PyResult<MetricsOptions> {
    if ![1, 2, 4, 8].contains(&supersample) {
        return Err(PyValueError::new_err("supersample must be 1, 2, 4 or 8"));
    }
    Ok(MetricsOptions {
        raster: RasterOptions {
            supersample,
            ..RasterOptions::default()
        },
        ..MetricsOptions::default()
    })
}

/// A parsed, normalized pattern spec.
#[pyclass(name = "PatternSpec", module = "pattern_forge", frozen)]
struct PySpec(pf::PatternSpec);

#[pymethods]
impl PySpec {
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        pf::parse_spec(json.as_bytes()).map(PySpec).map_err(spec_err)
    }

    /// Canonical JSON form.
    fn to_json(&self) -> String {
        pf::to_canonical_json(&self.0)
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    #[getter]
    fn group_count(&self) -> usize {
        self.0.k()
    }

    fn __repr__(&self) -> String {
        format!("PatternSpec(groups={}, depth={}, seed={})", self.0.k(), self.0.depth(), self.0.seed)
    }
}

/// The region a pattern fills.
#[pyclass(name = "Host", module = "pattern_forge", frozen)]
struct PyHost(pf::HostSymbol);

#[pymethods]
impl PyHost {
    /// `rect:W×H` shorthand or a host JSON object.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        match pf::HostSymbol::parse_shorthand(text) {
            Some(r) => r.map(PyHost).map_err(pattern_err),
            None => serde_json::from_str(text)
                .map(PyHost)
                .map_err(|e| SpecError::new_err(pf::SpecError::schema("/host", e.to_string()).to_json())),
        }
    }

    #[staticmethod]
    fn rect(width: f64, height: f64) -> PyResult<Self> {
        pf::HostSymbol::rect(width, height).map(PyHost).map_err(pattern_err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("host serializes")
    }

    #[getter]
    fn area(&self) -> f64 {
        self.0.area()
    }

    fn __repr__(&self) -> String {
        format!("Host({})", self.to_json())
    }
}

/// A compiled pattern on its host.
#[pyclass(name = "Pattern", module = "pattern_forge", frozen)]
struct PyPattern(pf::ResolvedPattern);

#[pymethods]
impl PyPattern {
    #[getter]
    fn primitive_count(&self) -> usize {
        self.0.primitives.len()
    }

    #[getter]
    fn group_counts(&self) -> Vec<usize> {
        self.0.group_counts()
    }

    /// Composition mode, e.g. `2×2×2`.
    #[getter]
    fn composition(&self) -> String {
        self.0.composition.to_string()
    }

    #[getter]
    fn nesting_depth(&self) -> usize {
        self.0.nesting_depth() + 1
    }

    /// Primitives removed by clipping, omit-incomplete and halo.
    #[getter]
    fn dropped(&self) -> (usize, usize, usize) {
        let d = &self.0.dropped;
        (d.clipped_out, d.incomplete, d.halo)
    }

    #[pyo3(signature = (padding = 0.0, precision = 3))]
    fn render_svg(&self, padding: f64, precision: usize) -> String {
        let opts = RenderOptions {
            padding,
            precision,
            ..RenderOptions::default()
        };
        pf::render_svg(&self.0, &opts).text
    }

    /// `{ink_ratio, regional_shade: {h, s, l}, solid_fill, resolution}`.
    #[pyo3(signature = (supersample = 4))]
    fn metrics(&self, py: Python<'_>, supersample: u32) -> PyResult<Py<PyAny>> {
        let m = pf::measure(&self.0, &metrics_options(supersample)?);
        to_py(py, &m.to_json())
    }

    fn __repr__(&self) -> String {
        format!("Pattern(primitives={}, composition={})", self.0.primitives.len(), self.0.composition)
    }
}

#[pyfunction]
#[pyo3(signature = (spec, host, seed = None, parallel = false))]
fn compile(py: Python<'_>, spec: &PySpec, host: &PyHost, seed: Option<u64>, parallel: bool) -> PyResult<PyPattern> {
    let opts = CompileOptions {
        seed_override: seed,
        parallel,
        ..CompileOptions::default()
    };
    py.detach(|| pf::compile(&spec.0, &host.0, &opts))
        .map(PyPattern)
        .map_err(pattern_err)
}

/// Design warnings for a spec on a host, as a list of dicts.
#[pyfunction]
fn validate(py: Python<'_>, spec: &PySpec, host: &PyHost) -> PyResult<Py<PyAny>> {
    let warnings = advise(&spec.0, &host.0, &AdviceOptions::default());
    to_py(py, &serde_json::to_string(&warnings).expect("warnings serialize"))
}

/// `(preserved, report)` comparing the ink ratios of two specs.
#[pyfunction]
#[pyo3(signature = (spec_a, spec_b, host, tol = 0.005, supersample = 4, seed = None))]
fn check_value_preservation(
    py: Python<'_>,
    spec_a: &PySpec,
    spec_b: &PySpec,
    host: &PyHost,
    tol: f64,
    supersample: u32,
    seed: Option<u64>,
) -> PyResult<(bool, Py<PyAny>)> {
    let mopts = metrics_options(supersample)?;
    let copts = CompileOptions {
        seed_override: seed,
        ..CompileOptions::default()
    };
    let report = py
        .detach(|| pf::check_value_preservation(&spec_a.0, &spec_b.0, &host.0, tol, &copts, &mopts))
        .map_err(pattern_err)?;
    Ok((report.preserved, to_py(py, &serde_json::to_string(&report).expect("report serializes"))?))
}

/// Runs the bundled gallery and returns its report.
#[pyfunction]
fn run_gallery(py: Python<'_>) -> PyResult<Py<PyAny>> {
    let report = py.detach(|| gallery::run_bundled(&CompileOptions::default()));
    to_py(py, &serde_json::to_string(&report).expect("report serializes"))
}

/// The JSON Schema for pattern specs.
#[pyfunction]
fn schema() -> &'static str {
    SCHEMA
}

#[pymodule]
#[pyo3(name = "pattern_forge")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyHost>()?;
    m.add_class::<PyPattern>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(check_value_preservation, m)?)?;
    m.add_function(wrap_pyfunction!(run_gallery, m)?)?;
    m.add_function(wrap_pyfunction!(schema, m)?)?;
    m.add("SpecError", m.py().get_type::<SpecError>())?;
    m.add("PatternError", m.py().get_type::<PatternError>())?;
    Ok(())
}
