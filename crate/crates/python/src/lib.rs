//! Python bindings: varieties, forms, the solvers and the config runner.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dbar_cone::cli::{self, ConfigError, RunOptions};
use dbar_cone::solver::{self, SolveResult};
use dbar_cone::{fixtures, Error, QuadratureParams, SparsePolynomial, Weights, C64};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::DimensionMismatch { .. }
        | Error::InvalidWeights(_)
        | Error::InvalidParameter { .. }
        | Error::ZeroPolynomial
        | Error::NonHomogeneous { .. }
        | Error::NotOnVariety { .. }
        | Error::MissingPureDim
        | Error::NotACone => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn poly_from_terms(n: usize, terms: Vec<(Vec<u32>, C64)>) -> PyResult<SparsePolynomial> {
    SparsePolynomial::new(n, terms).map_err(to_py_err)
}

fn params(rel_tol: Option<f64>) -> PyResult<QuadratureParams> {
    let mut p = QuadratureParams::default();
    if let Some(t) = rel_tol {
        p.rel_tol = t;
    }
    p.validate().map_err(to_py_err)?;
    Ok(p)
}

fn result_dict<'py>(py: Python<'py>, r: &SolveResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("quadrature_error", r.quadrature_error)?;
    d.set_item("truncation_radius_used", r.truncation_radius_used)?;
    Ok(d)
}

/// A weighted homogeneous variety.
#[pyclass(frozen)]
struct Variety {
    inner: dbar_cone::Variety,
}

#[pymethods]
impl Variety {
    /// `polynomials` is a list of term lists `[(exponents, coefficient), ...]`.
    #[new]
    #[pyo3(signature = (weights, polynomials, pure_dim=None))]
    fn new(weights: Vec<u32>, polynomials: Vec<Vec<(Vec<u32>, C64)>>, pure_dim: Option<usize>) -> PyResult<Self> {
        let weights = Weights::new(weights).map_err(to_py_err)?;
        let n = weights.len();
        let polys = polynomials
            .into_iter()
            .map(|t| poly_from_terms(n, t))
            .collect::<PyResult<Vec<_>>>()?;
        let inner = dbar_cone::Variety::new(weights, polys, pure_dim).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        fixtures::by_name(name)
            .map(|inner| Self { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown fixture `{name}`")))
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    #[getter]
    fn weights(&self) -> Vec<u32> {
        self.inner.weights().as_slice().to_vec()
    }

    #[getter]
    fn pure_dim(&self) -> Option<usize> {
        self.inner.pure_dim()
    }

    fn is_cone(&self) -> bool {
        self.inner.is_cone()
    }

    #[pyo3(signature = (z, tol=1e-10))]
    fn contains(&self, z: Vec<C64>, tol: f64) -> bool {
        z.len() == self.inner.ambient_dim() && self.inner.contains(&z, tol)
    }

    #[pyo3(signature = (z, tol=1e-10))]
    fn is_regular(&self, z: Vec<C64>, tol: f64) -> PyResult<bool> {
        self.inner.is_regular(&z, tol).map_err(to_py_err)
    }

    fn theta_cone(&self) -> PyResult<Self> {
        self.inner.theta_cone().map(|inner| Self { inner }).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Variety(weights={:?}, equations={}, pure_dim={:?})",
            self.inner.weights().as_slice(),
            self.inner.polynomials().len(),
            self.inner.pure_dim()
        )
    }
}

/// A compactly supported (0,1)-form `Σ f_k dz̄_k`.
#[pyclass(frozen)]
struct Form {
    inner: dbar_cone::ZeroOneForm,
}

#[pymethods]
impl Form {
    #[staticmethod]
    fn zero(n: usize) -> Self {
        Self {
            inner: dbar_cone::ZeroOneForm::zero(n),
        }
    }

    /// `∂̄(h χ)` for the polynomial `h` given as `[(exponents, coefficient), ...]`.
    #[staticmethod]
    fn bump_dbar(h: Vec<(Vec<u32>, C64)>, r0: f64, radius: f64) -> PyResult<Self> {
        let n = h.first().map(|t| t.0.len()).ok_or_else(|| PyValueError::new_err("h has no terms"))?;
        let poly = poly_from_terms(n, h)?;
        dbar_cone::ZeroOneForm::bump_dbar(poly, r0, radius)
            .map(|inner| Self { inner })
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn raw_bump(c: Vec<C64>, radius: f64) -> PyResult<Self> {
        dbar_cone::ZeroOneForm::raw_bump(c, radius)
            .map(|inner| Self { inner })
            .map_err(to_py_err)
    }

    fn eval(&self, z: Vec<C64>) -> PyResult<Vec<C64>> {
        if z.len() != self.inner.ambient_dim() {
            return Err(PyValueError::new_err("dimension mismatch"));
        }
        Ok(self.inner.eval(&z))
    }

    fn potential(&self, z: Vec<C64>) -> Option<C64> {
        self.inner.potential(&z)
    }

    fn scaled(&self, c: C64) -> Self {
        Self {
            inner: self.inner.scaled(c),
        }
    }

    #[getter]
    fn support_radius(&self) -> f64 {
        self.inner.support_radius()
    }

    #[getter]
    fn dbar_closed(&self) -> bool {
        self.inner.dbar_closed()
    }

    fn __repr__(&self) -> String {
        format!("Form({}, R={})", self.inner.label(), self.inner.support_radius())
    }
}

/// `g(z)` for `∂̄g = λ`; `method` is `"direct"` or `"l2"`.
#[pyfunction]
#[pyo3(signature = (variety, form, z, method="direct", rel_tol=None))]
fn solve<'py>(
    py: Python<'py>,
    variety: &Variety,
    form: &Form,
    z: Vec<C64>,
    method: &str,
    rel_tol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = params(rel_tol)?;
    let r = py
        .detach(|| match method {
            "direct" => Ok(solver::solve(&variety.inner, &form.inner, &z, &p)),
            "l2" => Ok(solver::solve_l2(&variety.inner, &form.inner, &z, &p)),
            other => Err(other.to_string()),
        })
        .map_err(|m| PyValueError::new_err(format!("unknown method `{m}`")))?
        .map_err(to_py_err)?;
    result_dict(py, &r)
}

/// `g(s^β z)` through the scaled kernel.
#[pyfunction]
#[pyo3(signature = (variety, form, z, s, rel_tol=None))]
fn solve_scaled<'py>(
    py: Python<'py>,
    variety: &Variety,
    form: &Form,
    z: Vec<C64>,
    s: C64,
    rel_tol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = params(rel_tol)?;
    let r = py
        .detach(|| solver::solve_scaled(&variety.inner, &form.inner, &z, s, &p))
        .map_err(to_py_err)?;
    result_dict(py, &r)
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    fixtures::FIXTURES.iter().map(|f| f.name).collect()
}

/// Validates a TOML job config; raises `ValueError` on problems.
#[pyfunction]
fn check_config(text: &str) -> PyResult<String> {
    cli::parse_and_validate(text)
        .map(|c| c.config.job.name().to_string())
        .map_err(|e: ConfigError| PyValueError::new_err(e.to_string()))
}

/// Runs a TOML job config and returns the JSON report text.
#[pyfunction]
#[pyo3(signature = (text, reproducible=true, seed=None, threads=None))]
fn run_config(py: Python<'_>, text: &str, reproducible: bool, seed: Option<u64>, threads: Option<usize>) -> PyResult<String> {
    let cfg = cli::parse_and_validate(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let opts = RunOptions {
        reproducible,
        seed,
        threads,
    };
    let (report, _) = py.detach(|| cli::run_validated(&cfg, &opts));
    Ok(cli::render(&report, cli::Format::Json))
}

#[pymodule]
fn dbarcone(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Variety>()?;
    m.add_class::<Form>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(check_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
