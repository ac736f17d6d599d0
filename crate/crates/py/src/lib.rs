//! Python bindings. Values computed in MPFR are returned as Python `complex`
//! (rounded to double) and, where asked for, as decimal strings at full
//! precision. Exact q-series data comes back as `fractions.Fraction`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use plumbtop::asymptotics::{
    borel_laplace_resum, borel_transform, contour_integral, perturbative_coeffs, ContourSpec,
};
use plumbtop::cgp::cgp_invariant;
use plumbtop::context::Context;
use plumbtop::model::{canon_spinc, load_graph, parse_graph_json, parse_rational, CohomologyClass, PlumbingGraph};
use plumbtop::precision::ComplexAP;
use plumbtop::qseries::zhat_qseries;
use plumbtop::radial::{central_identity_check, radial_eval};
use plumbtop::reciprocity::{random_family, reciprocity_check};
use plumbtop::Rat;

create_exception!(plumbtop, ValidationError, PyValueError, "Invalid graph, level or argument.");
create_exception!(plumbtop, NumericalError, PyArithmeticError, "A numerical routine could not meet its tolerance.");

const BOREL_NODES: usize = 64;

fn to_py(e: plumbtop::Error) -> PyErr {
    let msg = format!("{} ({})", e, e.kind());
    if e.is_validation() {
        ValidationError::new_err(msg)
    } else {
        NumericalError::new_err(msg)
    }
}

fn digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).floor() as usize
}

fn fraction<'py>(py: Python<'py>, q: &Rat) -> PyResult<Bound<'py, PyAny>> {
    let frac = py.import("fractions")?.getattr("Fraction")?;
    frac.call1((*q.numer(), *q.denom()))
}

/// Plumbing graph with its omega class.
#[pyclass(module = "plumbtop", frozen, skip_from_py_object)]
struct Graph {
    graph: PlumbingGraph,
    omega: CohomologyClass,
}

#[pymethods]
impl Graph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (graph, omega) = parse_graph_json(text).map_err(to_py)?;
        Ok(Graph { graph, omega })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let (graph, omega) = load_graph(path).map_err(to_py)?;
        Ok(Graph { graph, omega })
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.graph.ids().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<i64> {
        self.graph.weights().to_vec()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges().to_vec()
    }

    #[getter]
    fn degrees(&self) -> Vec<i64> {
        self.graph.degrees()
    }

    #[getter]
    fn omega<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.omega.values().iter().map(|q| fraction(py, q)).collect()
    }

    fn __len__(&self) -> usize {
        self.graph.len()
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={})", self.graph.len(), self.graph.edges().len())
    }
}

/// All data derived from (graph, r, precision).
#[pyclass(module = "plumbtop", name = "Context", frozen)]
struct PyContext {
    ctx: Context,
}

#[pymethods]
impl PyContext {
    #[new]
    #[pyo3(signature = (graph, r, precision_bits = 192))]
    fn new(py: Python<'_>, graph: &Graph, r: i64, precision_bits: u32) -> PyResult<Self> {
        let (g, w) = (graph.graph.clone(), graph.omega.clone());
        let ctx = py.detach(|| Context::new(g, w, r, precision_bits)).map_err(to_py)?;
        Ok(PyContext { ctx })
    }

    #[getter]
    fn r(&self) -> i64 {
        self.ctx.r()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.ctx.rank()
    }

    #[getter]
    fn precision_bits(&self) -> u32 {
        self.ctx.prec
    }

    /// Delta = -(3|V| + tr B)/4.
    #[getter]
    fn delta<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.ctx.delta_exponent())
    }

    /// Z_r(M, omega).
    fn cgp(&self, py: Python<'_>) -> PyResult<Complex64> {
        Ok(self.cgp_ap(py)?.to_c64())
    }

    /// Z_r(M, omega) as (re, im) decimal strings at full precision.
    fn cgp_decimal(&self, py: Python<'_>) -> PyResult<(String, String)> {
        Ok(self.cgp_ap(py)?.to_decimal(digits(self.ctx.prec)))
    }

    /// [(spinc representative, z_r)] in canonical order.
    fn constants(&self) -> Vec<(Vec<i64>, Complex64)> {
        self.ctx.zr.entries.iter().map(|(s, z)| (s.rep.clone(), z.to_c64())).collect()
    }

    /// Zhat(s; q) up to exponent `order` (default Delta + 10) as
    /// [(exponent, coefficient)] with Fraction entries. `spinc` is a
    /// representative in delta + 2Z^V; default is the first canonical class.
    #[pyo3(signature = (spinc = None, order = None))]
    fn zhat<'py>(
        &self,
        py: Python<'py>,
        spinc: Option<Vec<i64>>,
        order: Option<&str>,
    ) -> PyResult<Vec<(Bound<'py, PyAny>, Bound<'py, PyAny>)>> {
        let s = match spinc {
            None => self.ctx.zr.entries[0].0.clone(),
            Some(ell) if ell.len() != self.ctx.rank() => {
                return Err(ValidationError::new_err(format!("spinc needs {} entries", self.ctx.rank())))
            }
            Some(ell) => canon_spinc(&self.ctx.lat, &self.ctx.delta, &ell).map_err(to_py)?,
        };
        let e = match order {
            Some(o) => parse_rational(o).map_err(to_py)?,
            None => self.ctx.delta_exponent() + Rat::from_integer(10),
        };
        let z = py.detach(|| zhat_qseries(&self.ctx.graph, &self.ctx.lat, &s, &e)).map_err(to_py)?;
        z.terms.iter().map(|(k, v)| Ok((fraction(py, k)?, fraction(py, v)?))).collect()
    }

    /// Zhat_r(tau) with certified tail bound <= tol; returns (value, tail_bound).
    #[pyo3(signature = (tau, tol = 1e-12))]
    fn radial(&self, py: Python<'_>, tau: Complex64, tol: f64) -> PyResult<(Complex64, f64)> {
        let t = ComplexAP::from_c64(tau, self.ctx.prec + 16);
        let ev = py.detach(|| radial_eval(&t, tol, &self.ctx)).map_err(to_py)?;
        Ok((ev.value.to_c64(), ev.tail_bound))
    }

    /// Central identity at tau; returns (Zhat_r, nu-average, diff, bound).
    #[pyo3(signature = (tau, tol = 1e-12))]
    fn central_identity(&self, py: Python<'_>, tau: Complex64, tol: f64) -> PyResult<(Complex64, Complex64, f64, f64)> {
        let t = ComplexAP::from_c64(tau, self.ctx.prec + 16);
        let rep = py.detach(|| central_identity_check(&t, tol, &self.ctx)).map_err(to_py)?;
        Ok((rep.radial.to_c64(), rep.nu_average.to_c64(), rep.diff, rep.bound))
    }

    /// Perturbative coefficients Zhat_l, l = 0..=order, in powers of 2 pi i tau.
    #[pyo3(signature = (order = 4))]
    fn expand(&self, py: Python<'_>, order: u32) -> PyResult<Vec<Complex64>> {
        let p = py.detach(|| perturbative_coeffs(&self.ctx, order)).map_err(to_py)?;
        Ok(p.coeffs.iter().map(|c| c.to_c64()).collect())
    }

    /// Steepest-descent integral at tau (rank <= 3).
    #[pyo3(signature = (tau, epsilon = None))]
    fn contour(&self, py: Python<'_>, tau: Complex64, epsilon: Option<f64>) -> PyResult<Complex64> {
        let spec = ContourSpec { eps: epsilon, ..ContourSpec::default() };
        Ok(py.detach(|| contour_integral(tau, &spec, &self.ctx)).map_err(to_py)?.value)
    }

    /// Borel transform B_r(z) for real z > 0.
    fn borel(&self, py: Python<'_>, z: f64) -> PyResult<Complex64> {
        Ok(py.detach(|| borel_transform(z, &self.ctx, BOREL_NODES)).map_err(to_py)?.value)
    }

    /// Borel-Laplace resummation along arg z = theta.
    #[pyo3(signature = (tau, theta = 0.0))]
    fn resum(&self, py: Python<'_>, tau: Complex64, theta: f64) -> PyResult<Complex64> {
        py.detach(|| borel_laplace_resum(theta, tau, &self.ctx, BOREL_NODES)).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Context(rank={}, r={}, precision_bits={})", self.ctx.rank(), self.ctx.r(), self.ctx.prec)
    }
}

impl PyContext {
    fn cgp_ap(&self, py: Python<'_>) -> PyResult<ComplexAP> {
        py.detach(|| cgp_invariant(&self.ctx.graph, &self.ctx.omega, &self.ctx.level)).map_err(to_py)
    }
}

/// Gaussian reciprocity on a seeded random family; returns a summary dict.
#[pyfunction]
#[pyo3(signature = (seed = 2024, count = 50, precision_bits = 160))]
fn reciprocity_selftest<'py>(py: Python<'py>, seed: u64, count: usize, precision_bits: u32) -> PyResult<Bound<'py, PyDict>> {
    let reports = py
        .detach(|| random_family(seed, count).iter().map(|i| reciprocity_check(i, precision_bits)).collect::<plumbtop::Result<Vec<_>>>())
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("count", reports.len())?;
    d.set_item("passed", reports.iter().filter(|r| r.pass).count())?;
    d.set_item("max_diff", reports.iter().map(|r| r.diff).fold(0.0, f64::max))?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "plumbtop")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<PyContext>()?;
    m.add_function(wrap_pyfunction!(reciprocity_selftest, m)?)?;
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    Ok(())
}
