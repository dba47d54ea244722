//! Python bindings for `hecke_core`.

use hecke_core::kernel::{self, Certificate, KernelCoefficient};
use hecke_core::lfunction::{self, LValue};
use hecke_core::petersson::{self, QuadratureSpec, TriangleCheck};
use hecke_core::qexpansion::{self, Eigenform, QExpansion};
use hecke_core::specfun::{self, HalfIntOrder};
use hecke_core::{cli, ntheory, Error, ValueWithError};
use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(m) => PyValueError::new_err(m),
        Error::Precision(m) => PyArithmeticError::new_err(m),
        Error::Unsupported(m) => PyNotImplementedError::new_err(m),
        Error::BoundViolation(m) => PyRuntimeError::new_err(m),
    }
}

fn fraction<'py>(py: Python<'py>, q: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    cls.call1((q.numer().clone(), q.denom().clone()))
}

fn fractions<'py>(py: Python<'py>, qs: &[BigRational]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    qs.iter().map(|q| fraction(py, q)).collect()
}

/// A float with an absolute error bound.
#[pyclass(name = "ValueWithError", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyValue(ValueWithError);

#[pymethods]
impl PyValue {
    #[new]
    fn new(value: f64, abs_err: f64) -> PyResult<Self> {
        if !(abs_err >= 0.0) {
            return Err(PyValueError::new_err("abs_err must be non-negative"));
        }
        Ok(Self(ValueWithError::new(value, abs_err)))
    }

    #[getter]
    fn value(&self) -> f64 {
        self.0.value
    }

    #[getter]
    fn abs_err(&self) -> f64 {
        self.0.abs_err
    }

    fn lo(&self) -> f64 {
        self.0.lo()
    }

    fn hi(&self) -> f64 {
        self.0.hi()
    }

    fn contains(&self, x: f64) -> bool {
        self.0.contains(x)
    }

    fn excludes_zero(&self) -> bool {
        self.0.excludes_zero()
    }

    fn __repr__(&self) -> String {
        format!("ValueWithError({:e}, {:e})", self.0.value, self.0.abs_err)
    }
}

/// A normalized Hecke eigenform with floating coefficients `a(1), a(2), ...`.
#[pyclass(name = "Eigenform", frozen, from_py_object)]
#[derive(Clone)]
struct PyEigenform(Eigenform);

#[pymethods]
impl PyEigenform {
    #[getter]
    fn weight(&self) -> u32 {
        self.0.weight()
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.0.coeffs().to_vec()
    }

    #[getter]
    fn coefficient_field_degree(&self) -> usize {
        self.0.coefficient_field_degree()
    }

    fn a(&self, n: usize) -> PyResult<f64> {
        if n == 0 || n > self.0.num_coeffs() {
            return Err(PyValueError::new_err(format!(
                "coefficient index {n} outside 1..={}",
                self.0.num_coeffs()
            )));
        }
        Ok(self.0.a(n))
    }

    fn __len__(&self) -> usize {
        self.0.num_coeffs()
    }

    fn __repr__(&self) -> String {
        let a2 = if self.0.num_coeffs() >= 2 { self.0.a(2) } else { f64::NAN };
        format!("Eigenform(weight={}, a2={a2})", self.0.weight())
    }
}

#[pyclass(name = "Certificate", frozen, get_all)]
struct PyCertificate {
    k: u32,
    rho: PyValue,
    per_k_bound: f64,
    global_bound: f64,
    nonvanishing: bool,
    sign: &'static str,
    log_prefactor: f64,
    terms_used: u64,
}

impl From<Certificate> for PyCertificate {
    fn from(c: Certificate) -> Self {
        Self {
            k: c.k,
            rho: PyValue(c.rho),
            per_k_bound: c.per_k_bound,
            global_bound: c.global_bound,
            nonvanishing: c.nonvanishing,
            sign: c.sign.as_str(),
            log_prefactor: c.log_prefactor,
            terms_used: c.terms_used,
        }
    }
}

#[pymethods]
impl PyCertificate {
    fn __repr__(&self) -> String {
        format!(
            "Certificate(k={}, rho={}, nonvanishing={}, sign={})",
            self.k, self.rho.0, self.nonvanishing, self.sign
        )
    }
}

#[pyclass(name = "KernelCoefficient", frozen, get_all)]
struct PyKernelCoefficient {
    k: u32,
    n: u64,
    rho: PyValue,
    log_prefactor: f64,
    value: PyValue,
    terms_used: u64,
    tail_bound: f64,
}

impl From<KernelCoefficient> for PyKernelCoefficient {
    fn from(c: KernelCoefficient) -> Self {
        Self {
            k: c.k,
            n: c.n,
            rho: PyValue(c.rho),
            log_prefactor: c.log_prefactor,
            value: PyValue(c.value),
            terms_used: c.terms_used,
            tail_bound: c.tail_bound,
        }
    }
}

#[pyclass(name = "LValue", frozen, get_all)]
struct PyLValue {
    k: u32,
    s: f64,
    completed: PyValue,
    finite: PyValue,
    terms_used: usize,
}

impl From<LValue> for PyLValue {
    fn from(l: LValue) -> Self {
        Self {
            k: l.k,
            s: l.s,
            completed: PyValue(l.completed),
            finite: PyValue(l.finite),
            terms_used: l.terms_used,
        }
    }
}

#[pyclass(name = "TriangleCheck", frozen, get_all)]
struct PyTriangleCheck {
    k: u32,
    lhs: PyValue,
    rhs: PyValue,
    ratio: PyValue,
}

impl From<TriangleCheck> for PyTriangleCheck {
    fn from(t: TriangleCheck) -> Self {
        Self { k: t.k, lhs: PyValue(t.lhs), rhs: PyValue(t.rhs), ratio: PyValue(t.ratio) }
    }
}

// number theory

#[pyfunction]
fn mod_inverse(a: u64, c: u64) -> PyResult<u64> {
    ntheory::mod_inverse(a, c).map_err(to_py)
}

#[pyfunction]
fn coprime_factor_pairs(m: u64) -> Vec<(u64, u64)> {
    ntheory::coprime_factor_pairs(m)
}

/// `γ_n(m)` with independently reduced inverses.
#[pyfunction]
fn gamma_sum(n: u64, m: u64) -> PyResult<f64> {
    ntheory::gamma_sum(n, m).map_err(to_py)
}

#[pyfunction]
fn divisor_count(m: u64) -> u64 {
    ntheory::divisor_count(m)
}

#[pyfunction]
fn divisor_sigma(n: u64, r: u32) -> BigInt {
    BigInt::from(ntheory::divisor_sigma(n, r))
}

#[pyfunction]
fn bernoulli(py: Python<'_>, n: u64) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &ntheory::bernoulli(n).map_err(to_py)?)
}

#[pyfunction]
fn zeta(s: f64) -> PyResult<PyValue> {
    ntheory::zeta(s).map(PyValue).map_err(to_py)
}

// q-expansions

fn qexp<'py>(py: Python<'py>, f: &QExpansion) -> PyResult<Vec<Bound<'py, PyAny>>> {
    fractions(py, f.coeffs())
}

/// Coefficients of Δ from `q^0` up to `q^(prec-1)`.
#[pyfunction]
fn delta(py: Python<'_>, prec: usize) -> PyResult<Vec<Bound<'_, PyAny>>> {
    if prec == 0 {
        return Err(PyValueError::new_err("prec must be at least 1"));
    }
    qexp(py, &qexpansion::delta(prec))
}

#[pyfunction]
fn eisenstein(py: Python<'_>, k: u32, prec: usize) -> PyResult<Vec<Bound<'_, PyAny>>> {
    qexp(py, &qexpansion::eisenstein(k, prec).map_err(to_py)?)
}

#[pyfunction]
fn dim_cusp(k: u32) -> PyResult<usize> {
    qexpansion::dim_cusp(k).map_err(to_py)
}

#[pyfunction]
fn miller_basis(py: Python<'_>, k: u32, prec: usize) -> PyResult<Vec<Vec<Bound<'_, PyAny>>>> {
    qexpansion::miller_basis(k, prec)
        .map_err(to_py)?
        .iter()
        .map(|g| qexp(py, g))
        .collect()
}

#[pyfunction]
fn hecke_matrix(py: Python<'_>, k: u32, n: u64, prec: usize) -> PyResult<Vec<Vec<Bound<'_, PyAny>>>> {
    let m = qexpansion::hecke_matrix(k, n, prec).map_err(to_py)?;
    m.rows().iter().map(|r| fractions(py, r)).collect()
}

/// Characteristic polynomial of `T_n` on `S_k`, constant term first.
#[pyfunction]
fn hecke_charpoly(py: Python<'_>, k: u32, n: u64, prec: usize) -> PyResult<Vec<Bound<'_, PyAny>>> {
    let m = qexpansion::hecke_matrix(k, n, prec).map_err(to_py)?;
    fractions(py, &m.charpoly())
}

#[pyfunction]
fn eigenforms(k: u32, n_coeffs: usize) -> PyResult<Vec<PyEigenform>> {
    Ok(qexpansion::eigenforms(k, n_coeffs)
        .map_err(to_py)?
        .into_iter()
        .map(PyEigenform)
        .collect())
}

// special functions

#[pyfunction]
fn bessel_j(twice_nu: u32, x: f64) -> PyResult<PyValue> {
    let nu = HalfIntOrder::new(twice_nu).map_err(to_py)?;
    specfun::bessel_j(nu, x).map(PyValue).map_err(to_py)
}

#[pyfunction]
fn bessel_envelope(twice_nu: u32, x: f64) -> PyResult<f64> {
    let nu = HalfIntOrder::new(twice_nu).map_err(to_py)?;
    if !(x >= 0.0) {
        return Err(PyValueError::new_err("bessel_envelope needs x >= 0"));
    }
    Ok(specfun::bessel_envelope(nu, x))
}

#[pyfunction]
fn log_gamma(x: f64) -> PyResult<f64> {
    specfun::log_gamma(x).map_err(to_py)
}

#[pyfunction]
fn upper_incomplete_gamma(s: f64, x: f64) -> PyResult<PyValue> {
    specfun::upper_incomplete_gamma(s, x).map(PyValue).map_err(to_py)
}

// kernel

#[pyfunction]
#[pyo3(signature = (k, n=1, eps=1e-10))]
fn r_k(k: u32, n: u64, eps: f64) -> PyResult<PyKernelCoefficient> {
    kernel::r_k(k, n, eps).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (k, eps=1e-10))]
fn certify(k: u32, eps: f64) -> PyResult<PyCertificate> {
    kernel::certify(k, eps).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn per_k_bound(k: u32) -> PyResult<f64> {
    kernel::per_k_bound(k).map_err(to_py)
}

#[pyfunction]
fn global_bound() -> f64 {
    kernel::global_bound()
}

// L-functions

#[pyfunction]
fn completed_l(f: &PyEigenform, s: f64) -> PyResult<PyLValue> {
    lfunction::completed_l(&f.0, s).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn functional_equation_residual(f: &PyEigenform, s: f64) -> PyResult<f64> {
    lfunction::functional_equation_residual(&f.0, s).map_err(to_py)
}

/// `[(eigenform, L(f, k/2)), ...]`, each value with `abs_err <= eps`.
#[pyfunction]
#[pyo3(signature = (k, eps=1e-10))]
fn central_values(k: u32, eps: f64) -> PyResult<Vec<(PyEigenform, PyValue)>> {
    Ok(lfunction::central_values(k, eps)
        .map_err(to_py)?
        .into_iter()
        .map(|(f, v)| (PyEigenform(f), PyValue(v)))
        .collect())
}

// Petersson

fn quadrature(x_nodes: usize, y_nodes: usize, y_cutoff: f64) -> PyResult<QuadratureSpec> {
    QuadratureSpec::new(x_nodes, y_nodes, y_cutoff).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (f, g, x_nodes=40, y_nodes=24, y_cutoff=4.0))]
fn petersson_inner(
    f: &PyEigenform,
    g: &PyEigenform,
    x_nodes: usize,
    y_nodes: usize,
    y_cutoff: f64,
) -> PyResult<PyValue> {
    let spec = quadrature(x_nodes, y_nodes, y_cutoff)?;
    petersson::petersson_inner(&f.0, &g.0, &spec).map(PyValue).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (f, x_nodes=40, y_nodes=24, y_cutoff=4.0))]
fn petersson_norm_sq(f: &PyEigenform, x_nodes: usize, y_nodes: usize, y_cutoff: f64) -> PyResult<PyValue> {
    let spec = quadrature(x_nodes, y_nodes, y_cutoff)?;
    petersson::petersson_norm_sq(&f.0, &spec).map(PyValue).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (k, eps=1e-10))]
fn triangle_check(k: u32, eps: f64) -> PyResult<PyTriangleCheck> {
    petersson::triangle_check(k, eps, &QuadratureSpec::default())
        .map(Into::into)
        .map_err(to_py)
}

/// The CLI report for one weight, as a JSON string.
#[pyfunction]
#[pyo3(signature = (k, eps=1e-10, triangle=false))]
fn report_json(py: Python<'_>, k: u32, eps: f64, triangle: bool) -> PyResult<String> {
    py.detach(|| cli::build_report(k, eps, triangle))
        .map(|r| r.to_json())
        .map_err(to_py)
}

#[pymodule]
fn hecke(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyValue>()?;
    m.add_class::<PyEigenform>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyKernelCoefficient>()?;
    m.add_class::<PyLValue>()?;
    m.add_class::<PyTriangleCheck>()?;
    m.add_function(wrap_pyfunction!(mod_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(coprime_factor_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_sum, m)?)?;
    m.add_function(wrap_pyfunction!(divisor_count, m)?)?;
    m.add_function(wrap_pyfunction!(divisor_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(eisenstein, m)?)?;
    m.add_function(wrap_pyfunction!(dim_cusp, m)?)?;
    m.add_function(wrap_pyfunction!(miller_basis, m)?)?;
    m.add_function(wrap_pyfunction!(hecke_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(hecke_charpoly, m)?)?;
    m.add_function(wrap_pyfunction!(eigenforms, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_envelope, m)?)?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(upper_incomplete_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(r_k, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(per_k_bound, m)?)?;
    m.add_function(wrap_pyfunction!(global_bound, m)?)?;
    m.add_function(wrap_pyfunction!(completed_l, m)?)?;
    m.add_function(wrap_pyfunction!(functional_equation_residual, m)?)?;
    m.add_function(wrap_pyfunction!(central_values, m)?)?;
    m.add_function(wrap_pyfunction!(petersson_inner, m)?)?;
    m.add_function(wrap_pyfunction!(petersson_norm_sq, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_check, m)?)?;
    m.add_function(wrap_pyfunction!(report_json, m)?)?;
    Ok(())
}
