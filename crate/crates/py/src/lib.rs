//! Python bindings: `import quadflt`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use quadflt::criterion;
use quadflt::density;
use quadflt::frey;
use quadflt::mersenne;
use quadflt::quadfield::{self, SquarefreeD};
use quadflt::sunit::{self, SearchBounds};

fn py_err(e: quadflt::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(d: u64) -> PyResult<SquarefreeD> {
    SquarefreeD::new(d).map_err(py_err)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

/// An element `(x + y√d)/den` of `Q(√d)`.
#[pyclass(name = "QuadElement", frozen, from_py_object)]
#[derive(Clone)]
struct PyQuadElement(quadfield::QuadElement);

#[pymethods]
impl PyQuadElement {
    /// `x + y√d`, or `(x + y√d)/2` when `half` is set.
    #[new]
    #[pyo3(signature = (x, y, d, half = false))]
    fn new(x: BigInt, y: BigInt, d: u64, half: bool) -> PyResult<Self> {
        quadfield::QuadElement::new(x, y, field(d)?, half)
            .map(PyQuadElement)
            .map_err(py_err)
    }

    #[getter]
    fn x(&self) -> BigInt {
        self.0.x().clone()
    }

    #[getter]
    fn y(&self) -> BigInt {
        self.0.y().clone()
    }

    #[getter]
    fn den(&self) -> BigInt {
        self.0.den().clone()
    }

    #[getter]
    fn d(&self) -> u64 {
        self.0.d().get()
    }

    /// Norm as `(numerator, denominator)`.
    fn norm(&self) -> (BigInt, BigInt) {
        let n = self.0.norm();
        (n.numer().clone(), n.denom().clone())
    }

    fn conjugate(&self) -> Self {
        PyQuadElement(self.0.conjugate())
    }

    fn is_s_unit(&self) -> bool {
        sunit::is_s_unit(&self.0)
    }

    /// `ord_P` at each prime above 2, keyed by prime label.
    fn valuations_above_2(&self) -> PyResult<BTreeMap<String, i64>> {
        let s = quadfield::splitting_of_two(self.0.d());
        s.s.iter()
            .map(|p| {
                quadfield::valuation_above_2(&self.0, p, &s)
                    .map(|v| (p.label.to_string(), v))
                    .map_err(py_err)
            })
            .collect()
    }

    fn __add__(&self, other: &Self) -> Self {
        PyQuadElement(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        PyQuadElement(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyQuadElement(&self.0 * &other.0)
    }

    fn __truediv__(&self, other: &Self) -> PyResult<Self> {
        if other.0.is_zero() {
            return Err(PyValueError::new_err("division by zero"));
        }
        Ok(PyQuadElement(&self.0 / &other.0))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("QuadElement({})", self.0)
    }
}

/// Outcome of the valuation criterion for one field.
#[pyclass(name = "Verdict", frozen)]
struct PyVerdict(criterion::Verdict);

#[pymethods]
impl PyVerdict {
    #[getter]
    fn d(&self) -> u64 {
        self.0.d.get()
    }

    #[getter]
    fn outcome(&self) -> String {
        self.0.outcome.to_string()
    }

    #[getter]
    fn holds(&self) -> bool {
        self.0.holds()
    }

    #[getter]
    fn clauses(&self) -> Vec<String> {
        self.0.provenance.clauses.clone()
    }

    #[getter]
    fn es_dependent(&self) -> bool {
        self.0.provenance.es_dependent
    }

    #[getter]
    fn complete(&self) -> bool {
        self.0.complete
    }

    /// `(λ, μ)` for each relevant orbit that fails both conditions.
    fn failing_orbits(&self) -> Vec<(String, String)> {
        self.0
            .orbits
            .iter()
            .filter(|r| !r.passes())
            .map(|r| (r.solution.lambda().to_string(), r.solution.mu().to_string()))
            .collect()
    }

    /// `ord_P(λμ)` per relevant orbit, at the first prime above 2.
    fn ord_lambda_mu(&self) -> Vec<i64> {
        self.0.orbits.iter().map(|r| r.valuations[0].ord_lambda_mu).collect()
    }

    fn to_json(&self) -> String {
        json(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Verdict(d={}, outcome={})", self.0.d, self.0.outcome)
    }
}

#[pyfunction]
#[pyo3(signature = (d, r1_max = 40, s_max = 64))]
fn verdict(d: u64, r1_max: u32, s_max: u32) -> PyResult<PyVerdict> {
    Ok(PyVerdict(criterion::verdict(field(d)?, SearchBounds { r1_max, s_max })))
}

/// The congruence clause that settles `d`, if any.
#[pyfunction]
fn theorem1_class(d: u64) -> PyResult<Option<String>> {
    Ok(criterion::theorem1_class(field(d)?).map(|c| c.to_string()))
}

/// Relevant S-unit solutions, one `(λ, μ)` per orbit.
#[pyfunction]
#[pyo3(signature = (d, r1_max = 40, s_max = 64))]
fn relevant_solutions(d: u64, r1_max: u32, s_max: u32) -> PyResult<Vec<(PyQuadElement, PyQuadElement)>> {
    let c = sunit::classify_relevant_solutions(field(d)?, SearchBounds { r1_max, s_max });
    Ok(c.orbits
        .iter()
        .map(|o| {
            (
                PyQuadElement(o.representative.lambda().clone()),
                PyQuadElement(o.representative.mu().clone()),
            )
        })
        .collect())
}

/// `(kind, [(label, e, f)])` for the primes above 2.
#[pyfunction]
fn splitting_of_two(d: u64) -> PyResult<(String, Vec<(String, u32, u32)>)> {
    let s = quadfield::splitting_of_two(field(d)?);
    let kind = json(&s.kind).trim_matches('"').to_string();
    Ok((kind, s.s.iter().map(|p| (p.label.to_string(), p.e, p.f)).collect()))
}

/// `{c4, c6, disc, j}` as decimal or fraction strings.
#[pyfunction]
fn frey_invariants(u: BigInt, v: BigInt, w: BigInt) -> PyResult<BTreeMap<String, String>> {
    let q = frey::rational;
    let f = frey::frey_invariants(&q(u), &q(v), &q(w)).map_err(py_err)?;
    Ok(BTreeMap::from([
        ("c4".to_string(), f.c4.to_string()),
        ("c6".to_string(), f.c6.to_string()),
        ("disc".to_string(), f.disc.to_string()),
        ("j".to_string(), f.j.to_string()),
    ]))
}

/// j-invariant of the Legendre curve with parameter `λ`.
#[pyfunction]
fn lambda_to_j(lam: &PyQuadElement) -> PyResult<PyQuadElement> {
    frey::lambda_to_j(&lam.0).map(PyQuadElement).map_err(py_err)
}

/// `(count, predicted)` for squarefree `d <= x` with `d ≡ r (mod n)`.
#[pyfunction]
fn sf_count_in_ap(r: u64, n: u64, x: u64) -> PyResult<(u64, f64)> {
    let c = density::sf_count_in_ap(r, n, x).map_err(py_err)?;
    Ok((c.count, c.predicted))
}

/// Density report as a JSON string.
#[pyfunction]
#[pyo3(signature = (x, r1_max = 40))]
fn scan(x: u64, r1_max: u32) -> PyResult<String> {
    density::scan(x, r1_max).map(|r| json(&r)).map_err(py_err)
}

/// Prime factorization of `2^m − 1` as `[(p, e)]`.
#[pyfunction]
#[pyo3(signature = (m, allow_override = false))]
fn mersenne_factor(m: u32, allow_override: bool) -> PyResult<Vec<(u128, u32)>> {
    mersenne::mersenne_factor(m, allow_override)
        .map(|d| d.prime_factors)
        .map_err(py_err)
}

#[pyfunction]
fn primitive_divisors(m: u32) -> PyResult<Vec<u128>> {
    mersenne::mersenne_factor(m, false)
        .map(|d| d.primitive_divisors)
        .map_err(py_err)
}

#[pyfunction]
fn alpha_factors(s: u32, t: u32) -> PyResult<Vec<u128>> {
    mersenne::alpha_factors(s, t).map(|q| q.alpha).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "quadflt")]
fn quadflt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQuadElement>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(verdict, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_class, m)?)?;
    m.add_function(wrap_pyfunction!(relevant_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(splitting_of_two, m)?)?;
    m.add_function(wrap_pyfunction!(frey_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_to_j, m)?)?;
    m.add_function(wrap_pyfunction!(sf_count_in_ap, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(mersenne_factor, m)?)?;
    m.add_function(wrap_pyfunction!(primitive_divisors, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_factors, m)?)?;
    Ok(())
}
