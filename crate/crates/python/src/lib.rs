//! Python bindings for `interalign`.
//!
//! Matrices cross the boundary as lists of rows of Python `complex`. User
//! indices are 0-based, as in the Rust API. Structured results (verdicts,
//! reports, witnesses) are returned as plain dicts.

use interalign::construct3;
use interalign::feasibility;
use interalign::io::{ChannelFile, StrategyFile};
use interalign::numsolve::{self, NewtonOptions};
use interalign::schubert;
use interalign::verify;
use interalign::{CMatrix, Error};
use num_bigint::BigUint;
use num_complex::Complex64;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

type Rows = Vec<Vec<Complex64>>;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.name()))
}

fn to_rows(m: &CMatrix) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(rows: &Rows) -> PyResult<CMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("ragged matrix rows"));
    }
    Ok(CMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "ProblemSpec", module = "pyinteralign", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpec(interalign::ProblemSpec);

#[pymethods]
impl PySpec {
    /// Symmetric instance with `k` users, `m` transmit and `n` receive antennas
    /// and `d` streams per user.
    #[new]
    fn new(k: usize, m: usize, n: usize, d: usize) -> PyResult<Self> {
        interalign::ProblemSpec::symmetric(k, m, n, d).map(Self).map_err(err)
    }

    /// General instance from `(M_i, N_i, d_i)` triples.
    #[staticmethod]
    fn from_users(users: Vec<(usize, usize, usize)>) -> PyResult<Self> {
        let users = users.into_iter().map(|(m, n, d)| interalign::UserDims::new(m, n, d)).collect();
        interalign::ProblemSpec::new(users).map(Self).map_err(err)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn users(&self) -> Vec<(usize, usize, usize)> {
        self.0.users().iter().map(|u| (u.m, u.n, u.d)).collect()
    }

    fn strategy_dimension(&self) -> i64 {
        self.0.strategy_dimension()
    }

    fn equation_count(&self) -> i64 {
        self.0.equation_count()
    }

    fn reciprocal(&self) -> Self {
        Self(self.0.reciprocal())
    }

    fn __repr__(&self) -> String {
        format!("ProblemSpec(users={:?})", self.users())
    }
}

#[pyclass(name = "ChannelSet", module = "pyinteralign", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChannels(interalign::ChannelSet);

#[pymethods]
impl PyChannels {
    /// Seeded i.i.d. standard complex Gaussian channels.
    #[staticmethod]
    fn generate(spec: &PySpec, seed: u64) -> Self {
        Self(interalign::generate_channels(&spec.0, seed))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: ChannelFile = serde_json::from_str(text).map_err(|e| err(e.into()))?;
        interalign::ChannelSet::try_from(&file).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&ChannelFile::from(&self.0)).map_err(|e| err(e.into()))
    }

    #[getter]
    fn spec(&self) -> PySpec {
        PySpec(self.0.spec().clone())
    }

    /// Cross channel from transmitter `j` to receiver `i`.
    fn cross(&self, i: usize, j: usize) -> PyResult<Rows> {
        let k = self.0.k();
        if i >= k || j >= k || i == j {
            return Err(PyIndexError::new_err(format!("no cross channel ({i}, {j}) among {k} users")));
        }
        Ok(to_rows(self.0.cross(i, j)))
    }

    fn direct(&self, i: usize) -> PyResult<Option<Rows>> {
        if i >= self.0.k() {
            return Err(PyIndexError::new_err(format!("user {i} out of range")));
        }
        Ok(self.0.direct(i).map(to_rows))
    }

    /// Replace one cross channel, returning a new set.
    fn with_cross(&self, i: usize, j: usize, h: Rows) -> PyResult<Self> {
        self.0.clone().with_cross(i, j, from_rows(&h)?).map(Self).map_err(err)
    }

    fn reciprocal(&self) -> Self {
        Self(self.0.reciprocal())
    }
}

#[pyclass(name = "Strategy", module = "pyinteralign", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStrategy {
    spec: interalign::ProblemSpec,
    inner: interalign::Strategy,
}

#[pymethods]
impl PyStrategy {
    #[new]
    fn new(spec: &PySpec, u: Vec<Rows>, v: Vec<Rows>) -> PyResult<Self> {
        let u = u.iter().map(from_rows).collect::<PyResult<Vec<_>>>()?;
        let v = v.iter().map(from_rows).collect::<PyResult<Vec<_>>>()?;
        let inner = interalign::Strategy::new(u, v);
        inner.check_shapes(&spec.0).map_err(err)?;
        Ok(Self { spec: spec.0.clone(), inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: StrategyFile = serde_json::from_str(text).map_err(|e| err(e.into()))?;
        let inner = file.to_strategy().map_err(err)?;
        Ok(Self { spec: file.spec, inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&StrategyFile::from_strategy(&self.spec, &self.inner)).map_err(|e| err(e.into()))
    }

    #[getter]
    fn u(&self) -> Vec<Rows> {
        self.inner.u.iter().map(to_rows).collect()
    }

    #[getter]
    fn v(&self) -> Vec<Rows> {
        self.inner.v.iter().map(to_rows).collect()
    }

    /// Largest principal angle between corresponding subspaces.
    fn distance(&self, other: &PyStrategy) -> PyResult<f64> {
        self.inner.distance(&other.inner).map_err(err)
    }
}

fn wrap(ch: &PyChannels, inner: interalign::Strategy) -> PyStrategy {
    PyStrategy { spec: ch.0.spec().clone(), inner }
}

/// Feasibility verdict with certificates; `max_path_len` enables the
/// alignment-path bounds.
#[pyfunction]
#[pyo3(signature = (spec, max_path_len=None))]
fn assess<'py>(py: Python<'py>, spec: &PySpec, max_path_len: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &feasibility::assess(&spec.0, max_path_len).map_err(err)?)
}

#[pyfunction]
fn decide_3user<'py>(py: Python<'py>, m: usize, n: usize, d: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &feasibility::decide_3user_symmetric(m, n, d))
}

#[pyfunction]
fn decide_fully_symmetric<'py>(py: Python<'py>, k: usize, n: usize, d: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &feasibility::decide_fully_symmetric(k, n, d).map_err(err)?)
}

/// Explicit three-user construction: eigenvectors when `M = N`, paths otherwise.
#[pyfunction]
fn solve_three_user(ch: &PyChannels) -> PyResult<PyStrategy> {
    construct3::solve_three_user(&ch.0).map(|s| wrap(ch, s)).map_err(err)
}

/// All `binom(2d, d)` eigenvector solutions of the square three-user case.
#[pyfunction]
#[pyo3(signature = (ch, d, limit=None))]
fn enumerate_square(ch: &PyChannels, d: usize, limit: Option<usize>) -> PyResult<Vec<PyStrategy>> {
    let all = construct3::enumerate_square_solutions(&ch.0, d, limit).map_err(err)?;
    Ok(all.into_iter().map(|s| wrap(ch, s)).collect())
}

/// Multi-start damped Newton on the alignment equations.
#[pyfunction]
#[pyo3(signature = (ch, restarts=100, seed=0))]
fn solve_newton(py: Python<'_>, ch: &PyChannels, restarts: usize, seed: u64) -> PyResult<PyStrategy> {
    let opts = NewtonOptions { restarts, seed, ..NewtonOptions::default() };
    let sol = py.detach(|| numsolve::solve_newton(&ch.0, &opts)).map_err(err)?;
    Ok(wrap(ch, sol.strategy))
}

/// Distinct Newton solutions found over `attempts` independent starts.
#[pyfunction]
#[pyo3(signature = (ch, attempts, seed=0))]
fn find_distinct_solutions(py: Python<'_>, ch: &PyChannels, attempts: usize, seed: u64) -> PyResult<Vec<PyStrategy>> {
    let all = py.detach(|| numsolve::find_distinct_solutions(&ch.0, attempts, seed)).map_err(err)?;
    Ok(all.into_iter().map(|s| wrap(ch, s)).collect())
}

#[pyfunction]
#[pyo3(signature = (ch, strategy, tol=verify::DEFAULT_TOL))]
fn verify_strategy<'py>(
    py: Python<'py>,
    ch: &PyChannels,
    strategy: &PyStrategy,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &verify::check_orthogonality(&ch.0, &strategy.inner, tol).map_err(err)?)
}

/// Exact number of alignment solutions for `k` users, `d` streams and
/// `n = m` antennas, when the problem is square.
#[pyfunction]
fn count_solutions(py: Python<'_>, k: usize, d: usize, n: usize) -> PyResult<BigUint> {
    py.detach(|| schubert::count_solutions(k, d, n)).map_err(err)
}

#[pyfunction]
fn existence_witness<'py>(py: Python<'py>, k: usize, d: usize, n: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &schubert::existence_witness(k, d, n).map_err(err)?)
}

#[pyfunction]
fn lr_coefficient(lambda: Vec<usize>, mu: Vec<usize>, nu: Vec<usize>) -> PyResult<u64> {
    let p = |v: Vec<usize>| schubert::Partition::new(v).map_err(err);
    Ok(schubert::lr_coefficient(&p(lambda)?, &p(mu)?, &p(nu)?))
}

#[pymodule]
fn pyinteralign(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyChannels>()?;
    m.add_class::<PyStrategy>()?;
    m.add_function(wrap_pyfunction!(assess, m)?)?;
    m.add_function(wrap_pyfunction!(decide_3user, m)?)?;
    m.add_function(wrap_pyfunction!(decide_fully_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(solve_three_user, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_square, m)?)?;
    m.add_function(wrap_pyfunction!(solve_newton, m)?)?;
    m.add_function(wrap_pyfunction!(find_distinct_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(verify_strategy, m)?)?;
    m.add_function(wrap_pyfunction!(count_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(existence_witness, m)?)?;
    m.add_function(wrap_pyfunction!(lr_coefficient, m)?)?;
    Ok(())
}
