//! Python bindings. Rationals cross the boundary as `"p/q"` strings so that
//! nothing is rounded; bundles are lists of 1-indexed goods.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use qshare_core::allocate::{self, FairSearch};
use qshare_core::lab::{self, NamedParams, SearchSpec};
use qshare_core::rational;
use qshare_core::{extremal, quantile, veto, Allocation, Bundle, Rational};

create_exception!(qshare, QshareError, PyException, "Invalid input or failed computation.");
create_exception!(qshare, BudgetError, QshareError, "The request exceeds a configured computation budget.");

fn err(e: qshare_core::Error) -> PyErr {
    if e.is_budget_refusal() {
        BudgetError::new_err(e.to_string())
    } else {
        QshareError::new_err(e.to_string())
    }
}

fn q(text: &str) -> PyResult<Rational> {
    rational::parse(text).map_err(err)
}

fn json_to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(x) => match (x.as_i64(), x.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => x.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py>(py: Python<'py>, value: impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| QshareError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// A fair-division instance: `n` agents with valuations over `m` goods.
#[pyclass(name = "Instance", module = "qshare", frozen)]
struct PyInstance {
    inner: qshare_core::Instance,
}

impl PyInstance {
    fn agent(&self, agent: usize) -> PyResult<usize> {
        if agent == 0 || agent > self.inner.agents() {
            return Err(PyValueError::new_err(format!("agent must lie in 1..={}", self.inner.agents())));
        }
        Ok(agent - 1)
    }

    fn bundle(&self, goods: Vec<usize>) -> PyResult<Bundle> {
        Bundle::from_labels(&goods, self.inner.goods()).map_err(err)
    }

    fn allocation(&self, bundles: Vec<Vec<usize>>) -> PyResult<Allocation> {
        Allocation::from_labels(&bundles, self.inner.goods()).map_err(err)
    }
}

#[pymethods]
impl PyInstance {
    /// Parses instance JSON.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyInstance { inner: qshare_core::Instance::from_json(text).map_err(err)? })
    }

    /// One of the built-in instances (`prop3`, `mms_gap`, ...).
    #[staticmethod]
    #[pyo3(signature = (name, n=None, m=None, epsilon=None))]
    fn named(name: &str, n: Option<usize>, m: Option<usize>, epsilon: Option<&str>) -> PyResult<Self> {
        let params = NamedParams { n, m, epsilon: epsilon.map(q).transpose()? };
        Ok(PyInstance { inner: lab::generate_named_instance(name, &params).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.agents()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.goods()
    }

    fn value(&self, agent: usize, bundle: Vec<usize>) -> PyResult<String> {
        let v = self.inner.valuation(self.agent(agent)?);
        Ok(rational::format(&v.evaluate(self.bundle(bundle)?).map_err(err)?))
    }

    /// Exact q-quantile share of `agent`.
    fn quantile_share(&self, agent: usize, q_level: &str) -> PyResult<String> {
        let v = self.inner.valuation(self.agent(agent)?);
        let share = quantile::quantile_share(v, self.inner.agents(), &q(q_level)?).map_err(err)?;
        Ok(rational::format(&share))
    }

    /// Probability that the random bundle is worth at most `bundle`.
    fn satisfaction(&self, agent: usize, bundle: Vec<usize>) -> PyResult<String> {
        let v = self.inner.valuation(self.agent(agent)?);
        let s = quantile::satisfaction(v, self.inner.agents(), self.bundle(bundle)?).map_err(err)?;
        Ok(rational::format(&s))
    }

    /// `[(value, weight)]` with weights over `n^m`.
    fn distribution(&self, agent: usize) -> PyResult<Vec<(String, String)>> {
        let v = self.inner.valuation(self.agent(agent)?);
        let d = quantile::exact_distribution(v, self.inner.agents()).map_err(err)?;
        Ok(d.atoms.iter().map(|(x, w)| (rational::format(x), w.to_string())).collect())
    }

    /// First q-fair allocation, or None.
    fn fair_allocation(&self, q_level: &str) -> PyResult<Option<Vec<Vec<usize>>>> {
        Ok(match allocate::exhaustive_fair_allocation(&self.inner, &q(q_level)?).map_err(err)? {
            FairSearch::Fair(a) => Some(a.labels()),
            FairSearch::Infeasible(_) => None,
        })
    }

    /// `(q_star, allocation)` maximizing the least satisfaction.
    fn maximin(&self) -> PyResult<(String, Vec<Vec<usize>>)> {
        let r = allocate::maximin_satisfaction_allocation(&self.inner).map_err(err)?;
        Ok((rational::format(&r.q_star), r.allocation.labels()))
    }

    /// `(mms, witness partition)` for `agent`.
    fn mms(&self, agent: usize) -> PyResult<(String, Vec<Vec<usize>>)> {
        let r = allocate::mms_value(self.inner.valuation(self.agent(agent)?), self.inner.agents()).map_err(err)?;
        Ok((rational::format(&r.value), r.witness.labels()))
    }

    fn mms_quantile(&self, agent: usize) -> PyResult<String> {
        let v = self.inner.valuation(self.agent(agent)?);
        Ok(rational::format(&allocate::mms_quantile(v, self.inner.agents()).map_err(err)?))
    }

    fn round_robin(&self) -> PyResult<Vec<Vec<usize>>> {
        Ok(allocate::round_robin(&self.inner).map_err(err)?.labels())
    }

    /// Per-agent values, shares and satisfactions for an allocation.
    fn report<'py>(&self, py: Python<'py>, allocation: Vec<Vec<usize>>, q_level: &str) -> PyResult<Bound<'py, PyAny>> {
        let a = self.allocation(allocation)?;
        to_py(py, quantile::allocation_report(&self.inner, &a, &q(q_level)?).map_err(err)?)
    }

    /// Sizes of the veto lists at level q, as decimal strings.
    fn veto_sizes(&self, q_level: &str) -> PyResult<Vec<String>> {
        let q = q(q_level)?;
        (0..self.inner.agents())
            .map(|i| {
                veto::veto_from_valuation(self.inner.valuation(i), self.inner.agents(), &q, i)
                    .map(|l| l.size().to_string())
                    .map_err(err)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, m={})", self.inner.agents(), self.inner.goods())
    }
}

/// Exhaustive threshold search; returns the certificate or witness as a dict.
#[pyfunction]
#[pyo3(signature = (n, m, budget=None, symmetry=true))]
fn lab_search<'py>(py: Python<'py>, n: usize, m: usize, budget: Option<u64>, symmetry: bool) -> PyResult<Bound<'py, PyAny>> {
    let mut spec = SearchSpec::new(n, m).map_err(err)?.with_symmetry(symmetry);
    if let Some(b) = budget {
        spec = spec.with_budget(b);
    }
    let outcome = py.detach(|| lab::search_counterexample(&spec)).map_err(err)?;
    to_py(py, outcome)
}

/// Writes the LP model and returns its row and variable counts.
#[pyfunction]
#[pyo3(signature = (n, m, path, budget=None))]
fn export_lp<'py>(py: Python<'py>, n: usize, m: usize, path: std::path::PathBuf, budget: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let mut spec = SearchSpec::new(n, m).map_err(err)?;
    if let Some(b) = budget {
        spec = spec.with_budget(b);
    }
    to_py(py, lab::export_ip(&spec, &path).map_err(err)?)
}

#[pyfunction]
fn lemma9<'py>(py: Python<'py>, n: usize, k: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, extremal::lemma9_check(n, k).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (n, t_max=200, precision=1e-15))]
fn binomial_qn<'py>(py: Python<'py>, n: usize, t_max: usize, precision: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, extremal::binomial_qn(n, t_max, precision).map_err(err)?)
}

/// Runs one reproduction target; returns `(passed, summary line)`.
#[pyfunction]
#[pyo3(signature = (target, seed=0))]
fn repro(py: Python<'_>, target: &str, seed: u64) -> PyResult<(bool, String)> {
    let r = py.detach(|| qshare_core::repro::run_target(target, seed)).map_err(err)?;
    Ok((r.passed, r.to_string()))
}

#[pymodule]
pub fn qshare(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(lab_search, m)?)?;
    m.add_function(wrap_pyfunction!(export_lp, m)?)?;
    m.add_function(wrap_pyfunction!(lemma9, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_qn, m)?)?;
    m.add_function(wrap_pyfunction!(repro, m)?)?;
    m.add("QshareError", m.py().get_type::<QshareError>())?;
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    m.add("REPRO_TARGETS", qshare_core::repro::TARGETS.iter().map(|t| t.0).collect::<Vec<_>>())?;
    Ok(())
}
