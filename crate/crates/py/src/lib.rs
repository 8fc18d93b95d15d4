//! Python bindings for the qrbnb solver.
//!
//! Exposes a single `Problem` class wrapping the core constrained binary
//! quadratic program, with constructors for the built-in problem families,
//! JSON round-trips, brute force reference solves, quantumness gaps, and the
//! full branch-and-bound solver.  Reports come back as plain dicts mirroring
//! the solver's JSON output, so the Python side needs no bespoke types.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use qrbnb::bnb::{
    solve, BnBConfig, BranchingStrategy, SearchStrategy, SelectionStrategy, DEFAULT_EVAL_CAP,
};
use qrbnb::io::{problem_from_json, problem_to_json};
use qrbnb::problem::{
    brute_force_solve, maxcut_to_problem, tsp_to_problem, Assignment,
    ConstrainedQuadraticProblem, LinearConstraint,
};
use qrbnb::qrac::QracKind;
use qrbnb::relax::{quantumness_gap, Backend};
use qrbnb::QrbnbError;

fn to_py_err(err: QrbnbError) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_kind(kind: &str) -> PyResult<QracKind> {
    match kind {
        "31" => Ok(QracKind::ThreeOne),
        "21" => Ok(QracKind::TwoOne),
        other => Err(PyValueError::new_err(format!(
            "unknown qrac kind {other:?}, expected \"31\" or \"21\""
        ))),
    }
}

fn parse_bits(bits: &[u8]) -> PyResult<Assignment> {
    if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
        return Err(PyValueError::new_err(format!(
            "bits must be 0 or 1, got {bad}"
        )));
    }
    Ok(Assignment::from_bits(bits.to_vec()))
}

/// Convert a serde_json value into the matching Python object.
fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<PyObject> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py(py)
            }
        }
        Value::String(s) => s.into_py(py),
        Value::Array(items) => {
            let list = PyList::empty_bound(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new_bound(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_py(py)
        }
    })
}

/// A constrained binary quadratic minimization problem.
#[pyclass]
#[derive(Clone)]
struct Problem {
    inner: ConstrainedQuadraticProblem,
}

#[pymethods]
impl Problem {
    #[new]
    fn new(n_vars: usize) -> Self {
        Problem {
            inner: ConstrainedQuadraticProblem::new(n_vars),
        }
    }

    /// Number of binary variables.
    #[getter]
    fn n_vars(&self) -> usize {
        self.inner.n_vars
    }

    /// Add `c · x_i x_j` (a linear term when `i == j`).
    fn add_quadratic(&mut self, i: usize, j: usize, c: f64) -> PyResult<()> {
        if i >= self.inner.n_vars || j >= self.inner.n_vars {
            return Err(PyValueError::new_err(format!(
                "index out of range: ({i}, {j}) with n_vars {}",
                self.inner.n_vars
            )));
        }
        self.inner.add_quadratic(i, j, c);
        Ok(())
    }

    /// Add a one-hot constraint `Σ_{i∈members} x_i = 1`; `tag` must start
    /// with `"onehot"` for the one-hot branching rule to pick it up.
    fn add_onehot(&mut self, members: Vec<usize>, tag: &str) -> PyResult<()> {
        self.inner
            .constraints
            .push(LinearConstraint::onehot(members, tag));
        self.inner.validate().map_err(to_py_err)
    }

    /// Build the MaxCut minimization problem (cut size negated) for an
    /// undirected graph given as a list of `(u, v)` edges.
    #[staticmethod]
    fn maxcut(n_nodes: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = maxcut_to_problem(n_nodes, &edges).map_err(to_py_err)?;
        Ok(Problem { inner })
    }

    /// Build the penalized travelling-salesperson problem from a symmetric
    /// distance matrix; variable `i·N + t` means city `i` is visited at time
    /// `t`, with one-hot constraints per city and per time step.
    #[staticmethod]
    fn tsp(distances: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = tsp_to_problem(&distances).map_err(to_py_err)?;
        Ok(Problem { inner })
    }

    /// Parse a problem from its JSON serialization.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = problem_from_json(text).map_err(to_py_err)?;
        Ok(Problem { inner })
    }

    /// Serialize the problem to pretty-printed JSON.
    fn to_json(&self) -> PyResult<String> {
        problem_to_json(&self.inner).map_err(to_py_err)
    }

    /// Objective value at a full 0/1 assignment.
    fn evaluate(&self, bits: Vec<u8>) -> PyResult<f64> {
        let assignment = parse_bits(&bits)?;
        self.inner.evaluate(&assignment).map_err(to_py_err)
    }

    /// Whether a full 0/1 assignment satisfies every constraint.
    fn is_feasible(&self, bits: Vec<u8>) -> PyResult<bool> {
        let assignment = parse_bits(&bits)?;
        self.inner.is_feasible(&assignment).map_err(to_py_err)
    }

    /// Exhaustive reference solve; returns `(value, bits)` of the feasible
    /// optimum.
    fn brute_force(&self) -> PyResult<(f64, Vec<u8>)> {
        let (value, assignment) = brute_force_solve(&self.inner).map_err(to_py_err)?;
        Ok((value, assignment.to_bits()))
    }

    /// Gap between the optimal objective and the relaxed ground energy for
    /// the given QRAC kind (`"31"` or `"21"`).
    fn quantumness_gap(&self, kind: &str) -> PyResult<f64> {
        let kind = parse_kind(kind)?;
        quantumness_gap(&self.inner, kind).map_err(to_py_err)
    }

    /// Run the branch-and-bound solver and return the report as a dict with
    /// keys `incumbent`, `n_eval`, `n_eval_quantum`, `proven_optimal`,
    /// `capped`, and `node_trace`.
    #[pyo3(signature = (
        kind = "31",
        backend = "exact",
        layers = 1,
        search = "bfs",
        select = "least",
        branch = "binary",
        seed = 0,
        eval_cap = DEFAULT_EVAL_CAP,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        py: Python<'_>,
        kind: &str,
        backend: &str,
        layers: usize,
        search: &str,
        select: &str,
        branch: &str,
        seed: u64,
        eval_cap: usize,
    ) -> PyResult<PyObject> {
        let config = BnBConfig {
            kind: parse_kind(kind)?,
            backend: match backend {
                "exact" => Backend::Exact,
                "vqe" => Backend::Vqe {
                    layers,
                    seed: qrbnb::bnb::mix_seed(seed, &[2]),
                },
                other => {
                    return Err(PyValueError::new_err(format!(
                        "unknown backend {other:?}, expected \"exact\" or \"vqe\""
                    )))
                }
            },
            search: match search {
                "dfs" => SearchStrategy::Dfs,
                "brfs" => SearchStrategy::BrFs,
                "bfs" => SearchStrategy::Bfs,
                other => {
                    return Err(PyValueError::new_err(format!(
                        "unknown search {other:?}, expected \"dfs\", \"brfs\", or \"bfs\""
                    )))
                }
            },
            selection: match select {
                "random" => SelectionStrategy::Random {
                    seed: qrbnb::bnb::mix_seed(seed, &[1]),
                },
                "least" => SelectionStrategy::LeastFractional,
                "most" => SelectionStrategy::MostFractional,
                other => {
                    return Err(PyValueError::new_err(format!(
                        "unknown select {other:?}, expected \"random\", \"least\", or \"most\""
                    )))
                }
            },
            branching: match branch {
                "binary" => BranchingStrategy::Binary,
                "onehot" => BranchingStrategy::Onehot,
                other => {
                    return Err(PyValueError::new_err(format!(
                        "unknown branch {other:?}, expected \"binary\" or \"onehot\""
                    )))
                }
            },
            eval_cap,
        };
        let report = solve(&self.inner, &config).map_err(to_py_err)?;
        let value = serde_json::to_value(&report)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        json_to_py(py, &value)
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(n_vars={}, terms={}, constraints={})",
            self.inner.n_vars,
            self.inner.quadratic.len(),
            self.inner.constraints.len()
        )
    }
}

#[pymodule]
fn qrbnb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    Ok(())
}
