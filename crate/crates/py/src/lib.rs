//! Python module `bec_packing`. Result records come back as plain dicts.

use packing_core::formats::{from_graph6, read_instance_file, to_graph6};
use packing_core::{
    self as core, cycles, DescentPolicy, ExactConfig, Labelling, SolveOptions,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Round-trips through JSON so every record type maps to a dict.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn labelling(n: usize, perm: Option<Vec<usize>>) -> PyResult<Labelling> {
    match perm {
        Some(p) => Labelling::from_perm(p).map_err(err),
        None => Ok(Labelling::identity(n)),
    }
}

#[pyclass(name = "Graph", module = "bec_packing", frozen)]
struct PyGraph {
    inner: core::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        core::Graph::new(n, edges).map(|inner| PyGraph { inner }).map_err(err)
    }

    #[staticmethod]
    fn from_graph6(s: &str) -> PyResult<Self> {
        from_graph6(s).map(|inner| PyGraph { inner }).map_err(err)
    }

    fn to_graph6(&self) -> String {
        to_graph6(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n() {
            return Err(err(core::Error::VertexOutOfRange { vertex: v, n: self.inner.n() }));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    /// A 4-, 6- or 8-cycle as a vertex list, if there is one.
    fn even_short_cycle(&self) -> Option<Vec<usize>> {
        cycles::find_even_short_cycle(&self.inner).map(|c| c.vertices)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

#[pyclass(name = "PackingInstance", module = "bec_packing", frozen)]
struct PyInstance {
    inner: core::PackingInstance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(blue: &PyGraph, red: &PyGraph) -> PyResult<Self> {
        core::PackingInstance::new(blue.inner.clone(), red.inner.clone()).map(|inner| PyInstance { inner }).map_err(err)
    }

    /// Loads an instance file; returns the instance and its stored permutation.
    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<(Self, Option<Vec<usize>>)> {
        let file = read_instance_file(&path).map_err(err)?;
        let inner = core::PackingInstance::new(file.blue, file.red).map_err(err)?;
        Ok((PyInstance { inner }, file.perm.map(|p| p.perm().to_vec())))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn delta1(&self) -> usize {
        self.inner.delta1()
    }

    #[getter]
    fn delta2(&self) -> usize {
        self.inner.delta2()
    }

    #[getter]
    fn roles_swapped(&self) -> bool {
        self.inner.roles_swapped()
    }

    #[getter]
    fn blue(&self) -> PyGraph {
        PyGraph { inner: self.inner.blue().clone() }
    }

    #[getter]
    fn red(&self) -> PyGraph {
        PyGraph { inner: self.inner.red().clone() }
    }

    #[pyo3(signature = (perm=None))]
    fn purple_edges(&self, perm: Option<Vec<usize>>) -> PyResult<Vec<(usize, usize)>> {
        let lab = labelling(self.inner.n(), perm)?;
        self.check(&lab)?;
        Ok(core::purple_report(&self.inner, &lab).purple_edges)
    }

    #[pyo3(signature = (perm=None))]
    fn is_packing(&self, perm: Option<Vec<usize>>) -> PyResult<bool> {
        let lab = labelling(self.inner.n(), perm)?;
        self.check(&lab)?;
        Ok(core::is_packing(&self.inner, &lab))
    }

    fn conditions(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &core::condition_profile(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("PackingInstance(n={}, delta1={}, delta2={})", self.inner.n(), self.inner.delta1(), self.inner.delta2())
    }
}

impl PyInstance {
    fn check(&self, lab: &Labelling) -> PyResult<()> {
        if lab.n() != self.inner.n() {
            return Err(err(core::Error::SizeMismatch(lab.n(), self.inner.n())));
        }
        Ok(())
    }
}

#[pyfunction]
#[pyo3(signature = (n, delta_cap, seed=0, forbid_even_short_cycles=false, edges=None))]
fn generate(n: usize, delta_cap: usize, seed: u64, forbid_even_short_cycles: bool, edges: Option<usize>) -> PyResult<PyGraph> {
    let spec = core::GenSpec::new(n, delta_cap, seed).forbid_even_short_cycles(forbid_even_short_cycles).edge_budget(edges);
    core::generate(&spec).map(|g| PyGraph { inner: g.graph }).map_err(err)
}

/// Swap descent. With `restarts > 1` the start labellings are seeded random
/// permutations and the best outcome is returned.
#[pyfunction]
#[pyo3(signature = (instance, perm=None, restarts=1, seed=0, policy="full", max_swaps=None))]
fn solve(
    py: Python<'_>,
    instance: &PyInstance,
    perm: Option<Vec<usize>>,
    restarts: usize,
    seed: u64,
    policy: &str,
    max_swaps: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let policy: DescentPolicy = policy.parse().map_err(err)?;
    let opts = SolveOptions { policy, max_swaps };
    let inst = &instance.inner;
    let out = if restarts == 1 {
        let lab = labelling(inst.n(), perm)?;
        instance.check(&lab)?;
        py.detach(|| core::solve(inst, &lab, &opts))
    } else {
        py.detach(|| core::solve_multistart(inst, restarts, seed, &opts))
    }
    .map_err(err)?;
    to_py(py, &out)
}

#[pyfunction]
#[pyo3(signature = (instance, limit=12, node_budget=None))]
fn exact_pack(py: Python<'_>, instance: &PyInstance, limit: usize, node_budget: Option<u64>) -> PyResult<Py<PyAny>> {
    let cfg = ExactConfig { limit, node_budget };
    let res = py.detach(|| core::exact_pack(&instance.inner, &cfg)).map_err(err)?;
    to_py(py, &res)
}

#[pyfunction]
fn thresholds(py: Python<'_>, t: u32) -> PyResult<Py<PyAny>> {
    to_py(py, &core::thresholds(t).map_err(err)?)
}

#[pyfunction]
fn profile(py: Python<'_>, instance: &PyInstance, perm: Vec<usize>, i: usize) -> PyResult<Py<PyAny>> {
    let lab = labelling(instance.inner.n(), Some(perm))?;
    let p = core::profile(&instance.inner, &lab, i).map_err(err)?;
    let list = |s: &core::VertexSet| s.as_slice().to_vec();
    let sets = std::collections::BTreeMap::from([
        ("n1", list(&p.n1)),
        ("n2", list(&p.n2)),
        ("n1n2", list(&p.n1n2)),
        ("n2n1", list(&p.n2n1)),
        ("a", list(&p.a_set)),
        ("b", list(&p.b_set)),
        ("a_star", list(&p.a_star)),
        ("b_star", list(&p.b_star)),
    ]);
    to_py(py, &sets)
}

#[pyfunction]
fn audit_claim41(py: Python<'_>, instance: &PyInstance, perm: Vec<usize>, a: usize, b: usize, t: u32) -> PyResult<Py<PyAny>> {
    let lab = labelling(instance.inner.n(), Some(perm))?;
    to_py(py, &core::audit_claim41(&instance.inner, &lab, a, b, t).map_err(err)?)
}

#[pyfunction]
fn audit_claim42(py: Python<'_>, instance: &PyInstance, perm: Vec<usize>, u: usize, v: usize, t: u32) -> PyResult<Py<PyAny>> {
    let lab = labelling(instance.inner.n(), Some(perm))?;
    to_py(py, &core::audit_claim42(&instance.inner, &lab, u, v, t).map_err(err)?)
}

#[pyfunction]
fn audit_nbound(py: Python<'_>, instance: &PyInstance, perm: Vec<usize>, u: usize, v: usize, t: u32) -> PyResult<Py<PyAny>> {
    let lab = labelling(instance.inner.n(), Some(perm))?;
    to_py(py, &core::audit_nbound(&instance.inner, &lab, u, v, t).map_err(err)?)
}

#[pymodule]
fn bec_packing(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(exact_pack, m)?)?;
    m.add_function(wrap_pyfunction!(thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    m.add_function(wrap_pyfunction!(audit_claim41, m)?)?;
    m.add_function(wrap_pyfunction!(audit_claim42, m)?)?;
    m.add_function(wrap_pyfunction!(audit_nbound, m)?)?;
    Ok(())
}
