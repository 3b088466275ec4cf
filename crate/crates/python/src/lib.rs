//! Python bindings: meshes, the LTL operator, field expressions, exact
//! surface operators and the heat and Turing solvers.

use std::path::PathBuf;

use ltl_core::dsl::{self, Bindings, FieldExpr, Var};
use ltl_core::ltl::LtlOperator;
use ltl_core::mesh::{self as core_mesh, MeshFormat, TriangleMesh, Vec3};
use ltl_core::oracle::{oracle_on_mesh, SurfaceFamily};
use ltl_core::solver::{self, HeatProblem, RunControl, SolveTrace, SteadyCriterion, TuringParams, TuringProblem};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn triple(v: &Vec3) -> (f64, f64, f64) {
    (v.x, v.y, v.z)
}

#[pyclass(name = "Mesh", module = "ltl", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMesh {
    inner: TriangleMesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    #[pyo3(signature = (vertices, faces, params=None))]
    fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>, params: Option<Vec<[f64; 2]>>) -> PyResult<Self> {
        let vertices = vertices.into_iter().map(Vec3::from).collect();
        let mut mesh = TriangleMesh::new(vertices, faces).map_err(value_err)?;
        if let Some(p) = params {
            mesh = mesh.with_params(p).map_err(value_err)?;
        }
        Ok(Self { inner: mesh })
    }

    /// Unit icosphere after `subdiv` midpoint subdivisions.
    #[staticmethod]
    fn icosphere(subdiv: u32) -> PyResult<Self> {
        core_mesh::gen_icosphere(subdiv).map(|inner| Self { inner }).map_err(value_err)
    }

    /// Torus with major radius `a` and minor radius `r` on an `nu` by `nv` grid.
    #[staticmethod]
    fn torus(a: f64, r: f64, nu: usize, nv: usize) -> PyResult<Self> {
        core_mesh::gen_torus(a, r, nu, nv).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let format = MeshFormat::from_path(&path).map_err(value_err)?;
        core_mesh::load_mesh(&path, format).map(|inner| Self { inner }).map_err(value_err)
    }

    /// Writes OFF, OBJ or PLY, chosen by extension. Fields are stored in PLY only.
    #[pyo3(signature = (path, fields=None))]
    fn save(&self, path: PathBuf, fields: Option<Vec<(String, Vec<f64>)>>) -> PyResult<()> {
        let fields = fields.unwrap_or_default();
        let named: Vec<core_mesh::NamedField<'_>> = fields
            .iter()
            .map(|(name, values)| core_mesh::NamedField { name, values })
            .collect();
        let format = MeshFormat::from_path(&path).map_err(value_err)?;
        core_mesh::save_mesh(&self.inner, &named, &path, format).map_err(value_err)
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.inner.n_vertices()
    }

    #[getter]
    fn n_faces(&self) -> usize {
        self.inner.n_faces()
    }

    #[getter]
    fn vertices(&self) -> Vec<(f64, f64, f64)> {
        self.inner.vertices().iter().map(triple).collect()
    }

    #[getter]
    fn faces(&self) -> Vec<[usize; 3]> {
        self.inner.faces().to_vec()
    }

    /// Surface parameters `(u, v)` per vertex, for generated tori.
    #[getter]
    fn params(&self) -> Option<Vec<[f64; 2]>> {
        self.inner.params().map(<[_]>::to_vec)
    }

    fn min_edge_length(&self) -> f64 {
        self.inner.min_edge_length()
    }

    /// Validity diagnostics as a dict.
    fn info<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = core_mesh::validate(&self.inner);
        let out = PyDict::new(py);
        out.set_item("vertices", d.n_vertices)?;
        out.set_item("faces", d.n_faces)?;
        out.set_item("edges", d.n_edges)?;
        out.set_item("euler_characteristic", d.euler_characteristic)?;
        out.set_item("boundary_edges", d.boundary_edges)?;
        out.set_item("non_manifold_edges", d.non_manifold_edges)?;
        out.set_item("degenerate_faces", d.degenerate_faces)?;
        out.set_item("orientation_conflicts", d.orientation_conflicts)?;
        out.set_item("isolated_vertices", d.isolated_vertices)?;
        out.set_item("min_edge_length", d.min_edge_length)?;
        out.set_item("solver_ready", d.is_solver_ready())?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Mesh({} vertices, {} faces)", self.inner.n_vertices(), self.inner.n_faces())
    }
}

#[pyclass(name = "Operator", module = "ltl", frozen)]
struct PyOperator {
    inner: LtlOperator,
}

#[pymethods]
impl PyOperator {
    /// Precomputes frames, lifted stars and transports for a closed mesh.
    #[new]
    fn new(mesh: &PyMesh) -> PyResult<Self> {
        LtlOperator::new(mesh.inner.clone()).map(|inner| Self { inner }).map_err(runtime_err)
    }

    #[getter]
    fn mesh(&self) -> PyMesh {
        PyMesh {
            inner: self.inner.mesh().clone(),
        }
    }

    #[getter]
    fn transport_fallbacks(&self) -> usize {
        self.inner.transport_fallbacks()
    }

    /// Ambient gradient vector per vertex.
    fn gradient(&self, py: Python<'_>, values: Vec<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
        let field = py.detach(|| self.inner.gradient_field(&values)).map_err(runtime_err)?;
        Ok(field.ambient.iter().map(triple).collect())
    }

    fn laplacian(&self, py: Python<'_>, values: Vec<f64>) -> PyResult<Vec<f64>> {
        py.detach(|| self.inner.laplacian_field(&values))
            .map(|f| f.into_inner())
            .map_err(runtime_err)
    }
}

#[pyclass(name = "Expr", module = "ltl", frozen)]
struct PyExpr {
    inner: FieldExpr,
}

#[pymethods]
impl PyExpr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        dsl::parse(text).map(|inner| Self { inner }).map_err(value_err)
    }

    /// Evaluates with keyword bindings, e.g. `e.evaluate(x1=0.5, u=1.0)`.
    #[pyo3(signature = (**bindings))]
    fn evaluate(&self, bindings: Option<&Bound<'_, PyDict>>) -> PyResult<f64> {
        let mut b = Bindings::new();
        if let Some(dict) = bindings {
            for (key, value) in dict.iter() {
                let name: String = key.extract()?;
                let var = Var::from_name(&name).ok_or_else(|| value_err(format!("unknown variable '{name}'")))?;
                b = b.with(var, value.extract()?);
            }
        }
        self.inner.evaluate(&b).map_err(value_err)
    }

    fn differentiate(&self, var: &str) -> PyResult<Self> {
        let var = Var::from_name(var).ok_or_else(|| value_err(format!("unknown variable '{var}'")))?;
        Ok(Self {
            inner: self.inner.differentiate(var),
        })
    }

    /// Values at every vertex of `mesh`.
    fn sample(&self, mesh: &PyMesh) -> PyResult<Vec<f64>> {
        dsl::sample_field(&self.inner, &mesh.inner).map_err(value_err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Exact value, gradient and Laplacian of `expr` at every vertex.
///
/// `family` is `"sphere"` (unit radius unless `radius` is given) or `"torus"`.
#[pyfunction]
#[pyo3(signature = (family, expr, mesh, radius=1.0, a=2.0, r=1.0))]
fn exact_operators(
    family: &str,
    expr: &PyExpr,
    mesh: &PyMesh,
    radius: f64,
    a: f64,
    r: f64,
) -> PyResult<Vec<(f64, (f64, f64, f64), f64)>> {
    let family = match family {
        "sphere" => SurfaceFamily::Sphere { radius },
        "torus" => SurfaceFamily::Torus { a, r },
        "plane" => SurfaceFamily::Plane,
        other => return Err(value_err(format!("unknown surface family '{other}'"))),
    };
    let samples = oracle_on_mesh(family, &expr.inner, &mesh.inner).map_err(value_err)?;
    Ok(samples
        .iter()
        .map(|s| (s.value, triple(&s.gradient), s.laplacian))
        .collect())
}

/// `c·h_min²`, the default explicit time step.
#[pyfunction]
#[pyo3(signature = (mesh, c=solver::DEFAULT_STABILITY_C))]
fn stability_dt(mesh: &PyMesh, c: f64) -> f64 {
    solver::stability_dt(&mesh.inner, c)
}

#[pyclass(name = "Trace", module = "ltl", frozen, get_all)]
struct PyTrace {
    termination: String,
    steps: usize,
    dt: f64,
    field_names: Vec<String>,
    /// `(step, time, [field values...])` at steps 0, 1, 2, 4, ... and the end.
    snapshots: Vec<(usize, f64, Vec<Vec<f64>>)>,
    max_update: Vec<f64>,
    profile_update: Vec<f64>,
}

#[pymethods]
impl PyTrace {
    /// Fields of the last snapshot by name.
    fn final_fields<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        if let Some((_, _, fields)) = self.snapshots.last() {
            for (name, values) in self.field_names.iter().zip(fields) {
                out.set_item(name, values.clone())?;
            }
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Trace({} after {} steps)", self.termination, self.steps)
    }
}

impl From<SolveTrace> for PyTrace {
    fn from(t: SolveTrace) -> Self {
        Self {
            termination: t.termination.to_string(),
            steps: t.steps(),
            dt: t.dt,
            field_names: t.field_names.iter().map(|s| s.to_string()).collect(),
            snapshots: t.snapshots.into_iter().map(|s| (s.step, s.time, s.fields)).collect(),
            max_update: t.max_update,
            profile_update: t.profile_update,
        }
    }
}

fn control(dt: Option<f64>, mesh: &TriangleMesh, max_steps: usize, steady_tol: f64, criterion: &str) -> PyResult<RunControl> {
    let criterion = match criterion {
        "strict" => SteadyCriterion::Strict,
        "profile" => SteadyCriterion::Profile,
        other => return Err(value_err(format!("criterion must be 'strict' or 'profile', got '{other}'"))),
    };
    Ok(RunControl {
        dt: dt.unwrap_or_else(|| solver::stability_dt(mesh, solver::DEFAULT_STABILITY_C)),
        max_steps,
        steady_tol,
        criterion,
    })
}

/// Integrates `u_t = Δu + g` by forward Euler until steady or `max_steps`.
#[pyfunction]
#[pyo3(signature = (op, source, initial, dt=None, max_steps=200_000, steady_tol=solver::DEFAULT_STEADY_TOL, criterion="strict"))]
fn solve_heat(
    py: Python<'_>,
    op: &PyOperator,
    source: Vec<f64>,
    initial: Vec<f64>,
    dt: Option<f64>,
    max_steps: usize,
    steady_tol: f64,
    criterion: &str,
) -> PyResult<PyTrace> {
    let problem = HeatProblem {
        source,
        initial,
        control: control(dt, op.inner.mesh(), max_steps, steady_tol, criterion)?,
    };
    let trace = py.detach(|| solver::run_heat(&op.inner, &problem)).map_err(runtime_err)?;
    Ok(trace.into())
}

/// Two-species Turing system with a frozen random `gamma` field.
#[pyfunction]
#[pyo3(signature = (
    op, u1, u2, alpha=1.0, beta=2.0, s=2.0, gamma_amp=0.0, seed=0,
    dt=None, max_steps=200_000, steady_tol=solver::DEFAULT_STEADY_TOL, criterion="strict"
))]
fn solve_turing(
    py: Python<'_>,
    op: &PyOperator,
    u1: Vec<f64>,
    u2: Vec<f64>,
    alpha: f64,
    beta: f64,
    s: f64,
    gamma_amp: f64,
    seed: u64,
    dt: Option<f64>,
    max_steps: usize,
    steady_tol: f64,
    criterion: &str,
) -> PyResult<PyTrace> {
    let problem = TuringProblem {
        params: TuringParams { alpha, beta, s },
        gamma_amplitude: gamma_amp,
        seed,
        initial_u1: u1,
        initial_u2: u2,
        control: control(dt, op.inner.mesh(), max_steps, steady_tol, criterion)?,
    };
    let trace = py.detach(|| solver::run_turing(&op.inner, &problem)).map_err(runtime_err)?;
    Ok(trace.into())
}

#[pymodule]
fn ltl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyExpr>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(exact_operators, m)?)?;
    m.add_function(wrap_pyfunction!(stability_dt, m)?)?;
    m.add_function(wrap_pyfunction!(solve_heat, m)?)?;
    m.add_function(wrap_pyfunction!(solve_turing, m)?)?;
    Ok(())
}
