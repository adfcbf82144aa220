//! Python bindings for the spcd solver.
//!
//! Exposes the problem catalog, custom problems built from expression
//! strings, the fitted-mesh solve pipeline, the reduced (outer) solution,
//! the two-mesh convergence table and the mesh/layer utilities:
//!
//! ```python
//! import spcd_py
//!
//! problem = spcd_py.Problem.builtin("ex1")
//! solution = problem.solve(256)
//! report = spcd_py.convergence_table("ex1", [128, 256, 512])
//! print(report.p_star, report.c_p_star)
//! ```

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use spcd::convergence;
use spcd::error::Error;
use spcd::expr::{eval_expression, parse_expression};
use spcd::mesh::{self, MeshKind};
use spcd::problem::{self, ScalarField, TwoParamBvp, DEFAULT_EPS1, DEFAULT_EPS2};
use spcd::reduced;

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::UnknownProblem(_)
        | Error::InvalidArgument(_)
        | Error::IndexOutOfRange { .. }
        | Error::Syntax { .. } => PyValueError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

fn mesh_kind(name: &str) -> PyResult<MeshKind> {
    match name {
        "shishkin" => Ok(MeshKind::Shishkin),
        "uniform" => Ok(MeshKind::Uniform),
        other => Err(PyValueError::new_err(format!(
            "mesh must be `shishkin` or `uniform`, got `{other}`"
        ))),
    }
}

/// A two-parameter convection-diffusion problem instance.
#[pyclass(module = "spcd_py")]
struct Problem {
    inner: TwoParamBvp,
}

#[pymethods]
impl Problem {
    /// Look up a catalog problem (ex1, ex2, ex3, ms1).
    #[staticmethod]
    #[pyo3(signature = (name, eps1=None, eps2=None))]
    fn builtin(name: &str, eps1: Option<f64>, eps2: Option<f64>) -> PyResult<Self> {
        let inner = problem::builtin_problem(
            name,
            eps1.unwrap_or(DEFAULT_EPS1),
            eps2.unwrap_or(DEFAULT_EPS2),
        )
        .map_err(to_py_err)?;
        Ok(Problem { inner })
    }

    /// Build a problem from coefficient expressions in `x`.
    ///
    /// The off-diagonal couplings b12, b21 enter the equations with a
    /// plus sign. `beta` is estimated by sampling when not given.
    #[staticmethod]
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (eps1, eps2, a1, a2, b11, b12, b21, b22, f1, f2, l, r, alpha, beta=None))]
    fn custom(
        eps1: f64,
        eps2: f64,
        a1: &str,
        a2: &str,
        b11: &str,
        b12: &str,
        b21: &str,
        b22: &str,
        f1: &str,
        f2: &str,
        l: (f64, f64),
        r: (f64, f64),
        alpha: f64,
        beta: Option<f64>,
    ) -> PyResult<Self> {
        let field = |name: &str, text: &str| -> PyResult<ScalarField> {
            Ok(ScalarField::from_expr(
                name,
                parse_expression(text).map_err(to_py_err)?,
            ))
        };
        let mut inner = TwoParamBvp {
            eps1,
            eps2,
            a1: field("a1", a1)?,
            a2: field("a2", a2)?,
            b11: field("b11", b11)?,
            b12: field("b12", b12)?,
            b21: field("b21", b21)?,
            b22: field("b22", b22)?,
            f1: field("f1", f1)?,
            f2: field("f2", f2)?,
            left_bc: [l.0, l.1],
            right_bc: [r.0, r.1],
            alpha,
            beta: beta.unwrap_or(1.0),
        };
        if beta.is_none() {
            let report = problem::validate_problem(&inner, 1001).map_err(to_py_err)?;
            if report.beta_estimate > 0.0 {
                inner.beta = report.beta_estimate;
            }
        }
        Ok(Problem { inner })
    }

    #[getter]
    fn eps1(&self) -> f64 {
        self.inner.eps1
    }

    #[getter]
    fn eps2(&self) -> f64 {
        self.inner.eps2
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn left_bc(&self) -> (f64, f64) {
        (self.inner.left_bc[0], self.inner.left_bc[1])
    }

    #[getter]
    fn right_bc(&self) -> (f64, f64) {
        (self.inner.right_bc[0], self.inner.right_bc[1])
    }

    /// Sample the coefficient assumptions and report the margins.
    #[pyo3(signature = (samples=1001))]
    fn validate(&self, samples: usize) -> PyResult<ValidationReport> {
        let report = problem::validate_problem(&self.inner, samples).map_err(to_py_err)?;
        Ok(ValidationReport {
            alpha_estimate: report.alpha_estimate,
            beta_estimate: report.beta_estimate,
            offdiag_min: report.offdiag_min,
            sample_count: report.sample_count,
            warnings: report.warnings,
            ok: report.ok,
        })
    }

    /// Solve on N mesh elements; `mesh` is "shishkin" or "uniform".
    #[pyo3(signature = (n, mesh="shishkin"))]
    fn solve(&self, n: usize, mesh: &str) -> PyResult<Solution> {
        let sol = convergence::solve_bvp(&self.inner, n, mesh_kind(mesh)?).map_err(to_py_err)?;
        Ok(Solution { inner: sol })
    }

    /// Integrate the reduced (eps = 0) problem on M steps.
    #[pyo3(signature = (m=1024))]
    fn reduced(&self, m: usize) -> PyResult<ReducedCurve> {
        let rsol = reduced::solve_reduced(&self.inner, m).map_err(to_py_err)?;
        Ok(ReducedCurve { inner: rsol })
    }

    /// Two-mesh error estimate at mesh size N.
    fn two_mesh_difference(&self, n: usize) -> PyResult<f64> {
        convergence::two_mesh_difference(&self.inner, n).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(eps1={}, eps2={}, alpha={}, beta={})",
            self.inner.eps1, self.inner.eps2, self.inner.alpha, self.inner.beta
        )
    }
}

/// Sampled assumption margins.
#[pyclass(module = "spcd_py", get_all)]
struct ValidationReport {
    alpha_estimate: f64,
    beta_estimate: f64,
    offdiag_min: f64,
    sample_count: usize,
    warnings: Vec<String>,
    ok: bool,
}

#[pymethods]
impl ValidationReport {
    fn __repr__(&self) -> String {
        format!(
            "ValidationReport(ok={}, alpha_estimate={}, beta_estimate={}, warnings={:?})",
            self.ok, self.alpha_estimate, self.beta_estimate, self.warnings
        )
    }
}

/// A discrete solution on its mesh.
#[pyclass(module = "spcd_py")]
struct Solution {
    inner: convergence::DiscreteSolution,
}

#[pymethods]
impl Solution {
    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.mesh().points().to_vec()
    }

    #[getter]
    fn u1(&self) -> Vec<f64> {
        self.inner.values().iter().map(|v| v[0]).collect()
    }

    #[getter]
    fn u2(&self) -> Vec<f64> {
        self.inner.values().iter().map(|v| v[1]).collect()
    }

    #[getter]
    fn tau1(&self) -> f64 {
        self.inner.mesh().tau1()
    }

    #[getter]
    fn tau2(&self) -> f64 {
        self.inner.mesh().tau2()
    }

    #[getter]
    fn n_elements(&self) -> usize {
        self.inner.mesh().n_elements()
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(n_elements={}, tau1={}, tau2={})",
            self.inner.mesh().n_elements(),
            self.inner.mesh().tau1(),
            self.inner.mesh().tau2()
        )
    }
}

/// The outer (reduced-problem) solution on its grid.
#[pyclass(module = "spcd_py")]
struct ReducedCurve {
    inner: reduced::ReducedSolution,
}

#[pymethods]
impl ReducedCurve {
    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.grid().to_vec()
    }

    #[getter]
    fn u1(&self) -> Vec<f64> {
        self.inner.values().iter().map(|v| v[0]).collect()
    }

    #[getter]
    fn u2(&self) -> Vec<f64> {
        self.inner.values().iter().map(|v| v[1]).collect()
    }

    /// Piecewise-linear evaluation at x in [0,1].
    fn at(&self, x: f64) -> PyResult<(f64, f64)> {
        let v = reduced::eval_reduced(&self.inner, x).map_err(to_py_err)?;
        Ok((v[0], v[1]))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Two-mesh convergence summary.
#[pyclass(module = "spcd_py", get_all)]
struct Report {
    eps_grid: Vec<(f64, f64)>,
    n_list: Vec<usize>,
    d_eps_n: Vec<Vec<f64>>,
    d_n: Vec<f64>,
    p_n: Vec<f64>,
    p_star: f64,
    c_p_n: Vec<f64>,
    c_p_star: f64,
}

#[pymethods]
impl Report {
    fn __repr__(&self) -> String {
        format!(
            "Report(n_list={:?}, d_n={:?}, p_star={}, c_p_star={})",
            self.n_list, self.d_n, self.p_star, self.c_p_star
        )
    }
}

/// Two-mesh convergence table for a catalog problem over an eps grid
/// (defaults to the 15 reference pairs) and a doubling list of mesh sizes.
#[pyfunction]
#[pyo3(signature = (name, n_list, eps_grid=None))]
fn convergence_table(
    name: &str,
    n_list: Vec<usize>,
    eps_grid: Option<Vec<(f64, f64)>>,
) -> PyResult<Report> {
    let grid = eps_grid.unwrap_or_else(convergence::reference_eps_grid);
    let report = convergence::uniform_table(
        |e1, e2| problem::builtin_problem(name, e1, e2),
        &grid,
        &n_list,
    )
    .map_err(to_py_err)?;
    Ok(Report {
        eps_grid: report.eps_grid,
        n_list: report.n_list,
        d_eps_n: report.d_eps_n,
        d_n: report.d_n,
        p_n: report.p_n,
        p_star: report.p_star,
        c_p_n: report.c_p_n,
        c_p_star: report.c_p_star,
    })
}

/// Width of the layer region where a solution component deviates from
/// the outer solution by more than `threshold`.
#[pyfunction]
fn layer_width(
    solution: &Solution,
    outer: &ReducedCurve,
    component: usize,
    threshold: f64,
) -> PyResult<f64> {
    convergence::layer_width(&solution.inner, &outer.inner, component, threshold).map_err(to_py_err)
}

/// Transition points (tau1, tau2) of the fitted mesh.
#[pyfunction]
fn transition_parameters(eps1: f64, eps2: f64, alpha: f64, n: usize) -> PyResult<(f64, f64)> {
    mesh::transition_parameters(eps1, eps2, alpha, n).map_err(to_py_err)
}

/// Nodes of the fitted mesh for the given parameters.
#[pyfunction]
fn shishkin_mesh_points(eps1: f64, eps2: f64, alpha: f64, n: usize) -> PyResult<Vec<f64>> {
    Ok(mesh::build_shishkin_mesh(eps1, eps2, alpha, n)
        .map_err(to_py_err)?
        .points()
        .to_vec())
}

/// Nodes of the equispaced comparison mesh.
#[pyfunction]
fn uniform_mesh_points(n: usize) -> PyResult<Vec<f64>> {
    Ok(mesh::build_uniform_mesh(n)
        .map_err(to_py_err)?
        .points()
        .to_vec())
}

/// Layer function exp(-alpha x / eps); which = 1 or 2 selects B1 or B2.
#[pyfunction]
fn layer_function(which: u8, x: f64, alpha: f64, eps: f64) -> PyResult<f64> {
    problem::layer_function(which, x, alpha, eps).map_err(to_py_err)
}

/// Parse and evaluate an expression in `x`.
#[pyfunction]
fn eval_expr(text: &str, x: f64) -> PyResult<f64> {
    let expr = parse_expression(text).map_err(to_py_err)?;
    eval_expression(&expr, x).map_err(to_py_err)
}

#[pymodule]
fn spcd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_EPS1", DEFAULT_EPS1)?;
    m.add("DEFAULT_EPS2", DEFAULT_EPS2)?;
    m.add_class::<Problem>()?;
    m.add_class::<ValidationReport>()?;
    m.add_class::<Solution>()?;
    m.add_class::<ReducedCurve>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(convergence_table, m)?)?;
    m.add_function(wrap_pyfunction!(layer_width, m)?)?;
    m.add_function(wrap_pyfunction!(transition_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(shishkin_mesh_points, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_mesh_points, m)?)?;
    m.add_function(wrap_pyfunction!(layer_function, m)?)?;
    m.add_function(wrap_pyfunction!(eval_expr, m)?)?;
    Ok(())
}
