//! Problem definitions: coefficient fields, the two-parameter BVP type,
//! the built-in catalog and validation of the coefficient assumptions.
//!
//! The continuous problem on (0,1) is
//!
//! ```text
//! eps_i u_i'' + a_i(x) u_i' - b_ii(x) u_i + b_ik(x) u_k = f_i(x),   i != k,
//! u(0) = l,  u(1) = r,
//! ```
//!
//! with 0 < eps1 <= eps2, a_i >= alpha > 0 and b_ii - b_ik >= beta > 0.
//! Both solution components develop boundary layers at x = 0.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{eval_expression, Expr};

/// Default perturbation parameters for the built-in examples.
pub const DEFAULT_EPS1: f64 = 0.0016; // 5^-4
pub const DEFAULT_EPS2: f64 = 0.0078125; // 2^-7

/// A real-valued function of one variable on [0,1].
///
/// Fields are pure (same `x` gives the same value) and cheap to clone;
/// they may be shared across threads freely.
#[derive(Clone)]
pub struct ScalarField {
    label: Arc<str>,
    kind: FieldKind,
}

#[derive(Clone)]
enum FieldKind {
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Parsed(Arc<Expr>),
}

impl ScalarField {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            label: label.into().into(),
            kind: FieldKind::Closure(Arc::new(f)),
        }
    }

    pub fn constant(label: impl Into<String>, c: f64) -> Self {
        ScalarField::new(label, move |_| c)
    }

    /// Wrap a parsed expression as a field.
    pub fn from_expr(label: impl Into<String>, expr: Expr) -> Self {
        ScalarField {
            label: label.into().into(),
            kind: FieldKind::Parsed(Arc::new(expr)),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluate without error handling; expression failures come back as NaN.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            FieldKind::Closure(f) => f(x),
            FieldKind::Parsed(e) => eval_expression(e, x).unwrap_or(f64::NAN),
        }
    }

    /// Evaluate and require a finite result, naming the field on failure.
    pub fn try_eval(&self, x: f64) -> Result<f64> {
        let v = match &self.kind {
            FieldKind::Closure(f) => f(x),
            FieldKind::Parsed(e) => eval_expression(e, x).map_err(|err| Error::FieldEval {
                field: self.label.to_string(),
                x,
                detail: err.to_string(),
            })?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::FieldEval {
                field: self.label.to_string(),
                x,
                detail: "non-finite value".to_string(),
            })
        }
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({})", self.label)
    }
}

/// A full problem instance.
///
/// Sign convention: the reaction matrix is `[[b11, -b12], [-b21, b22]]`,
/// so the off-diagonal coefficients enter the equations with a plus sign.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct TwoParamBvp {
    pub eps1: f64,
    pub eps2: f64,
    pub a1: ScalarField,
    pub a2: ScalarField,
    pub b11: ScalarField,
    pub b12: ScalarField,
    pub b21: ScalarField,
    pub b22: ScalarField,
    pub f1: ScalarField,
    pub f2: ScalarField,
    pub left_bc: [f64; 2],
    pub right_bc: [f64; 2],
    /// Lower bound for a1, a2 on [0,1]; drives the mesh transition points.
    pub alpha: f64,
    /// Lower bound for b11 - b12 and b22 - b21 on [0,1].
    pub beta: f64,
}

impl TwoParamBvp {
    /// Cheap structural checks (the sampled checks live in [`validate_problem`]).
    pub fn check(&self) -> Result<()> {
        if !(self.eps1 > 0.0 && self.eps1.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "eps1 must be positive, got {}",
                self.eps1
            )));
        }
        if !(self.eps2 >= self.eps1 && self.eps2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < eps1 <= eps2, got eps1 = {}, eps2 = {}",
                self.eps1, self.eps2
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    fn coefficient_fields(&self) -> [&ScalarField; 8] {
        [
            &self.a1, &self.a2, &self.b11, &self.b12, &self.b21, &self.b22, &self.f1, &self.f2,
        ]
    }
}

/// Result of sampling the coefficient assumptions.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// min over the sample of min(a1, a2).
    pub alpha_estimate: f64,
    /// min over the sample of min(b11 - b12, b22 - b21).
    pub beta_estimate: f64,
    /// min over the sample of min(b12, b21).
    pub offdiag_min: f64,
    pub sample_count: usize,
    pub warnings: Vec<String>,
    pub ok: bool,
}

/// Exact solution of the manufactured problem `ms1`.
pub fn ms1_exact(x: f64) -> [f64; 2] {
    [x * (1.0 - x), x * x * (1.0 - x)]
}

/// Look up a built-in problem by name with explicit perturbation parameters.
///
/// `ex1`, `ex2`, `ex3` are the catalog examples (layers at x = 0); `ms1`
/// is a manufactured problem with exact solution `(x(1-x), x^2(1-x))`,
/// no layers, and sources that absorb the eps-dependence. Use
/// [`DEFAULT_EPS1`]/[`DEFAULT_EPS2`] when no parameters are given.
pub fn builtin_problem(name: &str, eps1: f64, eps2: f64) -> Result<TwoParamBvp> {
    let bvp = match name {
        "ex1" => TwoParamBvp {
            eps1,
            eps2,
            a1: ScalarField::new("a1", |x| 1.0 + x * x),
            a2: ScalarField::new("a2", |x| 2.0 + x),
            b11: ScalarField::new("b11", |x| 4.0 + x.sin()),
            b12: ScalarField::constant("b12", 2.0),
            b21: ScalarField::constant("b21", 1.0),
            b22: ScalarField::new("b22", |x| 2.0 + x.cos()),
            f1: ScalarField::new("f1", |x| -x.exp()),
            f2: ScalarField::new("f2", |x| -(x * x)),
            left_bc: [3.0, 3.0],
            right_bc: [1.0, 1.0],
            alpha: 1.0,
            beta: 1.0 + 1.0_f64.cos(),
        },
        "ex2" | "ex3" => TwoParamBvp {
            eps1,
            eps2,
            a1: ScalarField::constant("a1", 1.0),
            a2: ScalarField::new("a2", |x| 1.0 + x),
            b11: ScalarField::constant("b11", 2.0),
            b12: ScalarField::constant("b12", 1.0),
            b21: ScalarField::new("b21", |x| x),
            b22: ScalarField::new("b22", |x| 2.0 * x + 1.0),
            f1: ScalarField::new("f1", |x| -3.0 * (x - 1.0)),
            f2: ScalarField::new("f2", |x| -2.0 * x),
            left_bc: if name == "ex2" {
                [0.0, 3.0]
            } else {
                [1.0, 1.0]
            },
            right_bc: [2.0, 2.0],
            alpha: 1.0,
            beta: 1.0,
        },
        "ms1" => TwoParamBvp {
            eps1,
            eps2,
            a1: ScalarField::constant("a1", 1.0),
            a2: ScalarField::constant("a2", 1.0),
            b11: ScalarField::constant("b11", 2.0),
            b12: ScalarField::constant("b12", 1.0),
            b21: ScalarField::constant("b21", 1.0),
            b22: ScalarField::constant("b22", 2.0),
            // sources obtained by substituting the exact solution
            f1: ScalarField::new("f1", move |x| {
                -2.0 * eps1 + 1.0 - 4.0 * x + 3.0 * x * x - x * x * x
            }),
            f2: ScalarField::new("f2", move |x| {
                eps2 * (2.0 - 6.0 * x) + 3.0 * x - 6.0 * x * x + 2.0 * x * x * x
            }),
            left_bc: [0.0, 0.0],
            right_bc: [0.0, 0.0],
            alpha: 1.0,
            beta: 1.0,
        },
        other => return Err(Error::UnknownProblem(other.to_string())),
    };
    // deliberately no check() here: a swapped eps pair must still be
    // constructible so validate_problem can report ok = false on it
    Ok(bvp)
}

/// Sample every coefficient field at `sample_count` equispaced points
/// (both endpoints included) and report the observed assumption margins.
///
/// Never mutates the problem. A non-finite value at any sample point is
/// an error naming the field and the abscissa. A nonpositive off-diagonal
/// coefficient only warns: the catalog's `ex2` has b21(0) = 0.
pub fn validate_problem(bvp: &TwoParamBvp, sample_count: usize) -> Result<ValidationReport> {
    if sample_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "sample_count must be at least 2, got {sample_count}"
        )));
    }

    let mut alpha_estimate = f64::INFINITY;
    let mut beta_estimate = f64::INFINITY;
    let mut offdiag_min = f64::INFINITY;

    for k in 0..sample_count {
        let x = k as f64 / (sample_count - 1) as f64;
        // finiteness scan over every field, including the sources
        for field in bvp.coefficient_fields() {
            field.try_eval(x)?;
        }
        let a1 = bvp.a1.try_eval(x)?;
        let a2 = bvp.a2.try_eval(x)?;
        let b11 = bvp.b11.try_eval(x)?;
        let b12 = bvp.b12.try_eval(x)?;
        let b21 = bvp.b21.try_eval(x)?;
        let b22 = bvp.b22.try_eval(x)?;
        alpha_estimate = alpha_estimate.min(a1.min(a2));
        beta_estimate = beta_estimate.min((b11 - b12).min(b22 - b21));
        offdiag_min = offdiag_min.min(b12.min(b21));
    }

    let mut warnings = Vec::new();
    if offdiag_min <= 0.0 {
        warnings.push("off-diagonal coefficient not strictly positive".to_string());
    }
    if bvp.eps1 == bvp.eps2 {
        warnings.push("eps1 equals eps2; the mesh degenerates to tau1 = tau2/2".to_string());
    }
    if alpha_estimate < bvp.alpha {
        warnings.push(format!(
            "sampled convection minimum {alpha_estimate} lies below the stored alpha = {}",
            bvp.alpha
        ));
    }

    let ok = alpha_estimate > 0.0 && beta_estimate > 0.0 && bvp.eps1 <= bvp.eps2;
    Ok(ValidationReport {
        alpha_estimate,
        beta_estimate,
        offdiag_min,
        sample_count,
        warnings,
        ok,
    })
}

/// Layer function `exp(-alpha x / eps)`; `which` selects B1 (eps = eps1)
/// or B2 (eps = eps2) and is only checked for being 1 or 2.
pub fn layer_function(which: u8, x: f64, alpha: f64, eps: f64) -> Result<f64> {
    if which != 1 && which != 2 {
        return Err(Error::InvalidArgument(format!(
            "layer function index must be 1 or 2, got {which}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "x must lie in [0,1], got {x}"
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok((-alpha * x / eps).exp())
}
