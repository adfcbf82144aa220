//! Solver library for weakly coupled systems of two singularly perturbed
//! convection-diffusion equations on (0,1),
//!
//! ```text
//! eps1 u1'' + a1(x) u1' - b11(x) u1 + b12(x) u2 = f1(x)
//! eps2 u2'' + a2(x) u2' + b21(x) u1 - b22(x) u2 = f2(x)
//! u(0) = l,  u(1) = r,
//! ```
//!
//! with 0 < eps1 <= eps2, a_i >= alpha > 0 and b_ii - b_ik >= beta > 0.
//! Both components form boundary layers at x = 0 (width ~ eps2/alpha,
//! plus a thinner eps1-layer in u1). The solver applies the first-order
//! upwind scheme on a piecewise-uniform fitted mesh whose transition
//! points track the layer widths, which keeps the error bound uniform in
//! both perturbation parameters.
//!
//! Quick tour:
//!
//! ```
//! use spcd::convergence::{solve_bvp, two_mesh_difference};
//! use spcd::mesh::MeshKind;
//! use spcd::problem::{builtin_problem, DEFAULT_EPS1, DEFAULT_EPS2};
//!
//! let bvp = builtin_problem("ex1", DEFAULT_EPS1, DEFAULT_EPS2).unwrap();
//! let solution = solve_bvp(&bvp, 64, MeshKind::Shishkin).unwrap();
//! assert_eq!(solution.values()[0], [3.0, 3.0]);
//! let estimate = two_mesh_difference(&bvp, 64).unwrap();
//! assert!(estimate < 0.2);
//! ```

pub mod cli;
pub mod convergence;
pub mod discretize;
pub mod error;
pub mod expr;
pub mod linsolve;
pub mod mesh;
pub mod problem;
pub mod reduced;

pub use error::{Error, Result};
