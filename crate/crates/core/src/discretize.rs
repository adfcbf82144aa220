//! Upwind finite-difference operators and assembly of the discrete system.
//!
//! On a mesh function U the scheme applies, at every interior node,
//!
//! ```text
//! eps_i d2(U_i) + a_i(x_j) D+(U_i) - b_ii(x_j) U_i + b_ik(x_j) U_k = f_i(x_j)
//! ```
//!
//! with the one-sided and second differences
//!
//! ```text
//! D+ U(x_j) = (U(x_{j+1}) - U(x_j)) / h_{j+1}
//! D- U(x_j) = (U(x_j) - U(x_{j-1})) / h_j
//! d2 U(x_j) = (D+ U(x_j) - D- U(x_j)) / hbar_j
//! ```
//!
//! Forward differencing of the convection term is the upwind choice for
//! a_i > 0 (layers at x = 0); it makes the assembled matrix an M-matrix
//! up to global sign, which is what the discrete maximum principle rests
//! on. The system is stored exactly as written above, negative diagonal
//! and all; it is not negated.

use crate::error::{Error, Result};
use crate::mesh::PiecewiseUniformMesh;
use crate::problem::TwoParamBvp;

/// A dense 2x2 block.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Block2(pub [[f64; 2]; 2]);

impl Block2 {
    pub fn zero() -> Self {
        Block2([[0.0; 2]; 2])
    }

    pub fn diagonal(d1: f64, d2: f64) -> Self {
        Block2([[d1, 0.0], [0.0, d2]])
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn mul(&self, other: &Block2) -> Block2 {
        let a = &self.0;
        let b = &other.0;
        Block2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn minus(&self, other: &Block2) -> Block2 {
        Block2([
            [self.0[0][0] - other.0[0][0], self.0[0][1] - other.0[0][1]],
            [self.0[1][0] - other.0[1][0], self.0[1][1] - other.0[1][1]],
        ])
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Inverse given a precomputed (nonzero) determinant.
    pub fn inverse_with_det(&self, det: f64) -> Block2 {
        Block2([
            [self.0[1][1] / det, -self.0[0][1] / det],
            [-self.0[1][0] / det, self.0[0][0] / det],
        ])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

/// The assembled block-tridiagonal system over the N-1 interior nodes.
///
/// Row k (0-based) is the scheme at node j = k+1. The boundary values
/// are folded into the right-hand side, so `sub[0]` and `sup[n-1]` are
/// zero blocks that no solver touches; `boundary_left`/`boundary_right`
/// keep the folded vectors for reconstruction and reporting.
#[derive(Clone, Debug)]
pub struct BlockTridiagonalSystem {
    pub sub: Vec<Block2>,
    pub diag: Vec<Block2>,
    pub sup: Vec<Block2>,
    pub rhs: Vec<[f64; 2]>,
    pub boundary_left: [f64; 2],
    pub boundary_right: [f64; 2],
}

impl BlockTridiagonalSystem {
    pub fn n_unknown_nodes(&self) -> usize {
        self.diag.len()
    }

    pub fn is_finite(&self) -> bool {
        self.sub.iter().all(Block2::is_finite)
            && self.diag.iter().all(Block2::is_finite)
            && self.sup.iter().all(Block2::is_finite)
            && self.rhs.iter().flatten().all(|v| v.is_finite())
    }
}

/// A vector-valued mesh function (values at every node incl. boundaries).
#[derive(Clone, Debug)]
pub struct MeshFunctionPair<'a> {
    mesh: &'a PiecewiseUniformMesh,
    values: Vec<[f64; 2]>,
}

impl<'a> MeshFunctionPair<'a> {
    pub fn new(mesh: &'a PiecewiseUniformMesh, values: Vec<[f64; 2]>) -> Result<Self> {
        if values.len() != mesh.points().len() {
            return Err(Error::InvalidArgument(format!(
                "mesh function has {} values for {} mesh points",
                values.len(),
                mesh.points().len()
            )));
        }
        Ok(MeshFunctionPair { mesh, values })
    }

    pub fn mesh(&self) -> &PiecewiseUniformMesh {
        self.mesh
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }
}

fn check_node_range(j: usize, lo: usize, hi: usize) -> Result<()> {
    if j < lo || j > hi {
        return Err(Error::IndexOutOfRange { index: j, lo, hi });
    }
    Ok(())
}

fn check_values_len(values: &[f64], mesh: &PiecewiseUniformMesh) -> Result<()> {
    if values.len() != mesh.points().len() {
        return Err(Error::InvalidArgument(format!(
            "{} values for {} mesh points",
            values.len(),
            mesh.points().len()
        )));
    }
    Ok(())
}

/// D+ U(x_j) for 0 <= j <= N-1.
pub fn forward_difference(values: &[f64], mesh: &PiecewiseUniformMesh, j: usize) -> Result<f64> {
    check_values_len(values, mesh)?;
    check_node_range(j, 0, mesh.n_elements() - 1)?;
    Ok((values[j + 1] - values[j]) / mesh.step(j + 1))
}

/// D- U(x_j) for 1 <= j <= N.
pub fn backward_difference(values: &[f64], mesh: &PiecewiseUniformMesh, j: usize) -> Result<f64> {
    check_values_len(values, mesh)?;
    check_node_range(j, 1, mesh.n_elements())?;
    Ok((values[j] - values[j - 1]) / mesh.step(j))
}

/// d2 U(x_j) = (D+ - D-)/hbar_j for an interior node.
pub fn second_difference(values: &[f64], mesh: &PiecewiseUniformMesh, j: usize) -> Result<f64> {
    check_values_len(values, mesh)?;
    check_node_range(j, 1, mesh.n_elements() - 1)?;
    let (_, _, hbar) = mesh.steps_around(j)?;
    Ok((forward_difference(values, mesh, j)? - backward_difference(values, mesh, j)?) / hbar)
}

/// Assemble the scheme into a block-tridiagonal system.
///
/// Coefficients are sampled at the nodes themselves, no averaging. The
/// boundary conditions U(x_0) = l and U(x_N) = r are eliminated into the
/// right-hand side at the first and last interior rows.
pub fn assemble(bvp: &TwoParamBvp, mesh: &PiecewiseUniformMesh) -> Result<BlockTridiagonalSystem> {
    bvp.check()?;
    let n = mesh.n_elements();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "mesh must have at least 2 elements, got {n}"
        )));
    }
    let interior = n - 1;
    let eps = [bvp.eps1, bvp.eps2];

    let mut sub = vec![Block2::zero(); interior];
    let mut diag = vec![Block2::zero(); interior];
    let mut sup = vec![Block2::zero(); interior];
    let mut rhs = vec![[0.0; 2]; interior];

    for j in 1..n {
        let k = j - 1;
        let (h, h_next, hbar) = mesh.steps_around(j)?;
        let x = mesh.point(j);
        let a = [bvp.a1.try_eval(x)?, bvp.a2.try_eval(x)?];
        let b = [
            [bvp.b11.try_eval(x)?, bvp.b12.try_eval(x)?],
            [bvp.b21.try_eval(x)?, bvp.b22.try_eval(x)?],
        ];
        rhs[k] = [bvp.f1.try_eval(x)?, bvp.f2.try_eval(x)?];

        let mut sub_block = Block2::zero();
        let mut sup_block = Block2::zero();
        let mut diag_block = Block2::zero();
        for i in 0..2 {
            sub_block.0[i][i] = eps[i] / (hbar * h);
            sup_block.0[i][i] = eps[i] / (hbar * h_next) + a[i] / h_next;
            diag_block.0[i][i] =
                -eps[i] / hbar * (1.0 / h + 1.0 / h_next) - a[i] / h_next - b[i][i];
            diag_block.0[i][1 - i] = b[i][1 - i];
        }

        if j == 1 {
            let folded = sub_block.mul_vec(bvp.left_bc);
            rhs[k][0] -= folded[0];
            rhs[k][1] -= folded[1];
        } else {
            sub[k] = sub_block;
        }
        if j == n - 1 {
            let folded = sup_block.mul_vec(bvp.right_bc);
            rhs[k][0] -= folded[0];
            rhs[k][1] -= folded[1];
        } else {
            sup[k] = sup_block;
        }
        diag[k] = diag_block;
    }

    Ok(BlockTridiagonalSystem {
        sub,
        diag,
        sup,
        rhs,
        boundary_left: bvp.left_bc,
        boundary_right: bvp.right_bc,
    })
}

/// Apply the discrete operator to an arbitrary mesh function, straight
/// from the difference quotients rather than via the assembled matrix.
///
/// Returns the 2-vectors at the interior nodes j = 1..N-1.
pub fn apply_discrete_operator(
    bvp: &TwoParamBvp,
    mesh: &PiecewiseUniformMesh,
    psi: &MeshFunctionPair<'_>,
) -> Result<Vec<[f64; 2]>> {
    if !std::ptr::eq(mesh, psi.mesh()) && mesh.points() != psi.mesh().points() {
        return Err(Error::InvalidArgument(
            "mesh function is defined on a different mesh".to_string(),
        ));
    }
    let n = mesh.n_elements();
    let eps = [bvp.eps1, bvp.eps2];
    let comp1: Vec<f64> = psi.values().iter().map(|v| v[0]).collect();
    let comp2: Vec<f64> = psi.values().iter().map(|v| v[1]).collect();
    let comps = [&comp1, &comp2];

    let mut out = Vec::with_capacity(n - 1);
    for j in 1..n {
        let x = mesh.point(j);
        let a = [bvp.a1.try_eval(x)?, bvp.a2.try_eval(x)?];
        let b = [
            [bvp.b11.try_eval(x)?, bvp.b12.try_eval(x)?],
            [bvp.b21.try_eval(x)?, bvp.b22.try_eval(x)?],
        ];
        let mut row = [0.0; 2];
        for i in 0..2 {
            let d2 = second_difference(comps[i], mesh, j)?;
            let dplus = forward_difference(comps[i], mesh, j)?;
            row[i] = eps[i] * d2 + a[i] * dplus - b[i][i] * psi.values()[j][i]
                + b[i][1 - i] * psi.values()[j][1 - i];
        }
        out.push(row);
    }
    Ok(out)
}
