//! End-to-end solves, the two-mesh error estimator and the uniform-error
//! table, plus layer-width measurement against the outer solution.
//!
//! With no closed-form solutions available, the error at mesh size N is
//! estimated by comparing against the solve on 2N elements: the fine mesh
//! is built with its own transition points (recomputed for 2N) and its
//! solution is read at the coarse nodes through piecewise-linear
//! interpolation. The estimator
//!
//! ```text
//! D^N      = max over the eps grid of D_eps^N
//! p^N      = log2(D^N / D^2N)
//! p*       = min over N of p^N
//! C^N_p*   = D^N N^p* / (1 - 2^-p*)
//! ```
//!
//! summarises parameter-uniform convergence; p* near one (up to the log
//! factor) and a bounded C row is what the upwind fitted-mesh method
//! delivers.

use rayon::prelude::*;

use crate::discretize::assemble;
use crate::error::{Error, Result};
use crate::linsolve::solve_block_tridiagonal;
use crate::mesh::{build_shishkin_mesh, build_uniform_mesh, MeshKind, PiecewiseUniformMesh};
use crate::problem::TwoParamBvp;
use crate::reduced::{eval_reduced, ReducedSolution};

/// A solve result on its mesh, boundary nodes included.
#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    mesh: PiecewiseUniformMesh,
    values: Vec<[f64; 2]>,
}

impl DiscreteSolution {
    pub fn mesh(&self) -> &PiecewiseUniformMesh {
        &self.mesh
    }

    /// Node values (U1, U2), length N+1; first and last equal l and r.
    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }
}

/// Convergence summary over an (eps1, eps2) grid and a doubling N list.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub eps_grid: Vec<(f64, f64)>,
    pub n_list: Vec<usize>,
    /// d_eps_n[e][k]: two-mesh difference for eps_grid[e] at n_list[k].
    pub d_eps_n: Vec<Vec<f64>>,
    /// Per-N maxima over the eps grid.
    pub d_n: Vec<f64>,
    /// p_n[k] = log2(d_n[k] / d_n[k+1]); one entry shorter than n_list.
    pub p_n: Vec<f64>,
    pub p_star: f64,
    pub c_p_n: Vec<f64>,
    pub c_p_star: f64,
}

/// The 15 parameter pairs (5^-(3+k), 2^-(6+k)), k = 1..15, used by the
/// reference experiments.
pub fn reference_eps_grid() -> Vec<(f64, f64)> {
    (1..=15)
        .map(|k| (5.0_f64.powi(-(3 + k)), 2.0_f64.powi(-(6 + k))))
        .collect()
}

/// Mesh build, assembly, solve, and boundary reattachment in one call.
pub fn solve_bvp(bvp: &TwoParamBvp, n: usize, kind: MeshKind) -> Result<DiscreteSolution> {
    let mesh = match kind {
        MeshKind::Shishkin => build_shishkin_mesh(bvp.eps1, bvp.eps2, bvp.alpha, n)?,
        MeshKind::Uniform => build_uniform_mesh(n)?,
    };
    solve_on_mesh(bvp, mesh)
}

fn solve_on_mesh(bvp: &TwoParamBvp, mesh: PiecewiseUniformMesh) -> Result<DiscreteSolution> {
    let system = assemble(bvp, &mesh)?;
    let interior = solve_block_tridiagonal(&system)?;
    let mut values = Vec::with_capacity(mesh.points().len());
    values.push(bvp.left_bc);
    values.extend(interior);
    values.push(bvp.right_bc);
    Ok(DiscreteSolution { mesh, values })
}

/// Piecewise-linear read of a solution at an arbitrary abscissa.
fn interp_solution(points: &[f64], values: &[[f64; 2]], x: f64) -> [f64; 2] {
    let last = points.len() - 1;
    if x >= points[last] {
        return values[last];
    }
    // first index with point > x, so the element [idx, idx+1] brackets x
    let idx = points.partition_point(|&p| p <= x).saturating_sub(1);
    if points[idx] == x {
        return values[idx];
    }
    let t = (x - points[idx]) / (points[idx + 1] - points[idx]);
    [
        values[idx][0] + t * (values[idx + 1][0] - values[idx][0]),
        values[idx][1] + t * (values[idx + 1][1] - values[idx][1]),
    ]
}

/// Two-mesh error estimate at mesh size N.
///
/// Solves on the N-element fitted mesh and on the 2N-element fitted mesh
/// (transition points recomputed for 2N), then takes the largest
/// componentwise difference over the coarse nodes, reading the fine
/// solution by linear interpolation where the meshes do not share nodes.
pub fn two_mesh_difference(bvp: &TwoParamBvp, n: usize) -> Result<f64> {
    let coarse = solve_bvp(bvp, n, MeshKind::Shishkin)?;
    let fine = solve_bvp(bvp, 2 * n, MeshKind::Shishkin)?;
    let fine_points = fine.mesh().points();
    let mut worst = 0.0_f64;
    for (j, &x) in coarse.mesh().points().iter().enumerate() {
        let here = coarse.values()[j];
        let there = interp_solution(fine_points, fine.values(), x);
        worst = worst.max((here[0] - there[0]).abs());
        worst = worst.max((here[1] - there[1]).abs());
    }
    Ok(worst)
}

/// Fill the full (eps, N) table of two-mesh differences and summarise it.
///
/// `family` produces the problem instance for each parameter pair (the
/// sources of a manufactured problem may depend on eps). Cells are
/// independent solves and run in parallel; the summary is assembled by
/// index and does not depend on completion order.
pub fn uniform_table<F>(
    family: F,
    eps_grid: &[(f64, f64)],
    n_list: &[usize],
) -> Result<ConvergenceReport>
where
    F: Fn(f64, f64) -> Result<TwoParamBvp> + Sync,
{
    if eps_grid.is_empty() {
        return Err(Error::InvalidArgument("empty eps grid".to_string()));
    }
    if n_list.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two mesh sizes to estimate an order".to_string(),
        ));
    }
    for pair in n_list.windows(2) {
        if pair[1] != 2 * pair[0] {
            return Err(Error::InvalidArgument(format!(
                "mesh sizes must double: {} is not twice {}",
                pair[1], pair[0]
            )));
        }
    }
    if n_list[0] % 4 != 0 || n_list[0] == 0 {
        return Err(Error::InvalidArgument(format!(
            "mesh sizes must be positive multiples of 4, got {}",
            n_list[0]
        )));
    }

    let cells: Vec<(usize, usize)> = (0..eps_grid.len())
        .flat_map(|e| (0..n_list.len()).map(move |k| (e, k)))
        .collect();
    let flat: Vec<f64> = cells
        .par_iter()
        .map(|&(e, k)| {
            let (eps1, eps2) = eps_grid[e];
            let bvp = family(eps1, eps2)?;
            two_mesh_difference(&bvp, n_list[k])
        })
        .collect::<Result<Vec<f64>>>()?;

    let d_eps_n: Vec<Vec<f64>> = flat
        .chunks(n_list.len())
        .map(|chunk| chunk.to_vec())
        .collect();
    let d_n: Vec<f64> = (0..n_list.len())
        .map(|k| d_eps_n.iter().map(|row| row[k]).fold(0.0_f64, f64::max))
        .collect();
    let p_n: Vec<f64> = d_n
        .windows(2)
        .map(|pair| (pair[0] / pair[1]).log2())
        .collect();
    let p_star = p_n.iter().copied().fold(f64::INFINITY, f64::min);
    let c_p_n: Vec<f64> = d_n
        .iter()
        .zip(n_list)
        .map(|(&d, &n)| d * (n as f64).powf(p_star) / (1.0 - (-p_star).exp2()))
        .collect();
    let c_p_star = c_p_n.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    Ok(ConvergenceReport {
        eps_grid: eps_grid.to_vec(),
        n_list: n_list.to_vec(),
        d_eps_n,
        d_n,
        p_n,
        p_star,
        c_p_n,
        c_p_star,
    })
}

/// Width of the region near x = 0 where a solution component still
/// deviates from the outer solution by more than `threshold`.
///
/// Returns the smallest mesh point x_j such that the deviation stays
/// within the threshold at every node from j on; 0 when the threshold is
/// met everywhere. (If the deviation still exceeds the threshold at the
/// last node, 1.0 is returned: the layer region covers the whole mesh.)
/// Requiring all downstream nodes to comply keeps non-monotone overshoot
/// near the layer edge from shrinking the reported width.
pub fn layer_width(
    sol: &DiscreteSolution,
    rsol: &ReducedSolution,
    component: usize,
    threshold: f64,
) -> Result<f64> {
    if component != 1 && component != 2 {
        return Err(Error::InvalidArgument(format!(
            "component must be 1 or 2, got {component}"
        )));
    }
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let c = component - 1;
    let points = sol.mesh().points();
    let mut last_bad: Option<usize> = None;
    for (j, &x) in points.iter().enumerate() {
        let outer = eval_reduced(rsol, x)?;
        if (sol.values()[j][c] - outer[c]).abs() > threshold {
            last_bad = Some(j);
        }
    }
    Ok(match last_bad {
        None => 0.0,
        Some(j) if j + 1 < points.len() => points[j + 1],
        Some(_) => 1.0,
    })
}
