//! Piecewise-uniform fitted meshes on [0,1].
//!
//! The fitted mesh condenses near x = 0 where the layers sit: [0,1] is
//! split at the transition points tau1 < tau2 into three pieces carrying
//! N/4, N/4 and N/2 equal elements. The transition points are
//!
//! ```text
//! tau2 = min(1/2, (2 eps2 / alpha) ln N)
//! tau1 = min(tau2/2, (2 eps1 / alpha) ln N)
//! ```
//!
//! When both minima saturate the mesh is globally uniform.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshKind {
    Shishkin,
    Uniform,
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshKind::Shishkin => write!(f, "shishkin"),
            MeshKind::Uniform => write!(f, "uniform"),
        }
    }
}

/// An immutable mesh of N elements with precomputed region step sizes.
#[derive(Clone, Debug)]
pub struct PiecewiseUniformMesh {
    points: Vec<f64>,
    n_elements: usize,
    tau1: f64,
    tau2: f64,
    h1: f64,
    h2: f64,
    h3: f64,
    kind: MeshKind,
}

impl PiecewiseUniformMesh {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn point(&self, j: usize) -> f64 {
        self.points[j]
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn tau2(&self) -> f64 {
        self.tau2
    }

    /// Step sizes in [0,tau1], [tau1,tau2] and [tau2,1].
    pub fn region_steps(&self) -> (f64, f64, f64) {
        (self.h1, self.h2, self.h3)
    }

    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    /// Element step h_j = x_j - x_{j-1} for 1 <= j <= N.
    pub fn step(&self, j: usize) -> f64 {
        self.points[j] - self.points[j - 1]
    }

    /// The two steps around node j and their average
    /// (h_j, h_{j+1}, hbar_j), for an interior node 1 <= j <= N-1.
    pub fn steps_around(&self, j: usize) -> Result<(f64, f64, f64)> {
        if j < 1 || j > self.n_elements - 1 {
            return Err(Error::IndexOutOfRange {
                index: j,
                lo: 1,
                hi: self.n_elements - 1,
            });
        }
        let h = self.step(j);
        let h_next = self.step(j + 1);
        Ok((h, h_next, 0.5 * (h + h_next)))
    }

    /// Region of point j for reporting: 1 if x < tau1, 2 if x < tau2, else 3.
    pub fn region(&self, j: usize) -> u8 {
        let x = self.points[j];
        if x < self.tau1 {
            1
        } else if x < self.tau2 {
            2
        } else {
            3
        }
    }
}

/// Transition parameters for given perturbation parameters and mesh size.
pub fn transition_parameters(eps1: f64, eps2: f64, alpha: f64, n: usize) -> Result<(f64, f64)> {
    if !(eps1 > 0.0 && eps1.is_finite()) || !(eps2 >= eps1 && eps2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < eps1 <= eps2, got eps1 = {eps1}, eps2 = {eps2}"
        )));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 mesh elements, got {n}"
        )));
    }
    let ln_n = (n as f64).ln();
    let tau2 = (0.5_f64).min(2.0 * eps2 / alpha * ln_n);
    let tau1 = (tau2 / 2.0).min(2.0 * eps1 / alpha * ln_n);
    Ok((tau1, tau2))
}

fn check_multiple_of_four(n: usize) -> Result<()> {
    if n < 4 || n % 4 != 0 {
        return Err(Error::InvalidArgument(format!(
            "mesh element count must be a positive multiple of 4, got {n}"
        )));
    }
    Ok(())
}

// The transition nodes x_{N/4} and x_{N/2} are pinned to tau1 and tau2
// instead of accumulated as j*H; accumulated sums drift in floating point
// and break the region-count invariants.
fn build_three_region(tau1: f64, tau2: f64, n: usize, kind: MeshKind) -> PiecewiseUniformMesh {
    let quarter = n / 4;
    let h1 = 4.0 * tau1 / n as f64;
    let h2 = 4.0 * (tau2 - tau1) / n as f64;
    let h3 = 2.0 * (1.0 - tau2) / n as f64;
    let mut points = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let x = if j <= quarter {
            j as f64 * h1
        } else if j <= 2 * quarter {
            tau1 + (j - quarter) as f64 * h2
        } else {
            tau2 + (j - 2 * quarter) as f64 * h3
        };
        points.push(x);
    }
    points[quarter] = tau1;
    points[2 * quarter] = tau2;
    points[n] = 1.0;
    PiecewiseUniformMesh {
        points,
        n_elements: n,
        tau1,
        tau2,
        h1,
        h2,
        h3,
        kind,
    }
}

/// Build the fitted mesh for the given problem parameters.
pub fn build_shishkin_mesh(
    eps1: f64,
    eps2: f64,
    alpha: f64,
    n: usize,
) -> Result<PiecewiseUniformMesh> {
    check_multiple_of_four(n)?;
    let (tau1, tau2) = transition_parameters(eps1, eps2, alpha, n)?;
    Ok(build_three_region(tau1, tau2, n, MeshKind::Shishkin))
}

/// Build a fitted mesh with explicitly chosen transition points.
///
/// Useful for refinement studies that keep tau fixed while N changes:
/// the 2N-element mesh with the same tau contains every point of the
/// N-element mesh.
pub fn build_shishkin_mesh_with_transitions(
    tau1: f64,
    tau2: f64,
    n: usize,
) -> Result<PiecewiseUniformMesh> {
    check_multiple_of_four(n)?;
    if !(tau1 > 0.0 && tau1 <= tau2 / 2.0 && tau2 <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < tau1 <= tau2/2 and tau2 <= 1/2, got tau1 = {tau1}, tau2 = {tau2}"
        )));
    }
    Ok(build_three_region(tau1, tau2, n, MeshKind::Shishkin))
}

/// Equispaced mesh with h = 1/N, as the comparison baseline.
///
/// tau1 = 1/4 and tau2 = 1/2 are recorded for reporting only. For N a
/// multiple of 4 the construction reuses the three-region formula so the
/// points agree bit for bit with a degenerate fitted mesh.
pub fn build_uniform_mesh(n: usize) -> Result<PiecewiseUniformMesh> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "uniform mesh needs at least 2 elements, got {n}"
        )));
    }
    if n % 4 == 0 {
        return Ok(build_three_region(0.25, 0.5, n, MeshKind::Uniform));
    }
    let h = 1.0 / n as f64;
    let mut points: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    points[n] = 1.0;
    Ok(PiecewiseUniformMesh {
        points,
        n_elements: n,
        tau1: 0.25,
        tau2: 0.5,
        h1: h,
        h2: h,
        h3: h,
        kind: MeshKind::Uniform,
    })
}

/// The two adjacent steps and their average at interior node j.
pub fn mesh_steps(mesh: &PiecewiseUniformMesh, j: usize) -> Result<(f64, f64, f64)> {
    mesh.steps_around(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn transition_examples_bit_match_the_formulas() {
        // both minima saturate
        let (t1, t2) = transition_parameters(0.25, 0.25, 1.0, 4).unwrap();
        assert_eq!((t1, t2), (0.25, 0.5));

        // neither saturates; must equal the direct evaluation bit for bit
        let (eps1, eps2, n) = (0.0016, 0.0078125, 1024_usize);
        let (t1, t2) = transition_parameters(eps1, eps2, 1.0, n).unwrap();
        let ln_n = (n as f64).ln();
        assert_eq!(t2, (0.5_f64).min(2.0 * eps2 * ln_n));
        assert_eq!(t1, (t2 / 2.0).min(2.0 * eps1 * ln_n));
        assert!((t2 - 0.1083043).abs() < 1e-7);
        assert!((t1 - 0.0221807).abs() < 1e-7);

        // equal parameters collapse to tau1 = tau2 / 2
        let (t1, t2) = transition_parameters(1e-4, 1e-4, 1.0, 64).unwrap();
        assert!(t2 < 0.5);
        assert_eq!(t1, t2 / 2.0);
    }

    #[test]
    fn transition_rejects_bad_arguments() {
        assert!(transition_parameters(0.0, 0.1, 1.0, 8).is_err());
        assert!(transition_parameters(0.2, 0.1, 1.0, 8).is_err());
        assert!(transition_parameters(0.1, 0.2, 0.0, 8).is_err());
        assert!(transition_parameters(0.1, 0.2, 1.0, 2).is_err());
    }

    #[test]
    fn degenerate_mesh_is_uniform() {
        let mesh = build_shishkin_mesh(0.25, 0.25, 1.0, 8).unwrap();
        for j in 0..=8 {
            assert_eq!(mesh.point(j), j as f64 / 8.0);
        }
        let uniform = build_uniform_mesh(8).unwrap();
        assert_eq!(mesh.points(), uniform.points());
    }

    #[test]
    fn shishkin_n8_layout() {
        let (eps1, eps2) = (0.0016, 0.0078125);
        let mesh = build_shishkin_mesh(eps1, eps2, 1.0, 8).unwrap();
        let (t1, t2) = transition_parameters(eps1, eps2, 1.0, 8).unwrap();
        assert_eq!(mesh.point(0), 0.0);
        assert_eq!(mesh.point(2), t1);
        assert_eq!(mesh.point(4), t2);
        assert_eq!(mesh.point(8), 1.0);
        assert!((mesh.point(1) - t1 / 2.0).abs() < 1e-16);
        assert!((mesh.point(3) - (t1 + t2) / 2.0).abs() < 1e-16);
        assert!((mesh.point(5) - (t2 + (1.0 - t2) / 4.0)).abs() < 1e-16);
        // H1 * (N/4) recovers tau1
        let (h1, _, _) = mesh.region_steps();
        assert!((h1 * 2.0 - t1).abs() < 1e-16);
    }

    #[test]
    fn transition_nodes_are_pinned_exactly() {
        for &(eps1, eps2, n) in &[
            (1e-8, 1e-5, 16_usize),
            (0.0016, 0.0078125, 128),
            (1e-3, 1e-2, 512),
        ] {
            let mesh = build_shishkin_mesh(eps1, eps2, 1.0, n).unwrap();
            assert_eq!(mesh.point(n / 4), mesh.tau1());
            assert_eq!(mesh.point(n / 2), mesh.tau2());
        }
    }

    #[test]
    fn uniform_mesh_small_cases() {
        let m = build_uniform_mesh(2).unwrap();
        assert_eq!(m.points(), &[0.0, 0.5, 1.0]);
        let m = build_uniform_mesh(4).unwrap();
        assert_eq!(m.points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = build_uniform_mesh(10).unwrap();
        for j in 0..=10 {
            assert_eq!(m.point(j), j as f64 / 10.0);
        }
        assert!(build_uniform_mesh(1).is_err());
    }

    #[test]
    fn steps_around_examples() {
        let uniform = build_uniform_mesh(8).unwrap();
        assert_eq!(mesh_steps(&uniform, 3).unwrap(), (0.125, 0.125, 0.125));

        let mesh = build_shishkin_mesh(1e-5, 1e-3, 1.0, 64).unwrap();
        let (h1, h2, h3) = mesh.region_steps();
        let n = mesh.n_elements();
        let at_tau1 = mesh_steps(&mesh, n / 4).unwrap();
        assert!((at_tau1.0 - h1).abs() < 1e-18);
        assert!((at_tau1.1 - h2).abs() < 1e-18);
        assert!((at_tau1.2 - 0.5 * (h1 + h2)).abs() < 1e-18);
        let at_tau2 = mesh_steps(&mesh, n / 2).unwrap();
        assert!((at_tau2.0 - h2).abs() < 1e-18);
        assert!((at_tau2.1 - h3).abs() < 1e-18);

        assert!(mesh_steps(&mesh, 0).is_err());
        assert!(mesh_steps(&mesh, n).is_err());
    }

    #[test]
    fn refinement_with_frozen_tau_nests() {
        for &(eps1, eps2, n) in &[(1e-6, 1e-4, 8_usize), (0.0016, 0.0078125, 64)] {
            let coarse = build_shishkin_mesh(eps1, eps2, 1.0, n).unwrap();
            let fine =
                build_shishkin_mesh_with_transitions(coarse.tau1(), coarse.tau2(), 2 * n).unwrap();
            for j in 0..=n {
                assert_eq!(
                    coarse.point(j),
                    fine.point(2 * j),
                    "coarse node {j} missing from refinement"
                );
            }
        }
    }

    fn check_invariants(mesh: &PiecewiseUniformMesh) {
        let n = mesh.n_elements();
        let points = mesh.points();
        assert_eq!(points.len(), n + 1);
        assert_eq!(points[0], 0.0);
        assert_eq!(points[n], 1.0);
        for j in 1..=n {
            assert!(points[j] > points[j - 1], "not strictly increasing at {j}");
        }
        // partition of unity
        let total: f64 = (1..=n).map(|j| mesh.step(j)).sum();
        assert!(
            (total - 1.0).abs() <= 8.0 * f64::EPSILON,
            "element lengths sum to {total}"
        );
        // region element counts by point membership
        let in_first = points.iter().filter(|&&x| x < mesh.tau1()).count();
        let in_second = points
            .iter()
            .filter(|&&x| x >= mesh.tau1() && x < mesh.tau2())
            .count();
        assert_eq!(in_first, n / 4);
        assert_eq!(in_second, n / 4);
        // H1 <= H2 follows from tau1 <= tau2/2
        let (h1, h2, h3) = mesh.region_steps();
        assert!(h1 > 0.0 && h2 > 0.0 && h3 > 0.0);
        assert!(h1 <= h2 + 1e-18);
    }

    proptest! {
        #[test]
        fn mesh_invariants_hold(
            log_eps1 in -40.0..-1.0f64,
            gap in 0.0..10.0f64,
            quarter in 1..256usize,
        ) {
            let n = 4 * quarter;
            let eps1 = log_eps1.exp2();
            let eps2 = (log_eps1 + gap).exp2().min(1.0);
            let mesh = build_shishkin_mesh(eps1, eps2, 1.0, n).unwrap();
            check_invariants(&mesh);
        }

        #[test]
        fn saturated_minima_give_the_uniform_mesh(quarter in 1..128usize, alpha in 0.5..2.0f64) {
            let n = 4 * quarter;
            // eps large enough that both minima saturate
            let eps = alpha; // 2*eps/alpha * ln N = 2 ln N >= 1/2 for N >= 2
            let mesh = build_shishkin_mesh(eps, eps, alpha, n).unwrap();
            let uniform = build_uniform_mesh(n).unwrap();
            prop_assert_eq!(mesh.points(), uniform.points());
        }
    }
}
