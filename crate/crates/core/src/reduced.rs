//! The reduced (eps = 0) problem: A(x) u0' - B(x) u0 = f with u0(1) = r.
//!
//! Dropping the diffusion terms leaves a first-order system that only
//! keeps the outflow condition at x = 1, so it is integrated backwards
//! from x = 1 to x = 0 as an initial value problem. Its solution is the
//! outer solution the discrete solution approaches away from the layers,
//! which is what the layer-width diagnostics compare against.
//!
//! The integrator is the classical 4-stage Runge-Kutta method with a
//! fixed step 1/M; at M = 1024 the integration error (~1e-8 for the
//! catalog problems) is negligible against the scheme error.

use crate::error::{Error, Result};
use crate::problem::TwoParamBvp;

/// The outer solution stored on an equispaced grid.
#[derive(Clone, Debug)]
pub struct ReducedSolution {
    grid: Vec<f64>,
    values: Vec<[f64; 2]>,
}

impl ReducedSolution {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Right-hand side of u0' = A^-1 (B u0 + f), written out per component
/// with the sign convention of the reaction matrix.
fn slope(bvp: &TwoParamBvp, x: f64, u: [f64; 2]) -> Result<[f64; 2]> {
    let a1 = bvp.a1.try_eval(x)?;
    let a2 = bvp.a2.try_eval(x)?;
    let du1 =
        (bvp.b11.try_eval(x)? * u[0] - bvp.b12.try_eval(x)? * u[1] + bvp.f1.try_eval(x)?) / a1;
    let du2 =
        (-bvp.b21.try_eval(x)? * u[0] + bvp.b22.try_eval(x)? * u[1] + bvp.f2.try_eval(x)?) / a2;
    Ok([du1, du2])
}

/// Integrate the reduced problem from x = 1 down to x = 0, storing all
/// M+1 grid values. The value at x = 1 is the right boundary vector
/// exactly.
pub fn solve_reduced(bvp: &TwoParamBvp, m: usize) -> Result<ReducedSolution> {
    if m < 16 {
        return Err(Error::InvalidArgument(format!(
            "reduced solve needs at least 16 steps, got {m}"
        )));
    }
    bvp.check()?;

    let grid: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let mut values = vec![[0.0_f64; 2]; m + 1];
    values[m] = bvp.right_bc;

    for i in (1..=m).rev() {
        let x = grid[i];
        let h = grid[i - 1] - grid[i]; // negative step
        let y = values[i];
        let k1 = slope(bvp, x, y)?;
        let k2 = slope(
            bvp,
            x + h / 2.0,
            [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]],
        )?;
        let k3 = slope(
            bvp,
            x + h / 2.0,
            [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]],
        )?;
        let k4 = slope(bvp, x + h, [y[0] + h * k3[0], y[1] + h * k3[1]])?;
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if !next[0].is_finite() || !next[1].is_finite() {
            return Err(Error::NumericalFailure(format!(
                "reduced-problem integration left the finite range near x = {}",
                grid[i - 1]
            )));
        }
        values[i - 1] = next;
    }

    Ok(ReducedSolution { grid, values })
}

/// Piecewise-linear interpolation of the stored outer solution.
///
/// Values at grid nodes are returned exactly as stored.
pub fn eval_reduced(rsol: &ReducedSolution, x: f64) -> Result<[f64; 2]> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "x must lie in [0,1], got {x}"
        )));
    }
    let m = rsol.grid.len() - 1;
    let idx = ((x * m as f64) as usize).min(m - 1);
    // exact hits first, so grid nodes do not pick up interpolation noise
    if x == rsol.grid[idx] {
        return Ok(rsol.values[idx]);
    }
    if x == rsol.grid[idx + 1] {
        return Ok(rsol.values[idx + 1]);
    }
    let t = (x - rsol.grid[idx]) / (rsol.grid[idx + 1] - rsol.grid[idx]);
    let lo = rsol.values[idx];
    let hi = rsol.values[idx + 1];
    Ok([lo[0] + t * (hi[0] - lo[0]), lo[1] + t * (hi[1] - lo[1])])
}
