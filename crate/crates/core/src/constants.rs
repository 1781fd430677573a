//! `sigma_1`, `S` and `S_q` for balls.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::atlas::{DomainConstants, Provenance};
use crate::error::{Error, Result};
use crate::grid::{gamma_half, RadialFunction, RadialGrid};

/// Relative eigenvalue change at which inverse iteration stops.
pub const EIGEN_TOL: f64 = 1e-12;
/// Relative quotient change at which the `S_q` flow stops.
pub const SQ_TOL: f64 = 1e-10;
const MAX_ITER: usize = 100_000;

/// First Dirichlet eigenvalue of the radial Laplacian on the grid, with its
/// positive `L^2`-normalised eigenfunction.
pub fn sigma1(grid: &Arc<RadialGrid>) -> Result<(f64, RadialFunction)> {
    let r2 = grid.radius() * grid.radius();
    let mut u: Vec<f64> = grid.nodes().iter().map(|r| 1.0 - r * r / r2).collect();
    normalize_l2(grid, &mut u);
    let mut lam = grid.dirichlet(&u);
    for _ in 0..MAX_ITER {
        let wu: Vec<f64> = u.iter().zip(grid.weights()).map(|(x, w)| x * w).collect();
        let mut v = grid.stiffness_solve(&wu);
        normalize_l2(grid, &mut v);
        let next = grid.dirichlet(&v);
        u = v;
        let done = (next - lam).abs() <= EIGEN_TOL * next;
        lam = next;
        if done {
            // roundoff can leave tiny negative tails near R
            for x in u.iter_mut() {
                *x = x.max(0.0);
            }
            let f = RadialFunction::new(grid.clone(), u)?;
            return Ok((lam, f));
        }
    }
    Err(Error::NoConvergence { what: "inverse iteration for sigma_1", iterations: MAX_ITER })
}

fn normalize_l2(grid: &RadialGrid, u: &mut [f64]) {
    let m = grid.lp_pow(u, 2.0).sqrt();
    for x in u.iter_mut() {
        *x /= m;
    }
}

/// Best constant of `D^{1,2}(R^N) -> L^{2*}`:
/// `S = N (N-2) pi (Gamma(N/2) / Gamma(N))^{2/N}`.
pub fn sobolev_s(dim: u32) -> f64 {
    assert!(dim >= 3, "S needs N >= 3");
    let n = dim as f64;
    n * (n - 2.0) * PI * (gamma_half(dim) / gamma_half(2 * dim)).powf(2.0 / n)
}

/// `S_q = inf { |grad u|^2 : |u|_q = 1 }` over the radial grid space.
pub fn sobolev_sq(grid: &Arc<RadialGrid>, q: f64) -> Result<f64> {
    sobolev_sq_minimizer(grid, q).map(|(v, _)| v)
}

/// Normalised gradient flow in the `H^1_0` metric, restarted on `|u|_q = 1`
/// after each step. Returns the value and the minimiser.
pub fn sobolev_sq_minimizer(grid: &Arc<RadialGrid>, q: f64) -> Result<(f64, RadialFunction)> {
    let ts = grid.two_star();
    if !(q >= 2.0 && q < ts) {
        return Err(Error::InvalidParams(format!("q must lie in [2, {ts}), got {q}")));
    }
    let (_, phi) = sigma1(grid)?;
    let mut u = phi.into_values();
    normalize_lq(grid, &mut u, q);
    let mut val = grid.dirichlet(&u);
    let mut alpha = 1.0;
    for _ in 0..MAX_ITER {
        let f: Vec<f64> = u
            .iter()
            .zip(grid.weights())
            .map(|(x, w)| w * x.powf(q - 1.0))
            .collect();
        let kf = grid.stiffness_solve(&f);
        let dir: Vec<f64> = u.iter().zip(&kf).map(|(x, y)| x - val * y).collect();
        let mut accepted = None;
        while alpha > 1e-14 {
            let mut v: Vec<f64> = u.iter().zip(&dir).map(|(x, d)| (x - alpha * d).max(0.0)).collect();
            if normalize_lq(grid, &mut v, q) {
                let nv = grid.dirichlet(&v);
                if nv <= val {
                    accepted = Some((nv, v));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((nv, v)) = accepted else {
            return Ok((val, RadialFunction::new(grid.clone(), u)?));
        };
        let change = (val - nv) / nv;
        u = v;
        val = nv;
        alpha = (alpha * 1.5).min(1.0);
        if change < SQ_TOL {
            return Ok((val, RadialFunction::new(grid.clone(), u)?));
        }
    }
    Err(Error::NoConvergence { what: "S_q gradient flow", iterations: MAX_ITER })
}

fn normalize_lq(grid: &RadialGrid, u: &mut [f64], q: f64) -> bool {
    let b = grid.lp_pow(u, q);
    if !(b > 0.0 && b.is_finite()) {
        return false;
    }
    let s = b.powf(-1.0 / q);
    for x in u.iter_mut() {
        *x *= s;
    }
    true
}

impl DomainConstants {
    /// Constants of the ball covered by `grid`; `S_q` only when `q > 2`.
    pub fn for_ball(grid: &Arc<RadialGrid>, q: f64) -> Result<Self> {
        let (s1, _) = sigma1(grid)?;
        let sq = if q > 2.0 { Some(sobolev_sq(grid, q)?) } else { None };
        Self::new(s1, sobolev_s(grid.dim()), sq, Provenance::ComputedBall { radius: grid.radius() })
    }
}
