//! Minimisation of the energy over the `N-` part of the Nehari set on a ball.
//!
//! Each cycle takes a step along the negative `H^1_0` gradient `K^{-1} E'(u)`,
//! clamps to `u >= 0`, and retracts onto `N-` by moving along the ray to the
//! local maximum of the fiber. Steps are accepted under an Armijo rule on the
//! retracted energy.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::atlas::{classify, DomainConstants, RegionVerdict, Status};
use crate::constants::sigma1;
use crate::error::{Error, Result};
use crate::fibering::{g_landmarks, CriticalKind, FiberMap};
use crate::grid::{RadialFunction, RadialGrid};
use crate::params::{FiberProfile, ProblemParams};
use crate::roots::{expand_up, newton_bisect, RootTol};

/// Truncated Aubin-Talenti bubble
/// `[N(N-2)]^{(N-2)/4} eps^{(N-2)/2} / (eps^2 + r^2)^{(N-2)/2}` centred at the
/// origin, multiplied by a `C^1` cutoff equal to 1 on `[0, cutoff/2]` and 0 on
/// `[cutoff, R]`.
pub fn bubble(grid: &Arc<RadialGrid>, eps: f64, cutoff: f64) -> Result<RadialFunction> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Geometry(format!("eps must be > 0, got {eps}")));
    }
    if !(cutoff > 0.0 && cutoff < grid.radius()) {
        return Err(Error::Geometry(format!(
            "cutoff {cutoff} must lie in (0, R = {})",
            grid.radius()
        )));
    }
    let n = grid.dim() as f64;
    let amp = (n * (n - 2.0)).powf((n - 2.0) / 4.0) * eps.powf((n - 2.0) / 2.0);
    let half = 0.5 * cutoff;
    let values = grid
        .nodes()
        .iter()
        .map(|&r| {
            let s = ((r - half) / half).clamp(0.0, 1.0);
            let cut = 1.0 - s * s * (3.0 - 2.0 * s);
            amp * (eps * eps + r * r).powf(-(n - 2.0) / 2.0) * cut
        })
        .collect();
    RadialFunction::new(grid.clone(), values)
}

/// Supremum of the fiber over `[0, t_max]` (`t_max = None` for `+inf`).
///
/// Fails with [`Error::NoPeak`] when the ray has no `N-` point.
pub fn sup_fiber_energy(
    p: &ProblemParams,
    f: &FiberProfile,
    t_max: Option<f64>,
) -> Result<(f64, f64)> {
    let fm = FiberMap::new(p, f);
    let pts = fm.nehari_points()?;
    if !pts.iter().any(|c| c.kind == CriticalKind::NehariMinus) {
        return Err(Error::NoPeak);
    }
    let cap = t_max.unwrap_or(f64::INFINITY);
    if !(cap > 0.0) {
        return Err(Error::Domain(format!("t_max must be > 0, got {cap}")));
    }
    let mut best = (0.0, 0.0);
    for c in pts.iter().filter(|c| c.t <= cap) {
        if c.energy > best.1 {
            best = (c.t, c.energy);
        }
    }
    if cap.is_finite() {
        let e = fm.energy(cap);
        if e > best.1 {
            best = (cap, e);
        }
    }
    Ok(best)
}

/// `E(u)` for raw nodal values.
pub fn energy_of_values(p: &ProblemParams, grid: &RadialGrid, u: &[f64]) -> f64 {
    let a_ = grid.dirichlet(u);
    0.5 * p.a() * a_ + 0.25 * p.b() * a_ * a_
        - p.lambda() / p.q() * grid.lp_pow(u, p.q())
        - p.mu() / p.two_star() * grid.lp_pow(u, p.two_star())
}

/// Euclidean gradient of [`energy_of_values`]:
/// `(a + bA) K u - lambda W |u|^{q-2} u - mu W |u|^{2*-2} u`.
pub fn energy_gradient_of_values(p: &ProblemParams, grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let coef = p.a() + p.b() * grid.dirichlet(u);
    let ku = grid.stiffness_mul(u);
    let (q, ts) = (p.q(), p.two_star());
    ku.iter()
        .zip(u)
        .zip(grid.weights())
        .map(|((k, &x), w)| {
            let ax = x.abs();
            coef * k - w * x * (p.lambda() * ax.powf(q - 2.0) + p.mu() * ax.powf(ts - 2.0))
        })
        .collect()
}

pub fn energy(p: &ProblemParams, u: &RadialFunction) -> f64 {
    energy_of_values(p, u.grid(), u.values())
}

pub fn energy_gradient(p: &ProblemParams, u: &RadialFunction) -> Vec<f64> {
    energy_gradient_of_values(p, u.grid(), u.values())
}

/// `|E'(u)|` in the discrete `H^{-1}` norm.
pub fn residual(p: &ProblemParams, u: &RadialFunction) -> f64 {
    u.grid().dual_norm_sq(&energy_gradient(p, u)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    pub residual_tol: f64,
    pub max_iterations: usize,
    /// Relative energy decrease below which a cycle counts as stationary.
    pub energy_tol: f64,
    /// Solve even when the parameters classify as `NotExists`.
    pub force: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-6, max_iterations: 100_000, energy_tol: 1e-12, force: false }
    }
}

/// Comparison of `m-` with the bounds available for the parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub value: f64,
    pub upper: Option<f64>,
    pub upper_rule: &'static str,
    pub lower: Option<f64>,
    pub lower_rule: &'static str,
    /// `true` iff an upper bound applies and every applicable bound holds strictly.
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub minimizer: RadialFunction,
    pub m_minus: f64,
    /// Ray parameter of the last retraction.
    pub t_star: f64,
    /// `|E'(u)|_{H^{-1}}` at the minimiser.
    pub residual: f64,
    /// `E'(u)u / (aA + bA^2 + lambda B + mu C)`.
    pub nehari_residual: f64,
    /// `T''(1)` of the minimiser's fiber.
    pub curvature: f64,
    pub iterations: usize,
    pub wall_time: f64,
    /// Energy after every accepted cycle, starting with the projected seed.
    pub energy_trace: Vec<f64>,
    pub bound_check: BoundCheck,
    pub verdict: RegionVerdict,
}

/// `sigma_1` eigenfunction and a bubble (`eps = R/10`, `cutoff = 0.9 R`), each
/// scaled to `A = 1`, averaged.
pub fn default_seed(grid: &Arc<RadialGrid>) -> Result<RadialFunction> {
    let (_, phi) = sigma1(grid)?;
    let w = bubble(grid, 0.1 * grid.radius(), 0.9 * grid.radius())?;
    let (sa, sb) = (0.5 / phi.grad_sq().sqrt(), 0.5 / w.grad_sq().sqrt());
    let values = phi.values().iter().zip(w.values()).map(|(x, y)| sa * x + sb * y).collect();
    RadialFunction::new(grid.clone(), values)
}

fn project(p: &ProblemParams, v: Vec<f64>, grid: &Arc<RadialGrid>) -> Option<(RadialFunction, f64)> {
    let u = RadialFunction::new(grid.clone(), v).ok()?;
    let f = u.profile(p.q()).ok()?;
    let c = FiberMap::new(p, &f).nehari_minus().ok()??;
    let w = u.scaled(c.t).ok()?;
    Some((w, c.t))
}

pub fn minimize_nehari_minus(
    p: &ProblemParams,
    dc: &DomainConstants,
    seed: &RadialFunction,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let start = Instant::now();
    if seed.grid().dim() != p.dim() {
        return Err(Error::InvalidParams(format!(
            "grid dimension {} differs from N = {}",
            seed.grid().dim(),
            p.dim()
        )));
    }
    let verdict = classify(p, dc)?;
    if verdict.status == Status::NotExists && !options.force {
        return Err(Error::Refused { criterion: verdict.criterion.as_str() });
    }
    let grid = seed.grid().clone();
    let (mut w, mut t_star) = project(p, seed.values().to_vec(), &grid)
        .ok_or(Error::ProjectionFailure { iteration: 0 })?;
    let mut e = energy(p, &w);
    let mut trace = vec![e];
    let mut alpha = 1.0 / (p.a() + p.b() * w.grad_sq());
    let mut last_drop = f64::INFINITY;
    let mut iterations = 0;
    loop {
        let g = energy_gradient(p, &w);
        let s = grid.stiffness_solve(&g);
        let res2: f64 = g.iter().zip(&s).map(|(x, y)| x * y).sum();
        let res = res2.max(0.0).sqrt();
        if res < options.residual_tol && last_drop <= options.energy_tol * e.abs() {
            break;
        }
        if iterations >= options.max_iterations {
            return Err(Error::Stagnation { iterations, residual: res });
        }
        iterations += 1;
        let mut accepted = None;
        let mut trial = alpha;
        for _ in 0..80 {
            let v: Vec<f64> = w.values().iter().zip(&s).map(|(x, d)| (x - trial * d).max(0.0)).collect();
            if let Some((nw, t)) = project(p, v, &grid) {
                let ne = energy(p, &nw);
                let predicted = trial * res2;
                if ne <= e - 1e-4 * predicted || (predicted < 1e-13 * e.abs() && ne <= e) {
                    accepted = Some((nw, t, ne));
                    break;
                }
            }
            trial *= 0.5;
        }
        match accepted {
            Some((nw, t, ne)) => {
                last_drop = e - ne;
                w = nw;
                t_star = t;
                e = ne;
                trace.push(e);
                alpha = trial * 1.5;
            }
            None if res < options.residual_tol => break,
            None => return Err(Error::Stagnation { iterations, residual: res }),
        }
    }
    let f = w.profile(p.q())?;
    let fm = FiberMap::new(p, &f);
    let curvature = fm.second_derivative(1.0)?;
    let (a_, b_, c_) = (f.grad(), f.lower(), f.critical());
    let nehari = p.a() * a_ + p.b() * a_ * a_ - p.lambda() * b_ - p.mu() * c_;
    let scale = p.a() * a_ + p.b() * a_ * a_ + p.lambda() * b_ + p.mu() * c_;
    let bound_check = bound_check(p, dc, e)?;
    Ok(SolveReport {
        residual: residual(p, &w),
        minimizer: w,
        m_minus: e,
        t_star,
        nehari_residual: nehari / scale,
        curvature,
        iterations,
        wall_time: start.elapsed().as_secs_f64(),
        energy_trace: trace,
        bound_check,
        verdict,
    })
}

/// Smallest positive root of `a X = c1 X^{q/2} + c2 X^{2*/2}`.
pub fn nehari_radius_sq(a: f64, c1: f64, q: f64, c2: f64, ts: f64) -> Result<f64> {
    let psi = |x: f64| {
        (
            c1 * x.powf(q / 2.0 - 1.0) + c2 * x.powf(ts / 2.0 - 1.0) - a,
            c1 * (q / 2.0 - 1.0) * x.powf(q / 2.0 - 2.0) + c2 * (ts / 2.0 - 1.0) * x.powf(ts / 2.0 - 2.0),
        )
    };
    let hi = expand_up(1.0, |x| psi(x).0 > 0.0)
        .ok_or(Error::NoConvergence { what: "d0 bracket", iterations: 2100 })?;
    newton_bisect(psi, 0.0, hi, RootTol::default())
}

/// Lower and upper bounds on `m-` from the fibering estimates, compared with `value`.
pub fn bound_check(p: &ProblemParams, dc: &DomainConstants, value: f64) -> Result<BoundCheck> {
    let (a, b, lam, mu, q) = (p.a(), p.b(), p.lambda(), p.mu(), p.q());
    let ts = p.two_star();
    let s = dc.sobolev();
    let theta = 1.0 - lam / (a * dc.sigma1());
    let mut out = BoundCheck {
        value,
        upper: None,
        upper_rule: "none",
        lower: None,
        lower_rule: "none",
        passed: false,
    };
    if p.dim() == 4 {
        if mu > b * s * s {
            out.upper = Some(a * a * s * s / (4.0 * (mu - b * s * s)));
            out.upper_rule = "a^2 S^2 / (4 (mu - b S^2))";
            if q == 2.0 && theta > 0.0 {
                let a_min = a * theta / (mu / (s * s) - b);
                out.lower = Some(0.25 * a * theta * a_min);
                out.lower_rule = "(a/4) theta A_min";
            }
        }
    } else {
        match g_landmarks(p, s) {
            Ok(g) => {
                out.upper = Some(g.g_t2);
                out.upper_rule = "g(t2)";
            }
            Err(Error::D1Violation { .. }) => {}
            Err(e) => return Err(e),
        }
        let c2 = mu * s.powf(-ts / 2.0);
        if q == 2.0 {
            if theta > 0.0 {
                let a_low = (a * theta * s.powf(ts / 2.0) / mu).powf(2.0 / (ts - 2.0));
                out.lower = Some((ts - 2.0) / (4.0 * ts) * a * theta * a_low);
                out.lower_rule = "(2*-2)/(4 2*) a theta A_low";
            }
        } else if let Some(sq) = dc.sq() {
            let d0 = nehari_radius_sq(a, lam * sq.powf(-q / 2.0), q, c2, ts)?;
            out.lower = Some((q - 2.0) * a * d0 / (4.0 * q));
            out.lower_rule = "(q-2) a d0^2 / (4q)";
        }
    }
    out.passed = out.upper.is_some_and(|u| value < u) && out.lower.map_or(true, |l| value > l);
    Ok(out)
}
