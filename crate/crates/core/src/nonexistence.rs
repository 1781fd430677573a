//! Scalar inequalities behind the `N >= 5` nonexistence rules, checked on samples.
//!
//! For `q > 2` every solution satisfies `f(A) <= 0` with
//! `f(A) = aA + bA^2 - lambda S_q^{-q/2} A^{q/2} - mu S^{-2*/2} A^{2*/2}`,
//! `A = |grad u|^2`; the rule claims `f(A) >= (b - threshold) A^2`. The slack
//! reported is `f(A) / A^2`, which that claim bounds below by `b - threshold`.
//!
//! For `q = 2` a solution has `A >= A_low = [a theta S^{2*/2} / mu]^{2/(2*-2)}`
//! (`theta = 1 - lambda/(a sigma_1)`) and
//! `h(A) = a theta A + b A^2 - mu S^{-2*/2} A^{2*/2} <= 0`; the rule claims
//! `h(A) >= a theta A_low - K > 0` on `A >= A_low`. The slack reported is `h(A)`.

use serde::Serialize;

use crate::atlas::{nonexistence_q2, nonexistence_qgt2_threshold, DomainConstants};
use crate::error::{Error, Result};
use crate::params::ProblemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NonexistenceBranch {
    Q2,
    QGreaterThan2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonexistenceReport {
    pub branch: NonexistenceBranch,
    /// Minimum slack over the samples, refined by golden-section search.
    pub min_slack: f64,
    /// `A` at which `min_slack` is attained.
    pub argmin: f64,
    /// Lower bound on the slack claimed by the inequality chain.
    pub chain_bound: f64,
    /// Whether every sample respects `chain_bound` (up to rounding).
    pub chain_holds: bool,
    pub samples: usize,
    /// Sampled range of `A`.
    pub range: (f64, f64),
}

/// Largest `a` for which each printed Young constant of the `q > 2` rule
/// dominates the sharp one.
///
/// Splitting `c A^{p} <= (a/2) A + beta A^2` (`1 < p < 2`) needs
/// `beta >= (p-1) ((2-p) 2/a)^{(2-p)/(p-1)} c^{1/(p-1)}`, while the rule uses
/// `(c (2/a)^{2(2-p)})^{1/(p-1)}`. The second decays faster in `a`, so the
/// rule's threshold is guaranteed only up to the returned value.
pub fn qgt2_constant_valid_up_to(q: f64, two_star: f64) -> f64 {
    let limit = |p: f64| {
        let k = (2.0 - p) / (p - 1.0);
        2.0 / (2.0 - p) * (1.0 / (p - 1.0)).powf(1.0 / k)
    };
    limit(q / 2.0).min(limit(two_star / 2.0))
}

/// Minimal range of `A` scanned in the `q > 2` branch. It is widened to three
/// decades around the points where each Young split is an equality.
pub const QGT2_RANGE: (f64, f64) = (1e-6, 1e6);
/// Decades above `A_low` scanned in the `q = 2` branch.
pub const Q2_DECADES: f64 = 6.0;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Golden-section refinement of `min f(exp(s))` on `[s0, s1]`.
fn golden_min(f: &dyn Fn(f64) -> f64, mut s0: f64, mut s1: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = s1 - r * (s1 - s0);
    let mut x2 = s0 + r * (s1 - s0);
    let (mut f1, mut f2) = (f(x1.exp()), f(x2.exp()));
    for _ in 0..200 {
        if (s1 - s0).abs() <= 1e-14 * (1.0 + s0.abs()) {
            break;
        }
        if f1 <= f2 {
            s1 = x2;
            x2 = x1;
            f2 = f1;
            x1 = s1 - r * (s1 - s0);
            f1 = f(x1.exp());
        } else {
            s0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = s0 + r * (s1 - s0);
            f2 = f(x2.exp());
        }
    }
    if f1 <= f2 {
        (x1.exp(), f1)
    } else {
        (x2.exp(), f2)
    }
}

struct Scan {
    min: f64,
    argmin: f64,
    chain_holds: bool,
}

fn scan(f: &dyn Fn(f64) -> f64, grid: &[f64], chain_bound: f64) -> Scan {
    let vals: Vec<f64> = grid.iter().map(|&a| f(a)).collect();
    let tol = 1e-9 * chain_bound.abs().max(1e-300);
    let chain_holds = vals.iter().all(|v| *v >= chain_bound - tol);
    let (k, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
    let lo = grid[k.saturating_sub(1)].ln();
    let hi = grid[(k + 1).min(grid.len() - 1)].ln();
    let (mut argmin, mut min) = (grid[k], vals[k]);
    if hi > lo {
        let (a, m) = golden_min(f, lo, hi);
        if m < min {
            argmin = a;
            min = m;
        }
    }
    Scan { min, argmin, chain_holds }
}

/// Checks the scalar inequality of the nonexistence rule that applies to `p`.
///
/// Requires the rule's inequality to hold (non-strictly); returns
/// [`Error::InvariantViolation`] if the sampled slack is not positive.
pub fn nonexistence_invariant_check(
    p: &ProblemParams,
    dc: &DomainConstants,
    samples: usize,
) -> Result<NonexistenceReport> {
    if p.dim() < 5 {
        return Err(Error::WrongBranch(format!(
            "nonexistence chains are stated for N >= 5, got N = {}",
            p.dim()
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidParams("need at least 2 samples".into()));
    }
    let (a, b, lam, mu, q) = (p.a(), p.b(), p.lambda(), p.mu(), p.q());
    let ts = p.two_star();
    let s = dc.sobolev();
    let c2 = mu * s.powf(-ts / 2.0);
    if q > 2.0 {
        let thr = nonexistence_qgt2_threshold(p, dc)?;
        if b < thr * (1.0 - 1e-12) {
            return Err(Error::Precondition(format!("b = {b} is below the threshold {thr}")));
        }
        let c1 = lam * dc.sq().unwrap_or(f64::NAN).powf(-q / 2.0);
        let f = |x: f64| a / x + b - c1 * x.powf(q / 2.0 - 2.0) - c2 * x.powf(ts / 2.0 - 2.0);
        // (a/2) A^{-1} vs c A^{p-2}: balanced at ((a/2) / (c (2-p)))^{1/(p-1)}
        let young = |c: f64, p: f64| (0.5 * a / (c * (2.0 - p))).powf(1.0 / (p - 1.0));
        let mut range = QGT2_RANGE;
        for x in [young(c1, q / 2.0), young(c2, ts / 2.0)] {
            if x.is_finite() && x > 0.0 {
                range = (range.0.min(x * 1e-3), range.1.max(x * 1e3));
            }
        }
        let grid = log_grid(range.0, range.1, samples);
        let chain_bound = b - thr;
        let sc = scan(&f, &grid, chain_bound);
        let strict = b > thr * (1.0 + 1e-12);
        if (strict && sc.min <= 0.0) || sc.min < -1e-9 * b {
            return Err(Error::InvariantViolation { slack: sc.min, at: sc.argmin });
        }
        return Ok(NonexistenceReport {
            branch: NonexistenceBranch::QGreaterThan2,
            min_slack: sc.min,
            argmin: sc.argmin,
            chain_bound,
            chain_holds: sc.chain_holds,
            samples,
            range,
        });
    }
    let theta = 1.0 - lam / (a * dc.sigma1());
    if theta <= 0.0 {
        return Err(Error::Precondition(format!("lambda = {lam} is not below a sigma1")));
    }
    let cmp = nonexistence_q2(p, dc);
    if cmp.lhs < cmp.rhs * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "q = 2 nonexistence inequality fails: {} <= {}",
            cmp.lhs, cmp.rhs
        )));
    }
    let a_low = (a * theta * s.powf(ts / 2.0) / mu).powf(2.0 / (ts - 2.0));
    let h = |x: f64| a * theta * x + b * x * x - c2 * x.powf(ts / 2.0);
    let range = (a_low, a_low * 10f64.powf(Q2_DECADES));
    let grid = log_grid(range.0, range.1, samples);
    let chain_bound = cmp.lhs - cmp.rhs;
    let sc = scan(&h, &grid, chain_bound);
    if sc.min <= 0.0 {
        return Err(Error::InvariantViolation { slack: sc.min, at: sc.argmin });
    }
    Ok(NonexistenceReport {
        branch: NonexistenceBranch::Q2,
        min_slack: sc.min,
        argmin: sc.argmin,
        chain_bound,
        chain_holds: sc.chain_holds,
        samples,
        range,
    })
}
