//! Safeguarded Newton iteration on a sign-changing bracket.

use crate::error::{Error, Result};

/// Stopping rule for [`newton_bisect`].
#[derive(Debug, Clone, Copy)]
pub struct RootTol {
    /// Stop once the last step is below `x_tol * max(|x|, 1e-300)`.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for RootTol {
    fn default() -> Self {
        Self { x_tol: 1e-12, max_iter: 400 }
    }
}

/// Finds a zero of `f` in `[lo, hi]`, where `f(x)` returns `(value, derivative)`
/// and `f(lo)`, `f(hi)` have opposite signs (or one of them is zero).
///
/// Newton steps that leave the current bracket or fail to halve it fall back to
/// bisection, so the iteration converges for any continuous `f`.
pub fn newton_bisect<F>(f: F, lo: f64, hi: f64, tol: RootTol) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Domain(format!(
            "no sign change on [{lo}, {hi}]: f = {flo}, {fhi}"
        )));
    }
    // orient so that f(lo) < 0 < f(hi)
    let flip = flo > 0.0;
    let g = |x: f64| {
        let (v, d) = f(x);
        if flip {
            (-v, -d)
        } else {
            (v, d)
        }
    };

    let mut x = 0.5 * (lo + hi);
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    let (mut fx, mut dfx) = g(x);
    for _ in 0..tol.max_iter {
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton_ok = dfx.is_finite()
            && dfx != 0.0
            && ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) < 0.0
            && (2.0 * fx).abs() <= (dx_old * dfx).abs();
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        let scale = x.abs().max(1e-300);
        if dx.abs() <= tol.x_tol * scale * 1e-3 || hi - lo <= 4.0 * f64::EPSILON * scale {
            return Ok(x);
        }
        let r = g(x);
        fx = r.0;
        dfx = r.1;
        if dx.abs() <= tol.x_tol * scale {
            // one more Newton step from here is quadratic; take it if it stays inside
            if dfx.is_finite() && dfx != 0.0 {
                let y = x - fx / dfx;
                if y > lo && y < hi {
                    return Ok(y);
                }
            }
            return Ok(x);
        }
    }
    Err(Error::NoConvergence { what: "root bracket", iterations: tol.max_iter })
}

/// Grows `hi` geometrically from `start` until `pred(hi)` holds.
pub(crate) fn expand_up(start: f64, pred: impl Fn(f64) -> bool) -> Option<f64> {
    let mut t = start;
    for _ in 0..2100 {
        if !t.is_finite() {
            return None;
        }
        if pred(t) {
            return Some(t);
        }
        t *= 2.0;
    }
    None
}

/// Shrinks `lo` geometrically from `start` until `pred(lo)` holds.
pub(crate) fn expand_down(start: f64, pred: impl Fn(f64) -> bool) -> Option<f64> {
    let mut t = start;
    for _ in 0..2100 {
        if t == 0.0 {
            return None;
        }
        if pred(t) {
            return Some(t);
        }
        t *= 0.5;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let r = newton_bisect(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, RootTol::default())
            .unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn survives_flat_derivative() {
        // triple root: Newton only converges linearly here
        let c = |x: f64| x - 0.5;
        let r = newton_bisect(|x| (c(x).powi(3), 3.0 * c(x).powi(2)), 0.0, 2.0, RootTol::default())
            .unwrap();
        assert!((r - 0.5).abs() < 1e-5);
    }

    #[test]
    fn decreasing_function() {
        let r = newton_bisect(|x| (1.0 - x.exp(), -x.exp()), -3.0, 5.0, RootTol::default())
            .unwrap();
        assert!(r.abs() < 1e-14);
    }

    #[test]
    fn rejects_no_sign_change() {
        assert!(newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, RootTol::default()).is_err());
    }

    #[test]
    fn tiny_scale_roots_keep_relative_accuracy() {
        let r0 = 3e-9;
        let r = newton_bisect(|x| (x - r0, 1.0), 0.0, 1.0, RootTol::default()).unwrap();
        assert!(((r - r0) / r0).abs() < 1e-12);
    }
}
