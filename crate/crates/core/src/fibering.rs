//! Fibering maps `T(t) = E(t u)` and the Nehari decomposition along a ray.
//!
//! With `A`, `B`, `C` the profile of `u`,
//! `T(t) = a A t^2 / 2 + b A^2 t^4 / 4 - lambda B t^q / q - mu C t^{2*} / 2*`
//! and `T'(t) = t phi(t)` where
//! `phi(t) = a A + b A^2 t^2 - lambda B t^{q-2} - mu C t^{2*-2}`.
//! Every positive critical point of `T` is a zero of `phi`; `phi` has at most one
//! interior minimum (its valley), so there are at most two such points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{FiberProfile, ProblemParams};
use crate::roots::{expand_down, expand_up, newton_bisect, RootTol};

/// Relative band inside which `T''` counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Position of a critical point in the Nehari decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriticalKind {
    /// `T'' < 0`: local maximum of the fiber.
    NehariMinus,
    /// `T'' > 0`: local minimum of the fiber.
    NehariPlus,
    /// `T''` vanishes within the degeneracy band.
    Degenerate,
}

impl CriticalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriticalKind::NehariMinus => "NehariMinus",
            CriticalKind::NehariPlus => "NehariPlus",
            CriticalKind::Degenerate => "Degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberCriticalPoint {
    pub t: f64,
    pub kind: CriticalKind,
    /// `T(t)`.
    pub energy: f64,
    /// `T''(t)`.
    pub curvature: f64,
}

/// Monomial coefficients of a fiber. `low` may be zero (used for the bubble
/// comparison function `g`).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Coeffs {
    pub grad: f64,
    pub kirch: f64,
    pub low: f64,
    pub crit: f64,
    pub q: f64,
    pub ts: f64,
    pub dim: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Valley(f64),
    Increasing,
    Decreasing,
    Constant,
}

impl Coeffs {
    pub fn new(p: &ProblemParams, f: &FiberProfile) -> Self {
        let a2 = f.grad() * f.grad();
        Self {
            grad: p.a() * f.grad(),
            kirch: p.b() * a2,
            low: p.lambda() * f.lower(),
            crit: p.mu() * f.critical(),
            q: p.q(),
            ts: p.two_star(),
            dim: p.dim(),
        }
    }

    pub fn energy(&self, t: f64) -> f64 {
        let t2 = t * t;
        0.5 * self.grad * t2 + 0.25 * self.kirch * t2 * t2
            - self.low / self.q * t.powf(self.q)
            - self.crit / self.ts * t.powf(self.ts)
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.grad + self.kirch * t * t - self.low * t.powf(self.q - 2.0)
            - self.crit * t.powf(self.ts - 2.0)
    }

    fn dphi(&self, t: f64) -> f64 {
        let low = if self.q == 2.0 {
            0.0
        } else {
            (self.q - 2.0) * self.low * t.powf(self.q - 3.0)
        };
        2.0 * self.kirch * t - low - (self.ts - 2.0) * self.crit * t.powf(self.ts - 3.0)
    }

    pub fn second(&self, t: f64) -> f64 {
        self.grad + 3.0 * self.kirch * t * t
            - (self.q - 1.0) * self.low * t.powf(self.q - 2.0)
            - (self.ts - 1.0) * self.crit * t.powf(self.ts - 2.0)
    }

    fn second_scale(&self, t: f64) -> f64 {
        self.grad
            + 3.0 * self.kirch * t * t
            + (self.q - 1.0) * self.low * t.powf(self.q - 2.0)
            + (self.ts - 1.0) * self.crit * t.powf(self.ts - 2.0)
    }

    fn phi_scale(&self, t: f64) -> f64 {
        self.grad
            + self.kirch * t * t
            + self.low * t.powf(self.q - 2.0)
            + self.crit * t.powf(self.ts - 2.0)
    }

    fn phi_at_zero(&self) -> f64 {
        if self.q == 2.0 {
            self.grad - self.low
        } else {
            self.grad
        }
    }

    fn phi_at_infinity_sign(&self) -> f64 {
        if self.dim >= 5 {
            return 1.0;
        }
        let kappa = self.kirch - self.crit;
        if kappa != 0.0 {
            kappa.signum()
        } else if self.q == 2.0 {
            (self.grad - self.low).signum()
        } else if self.low > 0.0 {
            -1.0
        } else {
            self.grad.signum()
        }
    }

    fn shape(&self) -> Result<Shape> {
        if self.dim == 4 {
            let kappa = self.kirch - self.crit;
            if self.q == 2.0 || self.low == 0.0 {
                return Ok(if kappa > 0.0 {
                    Shape::Increasing
                } else if kappa < 0.0 {
                    Shape::Decreasing
                } else {
                    Shape::Constant
                });
            }
            if kappa > 0.0 {
                let base = (self.q - 2.0) * self.low / (2.0 * kappa);
                return Ok(Shape::Valley(base.powf(1.0 / (4.0 - self.q))));
            }
            return Ok(Shape::Decreasing);
        }
        if self.q == 2.0 || self.low == 0.0 {
            let base = (self.ts - 2.0) * self.crit / (2.0 * self.kirch);
            return Ok(Shape::Valley(base.powf(1.0 / (4.0 - self.ts))));
        }
        let t0 = self.t_tilde_0();
        let rho = |t: f64| {
            (
                2.0 * self.kirch * t.powf(4.0 - self.q)
                    - (self.ts - 2.0) * self.crit * t.powf(self.ts - self.q)
                    - (self.q - 2.0) * self.low,
                2.0 * self.kirch * (4.0 - self.q) * t.powf(3.0 - self.q)
                    - (self.ts - 2.0) * (self.ts - self.q) * self.crit * t.powf(self.ts - self.q - 1.0),
            )
        };
        let hi = expand_up(2.0 * t0, |t| rho(t).0 > 0.0)
            .ok_or(Error::NoConvergence { what: "valley bracket", iterations: 2100 })?;
        let t1 = newton_bisect(rho, t0, hi, RootTol::default())?;
        Ok(Shape::Valley(t1))
    }

    /// Minimiser of `t -> b A^2 t^2 - lambda B t^{q-2} - mu C t^{2*-2}` scaled by
    /// `t^{2-q}`; only meaningful for `N >= 5`, `q > 2`.
    fn t_tilde_0(&self) -> f64 {
        let base = (self.ts - 2.0) * (self.ts - self.q) * self.crit
            / ((4.0 - self.q) * 2.0 * self.kirch);
        base.powf(1.0 / (4.0 - self.ts))
    }

    fn classify(&self, t: f64) -> FiberCriticalPoint {
        let curvature = self.second(t);
        let band = DEGENERACY_TOL * self.second_scale(t);
        let kind = if curvature.abs() <= band {
            CriticalKind::Degenerate
        } else if curvature < 0.0 {
            CriticalKind::NehariMinus
        } else {
            CriticalKind::NehariPlus
        };
        FiberCriticalPoint { t, kind, energy: self.energy(t), curvature }
    }

    fn solve_phi(&self, lo: f64, hi: f64) -> Result<f64> {
        newton_bisect(|t| (self.phi(t), self.dphi(t)), lo, hi, RootTol::default())
    }

    /// All zeros of `phi` on `(0, inf)`, ascending.
    pub fn critical_points(&self) -> Result<Vec<FiberCriticalPoint>> {
        let phi0 = self.phi_at_zero();
        let phi_inf = self.phi_at_infinity_sign();
        let mut ts = Vec::with_capacity(2);
        if self.dim == 4 && (self.q == 2.0 || self.low == 0.0) {
            // phi is c0 + kappa t^2
            let c0 = phi0;
            let kappa = self.kirch - self.crit;
            if c0 != 0.0 && kappa != 0.0 && c0.signum() != kappa.signum() {
                ts.push((-c0 / kappa).sqrt());
            }
            return Ok(ts.into_iter().map(|t| self.classify(t)).collect());
        }
        match self.shape()? {
            Shape::Valley(tm) => {
                let pm = self.phi(tm);
                if pm.abs() <= 16.0 * f64::EPSILON * self.phi_scale(tm) {
                    if phi0 > 0.0 || phi_inf > 0.0 {
                        ts.push(tm);
                    }
                } else if pm < 0.0 {
                    if phi0 > 0.0 {
                        let lo = expand_down(0.5 * tm, |t| self.phi(t) > 0.0)
                            .ok_or(Error::NoConvergence { what: "left bracket", iterations: 2100 })?;
                        ts.push(self.solve_phi(lo, tm)?);
                    }
                    if phi_inf > 0.0 {
                        let hi = expand_up(2.0 * tm, |t| self.phi(t) > 0.0)
                            .ok_or(Error::NoConvergence { what: "right bracket", iterations: 2100 })?;
                        ts.push(self.solve_phi(tm, hi)?);
                    }
                }
            }
            Shape::Decreasing => {
                if phi0 > 0.0 && phi_inf < 0.0 {
                    let hi = expand_up(1.0, |t| self.phi(t) < 0.0)
                        .ok_or(Error::NoConvergence { what: "right bracket", iterations: 2100 })?;
                    let lo = expand_down(0.5 * hi, |t| self.phi(t) > 0.0)
                        .ok_or(Error::NoConvergence { what: "left bracket", iterations: 2100 })?;
                    ts.push(self.solve_phi(lo, hi)?);
                }
            }
            Shape::Increasing => {
                if phi0 < 0.0 && phi_inf > 0.0 {
                    let hi = expand_up(1.0, |t| self.phi(t) > 0.0)
                        .ok_or(Error::NoConvergence { what: "right bracket", iterations: 2100 })?;
                    let lo = expand_down(0.5 * hi, |t| self.phi(t) < 0.0)
                        .ok_or(Error::NoConvergence { what: "left bracket", iterations: 2100 })?;
                    ts.push(self.solve_phi(lo, hi)?);
                }
            }
            Shape::Constant => {}
        }
        Ok(ts.into_iter().map(|t| self.classify(t)).collect())
    }
}

/// The fiber `t -> E(t u)` of a function with the given profile.
#[derive(Debug, Clone, Copy)]
pub struct FiberMap {
    params: ProblemParams,
    profile: FiberProfile,
    coeffs: Coeffs,
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("fiber evaluated at t = {t}")))
    }
}

impl FiberMap {
    pub fn new(params: &ProblemParams, profile: &FiberProfile) -> Self {
        Self { params: *params, profile: *profile, coeffs: Coeffs::new(params, profile) }
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn profile(&self) -> &FiberProfile {
        &self.profile
    }

    /// `T(t)` for `t >= 0`.
    pub fn energy(&self, t: f64) -> f64 {
        self.coeffs.energy(t)
    }

    /// `T'(t) = t phi(t)` for `t >= 0`.
    pub fn derivative(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            t * self.coeffs.phi(t)
        }
    }

    /// `T''(t)`. At `t = 0` this is the one-sided limit, which exists for every
    /// admissible `q`: `aA - lambda B` when `q = 2`, `aA` otherwise.
    pub fn second_derivative(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        if t == 0.0 {
            return Ok(self.coeffs.phi_at_zero());
        }
        Ok(self.coeffs.second(t))
    }

    /// `phi(t) = T'(t) / t`.
    pub fn reduced(&self, t: f64) -> f64 {
        if t == 0.0 {
            self.coeffs.phi_at_zero()
        } else {
            self.coeffs.phi(t)
        }
    }

    /// Positive critical points of the fiber in ascending order; at most two.
    pub fn nehari_points(&self) -> Result<Vec<FiberCriticalPoint>> {
        self.coeffs.critical_points()
    }

    /// The first `NehariMinus` point on the ray, if any.
    pub fn nehari_minus(&self) -> Result<Option<FiberCriticalPoint>> {
        Ok(self
            .nehari_points()?
            .into_iter()
            .find(|c| c.kind == CriticalKind::NehariMinus))
    }
}

pub fn fiber_energy(p: &ProblemParams, f: &FiberProfile, t: f64) -> f64 {
    FiberMap::new(p, f).energy(t)
}

pub fn fiber_derivative(p: &ProblemParams, f: &FiberProfile, t: f64) -> f64 {
    FiberMap::new(p, f).derivative(t)
}

pub fn fiber_second_derivative(p: &ProblemParams, f: &FiberProfile, t: f64) -> Result<f64> {
    FiberMap::new(p, f).second_derivative(t)
}

pub fn nehari_points(p: &ProblemParams, f: &FiberProfile) -> Result<Vec<FiberCriticalPoint>> {
    FiberMap::new(p, f).nehari_points()
}

/// Value of `phi` at its valley together with the valley location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub value: f64,
    pub t: f64,
}

/// `D(u)` for `N = 4`, `2 < q < 4`: the minimum of `phi`, attained at
/// `t0 = [(q-2) lambda B / (2 (b A^2 - mu C))]^{1/(4-q)}`.
pub fn discriminant(p: &ProblemParams, f: &FiberProfile) -> Result<Threshold> {
    if p.dim() != 4 || p.q() <= 2.0 {
        return Err(Error::WrongBranch(format!(
            "discriminant needs N = 4 and 2 < q < 4, got N = {}, q = {}",
            p.dim(),
            p.q()
        )));
    }
    let c = Coeffs::new(p, f);
    let kappa = c.kirch - c.crit;
    if kappa <= 0.0 {
        return Err(Error::Precondition(format!("b A^2 - mu C = {kappa} is not positive")));
    }
    let q = p.q();
    let base = (q - 2.0) * c.low / (2.0 * kappa);
    let t0 = base.powf(1.0 / (4.0 - q));
    let value = c.grad - 0.5 * (4.0 - q) * base.powf((q - 2.0) / (4.0 - q)) * c.low;
    Ok(Threshold { value, t: t0 })
}

/// `G(u)` for `N >= 5`, `q = 2`: the minimum of `phi`.
pub fn threshold_g(p: &ProblemParams, f: &FiberProfile) -> Result<Threshold> {
    if p.dim() < 5 || p.q() != 2.0 {
        return Err(Error::WrongBranch(format!(
            "G needs N >= 5 and q = 2, got N = {}, q = {}",
            p.dim(),
            p.q()
        )));
    }
    let c = Coeffs::new(p, f);
    let ts = c.ts;
    let base = (ts - 2.0) * c.crit / (2.0 * c.kirch);
    let t = base.powf(1.0 / (4.0 - ts));
    let value = c.grad - c.low - 0.5 * (4.0 - ts) * base.powf((ts - 2.0) / (4.0 - ts)) * c.crit;
    Ok(Threshold { value, t })
}

/// `F(u)` for `N >= 5`, `q > 2`: `phi` evaluated at `t~0`, an upper bound of its minimum.
pub fn threshold_f(p: &ProblemParams, f: &FiberProfile) -> Result<Threshold> {
    if p.dim() < 5 || p.q() <= 2.0 {
        return Err(Error::WrongBranch(format!(
            "F needs N >= 5 and q > 2, got N = {}, q = {}",
            p.dim(),
            p.q()
        )));
    }
    let c = Coeffs::new(p, f);
    let (q, ts) = (c.q, c.ts);
    let x = (ts - 2.0) * (ts - q) * c.crit / ((4.0 - q) * 2.0 * c.kirch);
    let t = x.powf(1.0 / (4.0 - ts));
    let value = c.grad
        - c.low * x.powf((q - 2.0) / (4.0 - ts))
        - (4.0 - ts) * (ts + 2.0 - q) / (2.0 * (4.0 - q)) * x.powf((ts - 2.0) / (4.0 - ts)) * c.crit;
    Ok(Threshold { value, t })
}

/// Landmarks of the bubble comparison function
/// `g(t) = a S^{N/2} t^2 / 2 + b S^N t^4 / 4 - mu S^{N/2} t^{2*} / 2*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GLandmarks {
    /// Local maximum of `g`.
    pub t2: f64,
    /// Minimiser of `g'(t)/t`.
    pub t3: f64,
    /// Local minimum of `g`.
    pub t4: f64,
    pub g_t2: f64,
}

/// The function `g` itself, for `N >= 5`.
pub fn g_function(p: &ProblemParams, sobolev: f64) -> impl Fn(f64) -> f64 {
    let c = g_coeffs(p, sobolev);
    move |t| c.energy(t)
}

fn g_coeffs(p: &ProblemParams, sobolev: f64) -> Coeffs {
    let s = sobolev.powf(p.dim() as f64 / 2.0);
    Coeffs {
        grad: p.a() * s,
        kirch: p.b() * s * s,
        low: 0.0,
        crit: p.mu() * s,
        q: 2.0,
        ts: p.two_star(),
        dim: p.dim(),
    }
}

pub fn g_landmarks(p: &ProblemParams, sobolev: f64) -> Result<GLandmarks> {
    if p.dim() < 5 {
        return Err(Error::WrongBranch(format!("g landmarks need N >= 5, got N = {}", p.dim())));
    }
    if !(sobolev.is_finite() && sobolev > 0.0) {
        return Err(Error::InvalidParams(format!("S must be positive, got {sobolev}")));
    }
    let c = g_coeffs(p, sobolev);
    let t3 = match c.shape()? {
        Shape::Valley(t) => t,
        _ => unreachable!("g has a valley for N >= 5"),
    };
    let min_value = c.phi(t3);
    if min_value >= 0.0 {
        return Err(Error::D1Violation { min_value, t3 });
    }
    let pts = c.critical_points()?;
    if pts.len() != 2 {
        return Err(Error::NoConvergence { what: "g critical points", iterations: 0 });
    }
    Ok(GLandmarks { t2: pts[0].t, t3, t4: pts[1].t, g_t2: pts[0].energy })
}
