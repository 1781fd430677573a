use serde::Serialize;

use crate::error::{Error, Result};

/// Coefficients of the Kirchhoff problem
/// `-(a + b|grad u|^2) Lap u = lambda |u|^{q-2} u + mu |u|^{2*-2} u` on a ball in `R^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    a: f64,
    b: f64,
    lambda: f64,
    mu: f64,
    q: f64,
    #[serde(rename = "N")]
    dim: u32,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Critical Sobolev exponent `2N/(N-2)`.
pub fn critical_exponent(dim: u32) -> f64 {
    2.0 * dim as f64 / (dim as f64 - 2.0)
}

impl ProblemParams {
    pub fn new(a: f64, b: f64, lambda: f64, mu: f64, q: f64, dim: u32) -> Result<Self> {
        if dim < 4 {
            return Err(Error::InvalidParams(format!("N must be >= 4, got {dim}")));
        }
        let two_star = critical_exponent(dim);
        if !(q.is_finite() && q >= 2.0 && q < two_star) {
            return Err(Error::InvalidParams(format!(
                "q must lie in [2, {two_star}) for N = {dim}, got {q}"
            )));
        }
        Ok(Self {
            a: positive("a", a)?,
            b: positive("b", b)?,
            lambda: positive("lambda", lambda)?,
            mu: positive("mu", mu)?,
            q,
            dim,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn dim(&self) -> u32 {
        self.dim
    }
    pub fn two_star(&self) -> f64 {
        critical_exponent(self.dim)
    }

    /// Same problem with new `b` and `mu`.
    pub fn with_b_mu(&self, b: f64, mu: f64) -> Result<Self> {
        Self::new(self.a, b, self.lambda, mu, self.q, self.dim)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.a, self.b, lambda, self.mu, self.q, self.dim)
    }
}

/// The three functionals a fiber depends on:
/// `A = |grad u|_2^2`, `B = |u|_q^q`, `C = |u|_{2*}^{2*}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberProfile {
    #[serde(rename = "A")]
    grad: f64,
    #[serde(rename = "B")]
    lower: f64,
    #[serde(rename = "C")]
    critical: f64,
}

impl FiberProfile {
    pub fn new(grad: f64, lower: f64, critical: f64) -> Result<Self> {
        Ok(Self {
            grad: positive("A", grad)?,
            lower: positive("B", lower)?,
            critical: positive("C", critical)?,
        })
    }

    pub fn grad(&self) -> f64 {
        self.grad
    }
    pub fn lower(&self) -> f64 {
        self.lower
    }
    pub fn critical(&self) -> f64 {
        self.critical
    }

    /// Profile of `s u` given the profile of `u`.
    pub fn scaled(&self, s: f64, q: f64, two_star: f64) -> Result<Self> {
        let s = positive("scale", s)?;
        Self::new(
            self.grad * s * s,
            self.lower * s.powf(q),
            self.critical * s.powf(two_star),
        )
    }
}
