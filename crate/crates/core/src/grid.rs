//! Finite-volume discretisation of radial `H^1_0` functions on a ball.
//!
//! Unknowns sit at `r_i = i h`, `i = 1..=n`, `h = R/(n+1)`; `u(R) = 0` and the
//! flux through `r = 0` vanishes (`u'(0) = 0`). The Dirichlet form is
//! `A(u) = sum_i k_i (u_{i+1} - u_i)^2` with `k_i = omega r_{i+1/2}^{N-1} / h`,
//! so the stiffness matrix factors as `K = G^T diag(k) G` with `G` the forward
//! difference. Mass weights are `w_i = omega h r_i^{N-1}`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::params::{critical_exponent, FiberProfile};

/// `Gamma(k/2)` for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "gamma_half(0) is a pole");
    let (mut g, mut x) = if k % 2 == 0 { (1.0, 1.0) } else { (std::f64::consts::PI.sqrt(), 0.5) };
    let target = k as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area `2 pi^{N/2} / Gamma(N/2)` of the unit sphere in `R^N`.
pub fn sphere_area(dim: u32) -> f64 {
    2.0 * std::f64::consts::PI.powf(dim as f64 / 2.0) / gamma_half(dim)
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    radius: f64,
    n: usize,
    dim: u32,
    h: f64,
    omega: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    flux: Vec<f64>,
}

impl RadialGrid {
    pub fn new(radius: f64, n: usize, dim: u32) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParams(format!("radius must be > 0, got {radius}")));
        }
        if n < 16 {
            return Err(Error::InvalidParams(format!("need at least 16 interior nodes, got {n}")));
        }
        if dim < 3 {
            return Err(Error::InvalidParams(format!("N must be >= 3, got {dim}")));
        }
        let h = radius / (n as f64 + 1.0);
        let omega = sphere_area(dim);
        let e = dim as i32 - 1;
        let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
        let weights = nodes.iter().map(|r| omega * h * r.powi(e)).collect();
        let flux = (1..=n).map(|i| omega / h * ((i as f64 + 0.5) * h).powi(e)).collect();
        Ok(Self { radius, n, dim, h, omega, nodes, weights, flux })
    }

    pub fn shared(radius: f64, n: usize, dim: u32) -> Result<Arc<Self>> {
        Self::new(radius, n, dim).map(Arc::new)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn dim(&self) -> u32 {
        self.dim
    }
    pub fn spacing(&self) -> f64 {
        self.h
    }
    pub fn surface_measure(&self) -> f64 {
        self.omega
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn two_star(&self) -> f64 {
        critical_exponent(self.dim)
    }

    /// `A(u) = u^T K u`, summed as squares of differences.
    pub fn dirichlet(&self, u: &[f64]) -> f64 {
        let n = self.n;
        compensated_sum((0..n).map(|i| {
            let next = if i + 1 < n { u[i + 1] } else { 0.0 };
            let d = next - u[i];
            self.flux[i] * d * d
        }))
    }

    /// `sum_i w_i |u_i|^p`.
    pub fn lp_pow(&self, u: &[f64], p: f64) -> f64 {
        if p == 2.0 {
            return compensated_sum(self.weights.iter().zip(u).map(|(w, x)| w * x * x));
        }
        compensated_sum(self.weights.iter().zip(u).map(|(w, x)| w * x.abs().powf(p)))
    }

    /// `K u`.
    pub fn stiffness_mul(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        let e: Vec<f64> = (0..n)
            .map(|i| {
                let next = if i + 1 < n { u[i + 1] } else { 0.0 };
                self.flux[i] * (next - u[i])
            })
            .collect();
        (0..n).map(|i| if i == 0 { -e[0] } else { e[i - 1] - e[i] }).collect()
    }

    /// `K^{-1} x` through the difference factorisation.
    pub fn stiffness_solve(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        // G^T y = x, then z = y / k, then G u = z
        let mut acc = 0.0;
        let z: Vec<f64> = (0..n)
            .map(|i| {
                acc -= x[i];
                acc / self.flux[i]
            })
            .collect();
        let mut u = vec![0.0; n];
        let mut next = 0.0;
        for i in (0..n).rev() {
            u[i] = next - z[i];
            next = u[i];
        }
        u
    }

    /// `x^T K^{-1} x`, the squared dual norm.
    pub fn dual_norm_sq(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        let mut s = 0.0;
        for i in 0..self.n {
            acc -= x[i];
            s += acc * acc / self.flux[i];
        }
        s
    }
}

/// Neumaier summation; the quadratures feed energy differences near roundoff.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in terms {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

/// A nonnegative radial function sampled at the interior nodes of a grid, with
/// cached `A` and `C` functionals.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    grad: f64,
    crit: f64,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParams(format!("values must be finite and >= 0, found {v}")));
        }
        let grad = grid.dirichlet(&values);
        let crit = grid.lp_pow(&values, grid.two_star());
        Ok(Self { grid, values, grad, crit })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    /// `|grad u|_2^2`.
    pub fn grad_sq(&self) -> f64 {
        self.grad
    }
    /// `|u|_{2*}^{2*}`.
    pub fn crit_pow(&self) -> f64 {
        self.crit
    }
    /// `|u|_q^q`.
    pub fn lq_pow(&self, q: f64) -> f64 {
        self.grid.lp_pow(&self.values, q)
    }

    pub fn profile(&self, q: f64) -> Result<FiberProfile> {
        FiberProfile::new(self.grad, self.lq_pow(q), self.crit)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|v| v * s).collect())
    }

    /// Replaces the values, recomputing the cache.
    pub fn set_values(&mut self, values: Vec<f64>) -> Result<()> {
        *self = Self::new(self.grid.clone(), values)?;
        Ok(())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}
