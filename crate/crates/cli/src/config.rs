//! TOML run configuration.

use std::path::Path;

use kirchhoff_core::{
    sobolev_s, DomainConstants, FiberProfile, ProblemParams, Provenance, RadialGrid,
    RegionMapSpec, SolveOptions,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: Option<ParamsConfig>,
    pub constants: Option<ConstantsConfig>,
    #[serde(default)]
    pub ball: BallConfig,
    pub fiber: Option<FiberConfig>,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub solve: SolveConfig,
    pub bubble: Option<BubbleConfig>,
}

/// Problem parameters. `lambda_sigma1` sets `lambda = lambda_sigma1 * sigma_1`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub a: f64,
    pub b: f64,
    pub lambda: Option<f64>,
    pub lambda_sigma1: Option<f64>,
    pub mu: f64,
    pub q: f64,
    #[serde(rename = "N")]
    pub dim: u32,
}

/// Constants of a domain other than the default ball; `S` defaults to the
/// closed form.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub sigma1: f64,
    #[serde(rename = "S")]
    pub sobolev: Option<f64>,
    #[serde(rename = "Sq")]
    pub sq: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallConfig {
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Used by `constants` when `[params]` is absent.
    #[serde(rename = "N")]
    pub dim: Option<u32>,
    pub q: Option<f64>,
}

impl Default for BallConfig {
    fn default() -> Self {
        Self { radius: 1.0, n: default_n(), dim: None, q: None }
    }
}

fn one() -> f64 {
    1.0
}

fn default_n() -> usize {
    4096
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberConfig {
    #[serde(rename = "A")]
    pub grad: f64,
    #[serde(rename = "B")]
    pub lower: f64,
    #[serde(rename = "C")]
    pub critical: f64,
    pub t_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    401
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub b_range: [f64; 2],
    pub mu_range: [f64; 2],
    pub b_steps: usize,
    pub mu_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seed {
    Default,
    Eigenfunction,
    Bubble,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    #[serde(default = "default_seed")]
    pub seed: Seed,
    pub residual_tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub energy_tol: Option<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { seed: Seed::Default, residual_tol: None, max_iterations: None, energy_tol: None }
    }
}

fn default_seed() -> Seed {
    Seed::Default
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BubbleConfig {
    #[serde(rename = "N")]
    pub dim: u32,
    pub q: f64,
    pub eps: Vec<f64>,
    pub cutoff: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    fn params_section(&self) -> Result<&ParamsConfig, CliError> {
        self.params.as_ref().ok_or_else(|| CliError::Config("missing [params] section".into()))
    }

    pub fn grid(&self, dim: u32) -> Result<std::sync::Arc<RadialGrid>, CliError> {
        Ok(RadialGrid::shared(self.ball.radius, self.ball.n, dim)?)
    }

    /// `[constants]` if present, otherwise computed on the `[ball]` grid.
    pub fn domain_constants(&self, dim: u32, q: f64) -> Result<DomainConstants, CliError> {
        match &self.constants {
            Some(c) => Ok(DomainConstants::new(
                c.sigma1,
                c.sobolev.unwrap_or_else(|| sobolev_s(dim)),
                c.sq,
                Provenance::UserSupplied,
            )?),
            None => Ok(DomainConstants::for_ball(&self.grid(dim)?, q)?),
        }
    }

    /// Validated parameters and the constants they were resolved against.
    pub fn problem(&self) -> Result<(ProblemParams, DomainConstants), CliError> {
        let pc = self.params_section()?;
        // catches invalid input before any constant is computed
        ProblemParams::new(pc.a, pc.b, pc.lambda.unwrap_or(1.0), pc.mu, pc.q, pc.dim)?;
        let dc = self.domain_constants(pc.dim, pc.q)?;
        Ok((self.resolve(pc, Some(&dc))?, dc))
    }

    /// Parameters that do not need domain constants.
    pub fn problem_only(&self) -> Result<ProblemParams, CliError> {
        let pc = self.params_section()?;
        if pc.lambda_sigma1.is_some() {
            let dc = self.domain_constants(pc.dim, pc.q)?;
            return self.resolve(pc, Some(&dc));
        }
        self.resolve(pc, None)
    }

    fn resolve(&self, pc: &ParamsConfig, dc: Option<&DomainConstants>) -> Result<ProblemParams, CliError> {
        let lambda = match (pc.lambda, pc.lambda_sigma1, dc) {
            (Some(l), None, _) => l,
            (None, Some(f), Some(dc)) => f * dc.sigma1(),
            (Some(_), Some(_), _) => {
                return Err(CliError::Config("give either lambda or lambda_sigma1, not both".into()))
            }
            _ => return Err(CliError::Config("missing lambda (or lambda_sigma1)".into())),
        };
        Ok(ProblemParams::new(pc.a, pc.b, lambda, pc.mu, pc.q, pc.dim)?)
    }

    pub fn fiber_profile(&self) -> Result<(FiberProfile, &FiberConfig), CliError> {
        let f = self.fiber.as_ref().ok_or_else(|| CliError::Config("missing [fiber] section".into()))?;
        if f.samples < 2 {
            return Err(CliError::Config("fiber.samples must be at least 2".into()));
        }
        Ok((FiberProfile::new(f.grad, f.lower, f.critical)?, f))
    }

    pub fn sweep_spec(&self) -> Result<RegionMapSpec, CliError> {
        let s = self.sweep.as_ref().ok_or_else(|| CliError::Config("missing [sweep] section".into()))?;
        let spec = RegionMapSpec {
            b_range: (s.b_range[0], s.b_range[1]),
            mu_range: (s.mu_range[0], s.mu_range[1]),
            b_steps: s.b_steps,
            mu_steps: s.mu_steps,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn solve_options(&self, force: bool) -> Result<SolveOptions, CliError> {
        let mut o = SolveOptions { force, ..SolveOptions::default() };
        if let Some(t) = self.solve.residual_tol {
            o.residual_tol = t;
        }
        if let Some(m) = self.solve.max_iterations {
            o.max_iterations = m;
        }
        if let Some(t) = self.solve.energy_tol {
            o.energy_tol = t;
        }
        if !(o.residual_tol > 0.0 && o.energy_tol >= 0.0) {
            return Err(CliError::Config("solve tolerances must be positive".into()));
        }
        Ok(o)
    }

    /// `(N, q)` for the `constants` command.
    pub fn constants_target(&self) -> Result<(u32, f64), CliError> {
        let dim = self.ball.dim.or(self.params.as_ref().map(|p| p.dim));
        let q = self.ball.q.or(self.params.as_ref().map(|p| p.q));
        match (dim, q) {
            (Some(d), Some(q)) if d >= 3 => Ok((d, q)),
            (Some(d), Some(_)) => Err(CliError::Config(format!("N must be >= 3, got {d}"))),
            _ => Err(CliError::Config("constants need N and q in [ball] or [params]".into())),
        }
    }
}
