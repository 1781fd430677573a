//! Variational toolkit for the critical Kirchhoff problem
//!
//! `-(a + b |grad u|_2^2) Lap u = lambda |u|^{q-2} u + mu |u|^{2*-2} u`, `u = 0` on the boundary,
//!
//! with energy `E(u) = a/2 A + b/4 A^2 - lambda/q B - mu/2* C`.
//!
//! - [`fibering`]: the scalar maps `t -> E(t u)` and their Nehari points.
//! - [`atlas`]: closed-form existence / nonexistence classification.
//! - [`constants`], [`grid`]: `sigma_1`, `S`, `S_q` and the radial discretisation.
//! - [`solver`]: minimisation over `N-` on a ball.
//! - [`nonexistence`]: sampled checks of the nonexistence inequalities.

pub mod atlas;
pub mod constants;
pub mod error;
pub mod fibering;
pub mod grid;
pub mod nonexistence;
pub mod params;
pub mod roots;
pub mod solver;

pub use atlas::{
    classify, region_map, tilde_b, Comparison, Criterion, DomainConstants, Provenance,
    RegionMap, RegionMapSpec, RegionPoint, RegionVerdict, Status,
};
pub use constants::{sigma1, sobolev_s, sobolev_sq};
pub use error::{Error, Result};
pub use fibering::{
    discriminant, fiber_derivative, fiber_energy, fiber_second_derivative, g_landmarks,
    nehari_points, threshold_f, threshold_g, CriticalKind, FiberCriticalPoint, FiberMap,
    GLandmarks, Threshold,
};
pub use grid::{RadialFunction, RadialGrid};
pub use nonexistence::{nonexistence_invariant_check, NonexistenceReport};
pub use params::{critical_exponent, FiberProfile, ProblemParams};
pub use solver::{
    bound_check, bubble, default_seed, minimize_nehari_minus, sup_fiber_energy, BoundCheck,
    SolveOptions, SolveReport,
};
