//! Closed-form existence / nonexistence classification of parameter points.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ProblemParams;

/// Relative distance below which two sides of an inequality count as equal.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Provenance {
    UserSupplied,
    ComputedBall { radius: f64 },
}

/// `sigma_1`, `S` and (for `q > 2`) `S_q` of the working domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainConstants {
    sigma1: f64,
    #[serde(rename = "S")]
    sobolev: f64,
    #[serde(rename = "Sq")]
    sq: Option<f64>,
    provenance: Provenance,
}

impl DomainConstants {
    pub fn new(sigma1: f64, sobolev: f64, sq: Option<f64>, provenance: Provenance) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(sigma1) || !ok(sobolev) || sq.is_some_and(|s| !ok(s)) {
            return Err(Error::InvalidParams(format!(
                "domain constants must be positive: sigma1 = {sigma1}, S = {sobolev}, Sq = {sq:?}"
            )));
        }
        Ok(Self { sigma1, sobolev, sq, provenance })
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }
    pub fn sobolev(&self) -> f64 {
        self.sobolev
    }
    pub fn sq(&self) -> Option<f64> {
        self.sq
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn require_sq(&self) -> Result<f64> {
        self.sq
            .ok_or_else(|| Error::InvalidParams("q > 2 needs the constant S_q".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Exists,
    NotExists,
    Unknown,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Exists => "Exists",
            Status::NotExists => "NotExists",
            Status::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Criterion {
    #[serde(rename = "THM14A")]
    Thm14a,
    #[serde(rename = "THM14B")]
    Thm14b,
    #[serde(rename = "D0D1")]
    D0D1,
    #[serde(rename = "D1D2D3")]
    D1D2D3,
    #[serde(rename = "NONEX_Q2")]
    NonexQ2,
    #[serde(rename = "NONEX_QGT2")]
    NonexQgt2,
    #[serde(rename = "COERCIVE_NONEX")]
    CoerciveNonex,
    #[serde(rename = "NONE")]
    None,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Thm14a => "THM14A",
            Criterion::Thm14b => "THM14B",
            Criterion::D0D1 => "D0D1",
            Criterion::D1D2D3 => "D1D2D3",
            Criterion::NonexQ2 => "NONEX_Q2",
            Criterion::NonexQgt2 => "NONEX_QGT2",
            Criterion::CoerciveNonex => "COERCIVE_NONEX",
            Criterion::None => "NONE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = ">")]
    Greater,
}

/// One inequality `lhs rel rhs` with its evaluated sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Truth {
    Holds,
    Boundary,
    Fails,
}

impl Comparison {
    fn new(name: &'static str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        Self { name, lhs, rhs, relation }
    }

    fn truth(&self) -> Truth {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if (self.lhs - self.rhs).abs() <= BOUNDARY_TOL * scale {
            return Truth::Boundary;
        }
        let holds = match self.relation {
            Relation::Less => self.lhs < self.rhs,
            Relation::Greater => self.lhs > self.rhs,
        };
        if holds {
            Truth::Holds
        } else {
            Truth::Fails
        }
    }

    /// Strictly satisfied, away from the boundary band.
    pub fn holds(&self) -> bool {
        self.truth() == Truth::Holds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub status: Status,
    pub criterion: Criterion,
    /// Conditions of the fired rule; the deciding inequality comes first.
    pub detail: Vec<Comparison>,
}

impl RegionVerdict {
    fn unknown() -> Self {
        Self { status: Status::Unknown, criterion: Criterion::None, detail: Vec::new() }
    }

    pub fn deciding(&self) -> Option<&Comparison> {
        self.detail.first()
    }
}

struct Rule {
    criterion: Criterion,
    conditions: Vec<Comparison>,
}

impl Rule {
    fn fires(&self) -> bool {
        self.conditions.iter().all(Comparison::holds)
    }
}

/// `b~(mu)` for `N = 4`, `2 < q < 4`.
///
/// Evaluated through the ratio `rho = lambda^{2/(q-2)} / (mu (a sigma_1)^{(4-q)/(q-2)})`
/// in log space so that extreme `mu` neither overflows nor cancels.
pub fn tilde_b(p: &ProblemParams, dc: &DomainConstants) -> Result<f64> {
    let q = p.q();
    if p.dim() != 4 || q <= 2.0 {
        return Err(Error::WrongBranch(format!(
            "b~ needs N = 4 and 2 < q < 4, got N = {}, q = {q}",
            p.dim()
        )));
    }
    let c = (q - 2.0) * (q - 2.0);
    let log_p = p.mu().ln() + (4.0 - q) / (q - 2.0) * (p.a() * dc.sigma1()).ln();
    let log_l = 2.0 / (q - 2.0) * p.lambda().ln();
    let log_rho = log_l - log_p;
    Ok(if log_rho <= 0.0 {
        let rho = log_rho.exp();
        c * (1.0 + rho) / (4.0 * rho + c)
    } else {
        let r = (-log_rho).exp();
        c * (r + 1.0) / (4.0 + c * r)
    })
}

fn s_half(p: &ProblemParams, dc: &DomainConstants) -> f64 {
    dc.sobolev().powf(p.dim() as f64 / 2.0)
}

/// `[8a / ((2*+2)(4-2*) mu)]^{2/(2*-2)}`, shared by (D0) and (D3).
fn d_bracket(p: &ProblemParams) -> f64 {
    let ts = p.two_star();
    (8.0 * p.a() / ((ts + 2.0) * (4.0 - ts) * p.mu())).powf(2.0 / (ts - 2.0))
}

/// (D0) for `N >= 5`, `q = 2`.
pub fn condition_d0(p: &ProblemParams, dc: &DomainConstants) -> Comparison {
    let ts = p.two_star();
    let n = p.dim() as f64;
    let theta = 1.0 - p.lambda() / (p.a() * dc.sigma1());
    let lhs = n * (ts - 2.0) * (ts - 2.0) * p.a() / (4.0 * ts * (4.0 - ts) * p.b()) * theta;
    let rhs = s_half(p, dc) * d_bracket(p);
    Comparison::new("D0", lhs, Relation::Greater, rhs)
}

/// (D1) for `N >= 5`.
pub fn condition_d1(p: &ProblemParams, dc: &DomainConstants) -> Comparison {
    let ts = p.two_star();
    let inner = (ts - 2.0) * p.mu() / (2.0 * p.b() * s_half(p, dc));
    let rhs = 0.5 * (4.0 - ts) * p.mu() * inner.powf((ts - 2.0) / (4.0 - ts));
    Comparison::new("D1", p.a(), Relation::Less, rhs)
}

/// (D2) for `N >= 5`, `q > 2`, as printed.
pub fn condition_d2(p: &ProblemParams, dc: &DomainConstants) -> Comparison {
    let ts = p.two_star();
    let q = p.q();
    let inner = (ts - 2.0) * (ts - q) * p.mu() / (2.0 * (4.0 - q) * p.b() * s_half(p, dc));
    let rhs = (4.0 - ts) * (ts + 2.0 - q) / (2.0 * (4.0 - q)) * inner.powf((ts - 2.0) / (4.0 - ts));
    Comparison::new("D2", p.a(), Relation::Less, rhs)
}

/// (D3) for `N >= 5`, `q > 2`.
pub fn condition_d3(p: &ProblemParams, dc: &DomainConstants) -> Comparison {
    let q = p.q();
    let n = p.dim() as f64;
    let lhs = 4.0 * q / (n * (q - 2.0)) * s_half(p, dc) * d_bracket(p);
    let rhs = (q - 2.0) * p.a() / ((4.0 - q) * p.b());
    Comparison::new("D3", lhs, Relation::Less, rhs)
}

fn lambda_below(p: &ProblemParams, dc: &DomainConstants) -> Comparison {
    Comparison::new("lambda < a sigma1", p.lambda(), Relation::Less, p.a() * dc.sigma1())
}

/// Sides of the `q = 2`, `N >= 5` nonexistence inequality.
pub fn nonexistence_q2(p: &ProblemParams, dc: &DomainConstants) -> Comparison {
    let ts = p.two_star();
    let theta = 1.0 - p.lambda() / (p.a() * dc.sigma1());
    let s_ts = dc.sobolev().powf(ts / 2.0);
    let lhs = p.a() * theta * (p.a() * s_ts / p.mu() * theta).powf(2.0 / (ts - 2.0));
    let rhs = (p.mu() / s_ts * p.b().powf(-ts / 4.0)).powf(4.0 / (4.0 - ts));
    Comparison::new("NONEX_Q2", lhs, Relation::Greater, rhs)
}

/// Right side of the `q > 2`, `N >= 5` nonexistence inequality `b >= threshold`.
pub fn nonexistence_qgt2_threshold(p: &ProblemParams, dc: &DomainConstants) -> Result<f64> {
    let sq = dc.require_sq()?;
    let ts = p.two_star();
    let q = p.q();
    let two_a = 2.0 / p.a();
    let t1 = (p.lambda() * sq.powf(-q / 2.0) * two_a.powf(4.0 - q)).powf(2.0 / (q - 2.0));
    let t2 = (p.mu() * dc.sobolev().powf(-ts / 2.0) * two_a.powf(4.0 - ts)).powf(2.0 / (ts - 2.0));
    Ok(t1 + t2)
}

fn rules(p: &ProblemParams, dc: &DomainConstants) -> Result<(Vec<Rule>, Vec<Rule>)> {
    let q = p.q();
    let s = dc.sobolev();
    let mut nonex = Vec::new();
    let mut ex = Vec::new();
    if p.dim() == 4 {
        let mu_vs = |rel| Comparison::new("mu vs b S^2", p.mu(), rel, p.b() * s * s);
        if q == 2.0 {
            nonex.push(Rule {
                criterion: Criterion::CoerciveNonex,
                conditions: vec![mu_vs(Relation::Less), lambda_below(p, dc)],
            });
            ex.push(Rule {
                criterion: Criterion::Thm14a,
                conditions: vec![mu_vs(Relation::Greater), lambda_below(p, dc)],
            });
        } else {
            let tb = tilde_b(p, dc)?;
            ex.push(Rule {
                criterion: Criterion::Thm14b,
                conditions: vec![
                    Comparison::new("b < b~(mu) mu S^-2", p.b(), Relation::Less, tb * p.mu() / (s * s)),
                    mu_vs(Relation::Greater),
                ],
            });
        }
    } else if q == 2.0 {
        nonex.push(Rule {
            criterion: Criterion::NonexQ2,
            conditions: vec![nonexistence_q2(p, dc), lambda_below(p, dc)],
        });
        ex.push(Rule {
            criterion: Criterion::D0D1,
            conditions: vec![condition_d1(p, dc), condition_d0(p, dc), lambda_below(p, dc)],
        });
    } else {
        let thr = nonexistence_qgt2_threshold(p, dc)?;
        nonex.push(Rule {
            criterion: Criterion::NonexQgt2,
            conditions: vec![Comparison::new("NONEX_QGT2", p.b(), Relation::Greater, thr)],
        });
        ex.push(Rule {
            criterion: Criterion::D1D2D3,
            conditions: vec![condition_d1(p, dc), condition_d2(p, dc), condition_d3(p, dc)],
        });
    }
    Ok((nonex, ex))
}

/// Applies every closed-form criterion to a parameter point.
///
/// Nonexistence rules are checked first; an existence rule firing as well is
/// reported as [`Error::Inconsistent`]. Points within [`BOUNDARY_TOL`] of any
/// deciding boundary are `Unknown`.
pub fn classify(p: &ProblemParams, dc: &DomainConstants) -> Result<RegionVerdict> {
    let (nonex, ex) = rules(p, dc)?;
    let fired_nonex = nonex.into_iter().find(Rule::fires);
    let fired_ex = ex.into_iter().find(Rule::fires);
    match (fired_nonex, fired_ex) {
        (Some(n), Some(e)) => Err(Error::Inconsistent {
            existence: e.criterion.as_str(),
            nonexistence: n.criterion.as_str(),
        }),
        (Some(n), None) => Ok(RegionVerdict {
            status: Status::NotExists,
            criterion: n.criterion,
            detail: n.conditions,
        }),
        (None, Some(e)) => Ok(RegionVerdict {
            status: Status::Exists,
            criterion: e.criterion,
            detail: e.conditions,
        }),
        (None, None) => Ok(RegionVerdict::unknown()),
    }
}

/// Rectangle and resolution of a `(b, mu)` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionMapSpec {
    pub b_range: (f64, f64),
    pub mu_range: (f64, f64),
    pub b_steps: usize,
    pub mu_steps: usize,
}

impl RegionMapSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo;
        if !ok(self.b_range) || !ok(self.mu_range) {
            return Err(Error::InvalidParams(format!(
                "ranges must be positive and increasing: b {:?}, mu {:?}",
                self.b_range, self.mu_range
            )));
        }
        if self.b_steps < 2 || self.mu_steps < 2 {
            return Err(Error::InvalidParams("resolution must be at least 2 per axis".into()));
        }
        Ok(())
    }

    fn axis((lo, hi): (f64, f64), steps: usize, i: usize) -> f64 {
        if i + 1 == steps {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (steps - 1) as f64
        }
    }

    pub fn b_at(&self, i: usize) -> f64 {
        Self::axis(self.b_range, self.b_steps, i)
    }

    pub fn mu_at(&self, j: usize) -> f64 {
        Self::axis(self.mu_range, self.mu_steps, j)
    }

    pub fn len(&self) -> usize {
        self.b_steps * self.mu_steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(b, mu)` of the `k`-th point in row-major order (rows are `mu`).
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.b_at(k % self.b_steps), self.mu_at(k / self.b_steps))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPoint {
    pub b: f64,
    pub mu: f64,
    pub verdict: RegionVerdict,
}

/// A labelled polyline in the `(b, mu)` plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Overlay {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMap {
    pub spec: RegionMapSpec,
    /// Row-major: `mu` varies slowest.
    pub points: Vec<RegionPoint>,
    pub overlays: Vec<Overlay>,
}

/// Classifies the point `k` of a sweep.
pub fn region_point(
    template: &ProblemParams,
    dc: &DomainConstants,
    spec: &RegionMapSpec,
    k: usize,
) -> Result<RegionPoint> {
    let (b, mu) = spec.point(k);
    let verdict = classify(&template.with_b_mu(b, mu)?, dc)?;
    Ok(RegionPoint { b, mu, verdict })
}

pub fn region_map(
    template: &ProblemParams,
    dc: &DomainConstants,
    spec: &RegionMapSpec,
) -> Result<RegionMap> {
    spec.validate()?;
    let points = (0..spec.len())
        .into_par_iter()
        .map(|k| region_point(template, dc, spec, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionMap { spec: *spec, points, overlays: overlays(template, dc, spec)? })
}

/// For `N = 4`, `2 < q < 4`: the curves `b = (q-2)^2/4 mu S^-2`,
/// `b = b~(mu) mu S^-2` and `b = mu S^-2`, sampled along the `mu` axis.
pub fn overlays(
    template: &ProblemParams,
    dc: &DomainConstants,
    spec: &RegionMapSpec,
) -> Result<Vec<Overlay>> {
    if template.dim() != 4 || template.q() <= 2.0 {
        return Ok(Vec::new());
    }
    let s2 = dc.sobolev() * dc.sobolev();
    let q = template.q();
    let samples = 200;
    let mus: Vec<f64> = (0..=samples)
        .map(|i| spec.mu_range.0 + (spec.mu_range.1 - spec.mu_range.0) * i as f64 / samples as f64)
        .collect();
    let line = |label: &str, f: &dyn Fn(f64) -> Result<f64>| -> Result<Overlay> {
        let points = mus.iter().map(|&m| Ok((f(m)?, m))).collect::<Result<Vec<_>>>()?;
        Ok(Overlay { label: label.to_string(), points })
    };
    Ok(vec![
        line("b = (q-2)^2/4 mu S^-2", &|m| Ok((q - 2.0).powi(2) / 4.0 * m / s2))?,
        line("b = b~(mu) mu S^-2", &|m| {
            Ok(tilde_b(&template.with_b_mu(template.b(), m)?, dc)? * m / s2)
        })?,
        line("b = mu S^-2", &|m| Ok(m / s2))?,
    ])
}
