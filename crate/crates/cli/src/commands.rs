use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use kirchhoff_core::atlas::{overlays, region_point};
use kirchhoff_core::{
    bubble as make_bubble, classify as classify_point, default_seed, minimize_nehari_minus,
    sigma1, sobolev_s, BoundCheck, Comparison, DomainConstants, FiberCriticalPoint, FiberMap,
    FiberProfile, ProblemParams, RegionMapSpec, RegionPoint, RegionVerdict, SolveOptions, Status,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, Seed};
use crate::output::{ensure_dir, log_log_slope, num, write_csv, write_json, SCHEMA_LINE};
use crate::{svg, CliError};

pub const VERDICT_COLUMNS: [&str; 6] = ["b", "mu", "status", "criterion", "lhs", "rhs"];

fn verdict_row(b: f64, mu: f64, v: &RegionVerdict) -> Vec<String> {
    let (lhs, rhs) = v.deciding().map_or((String::new(), String::new()), |c| (num(c.lhs), num(c.rhs)));
    vec![num(b), num(mu), v.status.as_str().into(), v.criterion.as_str().into(), lhs, rhs]
}

#[derive(Serialize)]
struct VerdictRecord<'a> {
    params: &'a ProblemParams,
    constants: &'a DomainConstants,
    status: Status,
    criterion: &'static str,
    deciding: Option<&'a Comparison>,
    detail: &'a [Comparison],
}

pub fn classify(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (p, dc) = cfg.problem()?;
    let v = classify_point(&p, &dc)?;
    ensure_dir(out)?;
    write_json(
        out,
        "verdict.json",
        &VerdictRecord {
            params: &p,
            constants: &dc,
            status: v.status,
            criterion: v.criterion.as_str(),
            deciding: v.deciding(),
            detail: &v.detail,
        },
    )?;
    write_csv(out, "verdict.csv", &VERDICT_COLUMNS, [verdict_row(p.b(), p.mu(), &v)])?;
    Ok(())
}

#[derive(Serialize)]
struct FiberRecord<'a> {
    params: &'a ProblemParams,
    profile: &'a FiberProfile,
    points: &'a [FiberCriticalPoint],
}

pub fn fiber(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let p = cfg.problem_only()?;
    let (f, fc) = cfg.fiber_profile()?;
    let fm = FiberMap::new(&p, &f);
    let points = fm.nehari_points()?;
    let t_max = match fc.t_max {
        Some(t) if t.is_finite() && t > 0.0 => t,
        Some(t) => return Err(CliError::Config(format!("fiber.t_max must be > 0, got {t}"))),
        None => 1.5 * points.iter().map(|c| c.t).fold(4.0 / 3.0, f64::max),
    };
    let n = fc.samples;
    let rows = (0..n)
        .map(|i| {
            let t = if i + 1 == n { t_max } else { t_max * i as f64 / (n - 1) as f64 };
            Ok(vec![num(t), num(fm.energy(t)), num(fm.derivative(t)), num(fm.second_derivative(t)?)])
        })
        .collect::<Result<Vec<_>, kirchhoff_core::Error>>()?;
    ensure_dir(out)?;
    write_csv(out, "fiber.csv", &["t", "T", "dT", "d2T"], rows)?;
    write_json(out, "critical_points.json", &FiberRecord { params: &p, profile: &f, points: &points })?;
    Ok(())
}

#[derive(Serialize)]
pub struct ConstantsRecord {
    #[serde(rename = "N")]
    pub dim: u32,
    #[serde(rename = "R")]
    pub radius: f64,
    pub n: usize,
    pub sigma1: f64,
    #[serde(rename = "S")]
    pub sobolev: f64,
    #[serde(rename = "Sq")]
    pub sq: Option<f64>,
    pub q: f64,
}

pub fn constants(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (dim, q) = cfg.constants_target()?;
    let grid = cfg.grid(dim)?;
    if !(q >= 2.0 && q < grid.two_star()) {
        return Err(CliError::Config(format!("q must lie in [2, 2*), got {q}")));
    }
    let dc = DomainConstants::for_ball(&grid, q)?;
    ensure_dir(out)?;
    write_json(
        out,
        "constants.json",
        &ConstantsRecord {
            dim,
            radius: grid.radius(),
            n: grid.len(),
            sigma1: dc.sigma1(),
            sobolev: dc.sobolev(),
            sq: dc.sq(),
            q,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct SolveRecord<'a> {
    params: &'a ProblemParams,
    constants: &'a DomainConstants,
    options: &'a SolveOptions,
    grid_n: usize,
    radius: f64,
    status: Status,
    criterion: &'static str,
    m_minus: f64,
    t_star: f64,
    residual: f64,
    nehari_residual: f64,
    curvature: f64,
    iterations: usize,
    #[serde(rename = "A")]
    grad: f64,
    #[serde(rename = "B")]
    lower: f64,
    #[serde(rename = "C")]
    critical: f64,
    bound_check: &'a BoundCheck,
}

#[derive(Serialize)]
struct SolveMeta {
    wall_time: f64,
}

pub fn solve(cfg: &RunConfig, out: &Path, force: bool) -> Result<(), CliError> {
    let (p, dc) = cfg.problem()?;
    let options = cfg.solve_options(force)?;
    let grid = cfg.grid(p.dim())?;
    let seed = match cfg.solve.seed {
        Seed::Default => default_seed(&grid)?,
        Seed::Eigenfunction => sigma1(&grid)?.1,
        Seed::Bubble => make_bubble(&grid, 0.1 * grid.radius(), 0.9 * grid.radius())?,
    };
    let r = minimize_nehari_minus(&p, &dc, &seed, &options)?;
    let f = r.minimizer.profile(p.q())?;
    ensure_dir(out)?;
    write_json(
        out,
        "solve_report.json",
        &SolveRecord {
            params: &p,
            constants: &dc,
            options: &options,
            grid_n: grid.len(),
            radius: grid.radius(),
            status: r.verdict.status,
            criterion: r.verdict.criterion.as_str(),
            m_minus: r.m_minus,
            t_star: r.t_star,
            residual: r.residual,
            nehari_residual: r.nehari_residual,
            curvature: r.curvature,
            iterations: r.iterations,
            grad: f.grad(),
            lower: f.lower(),
            critical: f.critical(),
            bound_check: &r.bound_check,
        },
    )?;
    let profile = grid
        .nodes()
        .iter()
        .zip(r.minimizer.values())
        .map(|(x, u)| vec![num(*x), num(*u)])
        .chain(std::iter::once(vec![num(grid.radius()), num(0.0)]));
    write_csv(out, "profile.csv", &["r", "u"], profile)?;
    write_csv(
        out,
        "energy_trace.csv",
        &["cycle", "energy"],
        r.energy_trace.iter().enumerate().map(|(k, e)| vec![k.to_string(), num(*e)]),
    )?;
    write_json(out, "solve_meta.json", &SolveMeta { wall_time: r.wall_time })?;
    Ok(())
}

/// Header comment identifying a sweep; a resumed file must carry the same one.
fn sweep_tag(p: &ProblemParams, dc: &DomainConstants, spec: &RegionMapSpec) -> String {
    format!(
        "# a={} lambda={} q={} N={} sigma1={} S={} Sq={} b_range={},{} mu_range={},{} steps={}x{}",
        num(p.a()),
        num(p.lambda()),
        num(p.q()),
        p.dim(),
        num(dc.sigma1()),
        num(dc.sobolev()),
        dc.sq().map_or("none".into(), num),
        num(spec.b_range.0),
        num(spec.b_range.1),
        num(spec.mu_range.0),
        num(spec.mu_range.1),
        spec.b_steps,
        spec.mu_steps
    )
}

const SWEEP_CHUNK: usize = 256;

/// Reads a partial sweep, dropping a trailing incomplete row. Returns the
/// statuses of the complete rows, or `None` if the header is incomplete.
fn read_partial(path: &Path, header: &[String], spec: &RegionMapSpec) -> Result<Option<Vec<Status>>, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let keep = bytes.iter().rposition(|c| *c == b'\n').map_or(0, |i| i + 1);
    if keep < bytes.len() {
        let f = OpenOptions::new().write(true).open(path).map_err(|e| CliError::io(path, e))?;
        f.set_len(keep as u64).map_err(|e| CliError::io(path, e))?;
    }
    let text = String::from_utf8_lossy(&bytes[..keep]);
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < header.len() {
        if lines.iter().zip(header).all(|(a, b)| a == b) {
            return Ok(None);
        }
        return Err(CliError::Config(format!("{} is not a sweep of this config", path.display())));
    }
    if lines[..header.len()].iter().zip(header).any(|(a, b)| a != b) {
        return Err(CliError::Config(format!("{} was written by a different sweep config", path.display())));
    }
    let mut statuses = Vec::new();
    for (k, line) in lines[header.len()..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let (b, mu) = spec.point(k);
        let status = match cols.get(2) {
            Some(&"Exists") => Status::Exists,
            Some(&"NotExists") => Status::NotExists,
            Some(&"Unknown") => Status::Unknown,
            _ => return Err(CliError::Config(format!("{}: malformed row {}", path.display(), k + 1))),
        };
        if k >= spec.len() || cols.len() != VERDICT_COLUMNS.len() || cols[0] != num(b) || cols[1] != num(mu) {
            return Err(CliError::Config(format!("{}: row {} does not match the sweep", path.display(), k + 1)));
        }
        statuses.push(status);
    }
    Ok(Some(statuses))
}

pub fn sweep(cfg: &RunConfig, out: &Path, jobs: Option<usize>, resume: bool) -> Result<(), CliError> {
    let (p, dc) = cfg.problem()?;
    let spec = cfg.sweep_spec()?;
    let overlays = overlays(&p, &dc, &spec)?;
    ensure_dir(out)?;
    let path = out.join("sweep.csv");
    let header = vec![SCHEMA_LINE.to_string(), sweep_tag(&p, &dc, &spec), VERDICT_COLUMNS.join(",")];
    let done = if resume && path.exists() { read_partial(&path, &header, &spec)? } else { None };
    let mut statuses = done.clone().unwrap_or_default();
    let mut file = if done.is_some() {
        OpenOptions::new().append(true).open(&path)
    } else {
        fs::File::create(&path)
    }
    .map_err(|e| CliError::io(&path, e))?;
    let io = |e| CliError::io(&path, e);
    if done.is_none() {
        for h in &header {
            writeln!(file, "{h}").map_err(io)?;
        }
        file.flush().map_err(io)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut k = statuses.len();
    while k < spec.len() {
        let end = (k + SWEEP_CHUNK).min(spec.len());
        let chunk: Vec<RegionPoint> = pool.install(|| {
            (k..end)
                .into_par_iter()
                .map(|i| region_point(&p, &dc, &spec, i))
                .collect::<Result<_, _>>()
        })?;
        for pt in chunk {
            let line = verdict_row(pt.b, pt.mu, &pt.verdict).join(",");
            writeln!(file, "{line}").map_err(io)?;
            file.flush().map_err(io)?;
            statuses.push(pt.verdict.status);
        }
        k = end;
    }
    let title = format!("N = {}, q = {}, a = {}, lambda = {}", p.dim(), num(p.q()), num(p.a()), num(p.lambda()));
    let svg_path = out.join("sweep.svg");
    fs::write(&svg_path, svg::render(&spec, &statuses, &overlays, &title)).map_err(|e| CliError::io(&svg_path, e))?;
    Ok(())
}

#[derive(Serialize)]
struct BubbleRecord {
    #[serde(rename = "N")]
    dim: u32,
    q: f64,
    n: usize,
    #[serde(rename = "R")]
    radius: f64,
    cutoff: f64,
    s_pow: f64,
    grad_gap_slope: f64,
    crit_gap_slope: f64,
    lq_slope: f64,
    expected_grad_gap_slope: f64,
    expected_crit_gap_slope: f64,
    expected_lq_slope: f64,
}

pub fn bubble(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let bc = cfg.bubble.as_ref().ok_or_else(|| CliError::Config("missing [bubble] section".into()))?;
    if bc.eps.len() < 2 {
        return Err(CliError::Config("bubble.eps needs at least two values".into()));
    }
    let grid = cfg.grid(bc.dim)?;
    let ts = grid.two_star();
    if !(bc.q >= 2.0 && bc.q < ts) {
        return Err(CliError::Config(format!("q must lie in [2, 2*), got {}", bc.q)));
    }
    let cutoff = bc.cutoff.unwrap_or(0.9 * grid.radius());
    let s_pow = sobolev_s(bc.dim).powf(bc.dim as f64 / 2.0);
    let mut rows = Vec::new();
    let (mut ga, mut gc, mut lq) = (Vec::new(), Vec::new(), Vec::new());
    for &e in &bc.eps {
        let w = make_bubble(&grid, e, cutoff)?;
        let (a_, c_, b_) = (w.grad_sq(), w.crit_pow(), w.lq_pow(bc.q));
        ga.push(a_ - s_pow);
        gc.push((c_ - s_pow).abs());
        lq.push(b_);
        rows.push(vec![num(e), num(a_), num(c_), num(b_), num(a_ - s_pow), num(c_ - s_pow)]);
    }
    let n = bc.dim as f64;
    ensure_dir(out)?;
    write_csv(out, "bubble.csv", &["eps", "A", "C", "Bq", "A_gap", "C_gap"], rows)?;
    write_json(
        out,
        "bubble.json",
        &BubbleRecord {
            dim: bc.dim,
            q: bc.q,
            n: grid.len(),
            radius: grid.radius(),
            cutoff,
            s_pow,
            grad_gap_slope: log_log_slope(&bc.eps, &ga),
            crit_gap_slope: log_log_slope(&bc.eps, &gc),
            lq_slope: log_log_slope(&bc.eps, &lq),
            expected_grad_gap_slope: n - 2.0,
            expected_crit_gap_slope: n,
            expected_lq_slope: n + bc.q - bc.q * n / 2.0,
        },
    )?;
    Ok(())
}
