//! Executes one command and collects its report files.

use crate::config::{CommandKind, RunConfig};
use crate::plot;
use plate_tone::ball::solve_ball_params;
use plate_tone::profile::{check_profile_properties, RadialProfile};
use plate_tone::quant::{random_suite, sharpness_sweep, theorem_bound};
use plate_tone::specfun::Dimension;
use plate_tone::SCHEMA;
use serde_json::{json, Value};

/// Tolerance on the natural boundary conditions at the computed root.
const BOUNDARY_TOL: f64 = 1e-8;
const SLOPE_WINDOW: (f64, f64) = (1.8, 2.2);
const AREA_GAP_TOL: f64 = 1e-9;

pub enum Failure {
    /// Rejected input; nothing was computed.
    Config(String),
    /// A numerical stage broke down.
    Numerical(String),
}

impl From<plate_tone::Error> for Failure {
    fn from(e: plate_tone::Error) -> Self {
        use plate_tone::Error::*;
        match e {
            Domain(_) | InvalidDomain(_) | NotClassP { .. } | InvalidInput(_) => Self::Config(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

/// A finished run: the JSON report, extra files and the violated invariants.
pub struct Outcome {
    pub report: Value,
    pub files: Vec<(String, String)>,
    pub violations: Vec<String>,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let command = cfg.command.ok_or_else(|| Failure::Config("no command given".into()))?;
    let (result, files, violations) = match command {
        CommandKind::BallTone => ball_tone(cfg)?,
        CommandKind::Properties => properties(cfg)?,
        CommandKind::Bound => bound(cfg)?,
        CommandKind::Asymmetry => asymmetry(cfg)?,
        CommandKind::Sharpness => sharpness(cfg)?,
    };
    let report = json!({
        "schema": SCHEMA,
        "command": command.name(),
        "config": cfg,
        "passed": violations.is_empty(),
        "violations": violations,
        "result": result,
    });
    Ok(Outcome { report, files, violations })
}

type Parts = (Value, Vec<(String, String)>, Vec<String>);

fn dimension(cfg: &RunConfig) -> Result<Dimension, Failure> {
    Ok(Dimension::new(cfg.dim)?)
}

fn ball_tone(cfg: &RunConfig) -> Result<Parts, Failure> {
    let p = solve_ball_params(dimension(cfg)?, cfg.tau)?;
    let second = p.second_derivative_at_boundary();
    let third = p.boundary_condition_residual();
    let mut v = Vec::new();
    if second.abs() > BOUNDARY_TOL || third.abs() > BOUNDARY_TOL * p.lambda2.max(1.0) {
        v.push(format!("boundary conditions violated: {second:e}, {third:e}"));
    }
    if (p.b * p.b - p.a * p.a - cfg.tau).abs() > 1e-12 * p.b * p.b {
        v.push("b^2 != a^2 + tau".into());
    }
    let mut result = serde_json::to_value(p).expect("serializable");
    result["boundary_residuals"] = json!([second, third]);
    Ok((result, Vec::new(), v))
}

fn properties(cfg: &RunConfig) -> Result<Parts, Failure> {
    let profile = RadialProfile::for_ball(dimension(cfg)?, cfg.tau)?;
    let checks = check_profile_properties(&profile);
    let v = checks.iter().filter(|c| !c.holds).map(|c| format!("property {} fails by {:e}", c.id, c.worst)).collect();
    Ok((json!({ "lambda2": profile.params.lambda2, "checks": checks }), Vec::new(), v))
}

fn bound(cfg: &RunConfig) -> Result<Parts, Failure> {
    let cases = match cfg.random {
        Some(n) => random_suite(n, cfg.seed, cfg.tau)?,
        None => {
            let d = cfg.domain().map_err(Failure::Config)?;
            let r = theorem_bound(&d, cfg.tau)?;
            vec![(d, r)]
        }
    };
    let v = cases
        .iter()
        .enumerate()
        .filter(|(_, (_, r))| !(r.holds && r.chain_holds))
        .map(|(i, (_, r))| format!("case {i}: holds = {}, chain = {}", r.holds, r.chain_holds))
        .collect();
    let list: Vec<Value> = cases.iter().map(|(d, r)| json!({ "domain": d, "report": r })).collect();
    let result = if cfg.random.is_some() { json!(list) } else { list[0].clone() };
    Ok((result, Vec::new(), v))
}

fn asymmetry(cfg: &RunConfig) -> Result<Parts, Failure> {
    let d = cfg.domain().map_err(Failure::Config)?;
    let a = d.fraenkel();
    let mut v = Vec::new();
    if !(0.0..=2.0).contains(&a.value) {
        v.push(format!("asymmetry {} outside [0, 2]", a.value));
    }
    let (s, normalized) = d.normalized()?;
    let result = json!({
        "domain": d,
        "area": d.area(),
        "asymmetry": a,
        "normalized_scale": s,
        "normalized_asymmetry": normalized.fraenkel().value,
    });
    Ok((result, Vec::new(), v))
}

fn sharpness(cfg: &RunConfig) -> Result<Parts, Failure> {
    let shape = cfg.shape().map_err(Failure::Config)?;
    let rep = sharpness_sweep(&shape, &cfg.eps, cfg.tau, cfg.problem, cfg.degree)?;
    let mut v = Vec::new();
    if !(SLOPE_WINDOW.0..=SLOPE_WINDOW.1).contains(&rep.slope) {
        v.push(format!("slope {} outside [{}, {}]", rep.slope, SLOPE_WINDOW.0, SLOPE_WINDOW.1));
    }
    // |Omega_eps| - pi = (pi / 2) eps^2 sum of squared coefficients, by Parseval.
    let norm2: f64 = shape.cos_coefficients().iter().chain(shape.sin_coefficients()).map(|c| c * c).sum();
    let area_c = std::f64::consts::FRAC_PI_2 * norm2;
    for r in &rep.records {
        if (r.area_gap - area_c * r.eps * r.eps).abs() > AREA_GAP_TOL * r.eps * r.eps {
            v.push(format!("area gap at eps = {} off the quadratic law", r.eps));
        }
    }
    let files = vec![
        ("sharpness.csv".to_string(), rep.to_csv()),
        ("sharpness.svg".to_string(), plot::log_log(&rep)),
    ];
    Ok((serde_json::to_value(&rep).expect("serializable"), files, v))
}
