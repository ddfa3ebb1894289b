//! WebAssembly bindings for the browser demo. Every entry point returns a
//! JSON string; the `*_json` functions hold the logic and run natively too.

use plate_tone::domain::StarDomain;
use plate_tone::profile::RadialProfile;
use plate_tone::quant::{sharpness_sweep, theorem_bound};
use plate_tone::solver::Problem;
use plate_tone::specfun::Dimension;
use plate_tone::SCHEMA;
use serde_json::json;
use std::f64::consts::TAU;
use wasm_bindgen::prelude::*;

/// Samples of the radial profile on `[0, PROFILE_EXTENT]`.
const PROFILE_SAMPLES: usize = 151;
const PROFILE_EXTENT: f64 = 1.5;
/// Points on the drawn boundary curve.
const OUTLINE_SAMPLES: usize = 360;
pub const SWEEP: [f64; 5] = [0.02, 0.04, 0.06, 0.08, 0.1];

fn text(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_problem(problem: &str) -> Result<Problem, String> {
    problem.parse().map_err(text)
}

/// Ball parameters plus the radial profile `rho` and its energy density.
pub fn ball_tone_json(dim: u32, tau: f64) -> Result<String, String> {
    let p = RadialProfile::for_ball(Dimension::new(dim).map_err(text)?, tau).map_err(text)?;
    let r: Vec<f64> =
        (0..PROFILE_SAMPLES).map(|i| PROFILE_EXTENT * i as f64 / (PROFILE_SAMPLES - 1) as f64).collect();
    let rho: Vec<f64> = r.iter().map(|&r| p.rho(r, 0)).collect();
    let density: Vec<f64> = r.iter().map(|&r| if r > 0.0 { p.n_rho(r) } else { f64::NAN }).collect();
    Ok(json!({
        "schema": SCHEMA,
        "params": p.params,
        "c1": p.c1_constant(),
        "c2": p.c2_constant(),
        "r": r,
        "rho": rho,
        "density": density,
    })
    .to_string())
}

/// Both sides of the quantitative inequality for one domain, with its outline.
/// `cos[k]` multiplies `cos(k theta)` and `sin[k]` multiplies `sin((k + 1) theta)`.
pub fn domain_bound_json(eps: f64, cos: Vec<f64>, sin: Vec<f64>, tau: f64) -> Result<String, String> {
    let d = StarDomain::new(eps, cos, sin).map_err(text)?;
    let report = theorem_bound(&d, tau).map_err(text)?;
    let outline: Vec<[f64; 2]> = (0..OUTLINE_SAMPLES)
        .map(|i| {
            let t = TAU * i as f64 / OUTLINE_SAMPLES as f64;
            let r = d.radius(t);
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let violation = d.class_p_violation().map(|(mode, value)| json!({ "mode": mode, "value": value }));
    Ok(json!({
        "schema": SCHEMA,
        "domain": d,
        "class_p_violation": violation,
        "report": report,
        "outline": outline,
    })
    .to_string())
}

/// Tone gap sweep of `cos(k theta)` over the fixed eps list.
pub fn sharpness_json(mode: usize, tau: f64, problem: &str, degree: usize) -> Result<String, String> {
    let psi = StarDomain::single_mode(0.0, mode, false).map_err(text)?;
    let rep = sharpness_sweep(&psi, &SWEEP, tau, parse_problem(problem)?, degree).map_err(text)?;
    Ok(json!({ "schema": SCHEMA, "report": rep, "csv": rep.to_csv() }).to_string())
}

#[wasm_bindgen]
pub fn ball_tone(dim: u32, tau: f64) -> Result<String, JsError> {
    ball_tone_json(dim, tau).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn domain_bound(eps: f64, cos: Vec<f64>, sin: Vec<f64>, tau: f64) -> Result<String, JsError> {
    domain_bound_json(eps, cos, sin, tau).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sharpness(mode: usize, tau: f64, problem: &str, degree: usize) -> Result<String, JsError> {
    sharpness_json(mode, tau, problem, degree).map_err(|e| JsError::new(&e))
}
