//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

mod common;

use common::bessel::oracle;
use plate_tone::ball::{rescale_lambda, solve_ball_params, solve_ball_params_with};
use plate_tone::domain::StarDomain;
use plate_tone::profile::{check_profile_properties, RadialProfile};
use plate_tone::quant::{harmonic_identity_check, random_suite, sharpness_sweep, SharpnessReport};
use plate_tone::solver::{fundamental_tone, ritz_values, Problem};
use plate_tone::specfun::{bessel_i, bessel_j, ultra_i1, ultra_j1, BesselOrder, Dimension};
use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

const BESSEL_TOL: f64 = 1e-12;
const DERIVATIVE_TOL: f64 = 1e-6;
const BALL_TOL: f64 = 1e-3;
const MULTIPLICITY_TOL: f64 = 1e-6;
const SCALING_ANALYTIC_TOL: f64 = 1e-9;
const SCALING_SOLVER_TOL: f64 = 1e-5;
const AREA_GAP_TOL: f64 = 1e-9;
const ASYMMETRY_SPREAD: f64 = 1.1;
const SLOPE_WINDOW: (f64, f64) = (1.8, 2.2);
const GAP_RATIO_WINDOW: f64 = 2.0;
const HARMONIC_TOL: f64 = 1e-8;
const SEED: u64 = 42;
const SUITE_SIZE: usize = 20;
const SWEEP: [f64; 5] = [0.02, 0.04, 0.06, 0.08, 0.1];
const SOLVER_DEGREE: usize = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed <= budget;
    println!(
        "{} {id} {name}: {} ({:.1} s, budget {} s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn special_functions() -> Outcome {
    let mut worst_j: f64 = 0.0;
    let mut worst_i: f64 = 0.0;
    for twice_nu in [2u32, 3] {
        let nu = BesselOrder::new(f64::from(twice_nu) / 2.0).unwrap();
        for k in 0..=400 {
            let z = 0.125 * f64::from(k);
            worst_j = worst_j.max((bessel_j(nu, z).unwrap() - oracle(twice_nu, z, false)).abs());
            let oi = oracle(twice_nu, z, true);
            // I grows like e^z; the absolute bound applies up to |I| = 1.
            worst_i = worst_i.max((bessel_i(nu, z).unwrap() - oi).abs() / oi.abs().max(1.0));
        }
    }
    let h = 1e-5;
    let mut worst_d: f64 = 0.0;
    for dim in [Dimension::Two, Dimension::Three] {
        for k in 1..=3u8 {
            for i in 1..=200 {
                let z = 0.1 * f64::from(i);
                let fd_j = (ultra_j1(dim, z + h, k - 1).unwrap() - ultra_j1(dim, z - h, k - 1).unwrap()) / (2.0 * h);
                let fd_i = (ultra_i1(dim, z + h, k - 1).unwrap() - ultra_i1(dim, z - h, k - 1).unwrap()) / (2.0 * h);
                let di = ultra_i1(dim, z, k).unwrap();
                worst_d = worst_d.max((ultra_j1(dim, z, k).unwrap() - fd_j).abs());
                worst_d = worst_d.max((di - fd_i).abs() / di.abs().max(1.0));
            }
        }
    }
    Outcome {
        pass: worst_j <= BESSEL_TOL && worst_i <= BESSEL_TOL && worst_d <= DERIVATIVE_TOL,
        detail: format!("J err {worst_j:.1e}, I err {worst_i:.1e}, derivative err {worst_d:.1e}"),
    }
}

fn ball_cross_validation() -> Outcome {
    let disk = StarDomain::unit_disk();
    let mut worst_rel: f64 = 0.0;
    let mut worst_mult: f64 = 0.0;
    for tau in [0.5, 1.0, 10.0] {
        let exact = solve_ball_params(Dimension::Two, tau).unwrap().lambda2;
        let r = ritz_values(&disk, tau, SOLVER_DEGREE, Problem::Neumann).unwrap();
        worst_rel = worst_rel.max((r[0] - exact).abs() / exact);
        worst_mult = worst_mult.max((r[1] - r[0]).abs() / r[0]);
    }
    Outcome {
        pass: worst_rel <= BALL_TOL && worst_mult <= MULTIPLICITY_TOL,
        detail: format!("rel err {worst_rel:.1e}, multiplicity gap {worst_mult:.1e}"),
    }
}

fn profile_properties() -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for dim in [Dimension::Two, Dimension::Three] {
        for tau in [0.1, 1.0, 10.0] {
            for check in check_profile_properties(&RadialProfile::for_ball(dim, tau).unwrap()) {
                count += 1;
                if !check.holds {
                    failures.push(format!("N={} tau={tau} {}", dim.get(), check.id));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty() && count == 48,
        detail: if failures.is_empty() { format!("{count} checks hold") } else { failures.join("; ") },
    }
}

fn scaling_law() -> Outcome {
    let mut analytic: f64 = 0.0;
    for dim in [Dimension::Two, Dimension::Three] {
        for s in [0.5, 2.0] {
            let unit = solve_ball_params(dim, 1.0).unwrap().lambda2;
            let big = solve_ball_params_with(dim, 1.0 / (s * s), s, 1e-14).unwrap().lambda2;
            analytic = analytic.max((rescale_lambda(big, s) - unit).abs() / unit);
        }
    }
    let d = StarDomain::single_mode(0.05, 3, false).unwrap();
    let base = fundamental_tone(&d, 1.0, SOLVER_DEGREE, Problem::Neumann).unwrap().lambda2;
    let mut solver: f64 = 0.0;
    for s in [0.5, 2.0] {
        let t = fundamental_tone(&d.scaled(s).unwrap(), 1.0 / (s * s), SOLVER_DEGREE, Problem::Neumann).unwrap();
        solver = solver.max((rescale_lambda(t.lambda2, s) - base).abs() / base);
    }
    Outcome {
        pass: analytic <= SCALING_ANALYTIC_TOL && solver <= SCALING_SOLVER_TOL,
        detail: format!("analytic {analytic:.1e}, solver {solver:.1e}"),
    }
}

fn suite_json() -> String {
    let suite = random_suite(SUITE_SIZE, SEED, 1.0).unwrap();
    serde_json::to_string(&suite).unwrap()
}

fn inequality() -> Outcome {
    let suite = random_suite(SUITE_SIZE, SEED, 1.0).unwrap();
    let holds = suite.iter().filter(|(_, r)| r.holds).count();
    let chain = suite.iter().filter(|(_, r)| r.chain_holds).count();
    let margin = suite.iter().map(|(_, r)| r.rhs - r.lambda2_domain).fold(f64::INFINITY, f64::min);
    Outcome {
        pass: suite.len() == SUITE_SIZE && holds == SUITE_SIZE && chain == SUITE_SIZE,
        detail: format!("holds {holds}/{SUITE_SIZE}, chain {chain}/{SUITE_SIZE}, min rhs - lambda2 {margin:.3e}"),
    }
}

fn sweep(problem: Problem) -> SharpnessReport {
    let psi = StarDomain::single_mode(SWEEP[0], 3, false).unwrap();
    sharpness_sweep(&psi, &SWEEP, 1.0, problem, SOLVER_DEGREE).unwrap()
}

fn sharpness() -> Outcome {
    let neumann = sweep(Problem::Neumann);
    let steklov = sweep(Problem::Steklov);
    let area = neumann
        .records
        .iter()
        .map(|r| (r.area_gap / (r.eps * r.eps) - PI / 2.0).abs())
        .fold(0.0, f64::max);
    let ratios: Vec<f64> = neumann.records.iter().map(|r| r.asymmetry / r.eps).collect();
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let in_window = |s: f64| (SLOPE_WINDOW.0..=SLOPE_WINDOW.1).contains(&s);
    let gap_ratio = |r: &SharpnessReport| r.r_window[1] / r.r_window[0];
    let (gn, gs) = (gap_ratio(&neumann), gap_ratio(&steklov));
    let fitted = neumann.records.iter().chain(&steklov.records).filter(|r| r.fitted).count();
    Outcome {
        pass: area <= AREA_GAP_TOL
            && spread <= ASYMMETRY_SPREAD
            && in_window(neumann.slope)
            && in_window(steklov.slope)
            && gn <= GAP_RATIO_WINDOW
            && gs <= GAP_RATIO_WINDOW
            && fitted == 2 * SWEEP.len(),
        detail: format!(
            "area gap err {area:.1e}, asymmetry spread {spread:.3}, slopes {:.3}/{:.3}, gap ratios {gn:.3}/{gs:.3}",
            neumann.slope, steklov.slope
        ),
    }
}

fn harmonic_identity() -> Outcome {
    let p = RadialProfile::for_ball(Dimension::Two, 1.0).unwrap();
    let fits: Vec<_> = (0..8)
        .map(|k| {
            let t = TAU * k as f64 / 8.0 + 0.3;
            harmonic_identity_check(&p, [t.cos(), t.sin()]).unwrap()
        })
        .collect();
    let worst = fits.iter().map(|f| f.residual).fold(0.0, f64::max);
    let worst_affine = fits.iter().map(|f| f.affine_residual).fold(0.0, f64::max);
    let c0 = fits[0].affine[0];
    Outcome {
        pass: worst <= HARMONIC_TOL,
        detail: format!(
            "proportional residual {worst:.3e}; affine c0 + c2 (a.x)^2 residual {worst_affine:.1e} with c0 = {c0:.4}"
        ),
    }
}

fn determinism() -> Outcome {
    let a = suite_json();
    let b = suite_json();
    Outcome { pass: a == b, detail: format!("{} bytes, identical = {}", a.len(), a == b) }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "special functions", secs(5), special_functions),
        run(2, "ball cross-validation", secs(60), ball_cross_validation),
        run(3, "profile properties", secs(10), profile_properties),
        run(4, "scaling law", secs(60), scaling_law),
        run(5, "quantitative inequality", secs(900), inequality),
        run(6, "sharpness", secs(1200), sharpness),
        run(7, "harmonic identity", secs(5), harmonic_identity),
        run(8, "determinism", secs(1800), determinism),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
