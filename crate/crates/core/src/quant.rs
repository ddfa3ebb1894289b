//! The quantitative inequality `lambda2(Omega) <= lambda2(B) (1 - eta A^2)`,
//! the trial-function upper bound behind it, and the `eps^2` sharpness sweeps.

use crate::ball::{rescale_lambda, solve_ball_params};
use crate::domain::{OverlapData, StarDomain};
use crate::error::{Error, Result};
use crate::par;
use crate::profile::{eta_constant, RadialProfile};
use crate::quadrature::GaussLegendre;
use crate::solver::{disk_reference, fundamental_tone, Problem};
use crate::specfun::Dimension;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::fmt::Write;

/// Degree used for the domain tone in the inequality check.
pub const BOUND_DEGREE: usize = 20;
/// Absolute slack allowed in the ordering chain.
pub const CHAIN_BUDGET: f64 = 1e-6;
const TRIAL_RAYS: usize = 2048;
const TRIAL_NODES: usize = 24;
/// Relative quadrature budget added to the solver's own convergence estimate.
const QUADRATURE_BUDGET: f64 = 1e-9;

/// `int_Omega N[rho](|x - c|) dx / int_Omega rho(|x - c|)^2 dx`.
pub fn trial_upper_bound(d: &StarDomain, p: &RadialProfile, center: [f64; 2]) -> Result<f64> {
    let rule = GaussLegendre::new(TRIAL_NODES);
    let [num, den] = d.shifted_integral(center, 1.0, TRIAL_RAYS, &rule, |_, r| {
        let t = p.terms(r);
        [p.n_rho_from(&t, r), t.rho * t.rho]
    });
    let q = num / den;
    if !q.is_finite() {
        return Err(Error::Quadrature("trial quotient"));
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub tau: f64,
    pub area: f64,
    /// Dilation factor to measure `pi`.
    pub scale: f64,
    pub center: [f64; 2],
    pub lambda2_ball: f64,
    #[serde(rename = "A")]
    pub asymmetry: f64,
    pub alpha: f64,
    pub overlap: OverlapData,
    pub eta: f64,
    pub rhs: f64,
    pub lambda2_domain: f64,
    pub trial_bound: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// `lambda2(Omega) <= trial <= lambda2(B)` within `CHAIN_BUDGET`.
    pub chain_holds: bool,
}

/// Evaluates both sides of the inequality for `d`. Everything is computed on
/// the dilation of `d` with measure `pi` at the rescaled `tau` and mapped back
/// with the quartic scaling law.
pub fn theorem_bound(d: &StarDomain, tau: f64) -> Result<BoundReport> {
    let area = d.area();
    let (s, unit) = d.normalized()?;
    let scaled_tau = tau / (s * s);
    let profile = RadialProfile::for_ball(Dimension::Two, scaled_tau)?;
    let back = |v: f64| rescale_lambda(v, s);

    let lambda2_ball = back(profile.params.lambda2);
    let eta = eta_constant(Dimension::Two, tau, area)?;
    let asymmetry = unit.fraenkel().value;
    let center = unit.weinberger_center(&profile)?;
    let overlap = unit.overlap(center);
    let tone = fundamental_tone(&unit, scaled_tau, BOUND_DEGREE, Problem::Neumann)?;
    let lambda2_domain = back(tone.lambda2);
    let trial_bound = back(trial_upper_bound(&unit, &profile, center)?);

    let tolerance = back(tone.delta_prev.abs()) + QUADRATURE_BUDGET * lambda2_ball;
    let rhs = lambda2_ball * (1.0 - eta * asymmetry * asymmetry);
    let holds = lambda2_domain <= rhs + tolerance;
    let chain_holds = lambda2_domain <= trial_bound + CHAIN_BUDGET
        && trial_bound <= lambda2_ball + CHAIN_BUDGET;
    Ok(BoundReport {
        tau,
        area,
        scale: s,
        center,
        lambda2_ball,
        asymmetry,
        alpha: overlap.alpha,
        overlap,
        eta,
        rhs,
        lambda2_domain,
        trial_bound,
        tolerance,
        holds,
        chain_holds,
    })
}

/// A class-P domain with random modes in `3..=max_mode` and amplitude at
/// most `max_eps`, drawn from a seeded stream.
pub fn random_class_p_domain(rng: &mut ChaCha8Rng, max_mode: usize, max_eps: f64) -> Result<StarDomain> {
    let modes = rng.gen_range(1..=3);
    let mut cos = vec![0.0; max_mode + 1];
    let mut sin = vec![0.0; max_mode];
    for _ in 0..modes {
        let k = rng.gen_range(3..=max_mode);
        cos[k] += rng.gen_range(-1.0..1.0);
        sin[k - 1] += rng.gen_range(-1.0..1.0);
    }
    let sup = StarDomain::new(0.0, cos.clone(), sin.clone())?.sup_abs_psi();
    let unit = |v: Vec<f64>| v.into_iter().map(|c| c / sup).collect::<Vec<_>>();
    StarDomain::new(rng.gen_range(0.2 * max_eps..=max_eps), unit(cos), unit(sin))
}

/// Theorem checks on `count` seeded random class-P domains.
pub fn random_suite(count: usize, seed: u64, tau: f64) -> Result<Vec<(StarDomain, BoundReport)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domains: Vec<StarDomain> =
        (0..count).map(|_| random_class_p_domain(&mut rng, 8, 0.1)).collect::<Result<_>>()?;
    par::map_ordered(count, |i| theorem_bound(&domains[i], tau).map(|r| (domains[i].clone(), r)))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub area_gap: f64,
    pub asymmetry: f64,
    pub tone: f64,
    pub tone_gap: f64,
    pub tone_gap_over_eps2: f64,
    pub delta_prev: f64,
    /// Whether the point entered the slope fit.
    pub fitted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub problem: Problem,
    pub tau: f64,
    pub degree: usize,
    pub psi: StarDomain,
    pub reference: f64,
    pub eps_list: Vec<f64>,
    pub records: Vec<SweepRecord>,
    pub slope: f64,
    /// Smallest and largest `tone_gap / eps^2`.
    pub r_window: [f64; 2],
}

/// Sweeps `psi` over `eps_list`, measuring the area gap, the asymmetry and
/// the tone gap to the disk.
pub fn sharpness_sweep(
    psi: &StarDomain,
    eps_list: &[f64],
    tau: f64,
    problem: Problem,
    degree: usize,
) -> Result<SharpnessReport> {
    if let Some((mode, value)) = psi.class_p_violation() {
        return Err(Error::NotClassP { mode, value });
    }
    if eps_list.len() < 4 {
        return Err(Error::InvalidInput("a sweep needs at least four amplitudes".into()));
    }
    if let Some(e) = eps_list.iter().find(|e| !(**e > 0.0 && **e <= 0.15)) {
        return Err(Error::InvalidInput(format!("amplitude {e} outside (0, 0.15]")));
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(f64::total_cmp);
    let reference = match problem {
        Problem::Neumann => solve_ball_params(Dimension::Two, tau)?.lambda2,
        Problem::Steklov => disk_reference(tau, problem)?,
    };
    let records = par::map_ordered(eps_sorted.len(), |i| -> Result<SweepRecord> {
        let eps = eps_sorted[i];
        let d = psi.with_eps(eps)?;
        let tone = fundamental_tone(&d, tau, degree, problem)?;
        let tone_gap = (tone.lambda2 - reference).abs();
        Ok(SweepRecord {
            eps,
            area_gap: (d.area() - PI).abs(),
            asymmetry: d.fraenkel().value,
            tone: tone.lambda2,
            tone_gap,
            tone_gap_over_eps2: tone_gap / (eps * eps),
            delta_prev: tone.delta_prev,
            fitted: tone.delta_prev.abs() <= 0.1 * tone_gap,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let points: Vec<(f64, f64)> =
        records.iter().filter(|r| r.fitted).map(|r| (r.eps.ln(), r.tone_gap.ln())).collect();
    let slope = fit_slope(&points);
    let ratios = records.iter().map(|r| r.tone_gap_over_eps2);
    let r_window = [ratios.clone().fold(f64::INFINITY, f64::min), ratios.fold(0.0, f64::max)];
    Ok(SharpnessReport { problem, tau, degree, psi: psi.clone(), reference, eps_list: eps_sorted, records, slope, r_window })
}

/// Least-squares slope; NaN with fewer than two points.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

impl SharpnessReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,area_gap,asymmetry,tone,tone_gap,tone_gap_over_eps2\n");
        for r in &self.records {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                r.eps, r.area_gap, r.asymmetry, r.tone, r.tone_gap, r.tone_gap_over_eps2
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Boundary energy of one trial field against the two candidate shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicFit {
    /// Best `c` in `density ~ c (a . x)^2`.
    pub scale: f64,
    /// Largest deviation from `c (a . x)^2`.
    pub residual: f64,
    /// Best `c0 + c2 (a . x)^2`.
    pub affine: [f64; 2],
    /// Largest deviation from `c0 + c2 (a . x)^2`.
    pub affine_residual: f64,
}

const HARMONIC_GRID: usize = 720;

/// Samples `|D^2 u|^2 + tau |D u|^2` of `u = rho(|x|) (a . x) / |x|` on the
/// unit circle and fits it by `c (a . x)^2` and by `c0 + c2 (a . x)^2`.
pub fn harmonic_identity_check(p: &RadialProfile, direction: [f64; 2]) -> Result<HarmonicFit> {
    if p.dim() != Dimension::Two {
        return Err(Error::InvalidInput("the boundary fit is two-dimensional".into()));
    }
    let len = direction[0].hypot(direction[1]);
    if len.is_nan() || len <= 0.0 {
        return Err(Error::InvalidInput("direction must be nonzero".into()));
    }
    let a = [direction[0] / len, direction[1] / len];
    // The grid starts at the direction itself so results are rotation covariant.
    let phase = a[1].atan2(a[0]);
    let samples: Vec<(f64, f64)> = (0..HARMONIC_GRID)
        .map(|i| {
            let (s, c) = (phase + TAU * i as f64 / HARMONIC_GRID as f64).sin_cos();
            let ax = a[0] * c + a[1] * s;
            (ax * ax, p.mode_density(&a, &[c, s]))
        })
        .collect();

    let (sgg, sgf) = samples.iter().fold((0.0, 0.0), |(u, v), (g, f)| (u + g * g, v + g * f));
    let scale = sgf / sgg;
    let residual = samples.iter().map(|(g, f)| (f - scale * g).abs()).fold(0.0, f64::max);

    let n = samples.len() as f64;
    let mg = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mf = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let cov: f64 = samples.iter().map(|(g, f)| (g - mg) * (f - mf)).sum();
    let var: f64 = samples.iter().map(|(g, _)| (g - mg).powi(2)).sum();
    let c2 = cov / var;
    let c0 = mf - c2 * mg;
    let affine_residual =
        samples.iter().map(|(g, f)| (f - c0 - c2 * g).abs()).fold(0.0, f64::max);
    Ok(HarmonicFit { scale, residual, affine: [c0, c2], affine_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_trial_quotient_is_the_ball_eigenvalue() {
        let p = RadialProfile::for_ball(Dimension::Two, 1.0).unwrap();
        let q = trial_upper_bound(&StarDomain::unit_disk(), &p, [0.0, 0.0]).unwrap();
        assert!((q - p.params.lambda2).abs() <= 1e-8 * p.params.lambda2, "{q}");
    }

    #[test]
    fn slope_of_exact_power() {
        let pts: Vec<(f64, f64)> =
            [0.1f64, 0.2, 0.3].iter().map(|e| (e.ln(), (3.0 * e * e).ln())).collect();
        assert!((fit_slope(&pts) - 2.0).abs() < 1e-12);
        assert!(fit_slope(&pts[..1]).is_nan());
    }

    #[test]
    fn sweep_refuses_low_modes() {
        let d = StarDomain::single_mode(0.5, 1, false).unwrap();
        let err = sharpness_sweep(&d, &[0.02, 0.04, 0.06, 0.08], 1.0, Problem::Neumann, 12);
        assert!(matches!(err, Err(Error::NotClassP { mode: 1, .. })));
    }

    #[test]
    fn random_domains_are_class_p_and_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let d = random_class_p_domain(&mut rng, 8, 0.1).unwrap();
            assert!(d.is_class_p());
            assert!(d.max_mode() <= 8);
            assert!(d.eps() <= 0.1 && (d.sup_abs_psi() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_fit_is_direction_independent() {
        let p = RadialProfile::for_ball(Dimension::Two, 1.0).unwrap();
        let a = harmonic_identity_check(&p, [1.0, 0.0]).unwrap();
        let b = harmonic_identity_check(&p, [0.6, -0.8]).unwrap();
        assert!(a.scale > 0.0);
        assert!((a.residual - b.residual).abs() <= 1e-10 * a.scale);
        assert!(a.affine_residual <= 1e-10 * a.scale);
    }
}
