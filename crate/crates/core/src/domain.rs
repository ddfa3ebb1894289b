//! Radially perturbed disks `{ |x| < 1 + eps psi(theta) }` with a
//! trigonometric-polynomial `psi`, their measures, asymmetry and centering.

use crate::error::{Error, Result};
use crate::par;
use crate::profile::RadialProfile;
use crate::quadrature::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Highest Fourier mode a domain may carry.
pub const MAX_MODE: usize = 64;
/// Angular resolution of positivity checks, sup norms and the exact-per-ray
/// symmetric difference.
pub const ANGULAR_GRID: usize = 4096;
/// Largest boundary deviation `sup |eps psi|` accepted by the centering.
pub const MAX_CENTERING_DEVIATION: f64 = 0.3;

const CENTER_RAYS: usize = 2048;
const CENTER_NODES: usize = 24;
const CENTER_TOL: f64 = 1e-12;
const CENTER_ITERATIONS: usize = 100;

/// Star domain about the origin. `cos[k]` multiplies `cos(k theta)` for
/// `k = 0..`, `sin[k]` multiplies `sin((k + 1) theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain")]
pub struct StarDomain {
    eps: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDomain {
    eps: f64,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

impl TryFrom<RawDomain> for StarDomain {
    type Error = Error;
    fn try_from(raw: RawDomain) -> Result<Self> {
        StarDomain::new(raw.eps, raw.cos, raw.sin)
    }
}

/// Result of the asymmetry minimisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymmetry {
    pub value: f64,
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapData {
    pub alpha: f64,
    pub r1: f64,
    pub r2: f64,
}

impl StarDomain {
    pub fn new(eps: f64, mut cos: Vec<f64>, mut sin: Vec<f64>) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidDomain(format!("eps = {eps} must be finite and >= 0")));
        }
        if cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::InvalidDomain("non-finite coefficient".into()));
        }
        while cos.last() == Some(&0.0) {
            cos.pop();
        }
        while sin.last() == Some(&0.0) {
            sin.pop();
        }
        if cos.len() > MAX_MODE + 1 || sin.len() > MAX_MODE {
            return Err(Error::InvalidDomain(format!("modes above {MAX_MODE} are not supported")));
        }
        let d = Self { eps, cos, sin };
        let worst = (0..ANGULAR_GRID)
            .map(|i| d.radius(TAU * i as f64 / ANGULAR_GRID as f64))
            .fold(f64::INFINITY, f64::min);
        if worst <= 0.0 {
            return Err(Error::InvalidDomain(format!("boundary radius reaches {worst}")));
        }
        Ok(d)
    }

    pub fn unit_disk() -> Self {
        Self { eps: 0.0, cos: Vec::new(), sin: Vec::new() }
    }

    /// `psi = cos(k theta)` or `sin(k theta)`.
    pub fn single_mode(eps: f64, k: usize, sine: bool) -> Result<Self> {
        if sine && k == 0 {
            return Err(Error::InvalidDomain("sin(0 theta) is not a mode".into()));
        }
        let (mut cos, mut sin) = (Vec::new(), Vec::new());
        if sine {
            sin.resize(k, 0.0);
            sin[k - 1] = 1.0;
        } else {
            cos.resize(k + 1, 0.0);
            cos[k] = 1.0;
        }
        Self::new(eps, cos, sin)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn cos_coefficients(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coefficients(&self) -> &[f64] {
        &self.sin
    }

    /// Highest mode with a nonzero coefficient.
    pub fn max_mode(&self) -> usize {
        self.cos.len().saturating_sub(1).max(self.sin.len())
    }

    /// The same `psi` at a different amplitude.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(eps, self.cos.clone(), self.sin.clone())
    }

    pub fn psi(&self, theta: f64) -> f64 {
        let c: f64 = self.cos.iter().enumerate().map(|(k, c)| c * (k as f64 * theta).cos()).sum();
        let s: f64 =
            self.sin.iter().enumerate().map(|(k, s)| s * ((k + 1) as f64 * theta).sin()).sum();
        c + s
    }

    pub fn psi_prime(&self, theta: f64) -> f64 {
        let c: f64 = self
            .cos
            .iter()
            .enumerate()
            .map(|(k, c)| -c * k as f64 * (k as f64 * theta).sin())
            .sum();
        let s: f64 = self
            .sin
            .iter()
            .enumerate()
            .map(|(k, s)| s * (k + 1) as f64 * ((k + 1) as f64 * theta).cos())
            .sum();
        c + s
    }

    /// Boundary radius `1 + eps psi(theta)`.
    pub fn radius(&self, theta: f64) -> f64 {
        1.0 + self.eps * self.psi(theta)
    }

    pub fn radius_prime(&self, theta: f64) -> f64 {
        self.eps * self.psi_prime(theta)
    }

    fn grid_max(&self, f: impl Fn(f64) -> f64) -> f64 {
        (0..ANGULAR_GRID)
            .map(|i| f(TAU * i as f64 / ANGULAR_GRID as f64))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_abs_psi(&self) -> f64 {
        self.grid_max(|t| self.psi(t).abs())
    }

    pub fn max_radius(&self) -> f64 {
        self.grid_max(|t| self.radius(t))
    }

    /// Zeroes the modes `k = 0, 1, 2`, leaving the rest untouched.
    pub fn project_to_p(&self) -> Self {
        let mut cos = self.cos.clone();
        let mut sin = self.sin.clone();
        cos.iter_mut().take(3).for_each(|c| *c = 0.0);
        sin.iter_mut().take(2).for_each(|c| *c = 0.0);
        Self::new(self.eps, cos, sin).expect("removing low modes keeps the domain valid")
    }

    /// First offending low mode, if any.
    pub fn class_p_violation(&self) -> Option<(usize, f64)> {
        let cos = self.cos.iter().take(3).enumerate().find(|(_, c)| **c != 0.0);
        let sin = self.sin.iter().take(2).enumerate().find(|(_, c)| **c != 0.0);
        cos.map(|(k, c)| (k, *c)).or_else(|| sin.map(|(k, c)| (k + 1, *c)))
    }

    pub fn is_class_p(&self) -> bool {
        self.class_p_violation().is_none()
    }

    /// `(1/2) int (1 + eps psi)^2 dtheta`, exact in the coefficients.
    pub fn area(&self) -> f64 {
        let c0 = self.cos.first().copied().unwrap_or(0.0);
        let higher: f64 = self.cos.iter().skip(1).chain(&self.sin).map(|c| c * c).sum();
        let psi_sq = TAU * c0 * c0 + PI * higher;
        PI + TAU * self.eps * c0 + 0.5 * self.eps * self.eps * psi_sq
    }

    /// The dilation `s Omega`, still written as `1 + eps' psi'`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!("scale factor {s} must be positive")));
        }
        if s == 1.0 {
            return Ok(self.clone());
        }
        let (eps, mut cos, sin) = if self.eps == 0.0 {
            (1.0, vec![0.0], Vec::new())
        } else {
            let times = |v: &[f64]| v.iter().map(|c| c * s).collect::<Vec<_>>();
            (self.eps, times(&self.cos), times(&self.sin))
        };
        if cos.is_empty() {
            cos.push(0.0);
        }
        cos[0] += (s - 1.0) / eps;
        Self::new(eps, cos, sin)
    }

    /// Scale factor to measure `pi`, and the rescaled domain.
    pub fn normalized(&self) -> Result<(f64, Self)> {
        let s = (PI / self.area()).sqrt();
        Ok((s, self.scaled(s)?))
    }

    /// `psi(theta + theta0)`.
    pub fn rotated(&self, theta0: f64) -> Self {
        let m = self.max_mode();
        let mut cos = vec![0.0; m + 1];
        let mut sin = vec![0.0; m];
        for k in 0..=m {
            let c = self.cos.get(k).copied().unwrap_or(0.0);
            let s = if k == 0 { 0.0 } else { self.sin.get(k - 1).copied().unwrap_or(0.0) };
            let (sk, ck) = (k as f64 * theta0).sin_cos();
            cos[k] = c * ck + s * sk;
            if k > 0 {
                sin[k - 1] = s * ck - c * sk;
            }
        }
        Self::new(self.eps, cos, sin).expect("rotation preserves validity")
    }

    /// `|Omega symmetric-difference B(center, radius)|`. Both sets meet each ray
    /// from the origin in an interval, so the radial integral is exact and only
    /// the angle is sampled.
    pub fn symdiff_with_ball(&self, center: [f64; 2], radius: f64) -> f64 {
        let h = TAU / ANGULAR_GRID as f64;
        let cc = center[0] * center[0] + center[1] * center[1];
        let total: f64 = (0..ANGULAR_GRID)
            .map(|i| {
                let theta = h * i as f64;
                let (s, c) = theta.sin_cos();
                let big_r = self.radius(theta);
                let ce = center[0] * c + center[1] * s;
                let disc = ce * ce - cc + radius * radius;
                let own = 0.5 * big_r * big_r;
                if disc <= 0.0 {
                    return own;
                }
                let root = disc.sqrt();
                let (t1, t2) = ((ce - root).max(0.0), (ce + root).max(0.0));
                let ball = 0.5 * (t2 * t2 - t1 * t1);
                let hi = t2.min(big_r);
                let common = if hi > t1 { 0.5 * (hi * hi - t1 * t1) } else { 0.0 };
                own + ball - 2.0 * common
            })
            .sum();
        h * total
    }

    /// Fraenkel asymmetry: the smallest `|Omega sym-diff B| / |Omega|` over
    /// balls of the same measure.
    pub fn fraenkel(&self) -> Asymmetry {
        let half = 2.0 * self.eps * self.sup_abs_psi().max(1.0);
        self.fraenkel_in_box([0.0, 0.0], half)
    }

    /// Asymmetry search over centres in the square `origin + [-half, half]^2`.
    pub fn fraenkel_in_box(&self, origin: [f64; 2], half: f64) -> Asymmetry {
        let area = self.area();
        let radius = (area / PI).sqrt();
        let objective = |c: [f64; 2]| self.symdiff_with_ball(c, radius) / area;
        if half == 0.0 {
            return Asymmetry { value: objective(origin), center: origin, radius };
        }
        const GRID: usize = 21;
        let step = 2.0 * half / (GRID - 1) as f64;
        let candidates: Vec<[f64; 2]> = (0..GRID * GRID)
            .map(|k| {
                let (i, j) = (k / GRID, k % GRID);
                [origin[0] - half + step * i as f64, origin[1] - half + step * j as f64]
            })
            .collect();
        let values = par::map_ordered(candidates.len(), |k| objective(candidates[k]));
        let best = (0..candidates.len())
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("grid is non-empty");
        let (center, value) = nelder_mead(objective, candidates[best], 0.5 * step, 1e-8);
        let (center, value) =
            if value <= values[best] { (center, value) } else { (candidates[best], values[best]) };
        Asymmetry { value, center, radius }
    }

    /// `alpha = |Omega sym-diff B(center, 1)| / |Omega|` and the radii with
    /// `1 - r1^2 = alpha / 2 = r2^2 - 1`.
    pub fn overlap(&self, center: [f64; 2]) -> OverlapData {
        let alpha = self.symdiff_with_ball(center, 1.0) / self.area();
        OverlapData { alpha, r1: (1.0 - 0.5 * alpha).sqrt(), r2: (1.0 + 0.5 * alpha).sqrt() }
    }

    /// `int_Omega f(x - c, |x - c|) dx` in polar coordinates about the origin,
    /// with every ray split where `|x - c| = split` so that integrands with a
    /// kink on that circle are integrated piecewise.
    pub(crate) fn shifted_integral<const K: usize>(
        &self,
        center: [f64; 2],
        split: f64,
        rays: usize,
        rule: &GaussLegendre,
        f: impl Fn([f64; 2], f64) -> [f64; K] + Sync,
    ) -> [f64; K] {
        const CHUNK: usize = 64;
        let h = TAU / rays as f64;
        let cc = center[0] * center[0] + center[1] * center[1];
        let partial = par::map_ordered(rays.div_ceil(CHUNK), |chunk| {
            let mut acc = [0.0; K];
            for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(rays) {
                let theta = h * i as f64;
                let (s, c) = theta.sin_cos();
                let big_r = self.radius(theta);
                let mut cuts = [0.0, big_r, big_r, big_r];
                let ce = center[0] * c + center[1] * s;
                let disc = ce * ce - cc + split * split;
                if disc > 0.0 {
                    let root = disc.sqrt();
                    for (slot, t) in [ce - root, ce + root].into_iter().enumerate() {
                        if t > 1e-14 && t < big_r - 1e-14 {
                            cuts[slot + 1] = t;
                        }
                    }
                    cuts[1..3].sort_by(f64::total_cmp);
                }
                for w in cuts.windows(2) {
                    if w[1] <= w[0] {
                        continue;
                    }
                    for (t, wt) in rule.mapped(w[0], w[1]) {
                        let y = [t * c - center[0], t * s - center[1]];
                        let r = y[0].hypot(y[1]);
                        let v = f(y, r);
                        for k in 0..K {
                            acc[k] += wt * t * v[k];
                        }
                    }
                }
            }
            acc
        });
        let mut total = [0.0; K];
        for p in partial {
            for k in 0..K {
                total[k] += h * p[k];
            }
        }
        total
    }

    /// `int_Omega u_k(x - c) dx` for `u_k(y) = rho(|y|) y_k / |y|`.
    pub fn first_moments(&self, p: &RadialProfile, center: [f64; 2]) -> [f64; 2] {
        let rule = GaussLegendre::new(CENTER_NODES);
        self.shifted_integral(center, 1.0, CENTER_RAYS, &rule, |y, r| {
            let f = p.terms(r).rho_over_r;
            [f * y[0], f * y[1]]
        })
    }

    /// The origin shift `c` for which both first moments of `u_k(x - c)` vanish,
    /// by damped Newton on the moment map.
    pub fn weinberger_center(&self, p: &RadialProfile) -> Result<[f64; 2]> {
        if (self.area() - PI).abs() > 1e-9 * PI {
            return Err(Error::InvalidDomain(format!(
                "centering needs measure pi, got {}",
                self.area()
            )));
        }
        let deviation = self.grid_max(|t| (self.radius(t) - 1.0).abs());
        if deviation > MAX_CENTERING_DEVIATION {
            return Err(Error::InvalidDomain(format!(
                "boundary deviation {deviation} exceeds {MAX_CENTERING_DEVIATION}"
            )));
        }
        let rule = GaussLegendre::new(CENTER_NODES);
        // Moments and the Jacobian dF_k/dc_j = -int (f delta_jk - lateral y_j y_k).
        let eval = |c: [f64; 2]| {
            self.shifted_integral(c, 1.0, CENTER_RAYS, &rule, |y, r| {
                let t = p.terms(r);
                let f = t.rho_over_r;
                [
                    f * y[0],
                    f * y[1],
                    -(f - t.lateral * y[0] * y[0]),
                    t.lateral * y[0] * y[1],
                    -(f - t.lateral * y[1] * y[1]),
                ]
            })
        };
        let norm = |v: &[f64; 5]| v[0].abs().max(v[1].abs());
        let mut c = [0.0, 0.0];
        let mut state = eval(c);
        for _ in 0..CENTER_ITERATIONS {
            if norm(&state) <= CENTER_TOL {
                return Ok(c);
            }
            let [f0, f1, j00, j01, j11] = state;
            let det = j00 * j11 - j01 * j01;
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let step = [-(j11 * f0 - j01 * f1) / det, -(j00 * f1 - j01 * f0) / det];
            let mut t = 1.0;
            loop {
                let trial = [c[0] + t * step[0], c[1] + t * step[1]];
                let next = eval(trial);
                if norm(&next) < norm(&state) || t < 1e-6 {
                    c = trial;
                    state = next;
                    break;
                }
                t *= 0.5;
            }
        }
        if norm(&state) <= 1e-10 {
            return Ok(c);
        }
        Err(Error::NoConvergence { what: "centering", iterations: CENTER_ITERATIONS })
    }
}

/// Nelder–Mead on a 2-D function, stopping when the simplex diameter drops
/// below `tol`.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64, tol: f64) -> ([f64; 2], f64) {
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut values = simplex.map(&f);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..2000 {
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let diameter = (1..3)
            .map(|i| (simplex[i][0] - simplex[0][0]).hypot(simplex[i][1] - simplex[0][1]))
            .fold(0.0, f64::max);
        if diameter < tol {
            break;
        }
        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            (simplex[2], values[2]) = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < values[1] {
            (simplex[2], values[2]) = (reflected, fr);
        } else {
            let contracted = lerp(centroid, simplex[2], 0.5);
            let fc = f(contracted);
            if fc < values[2] {
                (simplex[2], values[2]) = (contracted, fc);
            } else {
                for i in 1..3 {
                    simplex[i] = lerp(simplex[0], simplex[i], 0.5);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    (simplex[best], values[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::Dimension;

    #[test]
    fn projection_removes_low_modes() {
        let d = StarDomain::new(0.1, vec![0.0, 1.0], vec![]).unwrap();
        assert_eq!(d.project_to_p(), StarDomain::new(0.1, vec![], vec![]).unwrap());
        let d = StarDomain::single_mode(0.1, 3, false).unwrap();
        assert_eq!(d.project_to_p(), d);
        let d = StarDomain::new(0.1, vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0], vec![]).unwrap();
        assert_eq!(d.project_to_p(), StarDomain::single_mode(0.1, 5, false).unwrap());
    }

    #[test]
    fn class_p_conditions_vanish_by_quadrature() {
        let d = StarDomain::new(1.0, vec![0.0, 0.0, 0.0, 0.3, -0.2], vec![0.0, 0.0, 0.1]).unwrap();
        let n = 1024;
        let h = TAU / n as f64;
        let mut worst: f64 = 0.0;
        for a in [[1.0, 0.0], [0.6, 0.8]] {
            let (mut i0, mut i1, mut i2) = (0.0, 0.0, 0.0);
            for k in 0..n {
                let t = h * k as f64;
                let ax = a[0] * t.cos() + a[1] * t.sin();
                let psi = d.psi(t);
                i0 += h * psi;
                i1 += h * ax * psi;
                i2 += h * ax * ax * psi;
            }
            worst = worst.max(i0.abs()).max(i1.abs()).max(i2.abs());
        }
        assert!(worst <= 1e-12, "{worst:e}");
    }

    #[test]
    fn area_by_parseval() {
        assert_eq!(StarDomain::unit_disk().area(), PI);
        let d = StarDomain::single_mode(0.1, 3, false).unwrap();
        assert!((d.area() - PI * 1.005).abs() < 1e-14);
        let d = StarDomain::new(0.1, vec![0.0, 0.0, 0.0, 1.0, 1.0], vec![]).unwrap();
        assert!((d.area() - PI * 1.01).abs() < 1e-14);
    }

    #[test]
    fn normalisation_round_trip() {
        let d = StarDomain::new(0.07, vec![0.2, 0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, -0.5]).unwrap();
        let (_, n) = d.normalized().unwrap();
        assert!((n.area() - PI).abs() <= 1e-12 * PI);
        let (s, n) = StarDomain::unit_disk().scaled(2.0).map(|d| (2.0, d)).unwrap();
        assert!((n.area() - s * s * PI).abs() < 1e-12);
    }

    #[test]
    fn rotation_shifts_psi() {
        let d = StarDomain::new(0.1, vec![0.0, 0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 0.5]).unwrap();
        let r = d.rotated(0.3);
        for t in [0.0, 1.0, 2.5] {
            assert!((r.psi(t) - d.psi(t + 0.3)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_invalid_domains() {
        assert!(StarDomain::new(2.0, vec![0.0, 0.0, 0.0, 1.0], vec![]).is_err());
        assert!(StarDomain::new(0.1, vec![0.0; 70], vec![]).is_ok());
        assert!(StarDomain::new(0.1, vec![1.0; 70], vec![]).is_err());
        assert!(StarDomain::new(-0.1, vec![], vec![]).is_err());
    }

    #[test]
    fn json_field_names() {
        let d = StarDomain::single_mode(0.05, 3, false).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"eps":0.05,"cos":[0.0,0.0,0.0,1.0],"sin":[]}"#);
        let back: StarDomain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<StarDomain>(r#"{"eps":3,"cos":[0,0,0,1]}"#).is_err());
    }

    #[test]
    fn disk_symdiff_and_asymmetry_vanish() {
        let d = StarDomain::unit_disk();
        assert!(d.symdiff_with_ball([0.0, 0.0], 1.0).abs() < 1e-14);
        assert_eq!(d.fraenkel().value, d.symdiff_with_ball([0.0, 0.0], 1.0) / PI);
        let o = d.overlap([0.0, 0.0]);
        assert!(o.alpha.abs() < 1e-14 && (o.r1 - 1.0).abs() < 1e-14 && (o.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn disk_center_is_origin() {
        let p = RadialProfile::for_ball(Dimension::Two, 1.0).unwrap();
        let c = StarDomain::unit_disk().weinberger_center(&p).unwrap();
        assert_eq!(c, [0.0, 0.0]);
    }

    #[test]
    fn centering_rejects_unnormalised_domains() {
        let p = RadialProfile::for_ball(Dimension::Two, 1.0).unwrap();
        let d = StarDomain::single_mode(0.1, 3, false).unwrap();
        assert!(matches!(d.weinberger_center(&p), Err(Error::InvalidDomain(_))));
    }
}
