//! The radial profile `rho` built from the ball eigenfunction, the trial
//! fields `u_k(x) = rho(|x|) x_k / |x|`, their energy density `N[rho]`, and the
//! closed-form constants of the quantitative inequality.

use crate::ball::{solve_ball_params, SpectralParams};
use crate::error::{Error, Result};
use crate::quadrature::AdaptiveGaussLegendre;
use crate::specfun::{Dimension, ScaledLadder};
use serde::Serialize;

/// `rho(r) = R(r)` on `[0, 1)` and `R(1) + (r - 1) R'(1)` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialProfile {
    pub params: SpectralParams,
    /// `R(1)`
    pub r1: f64,
    /// `R'(1)`
    pub dr1: f64,
}

/// Everything `N[rho]` and the trial fields need at one radius. The quotients
/// are evaluated in regular form so they stay finite at `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTerms {
    pub rho: f64,
    pub d1: f64,
    pub d2: f64,
    /// `rho(r) / r`
    pub rho_over_r: f64,
    /// `(rho(r) - r rho'(r)) / r^3`
    pub lateral: f64,
}

impl RadialProfile {
    pub fn new(params: SpectralParams) -> Result<Self> {
        if params.radius != 1.0 {
            return Err(Error::InvalidInput(
                "the radial profile is built on the unit ball".into(),
            ));
        }
        Ok(Self { params, r1: params.radial(1.0, 0), dr1: params.radial(1.0, 1) })
    }

    /// Solves the unit-ball parameters and builds the profile.
    pub fn for_ball(dim: Dimension, tau: f64) -> Result<Self> {
        Self::new(solve_ball_params(dim, tau)?)
    }

    pub fn dim(&self) -> Dimension {
        self.params.dim
    }

    pub fn tau(&self) -> f64 {
        self.params.tau
    }

    pub fn terms(&self, r: f64) -> RadialTerms {
        if r >= 1.0 {
            let rho = self.r1 + (r - 1.0) * self.dr1;
            return RadialTerms {
                rho,
                d1: self.dr1,
                d2: 0.0,
                rho_over_r: rho / r,
                lateral: (self.r1 - self.dr1) / (r * r * r),
            };
        }
        let SpectralParams { dim, a, b, gamma, .. } = self.params;
        let (za, zb) = (a * r, b * r);
        let lj = ScaledLadder::ordinary(dim, za);
        let li = ScaledLadder::modified(dim, zb);
        RadialTerms {
            rho: lj.derivative(za, 0) + gamma * li.derivative(zb, 0),
            d1: a * lj.derivative(za, 1) + gamma * b * li.derivative(zb, 1),
            d2: a * a * lj.derivative(za, 2) + gamma * b * b * li.derivative(zb, 2),
            rho_over_r: a * lj.base() + gamma * b * li.base(),
            lateral: a.powi(3) * lj.lateral() + gamma * b.powi(3) * li.lateral(),
        }
    }

    /// `rho^(k)(r)` for `k <= 2`.
    pub fn rho(&self, r: f64, k: u8) -> f64 {
        let t = self.terms(r);
        match k {
            0 => t.rho,
            1 => t.d1,
            _ => t.d2,
        }
    }

    /// `N[rho](r) = rho''^2 + 3(N-1)(rho - r rho')^2 / r^4 + tau (N-1) rho^2 / r^2 + tau rho'^2`.
    pub fn n_rho(&self, r: f64) -> f64 {
        self.n_rho_from(&self.terms(r), r)
    }

    pub(crate) fn n_rho_from(&self, t: &RadialTerms, r: f64) -> f64 {
        let n1 = self.dim().as_f64() - 1.0;
        let tau = self.tau();
        let defect = t.lateral * r;
        t.d2 * t.d2
            + 3.0 * n1 * defect * defect
            + tau * n1 * t.rho_over_r * t.rho_over_r
            + tau * t.d1 * t.d1
    }

    /// `sum_k |D^2 u_k|^2 + tau |D u_k|^2` at a point `x != 0` of `R^N`,
    /// assembled from explicit Cartesian derivatives of each `u_k`.
    pub fn energy_density_cartesian(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let mut e = vec![0.0; n];
        (0..n)
            .map(|k| {
                e.fill(0.0);
                e[k] = 1.0;
                self.mode_density(&e, x)
            })
            .sum()
    }

    /// `|D^2 u|^2 + tau |D u|^2` for the single field `u(x) = rho(|x|) (a . x) / |x|`.
    pub fn mode_density(&self, a: &[f64], x: &[f64]) -> f64 {
        let n = x.len();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ax: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
        let t = self.terms(r);
        // u = f(r) (a . x) with f = rho / r; f'(r) / r = -lateral.
        let f = t.rho_over_r;
        let g = -t.lateral;
        // (f'' - f'/r) / r^2
        let h = (t.d2 / r + 3.0 * t.lateral) / (r * r);
        let mut total = 0.0;
        for i in 0..n {
            let grad = f * a[i] + g * x[i] * ax;
            total += self.tau() * grad * grad;
            for j in 0..n {
                let diag = if i == j { ax } else { 0.0 };
                let hess = g * (x[j] * a[i] + diag + x[i] * a[j]) + h * x[i] * x[j] * ax;
                total += hess * hess;
            }
        }
        total
    }

    /// `C1 = N omega_N int_0^1 rho^2 r^(N-1) dr`.
    pub fn c1_constant(&self) -> f64 {
        let dim = self.dim();
        let n = dim.as_f64();
        let e = dim.get() as i32 - 1;
        let integral = AdaptiveGaussLegendre::default().integrate(
            |r| {
                let rho = self.rho(r, 0);
                rho * rho * r.powi(e)
            },
            0.0,
            1.0,
            &[],
        );
        n * dim.unit_ball_volume() * integral
    }

    /// `(3 + tau)(R(1) - R'(1))^2 + 2 tau R'(1)(R(1) - R'(1))`.
    pub fn c2_bracket(&self) -> f64 {
        let defect = self.r1 - self.dr1;
        let tau = self.tau();
        (3.0 + tau) * defect * defect + 2.0 * tau * self.dr1 * defect
    }

    /// `C2 = N omega_N bracket c_N`.
    pub fn c2_constant(&self) -> f64 {
        self.c2_constant_with(cn_constant(self.dim().get()))
    }

    pub fn c2_constant_with(&self, c_n: f64) -> f64 {
        let dim = self.dim();
        dim.as_f64() * dim.unit_ball_volume() * self.c2_bracket() * c_n
    }

    /// `C3 = (1/2)(R(1) - R'(1))^2 (N-1) sigma (sigma (N-1)(sigma - 2) + N - 2)` for
    /// a plate with Poisson ratio `sigma in (-1/(N-1), 1)`.
    pub fn c3_constant(&self, sigma: f64) -> Result<f64> {
        let n1 = self.dim().as_f64() - 1.0;
        if !(sigma > -1.0 / n1 && sigma < 1.0) {
            return Err(Error::Domain(format!(
                "Poisson ratio {sigma} outside (-1/(N-1), 1)"
            )));
        }
        let defect = self.r1 - self.dr1;
        Ok(0.5 * defect * defect * n1 * sigma * (sigma * n1 * (sigma - 2.0) + n1 - 1.0))
    }
}

/// `c_N = (N-1) 2^((N-1)/N - 2) / (8 N^2)`.
pub fn cn_constant(n: u32) -> f64 {
    let nf = f64::from(n);
    (nf - 1.0) * 2f64.powf((nf - 1.0) / nf - 2.0) / (8.0 * nf * nf)
}

/// Ingredients of `eta` for a domain of the given volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaBreakdown {
    /// `s = (omega_N / volume)^(1/N)`
    pub scale: f64,
    /// `tau / s^2`, the parameter the unit-ball quantities are evaluated at.
    pub scaled_tau: f64,
    pub lambda2_ball: f64,
    pub c1: f64,
    pub c2: f64,
    pub eta: f64,
}

/// `eta = C2 / (lambda2(B) C1)` evaluated at `tau / s^2`.
pub fn eta_constant(dim: Dimension, tau: f64, volume: f64) -> Result<f64> {
    Ok(eta_breakdown(dim, tau, volume)?.eta)
}

pub fn eta_breakdown(dim: Dimension, tau: f64, volume: f64) -> Result<EtaBreakdown> {
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(Error::Domain(format!("volume {volume} must be positive")));
    }
    let scale = (dim.unit_ball_volume() / volume).powf(1.0 / dim.as_f64());
    let scaled_tau = tau / (scale * scale);
    let profile = RadialProfile::for_ball(dim, scaled_tau)?;
    let c1 = profile.c1_constant();
    let c2 = profile.c2_constant();
    let lambda2_ball = profile.params.lambda2;
    Ok(EtaBreakdown { scale, scaled_tau, lambda2_ball, c1, c2, eta: c2 / (lambda2_ball * c1) })
}

/// Outcome of one finite-grid check of the profile properties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub id: &'static str,
    pub statement: &'static str,
    pub holds: bool,
    /// Largest violation found (0 when the property holds with margin).
    pub worst: f64,
}

const GRID_STEP: f64 = 0.01;
const GRID_POINTS: usize = 500;

fn slack(v: f64) -> f64 {
    1e-12 * (1.0 + v.abs())
}

/// Runs the eight profile properties on the grid `r = 0.01, 0.02, ..., 5`.
pub fn check_profile_properties(p: &RadialProfile) -> Vec<PropertyCheck> {
    let grid: Vec<f64> = (1..=GRID_POINTS).map(|i| GRID_STEP * i as f64).collect();
    let terms: Vec<RadialTerms> = grid.iter().map(|&r| p.terms(r)).collect();
    let n_vals: Vec<f64> = grid.iter().zip(&terms).map(|(&r, t)| p.n_rho_from(t, r)).collect();
    let tau = p.tau();

    // A non-increasing sequence; returns the largest upward step beyond slack.
    let non_increasing = |vals: &[f64]| -> f64 {
        vals.windows(2)
            .map(|w| (w[1] - w[0] - slack(w[0])).max(0.0))
            .fold(0.0, f64::max)
    };

    let mut out = Vec::with_capacity(8);

    let concave = terms.iter().map(|t| (t.d2 - slack(t.d2)).max(0.0)).fold(0.0, f64::max);
    let d1: Vec<f64> = terms.iter().map(|t| t.d1).collect();
    let worst = concave.max(non_increasing(&d1));
    out.push(PropertyCheck {
        id: "i",
        statement: "rho'' <= 0 and rho' non-increasing",
        holds: worst == 0.0,
        worst,
    });

    let at_origin = p.terms(0.0);
    let worst = terms
        .iter()
        .map(|t| if t.lateral > 0.0 { 0.0 } else { -t.lateral })
        .fold(0.0, f64::max);
    let origin_defect = at_origin.rho.abs();
    out.push(PropertyCheck {
        id: "ii",
        statement: "rho - r rho' >= 0 with equality only at r = 0",
        holds: worst == 0.0 && terms.iter().all(|t| t.lateral > 0.0) && origin_defect == 0.0,
        worst: worst.max(origin_defect),
    });

    let squares: Vec<f64> = terms.iter().map(|t| t.rho * t.rho).collect();
    let worst = squares.windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max);
    out.push(PropertyCheck {
        id: "iii",
        statement: "rho^2 strictly increasing",
        holds: squares.windows(2).all(|w| w[1] > w[0]),
        worst,
    });

    let ratio: Vec<f64> = terms.iter().map(|t| t.rho_over_r * t.rho_over_r).collect();
    let worst = non_increasing(&ratio);
    out.push(PropertyCheck {
        id: "iv",
        statement: "rho^2 / r^2 non-increasing",
        holds: worst == 0.0,
        worst,
    });

    let mixed: Vec<f64> = grid
        .iter()
        .zip(&terms)
        .map(|(&r, t)| {
            let defect = t.lateral * r;
            3.0 * defect * defect + tau * t.rho_over_r * t.rho_over_r
        })
        .collect();
    let worst = non_increasing(&mixed);
    out.push(PropertyCheck {
        id: "v",
        statement: "3 (rho - r rho')^2 / r^4 + tau rho^2 / r^2 non-increasing",
        holds: worst == 0.0,
        worst,
    });

    let inner_min = grid
        .iter()
        .zip(&n_vals)
        .filter(|(&r, _)| r < 1.0)
        .map(|(_, &v)| v)
        .fold(p.n_rho(0.0), f64::min);
    let outer_max = grid
        .iter()
        .zip(&n_vals)
        .filter(|(&r, _)| r >= 1.0)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(PropertyCheck {
        id: "vi",
        statement: "N[rho](r1) > N[rho](r2) for r1 < 1 <= r2",
        holds: inner_min > outer_max,
        worst: (outer_max - inner_min).max(0.0),
    });

    // A direction off every coordinate axis.
    let direction: &[f64] = match p.dim() {
        Dimension::Two => &[0.6, 0.8],
        Dimension::Three => &[0.48, 0.64, 0.6],
    };
    let worst = grid
        .iter()
        .zip(&n_vals)
        .map(|(&r, &v)| {
            let x: Vec<f64> = direction.iter().map(|c| r * c).collect();
            (p.energy_density_cartesian(&x) - v).abs() / (1.0 + v.abs())
        })
        .fold(0.0, f64::max);
    out.push(PropertyCheck {
        id: "vii",
        statement: "N[rho] equals sum_k |D^2 u_k|^2 + tau |D u_k|^2",
        holds: worst <= 1e-10,
        worst,
    });

    let outer: Vec<f64> = grid
        .iter()
        .zip(&n_vals)
        .filter(|(&r, _)| r >= 1.0)
        .map(|(_, &v)| v)
        .collect();
    let worst = non_increasing(&outer);
    out.push(PropertyCheck {
        id: "viii",
        statement: "N[rho] non-increasing for r >= 1",
        holds: worst == 0.0,
        worst,
    });

    out
}
