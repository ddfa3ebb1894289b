//! Spectral parameters of the free plate on a ball.
//!
//! The first nonzero eigenvalue is carried by `u = R(r) x_k / |x|` with
//! `R(r) = j1(a r) + gamma i1(b r)`, where `(Delta + a^2)(Delta - b^2) u = 0`
//! forces `b^2 - a^2 = tau` and `a^2 b^2 = lambda`. On the sphere of radius
//! `r0` the two natural boundary conditions reduce to
//!
//! ```text
//! R''(r0) = 0
//! tau R'(r0) - R'''(r0) + 3 (N-1) (R'(r0) / r0^2 - R(r0) / r0^3) = 0
//! ```
//!
//! The first fixes `gamma`; the second is a scalar equation in `a`, solved by
//! scanning for the first sign change and bisecting.

use crate::error::{Error, Result};
use crate::specfun::{Dimension, ScaledLadder, MAX_ARGUMENT};
use serde::{Deserialize, Serialize};

pub const MIN_TAU: f64 = 1e-2;
pub const MAX_TAU: f64 = 1e3;

/// Upper end of the scan in the scaled variable `a * r0`.
const SCAN_LIMIT: f64 = 30.0;
const SCAN_STEP: f64 = 0.05;
pub const DEFAULT_ROOT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    #[serde(rename = "dim")]
    pub dim: Dimension,
    pub tau: f64,
    /// Radius of the ball the parameters belong to (1 for the unit ball).
    pub radius: f64,
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub lambda2: f64,
}

/// Values of `j1(a r)` and `i1(b r)` with their first three `r`-derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialPair {
    pub(crate) j: [f64; 4],
    pub(crate) i: [f64; 4],
}

impl RadialPair {
    pub(crate) fn at(dim: Dimension, a: f64, b: f64, r: f64) -> Self {
        let lj = ScaledLadder::ordinary(dim, a * r);
        let li = ScaledLadder::modified(dim, b * r);
        let mut j = [0.0; 4];
        let mut i = [0.0; 4];
        let (mut sa, mut sb) = (1.0, 1.0);
        for k in 0..4u8 {
            j[k as usize] = sa * lj.derivative(a * r, k);
            i[k as usize] = sb * li.derivative(b * r, k);
            sa *= a;
            sb *= b;
        }
        Self { j, i }
    }
}

fn boundary_gamma(pair: &RadialPair) -> f64 {
    -pair.j[2] / pair.i[2]
}

/// Second boundary condition multiplied by `b^2 i1''(b r0) > 0`, which removes
/// `gamma` from the denominator without changing the sign.
fn boundary_residual(dim: Dimension, tau: f64, radius: f64, a: f64) -> f64 {
    let b = (a * a + tau).sqrt();
    let p = RadialPair::at(dim, a, b, radius);
    let n1 = dim.as_f64() - 1.0;
    let op = |f: &[f64; 4]| {
        tau * f[1] - f[3] + 3.0 * n1 * (f[1] / (radius * radius) - f[0] / radius.powi(3))
    };
    p.i[2] * op(&p.j) - p.j[2] * op(&p.i)
}

/// Parameters of the unit ball.
pub fn solve_ball_params(dim: Dimension, tau: f64) -> Result<SpectralParams> {
    solve_ball_params_with(dim, tau, 1.0, DEFAULT_ROOT_TOL)
}

/// Parameters of the ball of the given radius, bisecting to `root_tol` in `a`.
pub fn solve_ball_params_with(
    dim: Dimension,
    tau: f64,
    radius: f64,
    root_tol: f64,
) -> Result<SpectralParams> {
    if !(MIN_TAU..=MAX_TAU).contains(&tau) {
        return Err(Error::Domain(format!("tau = {tau} outside [{MIN_TAU}, {MAX_TAU}]")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("radius = {radius} must be positive")));
    }
    let residual = |a: f64| boundary_residual(dim, tau, radius, a);
    let upper = SCAN_LIMIT / radius;
    if ((upper * upper + tau).sqrt() * radius) > MAX_ARGUMENT {
        return Err(Error::Domain(format!("tau = {tau} too large for radius {radius}")));
    }

    let step = SCAN_STEP / radius;
    let mut lo = step;
    let mut f_lo = residual(lo);
    let mut bracket = None;
    while lo < upper {
        let hi = (lo + step).min(upper);
        let f_hi = residual(hi);
        if f_lo == 0.0 {
            bracket = Some((lo, lo));
            break;
        }
        if f_lo.signum() != f_hi.signum() {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::Bracketing { tau, upper })?;

    let sign_lo = residual(lo).signum();
    while hi - lo > root_tol * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if residual(mid).signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    let a = 0.5 * (lo + hi);
    let b = (a * a + tau).sqrt();
    let gamma = boundary_gamma(&RadialPair::at(dim, a, b, radius));
    Ok(SpectralParams { dim, tau, radius, a, b, gamma, lambda2: a * a * b * b })
}

/// `s^4 lambda`: the eigenvalue scaling `lambda(tau, Omega) = s^4 lambda(tau/s^2, s Omega)`.
pub fn rescale_lambda(lambda: f64, s: f64) -> f64 {
    debug_assert!(s > 0.0);
    s.powi(4) * lambda
}

impl SpectralParams {
    /// `R^(k)(r)` of the radial part inside the ball (`k <= 3`).
    pub fn radial(&self, r: f64, k: usize) -> f64 {
        let p = RadialPair::at(self.dim, self.a, self.b, r);
        p.j[k] + self.gamma * p.i[k]
    }

    /// `R''(r0)`, zero by construction of `gamma`.
    pub fn second_derivative_at_boundary(&self) -> f64 {
        self.radial(self.radius, 2)
    }

    /// The second natural boundary condition evaluated at the root.
    pub fn boundary_condition_residual(&self) -> f64 {
        let r0 = self.radius;
        let n1 = self.dim.as_f64() - 1.0;
        let (r, d1, d3) = (self.radial(r0, 0), self.radial(r0, 1), self.radial(r0, 3));
        self.tau * d1 - d3 + 3.0 * n1 * (d1 / (r0 * r0) - r / r0.powi(3))
    }
}
