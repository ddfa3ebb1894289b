//! Fundamental tones of the biharmonic free plate (Neumann) and Steklov
//! problems on balls and radially perturbed disks, together with the explicit
//! constants of the quantitative isoperimetric inequality for the free plate
//! and the machinery to test that inequality and its `eps^2` sharpness.
//!
//! Module map:
//!
//! * [`specfun`]: Bessel `J`, `I` and the ultraspherical `j1`, `i1`.
//! * [`ball`]: spectral parameters `(a, b, gamma, lambda2)` of the ball.
//! * [`profile`]: the radial profile `rho`, the energy density `N[rho]` and
//!   the constants `C1`, `C2`, `C3`, `c_N`, `eta`.
//! * [`domain`]: star-shaped perturbed disks, Fraenkel asymmetry, centering.
//! * [`solver`]: Rayleigh–Ritz on polynomial spaces for both problems.
//! * [`quant`]: the inequality report and the sharpness sweeps.

pub mod ball;
pub mod domain;
pub mod error;
mod par;
pub mod profile;
pub mod quadrature;
pub mod quant;
pub mod solver;
pub mod specfun;

pub use ball::{rescale_lambda, solve_ball_params, SpectralParams};
pub use domain::{OverlapData, StarDomain};
pub use error::{Error, Result};
pub use profile::RadialProfile;
pub use quant::{BoundReport, SharpnessReport};
pub use solver::{fundamental_tone, GalerkinSystem, Problem, ToneEstimate};
pub use specfun::{BesselOrder, Dimension};

/// Version tag written at the top of every JSON document.
pub const SCHEMA: &str = "plate-tone/1";
