//! The ball eigenvalue against an exact-arithmetic Rayleigh–Ritz computation
//! of the reduced one-dimensional problem.
//!
//! For `u = R(r) x_k / |x|` the energy and mass integrate, over the angles,
//! to multiples of
//!
//! ```text
//! int_0^1 [R''^2 + 3(N-1)(R - rR')^2 / r^4 + tau (N-1) R^2 / r^2 + tau R'^2] r^(N-1) dr
//! int_0^1 R^2 r^(N-1) dr
//! ```
//!
//! With the basis `R = r^(2m+1)` every entry is a rational number, and the
//! smallest eigenvalue is located by counting negative pivots of `K - lambda M`
//! (Sylvester's law of inertia) under bisection, all in exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use plate_tone::ball::{rescale_lambda, solve_ball_params, solve_ball_params_with};
use plate_tone::specfun::Dimension;

const BASIS: usize = 14;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn matrices(n_dim: i64, tau: &BigRational) -> (Vec<Vec<BigRational>>, Vec<Vec<BigRational>>) {
    let n1 = n_dim - 1;
    let mut k = vec![vec![q(0); BASIS]; BASIS];
    let mut m = vec![vec![q(0); BASIS]; BASIS];
    for i in 0..BASIS as i64 {
        for j in 0..BASIS as i64 {
            let curvature = (2 * i + 1) * (2 * i) * (2 * j + 1) * (2 * j) + 12 * n1 * i * j;
            let mut e = q(0);
            if curvature != 0 {
                e += ratio(curvature, 2 * i + 2 * j + n_dim - 2);
            }
            e += tau * ratio(n1 + (2 * i + 1) * (2 * j + 1), 2 * i + 2 * j + n_dim);
            k[i as usize][j as usize] = e;
            m[i as usize][j as usize] = ratio(1, 2 * i + 2 * j + n_dim + 2);
        }
    }
    (k, m)
}

/// Number of eigenvalues of the pencil below `lambda`.
fn count_below(k: &[Vec<BigRational>], m: &[Vec<BigRational>], lambda: &BigRational) -> usize {
    let n = k.len();
    let mut a: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| &k[i][j] - lambda * &m[i][j]).collect()).collect();
    let mut negative = 0;
    for p in 0..n {
        let pivot = a[p][p].clone();
        assert!(!pivot.is_zero(), "exact zero pivot");
        if pivot.is_negative() {
            negative += 1;
        }
        for i in p + 1..n {
            let f = &a[i][p] / &pivot;
            for j in p + 1..n {
                let delta = &f * &a[p][j];
                a[i][j] -= delta;
            }
        }
    }
    negative
}

fn radial_ritz(n_dim: i64, tau: BigRational) -> f64 {
    let (k, m) = matrices(n_dim, &tau);
    let mut lo = q(0);
    // Start off the dyadic grid: lambda = tau (N + 2) zeroes the first pivot.
    let mut hi = q(3);
    while count_below(&k, &m, &hi) == 0 {
        hi *= q(2);
    }
    let half = ratio(1, 2);
    for _ in 0..56 {
        let mid = (&lo + &hi) * &half;
        if count_below(&k, &m, &mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((lo + hi) * half).to_f64().unwrap()
}

#[test]
fn pencil_is_definite_at_zero() {
    let (k, m) = matrices(2, &BigRational::one());
    assert_eq!(count_below(&k, &m, &q(0)), 0);
}

#[test]
fn ball_tone_matches_exact_radial_ritz() {
    let cases = [(1, 10), (1, 2), (1, 1), (10, 1)];
    for dim in [Dimension::Two, Dimension::Three] {
        for (num, den) in cases {
            let tau = num as f64 / den as f64;
            let oracle = radial_ritz(i64::from(dim.get()), ratio(num, den));
            let got = solve_ball_params(dim, tau).unwrap().lambda2;
            assert!(
                (got - oracle).abs() <= 1e-10 * oracle,
                "N = {}, tau = {tau}: {got} vs {oracle}",
                dim.get()
            );
        }
    }
}

#[test]
fn three_dimensional_unit_tau_within_spec_window() {
    let oracle = radial_ritz(3, q(1));
    let got = solve_ball_params(Dimension::Three, 1.0).unwrap().lambda2;
    assert!((got - oracle).abs() <= 1e-3 * oracle);
}

#[test]
fn scaling_law_through_radius() {
    // lambda(tau, B) = s^4 lambda(tau / s^2, s B)
    for dim in [Dimension::Two, Dimension::Three] {
        for s in [0.5, 2.0] {
            for tau in [0.5, 1.0, 10.0] {
                let unit = solve_ball_params(dim, tau).unwrap().lambda2;
                let big = solve_ball_params_with(dim, tau / (s * s), s, 1e-14).unwrap().lambda2;
                let back = rescale_lambda(big, s);
                assert!((back - unit).abs() <= 1e-9 * unit, "s = {s}: {back} vs {unit}");
            }
        }
    }
}
