//! Bessel functions of the first kind and the ultraspherical variants
//! `j1(z) = z^(1-N/2) J_{N/2}(z)` and `i1(z) = z^(1-N/2) I_{N/2}(z)`.
//!
//! Everything is built on the scaled functions `z^-nu J_nu(z)` and
//! `z^-nu I_nu(z)`, which are even entire power series in `z`. That keeps the
//! `z -> 0` limits regular and lets derivatives of `j1`/`i1` be written with
//! the recurrence `(z^-nu J_nu)' = -z * z^-(nu+1) J_{nu+1}` and the product
//! rule, with no division by `z`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Largest admissible argument.
pub const MAX_ARGUMENT: f64 = 200.0;

/// Below this argument the plain double series is accurate to a few ulps of
/// the largest term, which is itself of the order of the result.
const PLAIN_SERIES_LIMIT: f64 = 2.0;

/// Above this argument `J` uses the Hankel expansion, whose smallest term is
/// about `exp(-2z)`. The double-double series would still work a little
/// further out, but its peak term grows like `exp(z)` and by `z = 50` costs
/// three digits.
const SERIES_LIMIT: f64 = 20.0;

/// Order of a Bessel function, restricted to non-negative multiples of 1/2 so
/// that `Gamma(nu + 1)` is available in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BesselOrder {
    twice: u32,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        let twice = 2.0 * nu;
        if nu.is_nan() || nu < 0.0 || twice.fract() != 0.0 || twice > 200.0 {
            return Err(Error::Domain(format!(
                "Bessel order {nu} is not a non-negative multiple of 1/2"
            )));
        }
        Ok(Self { twice: twice as u32 })
    }

    /// Order `N/2` used by the ultraspherical functions in dimension `N`.
    pub fn for_dimension(dim: Dimension) -> Self {
        Self { twice: dim.get() }
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    fn shifted(self, by: u32) -> Self {
        Self { twice: self.twice + 2 * by }
    }

    /// `Gamma(nu + 1)`.
    fn gamma_plus_one(self) -> f64 {
        // Gamma(1) = 1, Gamma(3/2) = sqrt(pi)/2, then Gamma(x + 1) = x Gamma(x).
        let (mut x, mut g) = if self.twice.is_multiple_of(2) {
            (1.0, 1.0)
        } else {
            (1.5, PI.sqrt() / 2.0)
        };
        let target = self.value() + 1.0;
        while x < target - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Space dimension of the analytic ball machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        match n {
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            _ => Err(Error::Domain(format!("dimension {n} is not supported (2 or 3)"))),
        }
    }

    pub fn get(self) -> u32 {
        match self {
            Self::Two => 2,
            Self::Three => 3,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.get())
    }

    /// Lebesgue measure of the unit ball.
    pub fn unit_ball_volume(self) -> f64 {
        match self {
            Self::Two => PI,
            Self::Three => 4.0 * PI / 3.0,
        }
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.get()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// `J_nu`: alternating series.
    Ordinary,
    /// `I_nu`: positive series.
    Modified,
}

fn check_argument(z: f64) -> Result<()> {
    if !(0.0..=MAX_ARGUMENT).contains(&z) {
        return Err(Error::Domain(format!(
            "Bessel argument {z} outside [0, {MAX_ARGUMENT}]"
        )));
    }
    Ok(())
}

/// `J_nu(z)`.
pub fn bessel_j(nu: BesselOrder, z: f64) -> Result<f64> {
    check_argument(z)?;
    if z > SERIES_LIMIT {
        return Ok(hankel_j(nu.value(), z));
    }
    Ok(z.powf(nu.value()) * scaled_series(Kind::Ordinary, nu, z))
}

/// `I_nu(z)`.
pub fn bessel_i(nu: BesselOrder, z: f64) -> Result<f64> {
    check_argument(z)?;
    Ok(z.powf(nu.value()) * scaled_series(Kind::Modified, nu, z))
}

/// `z^-nu J_nu(z)`, regular at the origin where it equals `1 / (2^nu Gamma(nu+1))`.
pub fn scaled_bessel_j(nu: BesselOrder, z: f64) -> Result<f64> {
    check_argument(z)?;
    Ok(scaled_j_unchecked(nu, z))
}

/// `z^-nu I_nu(z)`.
pub fn scaled_bessel_i(nu: BesselOrder, z: f64) -> Result<f64> {
    check_argument(z)?;
    Ok(scaled_series(Kind::Modified, nu, z))
}

fn scaled_j_unchecked(nu: BesselOrder, z: f64) -> f64 {
    if z > SERIES_LIMIT {
        hankel_j(nu.value(), z) / z.powf(nu.value())
    } else {
        scaled_series(Kind::Ordinary, nu, z)
    }
}

/// Sum of `sum_m (+-z^2/4)^m / (2^nu m! Gamma(m + nu + 1))`.
fn scaled_series(kind: Kind, nu: BesselOrder, z: f64) -> f64 {
    let prefactor = 1.0 / (2f64.powf(nu.value()) * nu.gamma_plus_one());
    if z == 0.0 {
        return prefactor;
    }
    let sum = if kind == Kind::Modified || z <= PLAIN_SERIES_LIMIT {
        plain_series(kind, nu.value(), z)
    } else {
        dd_series(nu.value(), z)
    };
    prefactor * sum
}

/// Kahan-compensated sum of the normalised series `sum_m x^m / (m! (nu+1)_m)`.
fn plain_series(kind: Kind, nu: f64, z: f64) -> f64 {
    let x = match kind {
        Kind::Ordinary => -0.25 * z * z,
        Kind::Modified => 0.25 * z * z,
    };
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut carry = 0.0_f64;
    for m in 1..2000 {
        let m = f64::from(m);
        term *= x / (m * (m + nu));
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        if term.abs() <= 1e-18 * sum.abs() && m > 0.5 * z {
            break;
        }
    }
    sum
}

/// The alternating series for `J` summed in double-double arithmetic.
fn dd_series(nu: f64, z: f64) -> f64 {
    let x = DoubleDouble::from_product(z, z).scale(-0.25);
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    let mut peak = 1.0_f64;
    for m in 1..2000 {
        let m = f64::from(m);
        term = (term * x).div_f64(m * (m + nu));
        sum = sum + term;
        peak = peak.max(term.hi.abs());
        if term.hi.abs() <= 1e-34 * peak && m > 0.5 * z {
            break;
        }
    }
    sum.to_f64()
}

/// Hankel's large-argument expansion of `J_nu`. Terminates for half-integer
/// orders, where it reproduces the elementary closed forms.
fn hankel_j(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut coeff = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        let kf = f64::from(k);
        if k > 0 {
            let odd = 2.0 * kf - 1.0;
            coeff *= (mu - odd * odd) / (kf * 8.0 * z);
        }
        if coeff.abs() > last {
            break;
        }
        last = coeff.abs();
        match k % 4 {
            0 => p += coeff,
            1 => q += coeff,
            2 => p -= coeff,
            _ => q -= coeff,
        }
        if coeff == 0.0 || coeff.abs() < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
    }
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// The scaled functions `g_{nu+s}(z)`, `s = 0..=3`, needed for `k`-th
/// derivatives of `j1`/`i1` up to third order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledLadder {
    sign: f64,
    g: [f64; 4],
}

impl ScaledLadder {
    pub(crate) fn ordinary(dim: Dimension, z: f64) -> Self {
        let nu = BesselOrder::for_dimension(dim);
        let mut g = [0.0; 4];
        for (s, slot) in g.iter_mut().enumerate() {
            *slot = scaled_j_unchecked(nu.shifted(s as u32), z);
        }
        Self { sign: -1.0, g }
    }

    pub(crate) fn modified(dim: Dimension, z: f64) -> Self {
        let nu = BesselOrder::for_dimension(dim);
        let mut g = [0.0; 4];
        for (s, slot) in g.iter_mut().enumerate() {
            *slot = scaled_series(Kind::Modified, nu.shifted(s as u32), z);
        }
        Self { sign: 1.0, g }
    }

    /// `z^-nu F_nu(z)` for the base order.
    pub(crate) fn base(&self) -> f64 {
        self.g[0]
    }

    /// `+-z^-(nu+1) F_{nu+1}(z)`, signed so that `f(z) - z f'(z) = z^3 * lateral()`
    /// where `f` is `j1` or `i1`.
    pub(crate) fn lateral(&self) -> f64 {
        -self.sign * self.g[1]
    }

    /// `k`-th derivative of `z * g_nu(z)` at `z`.
    pub(crate) fn derivative(&self, z: f64, k: u8) -> f64 {
        let [g0, g1, g2, g3] = self.g;
        let s = self.sign;
        let z2 = z * z;
        match k {
            0 => z * g0,
            1 => g0 + s * z2 * g1,
            2 => z * (3.0 * s * g1 + z2 * g2),
            _ => 3.0 * s * g1 + 6.0 * z2 * g2 + s * z2 * z2 * g3,
        }
    }
}

fn check_derivative_order(k: u8) -> Result<()> {
    if k > 3 {
        return Err(Error::Domain(format!("derivative order {k} > 3")));
    }
    Ok(())
}

/// `d^k/dz^k j1(z)` for the ultraspherical Bessel function of order one.
pub fn ultra_j1(dim: Dimension, z: f64, k: u8) -> Result<f64> {
    check_argument(z)?;
    check_derivative_order(k)?;
    Ok(ScaledLadder::ordinary(dim, z).derivative(z, k))
}

/// `d^k/dz^k i1(z)` for the modified ultraspherical Bessel function of order one.
pub fn ultra_i1(dim: Dimension, z: f64, k: u8) -> Result<f64> {
    check_argument(z)?;
    check_derivative_order(k)?;
    Ok(ScaledLadder::modified(dim, z).derivative(z, k))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self { hi: s, lo: b - (s - a) }
    }

    fn from_product(a: f64, b: f64) -> Self {
        let p = a * b;
        Self { hi: p, lo: a.mul_add(b, -p) }
    }

    fn scale(self, s: f64) -> Self {
        // Only used with powers of two, which are exact.
        Self { hi: self.hi * s, lo: self.lo * s }
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = Self::from_product(q1, d);
        let r = Self::two_sum(self.hi, -p.hi);
        let rem = r.hi + (r.lo - p.lo + self.lo);
        let q2 = rem / d;
        Self::quick_two_sum(q1, q2)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for DoubleDouble {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let s = Self::two_sum(self.hi, rhs.hi);
        let t = Self::two_sum(self.lo, rhs.lo);
        let hi = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(hi.hi, hi.lo + t.lo)
    }
}

impl std::ops::Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let p = Self::from_product(self.hi, rhs.hi);
        let lo = p.lo + (self.hi * rhs.lo + self.lo * rhs.hi);
        Self::quick_two_sum(p.hi, lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(nu: f64) -> BesselOrder {
        BesselOrder::new(nu).unwrap()
    }

    #[test]
    fn zero_argument_values() {
        assert_eq!(bessel_j(order(1.0), 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(order(1.0), 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(order(0.0), 0.0).unwrap(), 1.0);
        assert_eq!(ultra_j1(Dimension::Two, 0.0, 0).unwrap(), 0.0);
        assert_eq!(ultra_i1(Dimension::Two, 0.0, 0).unwrap(), 0.0);
    }

    #[test]
    fn half_integer_closed_forms() {
        let z = PI;
        let expected = (2.0 / (PI * z)).sqrt() * (z.sin() / z - z.cos());
        assert!((bessel_j(order(1.5), z).unwrap() - expected).abs() < 1e-15);

        let z = 1.0_f64;
        let expected = (2.0 / (PI * z)).sqrt() * (z.cosh() - z.sinh() / z);
        assert!((bessel_i(order(1.5), z).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn tabulated_integer_order() {
        assert!((bessel_j(order(1.0), 1.0).unwrap() - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_i(order(1.0), 2.0).unwrap() - 1.590_636_854_637_329).abs() < 1e-14);
    }

    #[test]
    fn two_dimensional_j1_is_plain_bessel() {
        for &z in &[0.3, 2.0, 7.5, 19.0] {
            let a = ultra_j1(Dimension::Two, z, 0).unwrap();
            let b = bessel_j(order(1.0), z).unwrap();
            assert!((a - b).abs() < 1e-15, "z = {z}");
            let a = ultra_i1(Dimension::Two, z, 0).unwrap();
            let b = bessel_i(order(1.0), z).unwrap();
            assert!((a - b).abs() <= 1e-15 * b.abs(), "z = {z}");
        }
    }

    #[test]
    fn hankel_matches_series_at_the_switch() {
        for nu in [1.0, 1.5, 2.0, 4.5] {
            let z = SERIES_LIMIT;
            let h = hankel_j(nu, z);
            let s = z.powf(nu) * dd_series(nu, z) / (2f64.powf(nu) * order(nu).gamma_plus_one());
            assert!((h - s).abs() < 1e-13, "nu = {nu}: {h} vs {s}");
        }
    }

    #[test]
    fn rejects_out_of_window_arguments() {
        assert!(bessel_j(order(1.0), -0.1).is_err());
        assert!(bessel_i(order(1.0), 200.5).is_err());
        assert!(bessel_j(order(1.0), f64::NAN).is_err());
        assert!(ultra_j1(Dimension::Three, 1.0, 4).is_err());
        assert!(BesselOrder::new(0.3).is_err());
        assert!(Dimension::new(4).is_err());
    }

    #[test]
    fn i1_is_positive_and_increasing() {
        for dim in [Dimension::Two, Dimension::Three] {
            let mut prev = 0.0;
            for i in 1..=400 {
                let z = 0.05 * f64::from(i);
                let v = ultra_i1(dim, z, 0).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
    }
}
