//! Exact fixed-point series for `J_nu` and `I_nu` at `nu` in {1, 3/2}.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::f64::consts::PI;

const FRACTION_BITS: u32 = 512;

/// `sum_m (+-z^2/4)^m / (m! (nu+1)_m)` in 512-bit fixed point. `z` is an f64 and
/// therefore an exact dyadic rational, so the only error is truncation of the
/// last bits of each term.
fn normalised_series(twice_nu: u32, z: f64, modified: bool) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    // z = mantissa * 2^exponent exactly.
    let bits = z.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = if raw_exp == 0 {
        (bits & ((1u64 << 52) - 1)) << 1
    } else {
        (bits & ((1u64 << 52) - 1)) | (1u64 << 52)
    };
    let exponent = raw_exp - 1075;
    let m2 = BigInt::from(mantissa) * BigInt::from(mantissa);
    // z^2 / 4 = m2 * 2^shift
    let shift = 2 * exponent - 2;

    let one = BigInt::from(1u8) << FRACTION_BITS;
    let mut term = one.clone();
    let mut sum = one.clone();
    let cutoff = BigInt::from(1u8) << 8;
    for m in 0u64.. {
        term *= &m2;
        // Multiply by 2 for the half-integer Pochhammer factor (m+1+nu) = (2m+2+2nu)/2.
        let s = shift + 1;
        term = if s >= 0 { term << s as u64 } else { term >> (-s) as u64 };
        term /= BigInt::from((m + 1) * (2 * m + 2 + u64::from(twice_nu)));
        if !modified && m % 2 == 0 {
            sum -= &term;
        } else {
            sum += &term;
        }
        if term.abs() < cutoff && (m as f64) > z {
            break;
        }
        if term.is_zero() {
            break;
        }
    }
    sum.to_f64().unwrap() * 2f64.powi(-(FRACTION_BITS as i32))
}

pub fn gamma_plus_one(twice_nu: u32) -> f64 {
    match twice_nu {
        2 => 1.0,
        3 => 0.75 * PI.sqrt(),
        _ => unreachable!(),
    }
}

pub fn oracle(twice_nu: u32, z: f64, modified: bool) -> f64 {
    let nu = f64::from(twice_nu) / 2.0;
    (z / 2.0).powf(nu) / gamma_plus_one(twice_nu) * normalised_series(twice_nu, z, modified)
}
