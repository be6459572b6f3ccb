//! Exact rationals as stored in game files: `[numerator, denominator]`.

use serde::{Deserialize, Serialize};

/// Largest integer magnitude that converts to `f64` exactly.
const EXACT_INT: u128 = 1 << 53;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational(pub i64, pub i64);

impl Rational {
    /// `None` for a zero denominator.
    pub fn to_f64(self) -> Option<f64> {
        if self.1 == 0 {
            return None;
        }
        Some(self.0 as f64 / self.1 as f64)
    }

    /// The convergent of `v` with the smallest denominator that converts
    /// back to exactly `v`. `None` for non-finite values and magnitudes too
    /// small to represent with 64-bit parts.
    pub fn from_f64(v: f64) -> Option<Rational> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Rational(0, 1));
        }
        let sign = if v < 0.0 { -1i128 } else { 1 };
        let (mant, exp) = decompose(v.abs());
        if exp >= 0 {
            let n = (mant as u128).checked_shl(exp as u32).filter(|&n| n < EXACT_INT)?;
            return Some(Rational((sign * n as i128) as i64, 1));
        }
        if exp < -120 {
            return None;
        }
        // continued fraction of mant / 2^-exp in exact integer arithmetic
        let (mut p, mut q) = (mant as u128, 1u128 << (-exp) as u32);
        let (mut h0, mut h1) = (0u128, 1u128);
        let (mut k0, mut k1) = (1u128, 0u128);
        while q != 0 {
            let a = p / q;
            let h = a.checked_mul(h1)?.checked_add(h0)?;
            let k = a.checked_mul(k1)?.checked_add(k0)?;
            if h >= EXACT_INT || k >= EXACT_INT {
                return None;
            }
            if h as f64 / k as f64 == v.abs() {
                return Some(Rational((sign * h as i128) as i64, k as i64));
            }
            (h0, h1, k0, k1) = (h1, h, k1, k);
            (p, q) = (q, p - a * q);
        }
        None
    }
}

/// `v = mant * 2^exp` with `mant` odd, for finite positive `v`.
fn decompose(v: f64) -> (u64, i32) {
    let bits = v.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    let tz = mant.trailing_zeros();
    mant >>= tz;
    exp += tz as i32;
    (mant, exp)
}
