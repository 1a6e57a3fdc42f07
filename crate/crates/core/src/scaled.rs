//! Floating-point values with a detached power-of-two exponent.
//!
//! Recurrences for the Rabi polynomials overflow an `f64` after a few hundred
//! steps. A `ScaledValue` keeps the mantissa in `[1, 2)` (or exactly zero) and
//! carries the binary exponent in an `i64`, so products and ratios stay exact
//! up to ordinary rounding of the mantissa.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    mantissa: f64,
    exponent: i64,
}

const TWO_POW_64: f64 = 18446744073709551616.0;

/// Split a finite nonzero `x` into `(m, e)` with `|m|` in `[1, 2)` and `x = m * 2^e`.
fn split(x: f64) -> (f64, i64) {
    debug_assert!(x.is_finite() && x != 0.0);
    let (x, bias) = if x.abs() < f64::MIN_POSITIVE {
        (x * TWO_POW_64, -64)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (m, raw - 1023 + bias)
}

/// `2^e` for exponents that may leave the normal range.
fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

/// Multiply by `2^e` without intermediate overflow.
pub(crate) fn ldexp(x: f64, e: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let (m, e0) = split(x);
    let total = e0 + e;
    if total > 1023 {
        return f64::INFINITY.copysign(x);
    }
    if total >= -1022 {
        return m * pow2(total);
    }
    // two steps so that the subnormal rounding happens once
    m * pow2(total + 60) * pow2(-60)
}

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue { mantissa: 0.0, exponent: 0 };
    pub const ONE: ScaledValue = ScaledValue { mantissa: 1.0, exponent: 0 };

    pub fn new(x: f64) -> Self {
        Self::from_parts(x, 0)
    }

    /// `x * 2^e`, normalized.
    pub fn from_parts(x: f64, e: i64) -> Self {
        assert!(x.is_finite(), "ScaledValue from non-finite {x}");
        if x == 0.0 {
            return Self::ZERO;
        }
        let (m, e0) = split(x);
        ScaledValue { mantissa: m, exponent: e0 + e }
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn abs(&self) -> Self {
        ScaledValue { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Nearest `f64`; overflows to infinity and underflows to zero.
    pub fn to_f64(&self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    /// Natural log of the magnitude (−inf for zero).
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.abs().ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    pub fn mul_f64(self, x: f64) -> Self {
        self * ScaledValue::new(x)
    }

    pub fn div_f64(self, x: f64) -> Self {
        self / ScaledValue::new(x)
    }

    pub fn recip(self) -> Self {
        ScaledValue::ONE / self
    }

    /// Compare magnitudes.
    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self
                .exponent
                .cmp(&other.exponent)
                .then(self.mantissa.abs().total_cmp(&other.mantissa.abs())),
        }
    }
}

impl From<f64> for ScaledValue {
    fn from(x: f64) -> Self {
        ScaledValue::new(x)
    }
}

impl Mul for ScaledValue {
    type Output = ScaledValue;
    fn mul(self, rhs: ScaledValue) -> ScaledValue {
        ScaledValue::from_parts(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledValue {
    type Output = ScaledValue;
    fn div(self, rhs: ScaledValue) -> ScaledValue {
        assert!(!rhs.is_zero(), "ScaledValue division by zero");
        ScaledValue::from_parts(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl Add for ScaledValue {
    type Output = ScaledValue;
    fn add(self, rhs: ScaledValue) -> ScaledValue {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent { (self, rhs) } else { (rhs, self) };
        let shift = small.exponent - big.exponent;
        if shift < -60 {
            return big;
        }
        ScaledValue::from_parts(big.mantissa + ldexp(small.mantissa, shift), big.exponent)
    }
}

impl Neg for ScaledValue {
    type Output = ScaledValue;
    fn neg(self) -> ScaledValue {
        ScaledValue { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

impl Sub for ScaledValue {
    type Output = ScaledValue;
    fn sub(self, rhs: ScaledValue) -> ScaledValue {
        self + (-rhs)
    }
}

/// Keep two consecutive recurrence values in range by a shared power of two.
///
/// Returns the exponent that was removed; ratios between the pair are unchanged.
pub(crate) fn rescale_pair(a: &mut f64, b: &mut f64) -> i64 {
    const HI: f64 = 1e150;
    const LO: f64 = 1e-150;
    let m = a.abs().max(b.abs());
    if m > HI || (m < LO && m > 0.0) {
        let (_, e) = split(m);
        *a = ldexp(*a, -e);
        *b = ldexp(*b, -e);
        e
    } else {
        0
    }
}
