//! Exact rational scalars.
//!
//! All symbolic coefficients are [`Rational`] values backed by
//! `num_rational::BigRational`, which keeps every value reduced with a
//! positive denominator (zero is `0/1`).

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(value: &Rational) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    match value.to_f64() {
        Some(v) if v.is_finite() => v,
        // Huge numerators/denominators: fall back to a scaled division.
        _ => {
            let num = value.numer().to_f64().unwrap_or(f64::INFINITY);
            let den = value.denom().to_f64().unwrap_or(f64::INFINITY);
            if num.is_finite() && den.is_finite() {
                num / den
            } else if value.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        }
    }
}

/// Canonical textual form: `n` for integers, `n/d` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
