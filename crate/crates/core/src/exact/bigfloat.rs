//! Precision bookkeeping for MPFR floats.

use std::fmt;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Complex, Float};

/// Decimal-digit precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Precision(pub u32);

impl Precision {
    pub fn digits(self) -> u32 {
        self.0
    }

    /// Mantissa bits carrying `digits` decimal digits plus a small guard.
    pub fn bits(self) -> u32 {
        (f64::from(self.0) * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }

    pub fn with_guard(self, extra: u32) -> Self {
        Self(self.0 + extra)
    }

    /// `10^(-digits + slack)` at this precision.
    pub fn epsilon(self, slack: i32) -> Float {
        Float::with_val(self.bits(), 10).pow(slack - self.0 as i32)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits", self.0)
    }
}

/// A real value together with the number of decimal digits it is trusted to.
#[derive(Clone, Debug, PartialEq)]
pub struct BigFloat {
    value: Float,
    digits: u32,
}

impl BigFloat {
    pub fn new(value: Float, digits: u32) -> Self {
        Self { value, digits }
    }

    /// Trusted digits default to the precision the value was computed at.
    pub fn at(value: Float, precision: Precision) -> Self {
        Self::new(value, precision.digits())
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn into_value(self) -> Float {
        self.value
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `|self − other| ≤ tol`.
    pub fn within(&self, other: &Float, tol: &Float) -> bool {
        let d = Float::with_val(self.value.prec(), &self.value - other).abs();
        d <= *tol
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self) -> String {
        to_decimal(&self.value, self.digits)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl serde::Serialize for BigFloat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BigFloat", 2)?;
        st.serialize_field("value", &self.to_decimal())?;
        st.serialize_field("digits", &self.digits)?;
        st.end()
    }
}

pub fn to_decimal(x: &Float, digits: u32) -> String {
    x.to_string_radix_round(10, Some(digits.max(1) as usize), Round::Nearest)
}

/// Decimal rendering of a complex value as `re ± im i`.
pub fn complex_to_decimal(z: &Complex, digits: u32) -> (String, String) {
    (to_decimal(z.real(), digits), to_decimal(z.imag(), digits))
}

/// Parses a decimal string at `bits` of precision.
pub fn parse_float(s: &str, bits: u32) -> Option<Float> {
    Float::parse(s).ok().map(|p| Float::with_val(bits, p))
}

/// `log10 |x|`, or `-inf` for zero.
pub fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else {
        Float::with_val(64, x.abs_ref()).log10().to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_cover_digits() {
        let p = Precision(50);
        assert!(p.bits() >= 167);
        let eps = p.epsilon(0);
        assert!((log10_abs(&eps) + 50.0).abs() < 1e-9);
    }

    #[test]
    fn tolerance_comparison() {
        let p = Precision(40);
        let x = BigFloat::at(Float::with_val(p.bits(), 1) / 3u32, p);
        let y = Float::with_val(p.bits(), 0.333_333_333_3);
        assert!(x.within(&y, &Float::with_val(64, 1e-10)));
        assert!(!x.within(&y, &Float::with_val(64, 1e-12)));
        assert!(x.to_decimal().starts_with("3.33333333"));
    }
}
