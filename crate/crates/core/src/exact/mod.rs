//! Exact arithmetic: rationals, truncated series, Q(β), half-integer Gamma.

pub mod algebraic;
pub mod bigfloat;
pub mod gamma;
pub mod series;

pub use algebraic::AlgebraicNumber;
pub use bigfloat::{BigFloat, Precision};
pub use gamma::{gamma_half, PiRational};
pub use series::{Coeff, ParitySeries, SeriesError, TruncatedSeries, Var};

use rug::{Integer, Rational};

/// Lossless interchange form of a rational.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalRepr {
    fn from(r: &Rational) -> Self {
        Self { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

impl TryFrom<&RationalRepr> for Rational {
    type Error = rug::integer::ParseIntegerError;
    fn try_from(r: &RationalRepr) -> Result<Self, Self::Error> {
        let n: Integer = r.num.parse()?;
        let d: Integer = r.den.parse()?;
        Ok(Rational::from((n, d)))
    }
}

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Terminating hypergeometric sum Σ_{m=0}^{terms-1} Π(a_i)_m / Π(b_i)_m · z^m / m!.
///
/// Panics if a lower parameter Pochhammer vanishes inside the summation range.
pub fn hypergeometric_terminating(upper: &[Rational], lower: &[Rational], z: &Rational, terms: u32) -> Rational {
    let mut sum = Rational::new();
    let mut term = Rational::from(1);
    for m in 0..terms {
        sum += &term;
        let mut num = Rational::from(z);
        for a in upper {
            num *= Rational::from(a + m);
        }
        let mut den = Rational::from(m + 1);
        for b in lower {
            let bm = Rational::from(b + m);
            assert!(bm.cmp0().is_ne(), "lower parameter hits zero at m = {m}");
            den *= bm;
        }
        term *= num / den;
        if term.cmp0().is_eq() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repr_round_trip() {
        let r = rat(-540416448, 5);
        let repr = RationalRepr::from(&r);
        assert_eq!(repr.num, "-540416448");
        assert_eq!(repr.den, "5");
        assert_eq!(Rational::try_from(&repr).unwrap(), r);
    }

    #[test]
    fn chu_vandermonde() {
        // 2F1(-n, b; c; 1) = (c-b)_n / (c)_n
        let n = 6;
        let (b, c) = (rat(3, 2), rat(7, 3));
        let lhs = hypergeometric_terminating(&[rat(-n, 1), b.clone()], std::slice::from_ref(&c), &rat(1, 1), 20);
        let rhs = gamma::pochhammer(&Rational::from(&c - &b), n as u32) / gamma::pochhammer(&c, n as u32);
        assert_eq!(lhs, rhs);
    }
}
