//! Exact Gamma values at integer and half-integer points, as `q·√π^k`.

use std::ops::{Div, Mul};

use rug::ops::Pow;
use rug::{Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GammaError {
    #[error("Gamma has a pole at {0}/2")]
    Pole(i64),
    #[error("a factor √π^{0} survives where a rational was required")]
    SurvivingPi(i32),
}

/// `coeff · π^(sqrt_pi_power/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiRational {
    pub coeff: Rational,
    pub sqrt_pi_power: i32,
}

impl PiRational {
    pub fn rational(coeff: Rational) -> Self {
        Self { coeff, sqrt_pi_power: 0 }
    }

    pub fn to_rational(&self) -> Result<Rational, GammaError> {
        if self.sqrt_pi_power == 0 || self.coeff.cmp0().is_eq() {
            Ok(self.coeff.clone())
        } else {
            Err(GammaError::SurvivingPi(self.sqrt_pi_power))
        }
    }

    pub fn to_float(&self, prec: u32) -> rug::Float {
        let sqrt_pi = rug::Float::with_val(prec, rug::float::Constant::Pi).sqrt();
        rug::Float::with_val(prec, &self.coeff) * sqrt_pi.pow(self.sqrt_pi_power)
    }
}

impl Mul for PiRational {
    type Output = PiRational;
    fn mul(self, rhs: Self) -> Self {
        Self { coeff: self.coeff * rhs.coeff, sqrt_pi_power: self.sqrt_pi_power + rhs.sqrt_pi_power }
    }
}

impl Div for PiRational {
    type Output = PiRational;
    fn div(self, rhs: Self) -> Self {
        Self { coeff: self.coeff / rhs.coeff, sqrt_pi_power: self.sqrt_pi_power - rhs.sqrt_pi_power }
    }
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Γ(twice/2).
pub fn gamma_half(twice: i64) -> Result<PiRational, GammaError> {
    if twice <= 0 && twice % 2 == 0 {
        return Err(GammaError::Pole(twice));
    }
    if twice % 2 == 0 {
        let n = twice / 2;
        return Ok(PiRational::rational(Rational::from(factorial((n - 1) as u32))));
    }
    // twice = 2m + 1, argument m + 1/2
    let m = (twice - 1).div_euclid(2);
    let coeff = if m >= 0 {
        let m = m as u32;
        Rational::from((factorial(2 * m), Integer::from(4).pow(m) * factorial(m)))
    } else {
        let k = (-m) as u32;
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        Rational::from((Integer::from(4).pow(k) * factorial(k) * sign, factorial(2 * k)))
    };
    Ok(PiRational { coeff, sqrt_pi_power: 1 })
}

/// Rising factorial (a)_m.
pub fn pochhammer(a: &Rational, m: u32) -> Rational {
    let mut acc = Rational::from(1);
    let mut x = a.clone();
    for _ in 0..m {
        acc *= &x;
        x += 1;
    }
    acc
}
