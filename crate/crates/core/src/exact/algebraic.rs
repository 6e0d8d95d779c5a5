//! The number field Q(β), β⁴ = 12, β = 2^(1/2)·3^(1/4) > 0.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Float, Rational};

/// `c[0] + c[1]β + c[2]β² + c[3]β³`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlgebraicNumber {
    c: [Rational; 4],
}

const BETA4: i64 = 12;

impl AlgebraicNumber {
    pub fn new(c0: Rational, c1: Rational, c2: Rational, c3: Rational) -> Self {
        Self { c: [c0, c1, c2, c3] }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::new())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::from(1))
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::new(r, Rational::new(), Rational::new(), Rational::new())
    }

    /// `r·β^k` for `k` in `0..4`.
    pub fn monomial(r: Rational, k: usize) -> Self {
        let mut out = Self::zero();
        out.c[k % 4] = r;
        out
    }

    pub fn beta() -> Self {
        Self::monomial(Rational::from(1), 1)
    }

    /// √3 = β²/2.
    pub fn sqrt3() -> Self {
        Self::monomial(Rational::from((1, 2)), 2)
    }

    pub fn components(&self) -> &[Rational; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.cmp0().is_eq())
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(|x| x.cmp0().is_eq())
    }

    /// `Some(k)` if exactly one component is nonzero, namely the `β^k` one.
    pub fn monomial_degree(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..4).filter(|&k| self.c[k].cmp0().is_ne()).collect();
        match nz.as_slice() {
            [k] => Some(*k),
            _ => None,
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self { c: self.c.clone().map(|x| x * r) }
    }

    /// Galois conjugate β ↦ −β.
    fn conj_beta(&self) -> Self {
        Self::new(self.c[0].clone(), -self.c[1].clone(), self.c[2].clone(), -self.c[3].clone())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // x · x(−β) lies in Q(β²); a further conjugation β² ↦ −β² lands in Q.
        let x1 = self.conj_beta();
        let p = self * &x1;
        debug_assert!(p.c[1].cmp0().is_eq() && p.c[3].cmp0().is_eq());
        let (r, s) = (p.c[0].clone(), p.c[2].clone());
        let p_conj = Self::new(r.clone(), Rational::new(), -s.clone(), Rational::new());
        let norm = Rational::from(&r * &r) - Rational::from(&s * &s) * Rational::from(BETA4);
        let num = &x1 * &p_conj;
        Some(num.scale(&norm.recip()))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Embedding with β = 12^(1/4) > 0.
    pub fn to_float(&self, prec: u32) -> Float {
        let beta = Float::with_val(prec, 12).root(4);
        let mut acc = Float::with_val(prec, 0);
        let mut pw = Float::with_val(prec, 1);
        for c in &self.c {
            acc += Float::with_val(prec, c) * &pw;
            pw *= &beta;
        }
        acc
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.c.iter().enumerate() {
            if c.cmp0().is_eq() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})β")?,
                _ => write!(f, "({c})β^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Add for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: Self) -> AlgebraicNumber {
        AlgebraicNumber {
            c: std::array::from_fn(|k| Rational::from(&self.c[k] + &rhs.c[k])),
        }
    }
}

impl Sub for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: Self) -> AlgebraicNumber {
        AlgebraicNumber {
            c: std::array::from_fn(|k| Rational::from(&self.c[k] - &rhs.c[k])),
        }
    }
}

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber { c: std::array::from_fn(|k| Rational::from(-&self.c[k])) }
    }
}

impl Mul for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: Self) -> AlgebraicNumber {
        let mut wide: [Rational; 7] = Default::default();
        for i in 0..4 {
            if self.c[i].cmp0().is_eq() {
                continue;
            }
            for j in 0..4 {
                if rhs.c[j].cmp0().is_ne() {
                    wide[i + j] += Rational::from(&self.c[i] * &rhs.c[j]);
                }
            }
        }
        let [w0, w1, w2, w3, w4, w5, w6] = wide;
        let twelve = Rational::from(BETA4);
        AlgebraicNumber {
            c: [
                w0 + Rational::from(&w4 * &twelve),
                w1 + Rational::from(&w5 * &twelve),
                w2 + w6 * twelve,
                w3,
            ],
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, rhs: Self) -> AlgebraicNumber {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl serde::Serialize for AlgebraicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(4))?;
        for c in &self.c {
            seq.serialize_element(&crate::exact::RationalRepr::from(c))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn beta_times_beta_cubed_is_twelve() {
        let b = AlgebraicNumber::beta();
        let b3 = AlgebraicNumber::monomial(q(1, 1), 3);
        assert_eq!(&b * &b3, AlgebraicNumber::from_rational(q(12, 1)));
    }

    #[test]
    fn c0_squared() {
        let c0 = AlgebraicNumber::monomial(q(-1, 18), 1);
        let sq = &c0 * &c0;
        assert_eq!(sq, AlgebraicNumber::monomial(q(1, 324), 2));
        // 2^-1 3^-7/2
        let expect = Float::with_val(200, 3).pow(Float::with_val(200, -3.5)) / 2u32;
        let diff = Float::with_val(200, sq.to_float(200) - expect).abs();
        assert!(diff < 1e-55);
    }

    #[test]
    fn one_is_identity() {
        let x = AlgebraicNumber::new(q(1, 2), q(-3, 7), q(5, 1), q(0, 1));
        assert_eq!(&x * &AlgebraicNumber::one(), x);
    }

    #[test]
    fn inverse_round_trip() {
        let x = AlgebraicNumber::new(q(1, 2), q(-3, 7), q(5, 1), q(2, 9));
        let xi = x.inv().unwrap();
        assert_eq!(&x * &xi, AlgebraicNumber::one());
        assert!(AlgebraicNumber::zero().inv().is_none());
    }

    #[test]
    fn sqrt3_squares_to_three() {
        let s = AlgebraicNumber::sqrt3();
        assert_eq!(&s * &s, AlgebraicNumber::from_rational(q(3, 1)));
    }
}
