//! Exact truncated formal power (Laurent) series in one variable.
//!
//! A [`TruncatedSeries`] stores the coefficients of `x^offset .. x^(offset + len - 1)`;
//! everything from `x^(offset + len)` on is unknown. Every operation keeps
//! track of how far its result is actually determined by its inputs and never
//! reads past that horizon.

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Rational};

use super::algebraic::AlgebraicNumber;

/// Coefficient ring of a series: exact, with division by nonzero elements.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_rational(r: Rational) -> Self;
    fn scale(&self, r: &Rational) -> Self;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Rational::new()
    }
    fn one() -> Self {
        Rational::from(1)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(self.clone().recip())
        }
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn scale(&self, r: &Rational) -> Self {
        Rational::from(self * r)
    }
}

impl Coeff for AlgebraicNumber {
    fn zero() -> Self {
        AlgebraicNumber::zero()
    }
    fn one() -> Self {
        AlgebraicNumber::one()
    }
    fn is_zero(&self) -> bool {
        AlgebraicNumber::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        AlgebraicNumber::inv(self)
    }
    fn from_rational(r: Rational) -> Self {
        AlgebraicNumber::from_rational(r)
    }
    fn scale(&self, r: &Rational) -> Self {
        AlgebraicNumber::scale(self, r)
    }
}

/// The formal variable a series is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Var {
    /// Powers of `u²`; index `i` stands for `u^(2i)`.
    U2,
    /// The scaled parameter `w = s u²`.
    W,
    /// `δ = (w_c - w)^(1/2)`.
    Delta,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::U2 => f.write_str("u^2"),
            Var::W => f.write_str("w"),
            Var::Delta => f.write_str("δ"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("variable mismatch: {0} vs {1}")]
    VarMismatch(Var, Var),
    #[error("division by a series that vanishes through its truncation order")]
    DivisionByZero,
    #[error("antiderivative of x^-1 term would need a logarithm")]
    LogarithmicTerm,
    #[error("composition needs an inner series with positive valuation and an outer series without negative powers")]
    BadComposition,
    #[error("power needs a series with leading coefficient 1 at exponent 0")]
    BadPowerBase,
}

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<C: Coeff = Rational> {
    var: Var,
    offset: i64,
    coeffs: Vec<C>,
}

impl<C: Coeff> fmt::Debug for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries[{}; offset {}] {:?}", self.var, self.offset, self.coeffs)
    }
}

impl<C: Coeff> TruncatedSeries<C> {
    pub fn new(var: Var, offset: i64, coeffs: Vec<C>) -> Self {
        Self { var, offset, coeffs }
    }

    /// Zero through (but excluding) `x^horizon`.
    pub fn zero(var: Var, horizon: i64) -> Self {
        let len = horizon.max(0) as usize;
        Self::new(var, 0, vec![C::zero(); len])
    }

    /// The constant `c`, known through `x^(horizon-1)`.
    pub fn constant(var: Var, c: C, horizon: i64) -> Self {
        let mut s = Self::zero(var, horizon);
        if let Some(first) = s.coeffs.first_mut() {
            *first = c;
        }
        s
    }

    /// The monomial `x^exponent`, known through `x^(horizon-1)`.
    pub fn monomial(var: Var, exponent: i64, horizon: i64) -> Self {
        let len = (horizon - exponent).max(0) as usize;
        let mut coeffs = vec![C::zero(); len];
        if let Some(first) = coeffs.first_mut() {
            *first = C::one();
        }
        Self::new(var, exponent, coeffs)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Number of known coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// First exponent whose coefficient is unknown.
    pub fn horizon(&self) -> i64 {
        self.offset + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `x^exponent`; `None` past the horizon.
    pub fn coeff(&self, exponent: i64) -> Option<C> {
        if exponent >= self.horizon() {
            None
        } else if exponent < self.offset {
            Some(C::zero())
        } else {
            Some(self.coeffs[(exponent - self.offset) as usize].clone())
        }
    }

    /// `(exponent, coefficient)` pairs over the known range.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.offset + i as i64, c))
    }

    /// Exponent of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.terms().find(|(_, c)| !c.is_zero()).map(|(e, _)| e)
    }

    pub fn is_zero_to_horizon(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Drops leading zero coefficients; the horizon is unchanged.
    pub fn trimmed(&self) -> Self {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        Self::new(self.var, self.offset + skip as i64, self.coeffs[skip..].to_vec())
    }

    /// Forgets everything from `x^horizon` on.
    pub fn truncated(&self, horizon: i64) -> Self {
        if horizon >= self.horizon() {
            return self.clone();
        }
        let keep = (horizon - self.offset).max(0) as usize;
        Self::new(self.var, self.offset, self.coeffs[..keep].to_vec())
    }

    /// Re-expresses the series so that it starts at `x^offset` (padding with zeros),
    /// which must not exceed the current offset.
    pub fn with_offset(&self, offset: i64) -> Self {
        assert!(offset <= self.offset, "with_offset can only extend downwards");
        let pad = (self.offset - offset) as usize;
        let mut coeffs = vec![C::zero(); pad];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(self.var, offset, coeffs)
    }

    /// Multiplies by `x^k`.
    pub fn shifted(&self, k: i64) -> Self {
        Self::new(self.var, self.offset + k, self.coeffs.clone())
    }

    pub fn retagged(&self, var: Var) -> Self {
        Self::new(var, self.offset, self.coeffs.clone())
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries::new(self.var, self.offset, self.coeffs.iter().map(f).collect())
    }

    fn check_var(&self, other: &Self) -> Result<(), SeriesError> {
        if self.var == other.var {
            Ok(())
        } else {
            Err(SeriesError::VarMismatch(self.var, other.var))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, |a, b| a.sub(b))
    }

    fn combine(&self, other: &Self, op: impl Fn(&C, &C) -> C) -> Result<Self, SeriesError> {
        self.check_var(other)?;
        let offset = self.offset.min(other.offset);
        let horizon = self.horizon().min(other.horizon());
        let coeffs = (offset..horizon.max(offset))
            .map(|e| {
                let a = self.coeff(e).expect("below horizon");
                let b = other.coeff(e).expect("below horizon");
                op(&a, &b)
            })
            .collect();
        Ok(Self::new(self.var, offset, coeffs))
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    pub fn scale_by(&self, c: &C) -> Self {
        self.map_coeffs(|x| x.mul(c))
    }

    /// Exact Cauchy product; the relative length is the smaller of the two.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_var(other)?;
        let (a, b) = (self.trimmed(), other.trimmed());
        let (this, other) = (&a, &b);
        let n = this.len().min(other.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = C::zero();
            for i in 0..=k {
                let (x, y) = (&this.coeffs[i], &other.coeffs[k - i]);
                if !x.is_zero() && !y.is_zero() {
                    acc = acc.add(&x.mul(y));
                }
            }
            coeffs.push(acc);
        }
        Ok(Self::new(self.var, this.offset + other.offset, coeffs))
    }

    pub fn square(&self) -> Self {
        self.mul(self).expect("same variable")
    }

    pub fn pow(&self, n: u32) -> Self {
        if n == 0 {
            let mut coeffs = vec![C::zero(); self.len()];
            if let Some(c) = coeffs.first_mut() {
                *c = C::one();
            }
            return Self::new(self.var, 0, coeffs);
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self).expect("same variable");
        }
        acc
    }

    /// `self + c` for a scalar `c`, known as far as `self` is.
    pub fn add_scalar(&self, c: &C) -> Self {
        if self.horizon() <= 0 {
            return self.clone();
        }
        let mut s = if self.offset > 0 { self.with_offset(0) } else { self.clone() };
        let idx = (-s.offset) as usize;
        s.coeffs[idx] = s.coeffs[idx].add(c);
        s
    }

    /// `1/self`; leading zeros are stripped first, so the offset becomes negative
    /// the valuation.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let b = self.trimmed();
        if b.is_empty() {
            return Err(SeriesError::DivisionByZero);
        }
        let lead_inv = b.coeffs[0].inv().ok_or(SeriesError::DivisionByZero)?;
        let n = b.len();
        let mut out: Vec<C> = Vec::with_capacity(n);
        out.push(lead_inv.clone());
        for k in 1..n {
            let mut acc = C::zero();
            for i in 1..=k {
                if !b.coeffs[i].is_zero() {
                    acc = acc.add(&b.coeffs[i].mul(&out[k - i]));
                }
            }
            out.push(acc.neg().mul(&lead_inv));
        }
        Ok(Self::new(self.var, -b.offset, out))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_var(other)?;
        self.mul(&other.inverse()?)
    }

    /// d/dx, term by term.
    pub fn derivative(&self) -> Self {
        let coeffs = self.terms().map(|(e, c)| c.scale(&Rational::from(e))).collect();
        Self::new(self.var, self.offset - 1, coeffs)
    }

    pub fn nth_derivative(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |s, _| s.derivative())
    }

    /// Term-by-term antiderivative with zero constant of integration.
    pub fn antiderivative(&self) -> Result<Self, SeriesError> {
        let mut coeffs = Vec::with_capacity(self.len());
        for (e, c) in self.terms() {
            if e == -1 {
                if !c.is_zero() {
                    return Err(SeriesError::LogarithmicTerm);
                }
                coeffs.push(C::zero());
            } else {
                coeffs.push(c.scale(&Rational::from((1, e + 1))));
            }
        }
        Ok(Self::new(self.var, self.offset + 1, coeffs))
    }

    /// `self(inner(x))`. `inner` must have positive valuation and `self` no
    /// negative powers.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        let v = inner.valuation().unwrap_or(inner.horizon());
        if self.offset < 0 || v < 1 {
            return Err(SeriesError::BadComposition);
        }
        // horizon of the result: inner^k is known through horizon(inner) + (k-1) v,
        // the truncation of self contributes terms >= v * horizon(self).
        let horizon = (inner.horizon()).min(v.saturating_mul(self.horizon()));
        let mut acc = Self::zero(inner.var, horizon);
        let mut power = Self::constant(inner.var, C::one(), horizon);
        for e in 0..self.horizon() {
            if e * v >= horizon {
                break;
            }
            if e > 0 {
                power = power.mul(inner)?.truncated(horizon);
                power = power.with_offset(power.offset().min(0)).truncated(horizon);
            }
            if let Some(c) = self.coeff(e) {
                if !c.is_zero() {
                    let term = power.scale_by(&c).with_offset(0);
                    acc = acc.add(&term)?.truncated(horizon);
                }
            }
        }
        Ok(acc.with_offset(0).truncated(horizon))
    }

    /// `self^alpha` for a series with leading term exactly `1·x^0`, via the
    /// J.C.P. Miller recurrence.
    pub fn pow_rational(&self, alpha: &Rational) -> Result<Self, SeriesError> {
        if self.offset != 0 || self.coeffs.first().is_none_or(|c| *c != C::one()) {
            return Err(SeriesError::BadPowerBase);
        }
        let a = &self.coeffs;
        let n = a.len();
        let mut p: Vec<C> = Vec::with_capacity(n);
        p.push(C::one());
        for m in 1..n {
            let mut acc = C::zero();
            for k in 1..=m {
                if a[k].is_zero() {
                    continue;
                }
                // (alpha k - m + k) a_k p_{m-k}
                let w = (alpha * Rational::from(k as i64))
                    + Rational::from(k as i64 - m as i64);
                acc = acc.add(&a[k].mul(&p[m - k]).scale(&w));
            }
            p.push(acc.scale(&Rational::from((1, m as i64))));
        }
        Ok(Self::new(self.var, 0, p))
    }
}

impl TruncatedSeries<Rational> {
    /// Evaluates the known part at a floating point argument.
    pub fn eval_float(&self, x: &Float) -> Float {
        let prec = x.prec();
        let mut acc = Float::with_val(prec, 0);
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            if c.is_zero() {
                continue;
            }
            let xe = Float::with_val(prec, Pow::pow(x, e as i32));
            acc += Float::with_val(prec, c) * xe;
        }
        acc
    }

    pub fn eval_complex(&self, x: &rug::Complex) -> rug::Complex {
        let prec = x.prec();
        let mut acc = rug::Complex::with_val(prec, 0);
        // Horner over exponents offset..horizon
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        if self.offset != 0 {
            let xo = rug::Complex::with_val(prec, Pow::pow(x, self.offset as i32));
            acc *= xo;
        }
        acc
    }
}

/// A series in `u` of definite parity: `u^odd_shift · S(u²)`, where `S` is a
/// [`TruncatedSeries`] in [`Var::U2`].
#[derive(Clone, Debug, PartialEq)]
pub struct ParitySeries {
    /// 0 for even series, 1 for odd ones.
    pub odd_shift: u32,
    pub inner: TruncatedSeries,
}

impl ParitySeries {
    pub fn even(inner: TruncatedSeries) -> Self {
        Self { odd_shift: 0, inner }
    }

    pub fn odd(inner: TruncatedSeries) -> Self {
        Self { odd_shift: 1, inner }
    }

    /// Coefficient of `u^n`, `None` past the known range.
    pub fn coeff_u(&self, n: i64) -> Option<Rational> {
        let rest = n - self.odd_shift as i64;
        if rest.rem_euclid(2) != 0 {
            return if n < self.horizon_u() { Some(Rational::new()) } else { None };
        }
        self.inner.coeff(rest.div_euclid(2))
    }

    /// First power of `u` whose coefficient is unknown.
    pub fn horizon_u(&self) -> i64 {
        2 * self.inner.horizon() + self.odd_shift as i64
    }

    /// `(power of u, coefficient)` over the known range, nonzero coefficients only.
    pub fn nonzero_terms(&self) -> Vec<(i64, Rational)> {
        self.inner
            .terms()
            .filter(|(_, c)| !Coeff::is_zero(*c))
            .map(|(e, c)| (2 * e + self.odd_shift as i64, c.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn ser(var: Var, offset: i64, c: &[i64]) -> TruncatedSeries {
        TruncatedSeries::new(var, offset, c.iter().map(|&x| Rational::from(x)).collect())
    }

    #[test]
    fn difference_of_squares() {
        let a = ser(Var::W, 0, &[1, 1, 0, 0]);
        let b = ser(Var::W, 0, &[1, -1, 0, 0]);
        assert_eq!(a.mul(&b).unwrap(), ser(Var::W, 0, &[1, 0, -1, 0]));
    }

    #[test]
    fn g0_squared_through_order_three() {
        // (w + 36 w^2 + 3240 w^3)^2 known through w^3: w^2 + 72 w^3
        let g = ser(Var::W, 1, &[1, 36, 3240]);
        let sq = g.square().truncated(4);
        assert_eq!(sq.coeff(2), Some(q(1, 1)));
        assert_eq!(sq.coeff(3), Some(q(72, 1)));
        assert_eq!(sq.coeff(1), Some(q(0, 1)));
    }

    #[test]
    fn zero_annihilates() {
        let s = ser(Var::W, 0, &[3, 1, 4, 1, 5]);
        let z = TruncatedSeries::zero(Var::W, 5);
        assert!(s.mul(&z).unwrap().is_zero_to_horizon());
    }

    #[test]
    fn variable_mismatch_is_rejected() {
        let a = ser(Var::W, 0, &[1, 2]);
        let b = ser(Var::U2, 0, &[1, 2]);
        assert_eq!(a.mul(&b), Err(SeriesError::VarMismatch(Var::W, Var::U2)));
    }

    #[test]
    fn monomial_quotient() {
        let a = ser(Var::W, 2, &[1, 0, 0]);
        let b = ser(Var::W, 1, &[1, 0, 0]);
        let c = a.div(&b).unwrap();
        assert_eq!(c.offset(), 1);
        assert_eq!(c.coeff(1), Some(q(1, 1)));
        assert_eq!(c.coeff(2), Some(q(0, 1)));
    }

    #[test]
    fn b0_from_g0_by_long_division() {
        let g = ser(Var::W, 1, &[1, 36, 3240, 373248]);
        let w = ser(Var::W, 1, &[1, 0, 0, 0]);
        let num = g.sub(&w).unwrap();
        let den = g.scale(&q(6, 1));
        let b = num.div(&den).unwrap().trimmed();
        assert_eq!(b.coeff(1), Some(q(6, 1)));
        assert_eq!(b.coeff(2), Some(q(324, 1)));
        // multiply back
        let back = b.mul(&den).unwrap();
        for e in back.offset()..back.horizon() {
            assert_eq!(back.coeff(e), num.coeff(e));
        }
    }

    #[test]
    fn geometric_inverse() {
        let g = ser(Var::W, 1, &[1, 36, 3240]);
        let one = TruncatedSeries::constant(Var::W, q(1, 1), 4);
        let d = one.sub(&g.scale(&q(108, 1))).unwrap();
        let inv = d.inverse().unwrap();
        assert_eq!(inv.coeff(0), Some(q(1, 1)));
        assert_eq!(inv.coeff(1), Some(q(108, 1)));
        let back = inv.mul(&d).unwrap();
        assert_eq!(back.coeff(0), Some(q(1, 1)));
        for e in 1..back.horizon() {
            assert_eq!(back.coeff(e), Some(q(0, 1)));
        }
    }

    #[test]
    fn division_by_zero_series_fails() {
        let a = ser(Var::W, 0, &[1, 2]);
        let z = TruncatedSeries::zero(Var::W, 3);
        assert_eq!(a.div(&z), Err(SeriesError::DivisionByZero));
    }

    #[test]
    fn derivative_and_antiderivative() {
        let s = ser(Var::W, 0, &[5, 3, 2, 7]);
        let d = s.derivative();
        assert_eq!(d.coeff(0), Some(q(3, 1)));
        assert_eq!(d.coeff(2), Some(q(21, 1)));
        let back = d.antiderivative().unwrap();
        for e in 1..4 {
            assert_eq!(back.coeff(e), s.coeff(e));
        }
        let laurent = ser(Var::Delta, -1, &[1, 0]);
        assert_eq!(laurent.antiderivative(), Err(SeriesError::LogarithmicTerm));
    }

    #[test]
    fn square_root_via_rational_power() {
        // (1 + x)^(1/2) squared is 1 + x
        let s = ser(Var::W, 0, &[1, 1, 0, 0, 0, 0]);
        let r = s.pow_rational(&q(1, 2)).unwrap();
        assert_eq!(r.coeff(2), Some(q(-1, 8)));
        assert_eq!(r.square(), s);
    }

    #[test]
    fn composition_with_geometric_series() {
        // 1/(1-y) with y = x + x^2  →  1 + x + 2x^2 + 3x^3 + 5x^4 (Fibonacci)
        let geo = ser(Var::W, 0, &[1, 1, 1, 1, 1, 1]);
        let inner = ser(Var::W, 1, &[1, 1, 0, 0, 0]);
        let c = geo.compose(&inner).unwrap();
        let expect = [1, 1, 2, 3, 5, 8];
        for (e, v) in expect.iter().enumerate() {
            assert_eq!(c.coeff(e as i64), Some(q(*v, 1)), "x^{e}");
        }
    }

    #[test]
    fn parity_series_reads_u_powers() {
        let x = ParitySeries::odd(ser(Var::U2, 0, &[6, 324, 31104]));
        assert_eq!(x.coeff_u(1), Some(q(6, 1)));
        assert_eq!(x.coeff_u(2), Some(q(0, 1)));
        assert_eq!(x.coeff_u(5), Some(q(31104, 1)));
        assert_eq!(x.coeff_u(7), None);
    }
}
