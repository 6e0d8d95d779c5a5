//! Free-energy series F^(2k)(u) from the hierarchy, closed forms and
//! large-j asymptotics.

use std::collections::BTreeMap;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::critical;
use crate::exact::gamma::{self, GammaError};
use crate::exact::{hypergeometric_terminating, rat, BigFloat, ParitySeries, Precision, TruncatedSeries, Var};
use crate::hierarchy::{HierarchyError, StringHierarchy};
use crate::parallel::Execution;

#[derive(Debug, thiserror::Error)]
pub enum TodaError {
    #[error("genus-0 input must start w + 36w² (the terms removed before integrating), found {0:?}")]
    MissingSubtraction(Vec<Option<Rational>>),
    #[error("w^{j} coefficient is nonzero but the integration rule degenerates for k = {k}")]
    DegenerateTerm { k: usize, j: i64 },
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("j must be at least {min}, got {j}")]
    BadIndex { j: u32, min: u32 },
}

/// Integrates ĝ₂ₖ twice in t and returns F^(2k) as a series in u².
///
/// The w^j coefficient c_j lands on u^(2(j+2k−2)) with weight
/// 2/(72(3j+6k−4)(3j+6k−6)). For k = 0 the w and w² terms are the pieces whose
/// double integrals are not power series in u (t^(3/2) and ln t); they are
/// checked and dropped.
pub fn toda_integrate(k: usize, ghat: &TruncatedSeries) -> Result<ParitySeries, TodaError> {
    let k = k as i64;
    if k == 0 {
        let c1 = ghat.coeff(1);
        let c2 = ghat.coeff(2);
        if c1 != Some(rat(1, 1)) || c2 != Some(rat(36, 1)) {
            return Err(TodaError::MissingSubtraction(vec![c1, c2]));
        }
    }
    let first = 1;
    let last = ghat.horizon() + 2 * k - 2; // exclusive, in powers of u²
    let mut coeffs = vec![Rational::new(); (last - first).max(0) as usize];
    for (j, c) in ghat.terms() {
        if c.is_zero() || (k == 0 && (j == 1 || j == 2)) {
            continue;
        }
        let a = 3 * j + 6 * k - 4;
        let b = 3 * j + 6 * k - 6;
        if a == 0 || b == 0 {
            return Err(TodaError::DegenerateTerm { k: k as usize, j });
        }
        let i = j + 2 * k - 2;
        if i < first {
            return Err(TodaError::DegenerateTerm { k: k as usize, j });
        }
        let weight = Rational::from((2, 72 * a * b));
        coeffs[(i - first) as usize] = Rational::from(c * &weight);
    }
    Ok(ParitySeries::even(TruncatedSeries::new(Var::U2, first, coeffs)))
}

/// f^(0)_{2j} = 72^j Γ(3j/2)(2j)! / (2Γ(j+3)Γ(j/2+1)).
pub fn genus0_closed_form(j: u32) -> Result<Rational, TodaError> {
    if j == 0 {
        return Err(TodaError::BadIndex { j, min: 1 });
    }
    let jj = i64::from(j);
    let ratio = (gamma::gamma_half(3 * jj)? / (gamma::gamma_half(2 * jj + 6)? * gamma::gamma_half(jj + 2)?)).to_rational()?;
    Ok(ratio * Integer::from(72).pow(j) * gamma::factorial(2 * j) / 2u32)
}

/// ₃F₂(−j+1, 2, 6; 5, −3j/2+1; 3/2), terminating after j terms.
pub fn genus1_hypergeometric(j: u32) -> Rational {
    let jj = i64::from(j);
    hypergeometric_terminating(
        &[rat(1 - jj, 1), rat(2, 1), rat(6, 1)],
        &[rat(5, 1), rat(2 - 3 * jj, 2)],
        &rat(3, 2),
        j,
    )
}

/// f^(2)_{2j} = 5·72^j Γ(3j/2)(2j)! / (48(3j+2)Γ(j+1)Γ(j/2+1)) · ₃F₂(…; 3/2).
pub fn genus1_closed_form(j: u32) -> Result<Rational, TodaError> {
    if j == 0 {
        return Err(TodaError::BadIndex { j, min: 1 });
    }
    let jj = i64::from(j);
    let ratio = (gamma::gamma_half(3 * jj)? / (gamma::gamma_half(2 * jj + 2)? * gamma::gamma_half(jj + 2)?)).to_rational()?;
    let pre = ratio * Integer::from(72).pow(j) * gamma::factorial(2 * j) * 5u32 / (48 * (3 * j + 2));
    Ok(pre * genus1_hypergeometric(j))
}

/// Checks ₃F₂(−j+1,2,6;5,−3j/2+1;3/2) against
/// ₂F₁(−j+1,2;−3j/2+1;3/2) + 6(j−1)/(5(3j−2))·₂F₁(−j+2,3;−3j/2+2;3/2).
pub fn hypergeom_3f2_reduction_check(j: u32) -> Result<bool, TodaError> {
    if j < 2 {
        return Err(TodaError::BadIndex { j, min: 2 });
    }
    let jj = i64::from(j);
    let z = rat(3, 2);
    let lhs = genus1_hypergeometric(j);
    let f1 = hypergeometric_terminating(&[rat(1 - jj, 1), rat(2, 1)], &[rat(2 - 3 * jj, 2)], &z, j);
    let f2 = hypergeometric_terminating(&[rat(2 - jj, 1), rat(3, 1)], &[rat(4 - 3 * jj, 2)], &z, j);
    let rhs = f1 + f2 * rat(6 * (jj - 1), 5 * (3 * jj - 2));
    Ok(lhs == rhs)
}

/// Exact table of f^(2g)_{2j} and the F-series coefficients f/(2j)!.
#[derive(Clone, Debug, Default)]
pub struct GenusCoeffTable {
    entries: BTreeMap<(u32, u32), Rational>,
}

impl GenusCoeffTable {
    /// Runs the hierarchy and the Toda integration for genus ≤ max_genus and
    /// 1 ≤ j ≤ max_j.
    pub fn from_pipeline(max_genus: u32, max_j: u32) -> Result<Self, TodaError> {
        // F^(2k) at u^(2j) needs ĝ₂ₖ at w^(j+2−2k)
        let horizon = max_j as usize + 2;
        let h = StringHierarchy::compute(max_genus as usize, horizon)?;
        let mut entries = BTreeMap::new();
        for g in 0..=max_genus {
            let f = toda_integrate(g as usize, h.g(g as usize)?)?;
            for j in 1..=max_j {
                let c = f.coeff_u(2 * i64::from(j)).expect("horizon covers max_j");
                entries.insert((g, j), c * gamma::factorial(2 * j));
            }
        }
        Ok(Self { entries })
    }

    pub fn f(&self, g: u32, j: u32) -> Option<&Rational> {
        self.entries.get(&(g, j))
    }

    /// f^(2g)_{2j}/(2j)!, the coefficient of u^(2j) in F^(2g).
    pub fn series_coeff(&self, g: u32, j: u32) -> Option<Rational> {
        self.f(g, j).map(|f| f / Rational::from(gamma::factorial(2 * j)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &Rational)> {
        self.entries.iter().map(|((g, j), f)| (*g, *j, f))
    }

    pub fn max_genus(&self) -> Option<u32> {
        self.entries.keys().map(|(g, _)| *g).max()
    }

    /// Entries that are negative or non-integral.
    pub fn non_integral(&self) -> Vec<(u32, u32)> {
        self.iter()
            .filter(|(_, _, f)| f.cmp0().is_lt() || *f.denom() != 1)
            .map(|(g, j, _)| (g, j))
            .collect()
    }
}

/// Closed-form genus-0 and genus-1 tables for 1 ≤ j ≤ max_j, one task per j.
pub fn closed_form_table(max_j: u32, exec: Execution) -> Result<Vec<(Rational, Rational)>, TodaError> {
    let js: Vec<u32> = (1..=max_j).collect();
    exec.map(&js, |&j| Ok((genus0_closed_form(j)?, genus1_closed_form(j)?)))
        .into_iter()
        .collect()
}

/// Integration constants fixed by the decay argument.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DecayConstants {
    /// coefficient of t^(−1/2) in g̃₂ₖ(t) = g₂ₖ/(2√t)
    pub a0: crate::exact::RationalRepr,
    /// half the u² coefficient of g₂ₖ(1, u)
    pub a1: crate::exact::RationalRepr,
    pub c: BigFloat,
    pub d: BigFloat,
}

/// Recovers a₀, a₁ from the hierarchy and the constants C, D of the double
/// integration, by matching F̃ − F = 1/(108u²) + ln(3u)/3 against the
/// integrals of the subtracted terms at two values of t.
pub fn decay_constants(h: &StringHierarchy, k: usize, precision: Precision) -> Result<DecayConstants, TodaError> {
    let g = h.g_in_u(k, &rat(1, 1))?;
    let a0 = g.coeff_u(0).unwrap_or_default() / 2u32;
    let a1 = g.coeff_u(2).unwrap_or_default() / 2u32;
    let bits = precision.bits();
    let (c, d) = if k == 0 {
        // double integral of a0 t^(-1/2) + (a1/72) t^(-2): (4a0/3) t^(3/2) − (a1/72) ln t + C + D t
        let shift = |t: &Float| -> Float {
            let u = u_of_t(t);
            let exact = Float::with_val(bits, 1) / (Float::with_val(bits, u.square_ref()) * 108u32)
                + Float::with_val(bits, (Float::with_val(bits, &u * 3u32)).ln()) / 3u32;
            let t32 = Float::with_val(bits, t.pow(Float::with_val(bits, 1.5)));
            let integ = t32 * Float::with_val(bits, &a0 * rat(4, 3))
                - Float::with_val(bits, t.ln_ref()) * Float::with_val(bits, &a1 / Rational::from(72));
            exact - integ
        };
        let t1 = Float::with_val(bits, 5);
        let t2 = Float::with_val(bits, 7);
        let (s1, s2) = (shift(&t1), shift(&t2));
        let d = Float::with_val(bits, &s2 - &s1) / Float::with_val(bits, &t2 - &t1);
        let c = s1 - Float::with_val(bits, &d * &t1);
        (c, d)
    } else {
        (Float::with_val(bits, 0), Float::with_val(bits, 0))
    };
    Ok(DecayConstants {
        a0: (&a0).into(),
        a1: (&a1).into(),
        c: BigFloat::at(c, precision),
        d: BigFloat::at(d, precision),
    })
}

/// u = 1/(3(4t)^(3/4)).
pub fn u_of_t(t: &Float) -> Float {
    let p = t.prec();
    let four_t = Float::with_val(p, t * 4u32);
    Float::with_val(p, 1) / (Float::with_val(p, four_t.pow(Float::with_val(p, 0.75))) * 3u32)
}

/// t = 1/(4(3u)^(4/3)).
pub fn t_of_u(u: &Float) -> Float {
    let p = u.prec();
    let three_u = Float::with_val(p, u * 3u32);
    let third = Float::with_val(p, 4) / 3u32;
    Float::with_val(p, 1) / (Float::with_val(p, three_u.pow(&third)) * 4u32)
}

/// ln u_c with u_c = 3^(1/4)/18.
fn ln_uc(bits: u32) -> Float {
    Float::with_val(bits, Float::with_val(bits, 3).ln()) / 4u32 - Float::with_val(bits, 18).ln()
}

/// K₂g (2j)! j^((5g−7)/2) / u_c^(2j).
pub fn asymptotic_estimate(g: u32, j: u32, precision: Precision) -> Result<BigFloat, TodaError> {
    let bits = precision.bits();
    Ok(BigFloat::at(ln_asymptotic_estimate(g, j, bits)?.exp(), precision))
}

fn ln_asymptotic_estimate(g: u32, j: u32, bits: u32) -> Result<Float, TodaError> {
    if j == 0 {
        return Err(TodaError::BadIndex { j, min: 1 });
    }
    let consts = critical::run_c_recursion(g as usize);
    let k = critical::compute_k(&consts, g as usize, Precision(bits / 3 + 5))?;
    let lnk = k.into_value().ln();
    let ln_fact = Float::with_val(bits, Float::with_val(bits, 2 * j + 1).ln_gamma());
    let ln_j = Float::with_val(bits, j).ln();
    let expo = Float::with_val(bits, 5 * i64::from(g) - 7) / 2u32;
    Ok(lnk + ln_fact + ln_j * expo - ln_uc(bits) * (2 * j))
}

/// f / estimate, evaluated through logarithms.
pub fn asymptotic_ratio(f: &Rational, g: u32, j: u32, precision: Precision) -> Result<BigFloat, TodaError> {
    let bits = precision.bits();
    let ln_f = Float::with_val(bits, f).ln();
    let ratio = (ln_f - ln_asymptotic_estimate(g, j, bits)?).exp();
    Ok(BigFloat::at(ratio, precision))
}

/// ln 2 / 2, the decay constant's magnitude.
pub fn half_ln2(bits: u32) -> Float {
    Float::with_val(bits, Constant::Log2) / 2u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn pipeline(k: usize, horizon: usize) -> ParitySeries {
        let h = StringHierarchy::compute(k, horizon).unwrap();
        toda_integrate(k, h.g(k).unwrap()).unwrap()
    }

    #[test]
    fn genus0_series() {
        let f = pipeline(0, 8);
        let expect = [q(6, 1), q(216, 1), q(13608, 1), q(1119744, 1), q(540416448, 5)];
        for (i, v) in expect.iter().enumerate() {
            assert_eq!(f.coeff_u(2 * i as i64 + 2).as_ref(), Some(v));
        }
    }

    #[test]
    fn genus1_series() {
        let f = pipeline(1, 6);
        let expect = [q(3, 2), q(189, 1), q(26892, 1), q(4076568, 1), q(3213210384, 5)];
        for (i, v) in expect.iter().enumerate() {
            assert_eq!(f.coeff_u(2 * i as i64 + 2).as_ref(), Some(v));
        }
    }

    #[test]
    fn closed_forms_small_j() {
        assert_eq!(genus0_closed_form(1).unwrap(), q(12, 1));
        assert_eq!(genus0_closed_form(2).unwrap(), q(5184, 1));
        assert_eq!(genus0_closed_form(3).unwrap(), q(9797760, 1));
        assert_eq!(genus1_closed_form(1).unwrap(), q(3, 1));
        assert_eq!(genus1_closed_form(2).unwrap(), q(4536, 1));
        assert_eq!(genus1_closed_form(3).unwrap(), q(19362240, 1));
    }

    #[test]
    fn reduction_identity() {
        for j in [2, 3, 15] {
            assert!(hypergeom_3f2_reduction_check(j).unwrap(), "j = {j}");
        }
        assert!(hypergeom_3f2_reduction_check(1).is_err());
    }

    #[test]
    fn missing_subtraction_rejected() {
        let bad = TruncatedSeries::new(Var::W, 1, vec![q(2, 1), q(36, 1), q(3240, 1)]);
        assert!(matches!(toda_integrate(0, &bad), Err(TodaError::MissingSubtraction(_))));
        let degenerate = TruncatedSeries::new(Var::W, 0, vec![q(1, 1), q(810, 1)]);
        assert!(matches!(toda_integrate(1, &degenerate), Err(TodaError::DegenerateTerm { .. })));
    }

    #[test]
    fn k0_decay_constants() {
        let h = StringHierarchy::compute(1, 4).unwrap();
        let dc = decay_constants(&h, 0, Precision(40)).unwrap();
        assert_eq!(dc.a0, (&q(1, 2)).into());
        assert_eq!(dc.a1, (&q(18, 1)).into());
        let bits = Precision(40).bits();
        let target = -half_ln2(bits);
        assert!(dc.c.within(&target, &Float::with_val(64, 1e-35)));
        assert!(dc.d.within(&Float::with_val(bits, 0), &Float::with_val(64, 1e-35)));
        let dc1 = decay_constants(&h, 1, Precision(40)).unwrap();
        assert_eq!(dc1.a0, (&q(0, 1)).into());
        assert_eq!(dc1.a1, (&q(0, 1)).into());
    }

    #[test]
    fn t_u_round_trip() {
        let u = Float::with_val(200, 0.05);
        let back = u_of_t(&t_of_u(&u));
        assert!(Float::with_val(200, back - &u).abs() < 1e-55);
        // u_c maps to t_c = 3·2^(-2/3)
        let uc = Float::with_val(200, 3).root(4) / 18u32;
        let tc = t_of_u(&uc);
        let expect = Float::with_val(200, 2).pow(Float::with_val(200, -2) / 3u32) * 3u32;
        assert!(Float::with_val(200, tc - expect).abs() < 1e-55);
    }
}
