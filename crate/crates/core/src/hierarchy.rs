//! The string-equation hierarchy ĝ₂ₖ(w), b̂₂ₖ(w) as exact series in `w = s u²`.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::exact::gamma::{self, GammaError};
use crate::exact::{rat, Coeff, ParitySeries, SeriesError, TruncatedSeries, Var};

#[derive(Debug, thiserror::Error)]
pub enum HierarchyError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("order {k} requested but only orders below {available} are computed")]
    MissingOrder { k: usize, available: usize },
    #[error("closed form and Newton iteration disagree for the w^{0} coefficient of ĝ₀")]
    G0Mismatch(i64),
    #[error("horizon must be at least 1")]
    EmptyHorizon,
}

/// Weight 1/((2j)!·4^j) of the Taylor shift by ±1/2 in the string equations.
pub fn taylor_weight(j: usize) -> Rational {
    let den = gamma::factorial(2 * j as u32) * Integer::from(4).pow(j as u32);
    Rational::from((Integer::from(1), den))
}

/// Taylor coefficient of w^j in ĝ₀ from the Gamma-function closed form.
pub fn g0_coeff(j: u32) -> Result<Rational, GammaError> {
    let j = i64::from(j);
    let num = gamma::gamma_half(3 * j - 2)?;
    let den = gamma::gamma_half(2 * j)? * gamma::gamma_half(j + 2)?;
    let ratio = (num / den).to_rational()?;
    Ok(ratio * Integer::from(72).pow((j - 1) as u32) / 2u32)
}

/// ĝ₀ through w^horizon by Newton iteration on φ² = 1 + 72wφ³, ĝ₀ = wφ.
pub fn g0_newton(horizon: usize) -> TruncatedSeries {
    let len = horizon as i64;
    let one = TruncatedSeries::constant(Var::W, Rational::from(1), len);
    let w = TruncatedSeries::monomial(Var::W, 1, len);
    let mut phi = one.clone();
    let mut known = 1usize;
    while known < horizon {
        let phi2 = phi.square();
        let phi3 = phi2.mul(&phi).unwrap();
        let f = phi2.sub(&one).unwrap().sub(&w.mul(&phi3).unwrap().scale(&rat(72, 1))).unwrap();
        let fp = phi.scale(&rat(2, 1)).sub(&w.mul(&phi2).unwrap().scale(&rat(216, 1))).unwrap();
        let step = f.truncated(len).div(&fp.truncated(len)).unwrap();
        phi = phi.sub(&step).unwrap().with_offset(0).truncated(len);
        known *= 2;
    }
    phi.shifted(1).truncated(horizon as i64 + 1)
}

/// ĝ₀ through w^horizon, computed by both routes and cross-checked.
pub fn compute_g0_series(horizon: usize) -> Result<TruncatedSeries, HierarchyError> {
    if horizon == 0 {
        return Err(HierarchyError::EmptyHorizon);
    }
    let newton = g0_newton(horizon);
    let closed: Vec<Rational> = (1..=horizon as u32).map(g0_coeff).collect::<Result<_, _>>()?;
    for (j, c) in closed.iter().enumerate() {
        let e = j as i64 + 1;
        if newton.coeff(e).as_ref() != Some(c) {
            return Err(HierarchyError::G0Mismatch(e));
        }
    }
    Ok(TruncatedSeries::new(Var::W, 1, closed))
}

/// b̂₀ = (ĝ₀ − w)/(6ĝ₀).
pub fn b0_from_g0<C: Coeff>(g0: &TruncatedSeries<C>, w: &TruncatedSeries<C>) -> Result<TruncatedSeries<C>, SeriesError> {
    g0.sub(w)?.div(&g0.scale(&rat(6, 1)))
}

/// One level of the hierarchy: solves the 2×2 system for (ĝ₂ₖ, b̂₂ₖ) given all
/// lower orders. `d_dw` differentiates with respect to `w` in whatever variable
/// the series are written in.
pub(crate) fn solve_level<C: Coeff>(
    g: &[TruncatedSeries<C>],
    b: &[TruncatedSeries<C>],
    k: usize,
    d_dw: &dyn Fn(&TruncatedSeries<C>) -> TruncatedSeries<C>,
    det_inv: &TruncatedSeries<C>,
) -> Result<(TruncatedSeries<C>, TruncatedSeries<C>), SeriesError> {
    assert!(k >= 1 && g.len() >= k && b.len() >= k);
    let nth = |s: &TruncatedSeries<C>, n: usize| (0..n).fold(s.clone(), |acc, _| d_dw(&acc));

    // b_derivs[m][j] = b̂₂ₘ^(2j)
    let b_derivs: Vec<Vec<TruncatedSeries<C>>> = (0..k)
        .map(|m| {
            let mut out = vec![b[m].clone()];
            for _ in 0..(k - m) {
                let next = nth(&out[out.len() - 1], 2);
                out.push(next);
            }
            out
        })
        .collect();

    let mut ra = Sum::default();
    for j in 1..=k {
        ra.push(nth(&g[k - j], 2 * j).scale(&(taylor_weight(j) * -6i32)))?;
    }
    for m in 1..k {
        ra.push(b[m].mul(&b[k - m])?.scale(&rat(-3, 1)))?;
    }
    let ra = ra.finish();

    let mut rb = Sum::default();
    for j in 0..=k {
        for m in 0..=(k - j) {
            let mp = k - j - m;
            if m >= k || mp >= k {
                continue;
            }
            rb.push(g[m].mul(&b_derivs[mp][j])?.scale(&(taylor_weight(j) * 6u32)))?;
        }
    }
    let rb = rb.finish();

    let one_minus = b[0].scale(&rat(-6, 1)).add_scalar(&C::one());
    let gk = g[0].scale(&rat(-6, 1)).mul(&ra)?.add(&one_minus.mul(&rb)?)?.mul(det_inv)?;
    let bk = rb.scale(&rat(6, 1)).sub(&one_minus.mul(&ra)?)?.mul(det_inv)?;
    Ok((gk, bk))
}

/// Running sum of series; empty sums are rejected at `finish`.
pub(crate) struct Sum<C: Coeff>(Option<TruncatedSeries<C>>);

impl<C: Coeff> Default for Sum<C> {
    fn default() -> Self {
        Self(None)
    }
}

impl<C: Coeff> Sum<C> {
    pub(crate) fn push(&mut self, term: TruncatedSeries<C>) -> Result<(), SeriesError> {
        self.0 = Some(match self.0.take() {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
        Ok(())
    }

    pub(crate) fn finish(self) -> TruncatedSeries<C> {
        self.0.expect("sum over an empty index set")
    }
}

#[derive(Clone, Debug)]
pub struct StringHierarchy {
    pub max_k: usize,
    /// Highest power of w known in every series.
    pub horizon: usize,
    pub g_hat: Vec<TruncatedSeries>,
    pub b_hat: Vec<TruncatedSeries>,
    /// D(w) = 1 − 108ĝ₀(w).
    pub det_series: TruncatedSeries,
}

fn d_dw_plain(s: &TruncatedSeries) -> TruncatedSeries {
    s.derivative()
}

impl StringHierarchy {
    /// Computes ĝ₂ₖ, b̂₂ₖ for k ≤ max_k, all exact through w^horizon.
    pub fn compute(max_k: usize, horizon: usize) -> Result<Self, HierarchyError> {
        if horizon == 0 {
            return Err(HierarchyError::EmptyHorizon);
        }
        // each level differentiates twice per step down; b̂₀ costs one more order
        let padded = horizon + 2 * max_k + 2;
        let g0 = compute_g0_series(padded)?;
        let len = padded as i64 + 1;
        let w = TruncatedSeries::monomial(Var::W, 1, len);
        let b0 = b0_from_g0(&g0, &w)?;
        let one = TruncatedSeries::constant(Var::W, Rational::from(1), len);
        let det = one.sub(&g0.scale(&rat(108, 1)))?;
        let det_inv = det.inverse()?;

        let mut g = vec![g0];
        let mut b = vec![b0];
        for k in 1..=max_k {
            let (gk, bk) = solve_level(&g, &b, k, &d_dw_plain, &det_inv)?;
            g.push(gk);
            b.push(bk);
        }
        let cut = horizon as i64 + 1;
        let finish = |s: &TruncatedSeries| {
            let t = s.truncated(cut);
            debug_assert_eq!(t.horizon(), cut, "insufficient padding");
            let t = t.trimmed();
            if t.offset() > 0 {
                t.with_offset(t.offset().min(0)).truncated(cut)
            } else {
                t
            }
        };
        Ok(Self {
            max_k,
            horizon,
            g_hat: g.iter().map(finish).collect(),
            b_hat: b.iter().map(finish).collect(),
            det_series: det.truncated(cut),
        })
    }

    pub fn g(&self, k: usize) -> Result<&TruncatedSeries, HierarchyError> {
        self.g_hat.get(k).ok_or(HierarchyError::MissingOrder { k, available: self.g_hat.len() })
    }

    pub fn b(&self, k: usize) -> Result<&TruncatedSeries, HierarchyError> {
        self.b_hat.get(k).ok_or(HierarchyError::MissingOrder { k, available: self.b_hat.len() })
    }

    /// Re-solves order `k` from the stored lower orders.
    pub fn solve_order_k(&self, k: usize) -> Result<(TruncatedSeries, TruncatedSeries), HierarchyError> {
        if k == 0 || k > self.max_k {
            return Err(HierarchyError::MissingOrder { k, available: self.max_k + 1 });
        }
        let det_inv = self.det_series.inverse()?;
        let (gk, bk) = solve_level(&self.g_hat[..k], &self.b_hat[..k], k, &d_dw_plain, &det_inv)?;
        Ok((gk.trimmed(), bk.trimmed()))
    }

    /// Residuals of both string equations at order k, which must vanish through
    /// the known range.
    pub fn string_residuals(&self, k: usize) -> Result<(TruncatedSeries, TruncatedSeries), HierarchyError> {
        let g = &self.g_hat;
        let b = &self.b_hat;
        if k == 0 || k > self.max_k {
            return Err(HierarchyError::MissingOrder { k, available: self.max_k + 1 });
        }
        let cut = self.horizon as i64 + 1 - 2 * k as i64;
        let one = Rational::from(1);
        let lhs_a = g[k].scale(&rat(6, 1)).add(&b[0].scale(&rat(6, 1)).add_scalar(&-one.clone()).mul(&b[k])?)?;
        let lhs_b = b[0].scale(&rat(-6, 1)).add_scalar(&one).mul(&g[k])?.sub(&g[0].scale(&rat(6, 1)).mul(&b[k])?)?;
        // right-hand sides summed directly, independently of solve_level
        let mut rhs_a = Sum::default();
        for m in 0..k {
            let j = k - m;
            rhs_a.push(g[m].nth_derivative(2 * j as u32).scale(&(taylor_weight(j) * -6i32)))?;
        }
        for m in 1..k {
            rhs_a.push(b[m].mul(&b[k - m])?.scale(&rat(-3, 1)))?;
        }
        let mut rhs_b = Sum::default();
        for m in 0..k {
            for mp in 0..k {
                if m + mp > k {
                    continue;
                }
                let j = k - m - mp;
                rhs_b.push(g[m].mul(&b[mp].nth_derivative(2 * j as u32))?.scale(&(taylor_weight(j) * 6u32)))?;
            }
        }
        Ok((lhs_a.sub(&rhs_a.finish())?.truncated(cut), lhs_b.sub(&rhs_b.finish())?.truncated(cut)))
    }

    /// g₂ₖ(s,u) = u^(4k−2) ĝ₂ₖ(s u²) as an even series in u.
    pub fn g_in_u(&self, k: usize, s: &Rational) -> Result<ParitySeries, HierarchyError> {
        Ok(ParitySeries::even(to_u2(self.g(k)?, s, 2 * k as i64 - 1)))
    }

    /// b₂ₖ(s,u) = u^(4k−1) b̂₂ₖ(s u²) as an odd series in u.
    pub fn b_in_u(&self, k: usize, s: &Rational) -> Result<ParitySeries, HierarchyError> {
        Ok(ParitySeries::odd(to_u2(self.b(k)?, s, 2 * k as i64 - 1)))
    }
}

/// Σ c_j w^j ↦ Σ c_j s^j (u²)^(j + shift).
fn to_u2(series: &TruncatedSeries, s: &Rational, shift: i64) -> TruncatedSeries {
    let coeffs = series
        .terms()
        .map(|(e, c)| {
            let sp = if e >= 0 { s.clone().pow(e as u32) } else { s.clone().recip().pow((-e) as u32) };
            c * sp
        })
        .collect();
    TruncatedSeries::new(Var::U2, series.offset() + shift, coeffs)
}

/// Closed forms ĝ₂ = 162ĝ₀(5−324ĝ₀)/(1−108ĝ₀)⁴ and b̂₂ = 54w/(ĝ₀(1−108ĝ₀)⁴),
/// through w^horizon.
pub fn g2_closed_form(horizon: usize) -> Result<(TruncatedSeries, TruncatedSeries), HierarchyError> {
    let g0 = compute_g0_series(horizon + 1)?;
    let len = horizon as i64 + 2;
    let one = TruncatedSeries::constant(Var::W, Rational::from(1), len);
    let d = one.sub(&g0.scale(&rat(108, 1)))?;
    let d4 = d.pow(4);
    let five = TruncatedSeries::constant(Var::W, rat(5, 1), len);
    let g2 = g0.mul(&five.sub(&g0.scale(&rat(324, 1)))?)?.scale(&rat(162, 1)).div(&d4)?;
    let w = TruncatedSeries::monomial(Var::W, 1, len);
    let b2 = w.scale(&rat(54, 1)).div(&g0.mul(&d4)?)?;
    let cut = horizon as i64 + 1;
    Ok((g2.truncated(cut).trimmed(), b2.truncated(cut).trimmed()))
}

/// Generalized binomial coefficient C(x, n) for rational x.
fn binomial(x: &Rational, n: u32) -> Rational {
    let mut acc = Rational::from(1);
    for i in 0..n {
        acc *= Rational::from(x - i);
        acc /= i + 1;
    }
    acc
}

/// Coefficient of w^j in ĝ₂ from the residue finite sum
/// 162·72^(j−1)·Σₘ C(3j/2−m−1, j−m−1)(m+1)(m+5)(3/2)^m.
pub fn g2_coeff(j: u32) -> Rational {
    assert!(j >= 1);
    let mut sum = Rational::new();
    let three_halves = rat(3, 2);
    for m in 0..j {
        let top = Rational::from((3 * j as i64, 2)) - m - 1;
        let term = binomial(&top, j - m - 1) * ((m + 1) * (m + 5)) * three_halves.clone().pow(m);
        sum += term;
    }
    sum * Integer::from(72).pow(j - 1) * 162u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn g0_first_coefficients() {
        let g = compute_g0_series(5).unwrap();
        let expect = [1, 36, 3240, 373248, 48498912];
        for (i, v) in expect.iter().enumerate() {
            assert_eq!(g.coeff(i as i64 + 1), Some(q(*v)));
        }
        assert_eq!(g0_coeff(1).unwrap(), q(1));
    }

    #[test]
    fn g0_satisfies_cubic() {
        let g = compute_g0_series(12).unwrap();
        let w2 = TruncatedSeries::monomial(Var::W, 2, 13);
        let res = g.pow(3).scale(&q(72)).sub(&g.square()).unwrap().add(&w2).unwrap().truncated(13);
        assert!(res.is_zero_to_horizon());
    }

    #[test]
    fn b0_leading_terms() {
        let h = StringHierarchy::compute(0, 4).unwrap();
        let b0 = h.b(0).unwrap();
        assert_eq!(b0.coeff(1), Some(q(6)));
        assert_eq!(b0.coeff(2), Some(q(324)));
    }

    #[test]
    fn level_one_matches_closed_form() {
        let h = StringHierarchy::compute(1, 12).unwrap();
        let (g2, b2) = g2_closed_form(12).unwrap();
        assert_eq!(h.g(1).unwrap().coeff(1), Some(q(810)));
        assert_eq!(h.g(1).unwrap().coeff(2), Some(q(326592)));
        assert_eq!(b2.coeff(0), Some(q(54)));
        for e in 0..=12 {
            assert_eq!(h.g(1).unwrap().coeff(e), g2.coeff(e), "ĝ₂ w^{e}");
            assert_eq!(h.b(1).unwrap().coeff(e), b2.coeff(e), "b̂₂ w^{e}");
        }
    }

    #[test]
    fn residue_sum_matches_series() {
        let (g2, _) = g2_closed_form(10).unwrap();
        assert_eq!(g2_coeff(2), q(326592));
        for j in 1..=10u32 {
            assert_eq!(Some(g2_coeff(j)), g2.coeff(i64::from(j)));
        }
    }

    #[test]
    fn g4_starts_at_w1() {
        let h = StringHierarchy::compute(2, 6).unwrap();
        let g4 = h.g(2).unwrap();
        assert_eq!(g4.coeff(0), Some(q(0)));
        assert!(g4.coeff(1).unwrap() > 0);
    }

    #[test]
    fn string_equations_hold() {
        let h = StringHierarchy::compute(3, 10).unwrap();
        for k in 1..=3 {
            let (ra, rb) = h.string_residuals(k).unwrap();
            assert!(ra.is_zero_to_horizon(), "k={k}: {ra:?}");
            assert!(rb.is_zero_to_horizon(), "k={k}: {rb:?}");
        }
    }

    #[test]
    fn u_variable_forms() {
        let h = StringHierarchy::compute(1, 6).unwrap();
        let g0 = h.g_in_u(0, &q(1)).unwrap();
        let expect = [(0, 1), (2, 36), (4, 3240), (6, 373248), (8, 48498912)];
        for (p, v) in expect {
            assert_eq!(g0.coeff_u(p), Some(q(v)));
        }
        let b0 = h.b_in_u(0, &q(1)).unwrap();
        assert_eq!(b0.coeff_u(1), Some(q(6)));
        assert_eq!(b0.coeff_u(3), Some(q(324)));
        assert_eq!(b0.coeff_u(5), Some(q(31104)));
        let g2 = h.g_in_u(1, &q(1)).unwrap();
        assert_eq!(g2.coeff_u(2), Some(q(0)));
        assert_eq!(g2.coeff_u(4), Some(q(810)));
    }

    #[test]
    fn determinant_constant_term() {
        let h = StringHierarchy::compute(0, 8).unwrap();
        assert_eq!(h.det_series.coeff(0), Some(q(1)));
        let prod = h.det_series.mul(&h.det_series.inverse().unwrap()).unwrap();
        assert_eq!(prod.coeff(0), Some(q(1)));
        for e in 1..prod.horizon() {
            assert_eq!(prod.coeff(e), Some(q(0)));
        }
        let inv = h.det_series.inverse().unwrap();
        assert_eq!(inv.coeff(1), Some(q(108)));
    }
}
