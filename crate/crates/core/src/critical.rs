//! Behaviour of the hierarchy at the critical point w_c = √3/324: the exact
//! C₂g/D₂g recursion in Q(β), the constants K₂g, the Painlevé I check and
//! numerical fits of the leading singular coefficients.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::exact::gamma::{self, GammaError};
use crate::exact::{rat, AlgebraicNumber, BigFloat, Precision, TruncatedSeries, Var};
use crate::hierarchy::{self, StringHierarchy};

type Alg = AlgebraicNumber;

fn alg(n: i64, d: i64, k: usize) -> Alg {
    Alg::monomial(rat(n, d), k)
}

/// w_c = √3/324 = β²/648.
pub fn w_c() -> Alg {
    alg(1, 648, 2)
}

/// ĝ₀(w_c) = 1/108.
pub fn g0_at_wc() -> Alg {
    alg(1, 108, 0)
}

/// b̂₀(w_c) = (3 − √3)/18.
pub fn b0_at_wc() -> Alg {
    &alg(1, 6, 0) - &alg(1, 36, 2)
}

/// 1/(2^(3/2)·3^(5/4)) = β³/72.
pub fn recursion_multiplier() -> Alg {
    alg(1, 72, 3)
}

/// μ = β³/(72·48), the coefficient of C₂ₖ₋₂ in the recursion.
pub fn mu() -> Alg {
    alg(1, 3456, 3)
}

/// ν = 54β³/72, the coefficient of the quadratic sum in the recursion.
pub fn nu() -> Alg {
    alg(54, 72, 3)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CriticalConstants {
    pub c: Vec<Alg>,
    pub d: Vec<Alg>,
    /// A₂ₖ, B₂ₖ for k ≥ 1; index 0 is unused and zero.
    pub a: Vec<Alg>,
    pub b: Vec<Alg>,
    pub w_c: Alg,
}

fn pair_sum(x: &[Alg], y: &[Alg], k: usize) -> Alg {
    (1..k).fold(Alg::zero(), |acc, m| &acc + &(&x[m] * &y[k - m]))
}

/// Runs the critical recursion for g ≤ max_genus.
///
/// C₂ₖ and D₂ₖ are obtained by solving the leading-order 2×2 system with the
/// intermediates A₂ₖ, B₂ₖ; D₂ₖ is not assumed proportional to C₂ₖ.
pub fn run_c_recursion(max_genus: usize) -> CriticalConstants {
    let c0 = alg(-1, 18, 1);
    let d0 = alg(-1, 6, 3);
    let mut c = vec![c0];
    let mut d = vec![d0];
    let mut a = vec![Alg::zero()];
    let mut b = vec![Alg::zero()];
    let m = recursion_multiplier();
    let one_minus_6b0 = &Alg::one() - &b0_at_wc().scale(&rat(6, 1));
    let six_g0 = g0_at_wc().scale(&rat(6, 1));
    for k in 1..=max_genus {
        let kk = k as i64;
        let poly = rat((5 * kk - 6) * (5 * kk - 4), 1);
        let ak = &c[k - 1].scale(&(poly.clone() * rat(-3, 16))) - &pair_sum(&d, &d, k).scale(&rat(3, 1));
        let bk = &d[k - 1].scale(&(poly * rat(1, 576))) + &pair_sum(&c, &d, k).scale(&rat(6, 1));
        let ck = &m * &(&(&-&six_g0 * &ak) + &(&one_minus_6b0 * &bk));
        let dk = &m * &(&(&-&one_minus_6b0 * &ak) + &bk.scale(&rat(6, 1)));
        a.push(ak);
        b.push(bk);
        c.push(ck);
        d.push(dk);
    }
    CriticalConstants { c, d, a, b, w_c: w_c() }
}

/// C₂ₖ from the single eliminated recursion
/// C₂ₖ = (β³/72)((5k−6)(5k−4)C₂ₖ₋₂/48 + 54 Σ C₂ₘC₂ₘ').
pub fn c_recursion_direct(max_genus: usize) -> Vec<Alg> {
    let mut c = vec![alg(-1, 18, 1)];
    for k in 1..=max_genus {
        let kk = k as i64;
        let lin = c[k - 1].scale(&rat((5 * kk - 6) * (5 * kk - 4), 48));
        let quad = pair_sum(&c, &c, k).scale(&rat(54, 1));
        c.push(&recursion_multiplier() * &(&lin + &quad));
    }
    c
}

/// `coeff · 2^(two_half/2) · 3^(three_quarter/4) · π^(sqrt_pi/2)` in normal form
/// (two_half ∈ {0,1}, three_quarter ∈ 0..4).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Surd {
    pub coeff: crate::exact::RationalRepr,
    pub two_half: i32,
    pub three_quarter: i32,
    pub sqrt_pi: i32,
}

impl Surd {
    fn normalized(mut coeff: Rational, two_half: i32, three_quarter: i32, sqrt_pi: i32) -> Self {
        let (q2, r2) = (two_half.div_euclid(2), two_half.rem_euclid(2));
        let (q3, r3) = (three_quarter.div_euclid(4), three_quarter.rem_euclid(4));
        coeff *= pow_rat(2, q2);
        coeff *= pow_rat(3, q3);
        Self { coeff: (&coeff).into(), two_half: r2, three_quarter: r3, sqrt_pi }
    }

    pub fn coeff(&self) -> Rational {
        Rational::try_from(&self.coeff).expect("valid representation")
    }

    pub fn is_rational(&self) -> bool {
        self.two_half == 0 && self.three_quarter == 0 && self.sqrt_pi == 0
    }

    pub fn to_float(&self, bits: u32) -> Float {
        let two = Float::with_val(bits, 2).pow(Float::with_val(bits, self.two_half) / 2u32);
        let three = Float::with_val(bits, 3).pow(Float::with_val(bits, self.three_quarter) / 4u32);
        let pi = Float::with_val(bits, Constant::Pi).sqrt().pow(self.sqrt_pi);
        Float::with_val(bits, &self.coeff()) * two * three * pi
    }
}

impl std::fmt::Display for Surd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.coeff())?;
        if self.two_half != 0 {
            write!(f, "·√2")?;
        }
        match self.three_quarter {
            0 => {}
            2 => write!(f, "·√3")?,
            e => write!(f, "·3^({e}/4)")?,
        }
        match self.sqrt_pi {
            0 => {}
            1 => write!(f, "·√π")?,
            -1 => write!(f, "/√π")?,
            e if e % 2 == 0 => write!(f, "·π^{}", e / 2)?,
            e => write!(f, "·π^({e}/2)")?,
        }
        Ok(())
    }
}

fn pow_rat(base: i64, e: i32) -> Rational {
    let p = Rational::from(Integer::from(base).pow(e.unsigned_abs()));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CriticalError {
    #[error("C₂g for g = {0} is not available")]
    Missing(usize),
    #[error("C₂g for g = {0} is not a single power of β")]
    NotMonomial(usize),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("coefficient fit needs horizon at least {need}, got {got}")]
    ShortHorizon { need: usize, got: usize },
    #[error(transparent)]
    Hierarchy(#[from] hierarchy::HierarchyError),
}

/// K₂g = 6·3^(1/4)·C₂g / (Γ((5g−1)/2)·u_c^g), exactly, with u_c = 3^(1/4)/18.
pub fn k_exact(consts: &CriticalConstants, g: usize) -> Result<Surd, CriticalError> {
    let cg = consts.c.get(g).ok_or(CriticalError::Missing(g))?;
    let deg = cg.monomial_degree().ok_or(CriticalError::NotMonomial(g))?;
    let r = cg.components()[deg].clone();
    let gam = gamma::gamma_half(5 * g as i64 - 1)?;
    let coeff = r * 6u32 * Integer::from(18).pow(g as u32) / gam.coeff;
    // β^deg = 2^(deg/2) 3^(deg/4); 3^(1/4) / 3^(g/4)
    Ok(Surd::normalized(coeff, deg as i32, 1 + deg as i32 - g as i32, -gam.sqrt_pi_power))
}

pub fn compute_k(consts: &CriticalConstants, g: usize, precision: Precision) -> Result<BigFloat, GammaError> {
    let bits = precision.bits();
    match k_exact(consts, g) {
        Ok(s) => Ok(BigFloat::at(s.to_float(bits), precision)),
        Err(CriticalError::Gamma(e)) => Err(e),
        Err(_) => {
            // general element of Q(β): evaluate numerically
            let cg = consts.c[g].to_float(bits);
            let uc = Float::with_val(bits, 3).root(4) / 18u32;
            let gam = gamma::gamma_half(5 * g as i64 - 1)?.to_float(bits);
            let k = cg * Float::with_val(bits, 3).root(4) * 6u32 / (gam * uc.pow(g as u32));
            Ok(BigFloat::at(k, precision))
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct StandardForm {
    pub q: BigFloat,
    pub c: BigFloat,
    pub lambda: BigFloat,
    /// q c²/λ − 6
    pub quadratic_residual: BigFloat,
    /// q λ c³ C₀² − 1
    pub linear_residual: BigFloat,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PainleveReport {
    pub max_genus: usize,
    /// The quadratic coefficient forced at each order G = 1..=max_genus.
    pub q_per_order: Vec<Alg>,
    pub consistent: bool,
    pub q: Alg,
    /// q·8μ
    pub q_relative_to_inv_8mu: Alg,
    pub matches_inv_8mu: bool,
    pub matches_inv_8mu_c0: bool,
    /// ν·(−2C₀)
    pub nu_times_minus_2c0: Alg,
    /// Substitution of the series with the fitted q, exact residual per order.
    pub residuals_zero: bool,
    /// Reference constants c = 2^(−3/5), λ = 2^(3/10)·3^(5/4) tested with q = 1/(8μ).
    pub standard_form_inv_8mu: StandardForm,
    /// The same constants tested with the fitted q.
    pub standard_form_fitted_q_reference_constants: StandardForm,
    /// c, λ solved for the fitted q.
    pub standard_form_fitted: StandardForm,
}

/// Substitutes y(t) = Σ C₂g t^((1−5g)/2) into y'' = q(y² − C₀² t) and solves
/// for q order by order (the t^(1−5G/2) terms, 1 ≤ G ≤ max_genus).
pub fn painleve_check(consts: &CriticalConstants, max_genus: usize, precision: Precision) -> Result<PainleveReport, CriticalError> {
    let c = &consts.c;
    if c.len() <= max_genus {
        return Err(CriticalError::Missing(max_genus));
    }
    let full_sum = |g: usize| (0..=g).fold(Alg::zero(), |acc, m| &acc + &(&c[m] * &c[g - m]));
    let second_deriv = |g: usize| {
        // coefficient of t^(1−5G/2) in y'': from the C₂(G−1) term
        let gg = g as i64;
        c[g - 1].scale(&rat((5 * gg - 6) * (5 * gg - 4), 4))
    };
    let mut qs = Vec::new();
    for g in 1..=max_genus {
        let s = full_sum(g);
        let inv = s.inv().ok_or(CriticalError::Missing(g))?;
        qs.push(&second_deriv(g) * &inv);
    }
    let q = qs[0].clone();
    let consistent = qs.iter().all(|x| *x == q);
    let residuals_zero = (1..=max_genus).all(|g| (&second_deriv(g) - &(&q * &full_sum(g))).is_zero());
    let eight_mu = mu().scale(&rat(8, 1));
    let inv_8mu = eight_mu.inv().expect("nonzero");
    let inv_8mu_c0 = (&eight_mu * &c[0]).inv().expect("nonzero");
    let nu_check = &nu() * &c[0].scale(&rat(-2, 1));

    let bits = precision.bits();
    let c0sq = (&c[0] * &c[0]).to_float(bits);
    let form = |q: Float, cc: Float, lambda: Float| {
        let quad = Float::with_val(bits, &q * &Float::with_val(bits, cc.square_ref())) / &lambda - 6u32;
        let lin = Float::with_val(bits, &q * &lambda) * Float::with_val(bits, (&cc).pow(3u32)) * &c0sq - 1u32;
        StandardForm {
            q: BigFloat::at(q, precision),
            c: BigFloat::at(cc, precision),
            lambda: BigFloat::at(lambda, precision),
            quadratic_residual: BigFloat::at(quad, precision),
            linear_residual: BigFloat::at(lin, precision),
        }
    };
    let ref_c = Float::with_val(bits, 2).pow(Float::with_val(bits, -3) / 5u32);
    let ref_lambda = Float::with_val(bits, 2).pow(Float::with_val(bits, 3) / 10u32)
        * Float::with_val(bits, 3).pow(Float::with_val(bits, 5) / 4u32);
    let qf = q.to_float(bits);
    // c⁵ = 6/(q² C₀²), λ = q c²/6
    let c5 = Float::with_val(bits, 6) / (Float::with_val(bits, qf.square_ref()) * &c0sq);
    let cf = c5.root(5);
    let lf = Float::with_val(bits, &qf * &Float::with_val(bits, cf.square_ref())) / 6u32;
    Ok(PainleveReport {
        max_genus,
        consistent,
        q_relative_to_inv_8mu: &q * &eight_mu,
        matches_inv_8mu: q == inv_8mu,
        matches_inv_8mu_c0: q == inv_8mu_c0,
        nu_times_minus_2c0: nu_check,
        residuals_zero,
        standard_form_inv_8mu: form(inv_8mu.to_float(bits), ref_c.clone(), ref_lambda.clone()),
        standard_form_fitted_q_reference_constants: form(qf.clone(), ref_c, ref_lambda),
        standard_form_fitted: form(qf, cf, lf),
        q_per_order: qs,
        q,
    })
}

/// Exact Puiseux expansions of ĝ₂ₖ and b̂₂ₖ at w_c in δ = (w_c − w)^(1/2),
/// over Q(β). `len` is the number of δ-terms kept per series.
pub fn critical_expansion(max_k: usize, len: usize) -> Result<(Vec<TruncatedSeries<Alg>>, Vec<TruncatedSeries<Alg>>), CriticalError> {
    let l = len as i64 + 2 * max_k as i64 + 2;
    let c0 = alg(-1, 18, 1);
    let two_wc = w_c().scale(&rat(2, 1));
    let delta = TruncatedSeries::<Alg>::monomial(Var::Delta, 1, l);
    let delta2 = TruncatedSeries::<Alg>::monomial(Var::Delta, 2, l);
    // ĝ₀ = 1/108 + δH with H²(1 + 72δH) = 2w_c − δ²
    let mut h = TruncatedSeries::constant(Var::Delta, c0, l);
    let mut known = 1;
    while known < l {
        let h2 = h.square();
        let f = h2
            .add(&delta.mul(&h2.mul(&h)?)?.scale(&rat(72, 1)))?
            .add(&delta2)?
            .add_scalar(&-&two_wc)
            .truncated(l);
        let fp = h.scale(&rat(2, 1)).add(&delta.mul(&h2)?.scale(&rat(216, 1)))?.truncated(l);
        h = h.sub(&f.div(&fp)?)?.with_offset(0).truncated(l);
        known *= 2;
    }
    let g0 = delta.mul(&h)?.add_scalar(&g0_at_wc());
    let w = delta2.neg().add_scalar(&w_c());
    let b0 = hierarchy::b0_from_g0(&g0, &w)?;
    let det = g0.scale(&rat(-108, 1)).add_scalar(&Alg::one());
    let det_inv = det.inverse()?;
    let d_dw = |s: &TruncatedSeries<Alg>| s.derivative().shifted(-1).scale(&rat(-1, 2));
    let mut g = vec![g0];
    let mut b = vec![b0];
    for k in 1..=max_k {
        let (gk, bk) = hierarchy::solve_level(&g, &b, k, &d_dw, &det_inv)?;
        g.push(gk);
        b.push(bk);
    }
    Ok((g, b))
}

impl From<crate::exact::SeriesError> for CriticalError {
    fn from(e: crate::exact::SeriesError) -> Self {
        CriticalError::Hierarchy(e.into())
    }
}

/// Numerical fit of the leading singular coefficient of ĝ₂ₖ at w_c.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LeadingFit {
    pub k: usize,
    /// α in C₂ₖ (Δw)^α
    pub exponent: crate::exact::RationalRepr,
    pub coefficient: BigFloat,
    pub error: BigFloat,
    pub horizon: usize,
}

/// Darboux fit: c_j / [w_c^(α−j) Γ(j−α)/(Γ(−α) j!)] → C₂ₖ, extrapolated in
/// powers of j^(−1/2) from the last coefficients up to the horizon.
pub fn critical_leading(h: &StringHierarchy, k: usize) -> Result<LeadingFit, CriticalError> {
    const POINTS: usize = 8;
    const STRIDE: usize = 3;
    let need = 40;
    if h.horizon < need {
        return Err(CriticalError::ShortHorizon { need, got: h.horizon });
    }
    let bits = 256;
    let series = h.g(k)?;
    let alpha = rat(1 - 5 * k as i64, 2);
    let af = Float::with_val(bits, &alpha);
    let wc = w_c().to_float(bits);
    let ln_wc = Float::with_val(bits, wc.ln_ref());
    let neg_a = Float::with_val(bits, -&af);
    let gamma_neg_a = neg_a.clone().gamma();
    let ratio = |j: usize| {
        let cj = Float::with_val(bits, &series.coeff(j as i64).expect("within horizon"));
        let jf = Float::with_val(bits, j);
        // ln[w_c^(α−j) Γ(j−α)/j!]
        let ln_model = Float::with_val(bits, &af - &jf) * &ln_wc
            + Float::with_val(bits, &jf - &af).ln_gamma()
            - Float::with_val(bits, &jf + 1u32).ln_gamma();
        let model = ln_model.exp() / &gamma_neg_a;
        (Float::with_val(bits, jf.sqrt().recip()), cj / model)
    };
    let window = |top: usize| {
        let (xs, ys): (Vec<Float>, Vec<Float>) = (0..POINTS).map(|i| ratio(top - i * STRIDE)).unzip();
        neville_at_zero(&xs, &ys)
    };
    let (value, spread) = window(h.horizon);
    let (shifted, shifted_spread) = window(h.horizon - 2 * STRIDE);
    let mut err = Float::with_val(bits, &value - &shifted).abs();
    err = err.max(&spread).max(&shifted_spread);
    Ok(LeadingFit {
        k,
        exponent: (&alpha).into(),
        coefficient: BigFloat::new(value, 6),
        error: BigFloat::new(err, 3),
        horizon: h.horizon,
    })
}

/// Polynomial extrapolation to x = 0; the error is the spread of the three
/// highest orders.
fn neville_at_zero(xs: &[Float], ys: &[Float]) -> (Float, Float) {
    let n = xs.len();
    let mut p: Vec<Float> = ys.to_vec();
    let mut heads = vec![ys[0].clone()];
    for m in 1..n {
        for i in 0..(n - m) {
            let num = Float::with_val(p[i].prec(), &xs[i + m] * &p[i]) - Float::with_val(p[i].prec(), &xs[i] * &p[i + 1]);
            let den = Float::with_val(p[i].prec(), &xs[i + m] - &xs[i]);
            p[i] = num / den;
        }
        heads.push(p[0].clone());
    }
    let best = p[0].clone();
    let err = heads[n.saturating_sub(3)..]
        .iter()
        .map(|x| Float::with_val(best.prec(), x - &best).abs())
        .fold(Float::new(best.prec()), |a, b| a.max(&b));
    (best, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_constants() {
        let cc = run_c_recursion(2);
        assert_eq!(cc.c[0], alg(-1, 18, 1));
        assert_eq!(cc.c[1], alg(1, 5184, 0));
        // 49·2^(1/2)3^(3/4)/17915904 = 49β³/(2·17915904)
        assert_eq!(cc.c[2], alg(49, 35831808, 3));
    }

    #[test]
    fn d_is_six_root3_c() {
        let cc = run_c_recursion(10);
        let s = Alg::sqrt3().scale(&rat(6, 1));
        for g in 0..=10 {
            assert_eq!(cc.d[g], &s * &cc.c[g], "g = {g}");
        }
        assert_eq!(c_recursion_direct(10), cc.c);
    }

    #[test]
    fn k_values() {
        let cc = run_c_recursion(3);
        let k1 = k_exact(&cc, 1).unwrap();
        assert!(k1.is_rational());
        assert_eq!(k1.coeff(), rat(1, 48));
        let bits = Precision(50).bits();
        let six_pi = Float::with_val(bits, Constant::Pi) * 6u32;
        let k0 = Float::with_val(bits, six_pi.sqrt_ref()).recip();
        assert!(Float::with_val(bits, k_exact(&cc, 0).unwrap().to_float(bits) - &k0).abs() < 1e-45);
        let k2 = Float::with_val(bits, &k0 * 7u32) / 1440u32;
        assert!(Float::with_val(bits, k_exact(&cc, 2).unwrap().to_float(bits) - &k2).abs() < 1e-45);
    }

    #[test]
    fn c_signs_and_monomial_structure() {
        let cc = run_c_recursion(8);
        for g in 0..=8 {
            let deg = cc.c[g].monomial_degree().expect("single power of β");
            assert_eq!(deg, (1 + 4 * 8 - g) % 4);
            let positive = cc.c[g].components()[deg].cmp0().is_gt();
            assert_eq!(positive, g >= 1);
        }
    }

    #[test]
    fn painleve() {
        let cc = run_c_recursion(8);
        let rep = painleve_check(&cc, 8, Precision(40)).unwrap();
        assert!(rep.consistent && rep.residuals_zero);
        assert!(rep.matches_inv_8mu_c0);
        assert!(!rep.matches_inv_8mu);
        assert_eq!(rep.nu_times_minus_2c0, Alg::one());
        assert_eq!(rep.q, alg(-648, 1, 0));
        let tiny = Float::with_val(64, 1e-35);
        assert!(rep.standard_form_inv_8mu.quadratic_residual.within(&Float::new(64), &tiny));
        assert!(rep.standard_form_inv_8mu.linear_residual.within(&Float::new(64), &tiny));
        assert!(rep.standard_form_fitted.quadratic_residual.within(&Float::new(64), &tiny));
        assert!(rep.standard_form_fitted.linear_residual.within(&Float::new(64), &tiny));
    }

    #[test]
    fn puiseux_leading_terms_are_the_constants() {
        let cc = run_c_recursion(3);
        let (g, b) = critical_expansion(3, 6).unwrap();
        assert_eq!(g[0].coeff(0), Some(g0_at_wc()));
        assert_eq!(g[0].coeff(1), Some(cc.c[0].clone()));
        assert_eq!(b[0].coeff(0), Some(b0_at_wc()));
        assert_eq!(b[0].coeff(1), Some(cc.d[0].clone()));
        for k in 1..=3 {
            let lead = 1 - 5 * k as i64;
            assert_eq!(g[k].valuation(), Some(lead), "k = {k}");
            assert_eq!(g[k].coeff(lead), Some(cc.c[k].clone()), "k = {k}");
            assert_eq!(b[k].coeff(lead), Some(cc.d[k].clone()), "k = {k}");
        }
    }

    #[test]
    fn darboux_fit_agrees_with_recursion() {
        let cc = run_c_recursion(3);
        let h = StringHierarchy::compute(3, 60).unwrap();
        for k in 0..=3 {
            let fit = critical_leading(&h, k).unwrap();
            let diff = Float::with_val(128, fit.coefficient.value() - cc.c[k].to_float(128)).abs();
            assert!(diff <= *fit.error.value(), "k = {k}");
            let rel = Float::with_val(128, fit.error.value() / cc.c[k].to_float(128)).abs();
            assert!(rel < 5e-3, "k = {k}");
        }
    }
}
