//! Equilibrium measure of the one-cut cubic model: endpoints [a, b] = [x − y, x + y],
//! density and the positivity of Re φ₁, Re φ₂ off the support.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::exact::{rat, BigFloat, ParitySeries, Precision, SeriesError, TruncatedSeries, Var};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquilibriumError {
    #[error("u = {0} is negative")]
    Negative(String),
    #[error("u = {0} lies beyond the critical value u_c = 3^(1/4)/18")]
    Supercritical(String),
    #[error("could not bracket the bounded root of the endpoint cubic at u = {0}")]
    Bracket(String),
    #[error("the positivity check needs 0 < u < u_c")]
    OutOfRange,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct EquilibriumData {
    pub u: BigFloat,
    pub x: BigFloat,
    pub y: BigFloat,
    pub a: BigFloat,
    pub b: BigFloat,
    /// Double zero of ϱ², infinite at u = 0.
    pub z0: BigFloat,
    pub critical: bool,
    #[serde(skip)]
    bits: u32,
}

pub fn u_critical(bits: u32) -> Float {
    Float::with_val(bits, 3).root(4) / 18u32
}

fn cubic(u: &Float, x: &Float) -> (Float, Float) {
    let bits = x.prec();
    let u2 = Float::with_val(bits, u.square_ref());
    let x2 = Float::with_val(bits, x.square_ref());
    // 18u²x³ − 9ux² + x − 6u and its x-derivative
    let f = Float::with_val(bits, &u2 * &x2) * x * 18u32 - Float::with_val(bits, u * &x2) * 9u32 + x
        - Float::with_val(bits, u * 6u32);
    let df = Float::with_val(bits, &u2 * &x2) * 54u32 - Float::with_val(bits, u * x) * 18u32 + 1u32;
    (f, df)
}

/// Residual of 18u²x³ − 9ux² + x − 6u at the solved point.
pub fn cubic_residual(eq: &EquilibriumData) -> Float {
    cubic(eq.u.value(), eq.x.value()).0
}

/// Endpoints for 0 ≤ u ≤ u_c. The bounded root x₁(u) is the unique root of the
/// cubic in [0, x₋], x₋ = (18 − 6√3)/(108u) being the smaller critical point;
/// at u_c it is the double root x₋ itself.
pub fn solve_endpoints(u: &Float, precision: Precision) -> Result<EquilibriumData, EquilibriumError> {
    let bits = precision.with_guard(10).bits();
    let u = Float::with_val(bits, u);
    let shown = || crate::exact::bigfloat::to_decimal(&u, 20);
    if u.is_sign_negative() && !u.is_zero() {
        return Err(EquilibriumError::Negative(shown()));
    }
    let uc = u_critical(bits);
    let tol = Float::with_val(bits, &uc * &precision.epsilon(5));
    let gap = Float::with_val(bits, &uc - &u);
    let critical = Float::with_val(bits, gap.abs_ref()) <= tol;
    if !critical && gap.is_sign_negative() {
        return Err(EquilibriumError::Supercritical(shown()));
    }
    let wrap = |x: Float| BigFloat::at(x, precision);
    if u.is_zero() {
        let two = Float::with_val(bits, 2);
        return Ok(EquilibriumData {
            u: wrap(u),
            x: wrap(Float::new(bits)),
            y: wrap(two.clone()),
            a: wrap(-two.clone()),
            b: wrap(two),
            z0: wrap(Float::with_val(bits, rug::float::Special::Infinity)),
            critical: false,
            bits,
        });
    }
    let sqrt3 = Float::with_val(bits, 3).sqrt();
    let x_minus = (Float::with_val(bits, 18) - sqrt3 * 6u32) / Float::with_val(bits, &u * 108u32);
    let x = if critical {
        x_minus
    } else {
        bounded_root(&u, x_minus, &precision.epsilon(0)).ok_or_else(|| EquilibriumError::Bracket(shown()))?
    };
    let one_minus = Float::with_val(bits, 1) - Float::with_val(bits, &u * &x) * 6u32;
    let y = Float::with_val(bits, 2) / one_minus.sqrt();
    let a = Float::with_val(bits, &x - &y);
    let b = Float::with_val(bits, &x + &y);
    let z0 = Float::with_val(bits, 1) / Float::with_val(bits, &u * 3u32) - &x;
    Ok(EquilibriumData { u: wrap(u), x: wrap(x), y: wrap(y), a: wrap(a), b: wrap(b), z0: wrap(z0), critical, bits })
}

/// Safeguarded Newton on [0, hi] where the cubic goes from −6u to ≥ 0.
fn bounded_root(u: &Float, hi: Float, eps: &Float) -> Option<Float> {
    let bits = hi.prec();
    let mut lo = Float::new(bits);
    let mut hi = hi;
    if cubic(u, &hi).0.is_sign_negative() {
        return None;
    }
    let mut x = Float::with_val(bits, u * 6u32).min(&hi);
    for _ in 0..(4 * bits) {
        let (f, df) = cubic(u, &x);
        if f.is_zero() {
            return Some(x);
        }
        if f.is_sign_negative() {
            lo.clone_from(&x);
        } else {
            hi.clone_from(&x);
        }
        let newton = Float::with_val(bits, &x - &f / df);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            Float::with_val(bits, &lo + &hi) / 2u32
        };
        let step = Float::with_val(bits, &next - &x).abs();
        x = next;
        if step <= Float::with_val(bits, eps * &x.clone().abs().max(&Float::with_val(bits, 1))) {
            return Some(x);
        }
    }
    Some(x)
}

/// x = u·X(u²) and y = Y(u²) to `order` terms in u², from
/// X = 6 + 9vX² − 18v²X³ and y = 2(1 − 6vX)^(−1/2).
pub fn endpoint_series(order: usize) -> Result<(ParitySeries, ParitySeries), EquilibriumError> {
    let horizon = order.max(1) as i64;
    let v = TruncatedSeries::monomial(Var::U2, 1, horizon);
    let v2 = TruncatedSeries::monomial(Var::U2, 2, horizon);
    let mut xs = TruncatedSeries::constant(Var::U2, rat(6, 1), horizon);
    for _ in 0..order {
        let sq = xs.square();
        let next = v
            .mul(&sq)?
            .scale(&rat(9, 1))
            .sub(&v2.mul(&sq.mul(&xs)?)?.scale(&rat(18, 1)))?
            .add_scalar(&rat(6, 1))
            .with_offset(0)
            .truncated(horizon);
        if next == xs {
            break;
        }
        xs = next;
    }
    let inner = v.mul(&xs)?.scale(&rat(-6, 1)).add_scalar(&rat(1, 1)).with_offset(0).truncated(horizon);
    let ys = inner.pow_rational(&rat(-1, 2))?.scale(&rat(2, 1));
    Ok((ParitySeries::odd(xs), ParitySeries::even(ys)))
}

fn sqrt_r(eq: &EquilibriumData, z: &Complex) -> Complex {
    let za = Complex::with_val(eq.bits, z - eq.a.value()).sqrt();
    let zb = Complex::with_val(eq.bits, z - eq.b.value()).sqrt();
    za * zb
}

fn h(eq: &EquilibriumData, z: &Complex) -> Complex {
    // 1 − 3uz − 3ux
    let u3 = Float::with_val(eq.bits, eq.u.value() * 3u32);
    let c = Float::with_val(eq.bits, 1) - Float::with_val(eq.bits, &u3 * eq.x.value());
    c - Complex::with_val(eq.bits, z * u3)
}

/// ϱ(z) = (1/2πi)√((z−a)(z−b))·(1 − 3uz − 3ux), with √ ~ z at infinity and the
/// cut on [a, b]; on the cut a real z means the + side.
pub fn density_at(eq: &EquilibriumData, z: &Complex) -> Complex {
    let two_pi_i = Complex::with_val(eq.bits, (0, Float::with_val(eq.bits, Constant::Pi) * 2u32));
    sqrt_r(eq, z) * h(eq, z) / two_pi_i
}

/// ∫ₐᵇ ϱ(s) ds via s = a + (b − a) sin²θ, evaluated at twice the working precision.
pub fn normalization(eq: &EquilibriumData) -> Float {
    let bits = 2 * eq.bits;
    let gl = GaussLegendre::new(40, bits);
    let a = Float::with_val(bits, eq.a.value());
    let width = Float::with_val(bits, eq.b.value() - &a);
    let u3 = Float::with_val(bits, eq.u.value() * 3u32);
    let c = Float::with_val(bits, 1) - Float::with_val(bits, &u3 * eq.x.value());
    let half_pi = Float::with_val(bits, Constant::Pi) / 2u32;
    let integral = gl.integrate(&Float::new(bits), &half_pi, |t| {
        let (sin, cos) = t.clone().sin_cos(Float::new(bits));
        let sc = Float::with_val(bits, &sin * &cos);
        let s = Float::with_val(bits, sin.square_ref()) * &width + &a;
        let hs = Float::with_val(bits, &c - Float::with_val(bits, &u3 * &s));
        Float::with_val(bits, sc.square_ref()) * hs
    });
    let pi = Float::with_val(bits, Constant::Pi);
    integral * Float::with_val(bits, width.square_ref()) / pi
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PhiSample {
    pub z_re: String,
    pub z_im: String,
    pub re_phi: String,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PhiReport {
    pub samples: usize,
    pub min_phi1_left: BigFloat,
    pub min_phi2_gap: BigFloat,
    pub min_phi2_ray: BigFloat,
    /// Samples where Re φ ≤ 0.
    pub violations: Vec<PhiSample>,
    /// |z| at which the growth fit Re φ ≈ Re(κz³ + qz²) is made.
    pub growth_radii: (f64, f64),
    pub kappa: BigFloat,
    pub quadratic: BigFloat,
    /// κ/u; the integral of (1/2)√R·h is V/2 − ln z + O(1), giving −1/2.
    pub kappa_over_u: BigFloat,
    /// κ/(−u/3).
    pub kappa_vs_minus_u_third: BigFloat,
    pub positive: bool,
}

struct Phi<'a> {
    eq: &'a EquilibriumData,
    gl: GaussLegendre,
    bits: u32,
}

impl Phi<'_> {
    fn integrand(&self, s: &Complex) -> Complex {
        sqrt_r(self.eq, s) * h(self.eq, s) / 2u32
    }

    /// ∫ from the endpoint `e` to e + sign·T² along the real axis, via s = e + sign·τ².
    fn along_real(&self, endpoint: &Float, sign: i32, t: &Float) -> Float {
        let panels = 1 + t.to_f64().ceil() as usize;
        let width = Float::with_val(self.bits, t / panels as u32);
        let mut acc = Complex::new(self.bits);
        for k in 0..panels {
            let lo = Float::with_val(self.bits, &width * k as u32);
            let hi = Float::with_val(self.bits, &lo + &width);
            acc += self.gl.integrate_complex(&lo, &hi, |tau| {
                let tau2 = Float::with_val(self.bits, tau.square_ref()) * sign;
                let s = Complex::with_val(self.bits, endpoint + tau2);
                self.integrand(&s) * Float::with_val(self.bits, tau * (2 * sign))
            });
        }
        acc.real().clone()
    }

    fn left(&self, z: &Float) -> Float {
        let t = Float::with_val(self.bits, self.eq.a.value() - z).sqrt();
        self.along_real(self.eq.a.value(), -1, &t)
    }

    fn right(&self, z: &Float) -> Float {
        let t = Float::with_val(self.bits, z - self.eq.b.value()).sqrt();
        self.along_real(self.eq.b.value(), 1, &t)
    }

    fn direction(&self) -> Complex {
        let third = Float::with_val(self.bits, Constant::Pi) / 3u32;
        let (s, c) = third.sin_cos(Float::new(self.bits));
        Complex::with_val(self.bits, (c, s))
    }

    /// φ₂(z₀ + r e^(iπ/3)).
    fn ray(&self, base: &Float, r: &Float) -> Complex {
        let dir = self.direction();
        let panels = 1 + (r.to_f64() / 4.0).ceil() as usize;
        let width = Float::with_val(self.bits, r / panels as u32);
        let mut acc = Complex::with_val(self.bits, base);
        for k in 0..panels {
            let lo = Float::with_val(self.bits, &width * k as u32);
            let hi = Float::with_val(self.bits, &lo + &width);
            acc += self.gl.integrate_complex(&lo, &hi, |rho| {
                let s = Complex::with_val(self.bits, &dir * rho) + self.eq.z0.value();
                self.integrand(&s) * &dir
            });
        }
        acc
    }

    fn ray_point(&self, r: &Float) -> Complex {
        Complex::with_val(self.bits, &self.direction() * r) + self.eq.z0.value()
    }

    /// r ≥ 0 with |z₀ + r e^(iπ/3)| = radius.
    fn r_for_modulus(&self, radius: f64) -> Float {
        let z0 = Float::with_val(self.bits, self.eq.z0.value());
        let disc = Float::with_val(self.bits, radius * radius * 4.0) - Float::with_val(self.bits, z0.square_ref()) * 3u32;
        (disc.sqrt() - z0) / 2u32
    }
}

/// Samples Re φ₁ on (−∞, a), Re φ₂ on (b, z₀) and on the ray z₀ + r e^(iπ/3),
/// all within |z| ≤ 100, and fits the cubic growth on the ray.
pub fn phi_check(eq: &EquilibriumData, samples: usize) -> Result<PhiReport, EquilibriumError> {
    if eq.u.value().is_zero() || eq.critical || eq.z0.value() <= eq.b.value() {
        return Err(EquilibriumError::OutOfRange);
    }
    let bits = eq.bits.min(Precision(40).bits());
    let phi = Phi { eq, gl: GaussLegendre::new(30, bits), bits };
    let samples = samples.max(1);
    let reach = 100.0;
    let digits = 12;
    let mut violations = Vec::new();
    let mut note = |z: &Complex, v: &Float| {
        if !v.is_sign_positive() || v.is_zero() {
            let (re, im) = crate::exact::bigfloat::complex_to_decimal(z, digits);
            violations.push(PhiSample { z_re: re, z_im: im, re_phi: crate::exact::bigfloat::to_decimal(v, digits) });
        }
    };
    let fmin = |acc: Option<Float>, v: Float| Some(acc.map_or(v.clone(), |m: Float| m.min(&v)));

    let a = Float::with_val(bits, eq.a.value());
    let span = Float::with_val(bits, reach) + &a;
    let mut min1 = None;
    for k in 1..=samples {
        let z = Float::with_val(bits, &a - Float::with_val(bits, &span * k as u32) / samples as u32);
        let v = phi.left(&z);
        note(&Complex::with_val(bits, &z), &v);
        min1 = fmin(min1, v);
    }

    let b = Float::with_val(bits, eq.b.value());
    let gap = Float::with_val(bits, eq.z0.value() - &b);
    let mut min2 = None;
    for k in 1..=samples {
        let z = Float::with_val(bits, &gap * k as u32) / (samples as u32 + 1) + &b;
        let v = phi.right(&z);
        note(&Complex::with_val(bits, &z), &v);
        min2 = fmin(min2, v);
    }

    let base = phi.right(&Float::with_val(bits, eq.z0.value()));
    let r_max = phi.r_for_modulus(reach);
    let mut min3 = None;
    for k in 1..=samples {
        let r = Float::with_val(bits, &r_max * k as u32) / samples as u32;
        let v = phi.ray(&base, &r).real().clone();
        note(&phi.ray_point(&r), &v);
        min3 = fmin(min3, v);
    }

    let radii = (50.0_f64.max(2.0 * eq.z0.value().to_f64()), 100.0_f64.max(4.0 * eq.z0.value().to_f64()));
    let fit_at = |radius: f64| {
        let r = phi.r_for_modulus(radius);
        let z = phi.ray_point(&r);
        let v = phi.ray(&base, &r).real().clone();
        let z2 = Complex::with_val(bits, z.square_ref());
        let z3 = Complex::with_val(bits, &z2 * &z);
        (z3.real().clone(), z2.real().clone(), v)
    };
    let (c1, q1, v1) = fit_at(radii.0);
    let (c2, q2, v2) = fit_at(radii.1);
    let det = Float::with_val(bits, &c1 * &q2) - Float::with_val(bits, &c2 * &q1);
    let kappa = (Float::with_val(bits, &v1 * &q2) - Float::with_val(bits, &v2 * &q1)) / &det;
    let quad = (Float::with_val(bits, &c1 * &v2) - Float::with_val(bits, &c2 * &v1)) / &det;
    let u = Float::with_val(bits, eq.u.value());
    let over_u = Float::with_val(bits, &kappa / &u);
    let vs_third = Float::with_val(bits, &over_u * -3i32);
    let p = Precision(digits);
    let min_or_nan = |m: Option<Float>| BigFloat::at(m.unwrap_or_else(|| Float::with_val(bits, rug::float::Special::Nan)), p);
    Ok(PhiReport {
        samples,
        positive: violations.is_empty(),
        min_phi1_left: min_or_nan(min1),
        min_phi2_gap: min_or_nan(min2),
        min_phi2_ray: min_or_nan(min3),
        violations,
        growth_radii: radii,
        kappa: BigFloat::at(kappa, p),
        quadratic: BigFloat::at(quad, p),
        kappa_over_u: BigFloat::at(over_u, p),
        kappa_vs_minus_u_third: BigFloat::at(vs_third, p),
    })
}

/// Re φ₁(z) for real z < a.
pub fn phi1_left(eq: &EquilibriumData, z: &Float) -> Float {
    let bits = eq.bits;
    Phi { eq, gl: GaussLegendre::new(30, bits), bits }.left(z)
}

/// Re φ₂(z) for real z > b.
pub fn phi2_right(eq: &EquilibriumData, z: &Float) -> Float {
    let bits = eq.bits;
    Phi { eq, gl: GaussLegendre::new(30, bits), bits }.right(z)
}

/// Discriminant 9u²(1 − 34992u⁴) of the endpoint cubic.
pub fn discriminant(u: &Float) -> Float {
    let bits = u.prec();
    let u2 = Float::with_val(bits, u.square_ref());
    let u4 = Float::with_val(bits, u2.square_ref());
    Float::with_val(bits, &u2 * 9u32) * (Float::with_val(bits, 1) - u4 * 34992u32)
}

/// Partial sum of an odd/even series in u at `u`.
pub fn eval_parity(s: &ParitySeries, u: &Float) -> Float {
    let bits = u.prec();
    let v = Float::with_val(bits, u.square_ref());
    let inner = s.inner.eval_float(&v);
    inner * Float::with_val(bits, u.pow(s.odd_shift))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64, bits: u32) -> Float {
        Float::with_val(bits, x)
    }

    #[test]
    fn gaussian_limit() {
        let eq = solve_endpoints(&Float::new(100), Precision(30)).unwrap();
        assert_eq!(eq.a.value().to_f64(), -2.0);
        assert_eq!(eq.b.value().to_f64(), 2.0);
        let rho = density_at(&eq, &Complex::with_val(eq.bits, 0));
        let pi_inv = Float::with_val(eq.bits, Constant::Pi).recip();
        assert!(Float::with_val(eq.bits, rho.real() - &pi_inv).abs() < 1e-30);
        assert!(rho.imag().clone().abs() < 1e-30);
    }

    #[test]
    fn critical_endpoints() {
        let p = Precision(40);
        let bits = p.bits();
        let eq = solve_endpoints(&u_critical(bits), p).unwrap();
        assert!(eq.critical);
        let q = |e: i32| Float::with_val(bits, 3).pow(Float::with_val(bits, e) / 4u32);
        let tol = Float::with_val(bits, Float::i_exp(1, -110));
        assert!(eq.a.within(&(q(3) - q(5)), &tol));
        assert!(eq.b.within(&(q(3) + q(1)), &tol));
        assert!(eq.z0.within(eq.b.value(), &tol));
    }

    #[test]
    fn supercritical_rejected() {
        let r = solve_endpoints(&f(0.1, 100), Precision(20));
        assert!(matches!(r, Err(EquilibriumError::Supercritical(_))));
        assert!(matches!(solve_endpoints(&f(-0.01, 100), Precision(20)), Err(EquilibriumError::Negative(_))));
    }

    #[test]
    fn series_coefficients() {
        let (x, y) = endpoint_series(3).unwrap();
        assert_eq!(x.coeff_u(1), Some(rat(6, 1)));
        assert_eq!(x.coeff_u(3), Some(rat(324, 1)));
        assert_eq!(x.coeff_u(5), Some(rat(31104, 1)));
        assert_eq!(y.coeff_u(0), Some(rat(2, 1)));
        assert_eq!(y.coeff_u(2), Some(rat(36, 1)));
        assert_eq!(y.coeff_u(4), Some(rat(2916, 1)));
    }

    #[test]
    fn root_matches_series_at_small_u() {
        let p = Precision(60);
        let u = f(0.05, p.bits());
        let eq = solve_endpoints(&u, p).unwrap();
        assert!(cubic_residual(&eq).abs() < Float::with_val(p.bits(), p.epsilon(10)));
        let (x, _) = endpoint_series(60).unwrap();
        let partial = eval_parity(&x, eq.u.value());
        assert!(eq.x.within(&partial, &Float::with_val(p.bits(), 1e-17)));
    }

    #[test]
    fn partial_sums_within_first_omitted_term() {
        let p = Precision(60);
        let bits = p.bits();
        let (x, _) = endpoint_series(31).unwrap();
        for frac in [0.1, 0.3, 0.5] {
            let u = Float::with_val(bits, u_critical(bits) * frac);
            let eq = solve_endpoints(&u, p).unwrap();
            for order in [5usize, 10, 30] {
                let head = ParitySeries::odd(x.inner.truncated(order as i64));
                let err = Float::with_val(bits, eq.x.value() - eval_parity(&head, &u)).abs();
                let next = Float::with_val(bits, &x.coeff_u(2 * order as i64 + 1).unwrap())
                    * Float::with_val(bits, (&u).pow(2 * order as u32 + 1));
                assert!(err <= next * 2u32, "u = {frac}·u_c, order {order}");
            }
        }
    }

    #[test]
    fn normalized() {
        for u in [0.0, 0.02, 0.05, 0.9 * 0.07311] {
            let eq = solve_endpoints(&f(u, 200), Precision(40)).unwrap();
            let n = normalization(&eq);
            assert!(Float::with_val(n.prec(), n - 1u32).abs() < 1e-20, "u = {u}");
        }
    }

    #[test]
    fn density_vanishes_at_z0() {
        let eq = solve_endpoints(&f(0.05, 200), Precision(40)).unwrap();
        let rho = density_at(&eq, &Complex::with_val(eq.bits, eq.z0.value()));
        assert!(Float::with_val(eq.bits, rho.abs_ref()) < 1e-35);
    }

    #[test]
    fn phi_positivity_and_growth() {
        let eq = solve_endpoints(&f(0.05, 200), Precision(30)).unwrap();
        let mid = Float::with_val(eq.bits, eq.b.value() + eq.z0.value()) / 2u32;
        assert!(phi2_right(&eq, &mid).is_sign_positive());
        let left = Float::with_val(eq.bits, eq.a.value() - 1u32);
        assert!(phi1_left(&eq, &left).is_sign_positive());
        let rep = phi_check(&eq, 20).unwrap();
        assert!(rep.positive, "{:?}", rep.violations);
        let k = rep.kappa_over_u.value().to_f64();
        assert!((k + 0.5).abs() < 0.01, "κ/u = {k}");
        assert!((rep.quadratic.value().to_f64() - 0.25).abs() < 0.05);
    }
}
