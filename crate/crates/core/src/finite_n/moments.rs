//! Moments c_j = ∫_Γ z^j e^(−N V(z)) dz, V = z²/2 − u z³, along the rays of
//! Γ = αΓ₀ + (1 − α)Γ₁.

use rug::float::Constant;
use rug::{Complex, Float};

use super::{ContourConfig, FiniteNError};
use crate::quadrature::GaussLegendre;

/// One ray `r ↦ r e^(iθ)`, r ∈ [0, r_max], with its total weight (orientation,
/// dz = e^(iθ) dr and the α share folded in).
pub(crate) struct Ray {
    pub(crate) direction: Complex,
    pub(crate) factor: Complex,
    pub(crate) r_max: f64,
}

/// Re V(r e^(iθ)) = r² cos 2θ / 2 − u r³ cos 3θ.
fn re_v(r: f64, theta: f64, u: f64) -> f64 {
    r * r * (2.0 * theta).cos() / 2.0 - u * r.powi(3) * (3.0 * theta).cos()
}

/// log |r^j e^(−N V)| along the ray.
fn log_magnitude(r: f64, theta: f64, u: f64, n: f64, j: f64) -> f64 {
    j * r.max(1e-300).ln() - n * re_v(r, theta, u)
}

/// Largest value of log |z^j w| on the ray, for the cancellation guard.
pub(crate) fn peak_log(theta: f64, u: f64, n: f64, j: f64) -> f64 {
    (1..4000).map(|i| log_magnitude(i as f64 * 0.01, theta, u, n, j)).fold(f64::NEG_INFINITY, f64::max)
}

/// Radius beyond which the integrand stays below e^(−target) and keeps decaying.
pub(crate) fn tail_radius(theta: f64, u: f64, n: f64, j_max: f64, target: f64) -> Option<f64> {
    let step = 0.01;
    let mut r = step;
    while r < 1e4 {
        let here = log_magnitude(r, theta, u, n, j_max);
        let slope = (log_magnitude(r + step, theta, u, n, j_max) - here) / step;
        let here0 = log_magnitude(r, theta, u, n, 0.0);
        let slope0 = (log_magnitude(r + step, theta, u, n, 0.0) - here0) / step;
        if here < -target && here0 < -target && slope < -1.0 && slope0 < -1.0 {
            return Some(r);
        }
        r += step;
    }
    None
}

pub(crate) fn rays(cfg: &ContourConfig, u: &Float, n: usize, max_order: usize, bits: u32) -> Result<Vec<Ray>, FiniteNError> {
    let pi = Float::with_val(bits, Constant::Pi);
    let theta = Float::with_val(bits, &pi / cfg.angle_divisor);
    let uf = u.to_f64();
    let target = (cfg.precision.digits() as f64 + 10.0) * std::f64::consts::LN_10;
    let unit = |t: &Float| {
        let (s, c) = t.clone().sin_cos(Float::new(bits));
        Complex::with_val(bits, (c, s))
    };
    let alpha = Complex::with_val(bits, cfg.alpha);
    let one_minus = Complex::with_val(bits, 1) - &alpha;
    let mut out = Vec::new();
    let mut push = |angle: Float, share: Complex, incoming: bool| -> Result<(), FiniteNError> {
        if share.real().is_zero() && share.imag().is_zero() {
            return Ok(());
        }
        let a = angle.to_f64();
        let r_max = match cfg.r_max {
            Some(r) => r,
            None => tail_radius(a, uf, n as f64, max_order as f64, target).ok_or(FiniteNError::TailBound)?,
        };
        let direction = unit(&angle);
        let oriented = if incoming { -direction.clone() } else { direction.clone() };
        out.push(Ray { direction, factor: oriented * share, r_max });
        Ok(())
    };
    // (−∞, 0] is shared by Γ₀ and Γ₁ and traversed towards the origin
    push(pi.clone(), Complex::with_val(bits, 1), true)?;
    push(theta.clone(), alpha, false)?;
    push(-theta, one_minus, false)?;
    Ok(out)
}

/// c_0 … c_max_order at `cfg.precision` (treated as the working precision).
pub fn compute_moments(cfg: &ContourConfig, u: &Float, n: usize, max_order: usize) -> Result<Vec<Complex>, FiniteNError> {
    cfg.validate(u)?;
    let bits = cfg.precision.bits();
    let u = Float::with_val(bits, u);
    let rays = rays(cfg, &u, n, max_order, bits)?;
    let width = (2.2 / (n as f64).sqrt()).min(0.5);
    let nodes = cfg.nodes_per_panel.unwrap_or_else(|| (0.6 * cfg.precision.digits() as f64).ceil() as usize + 20);
    let rule = GaussLegendre::new(nodes, bits);
    let mut tasks = Vec::new();
    for (i, ray) in rays.iter().enumerate() {
        let panels = (ray.r_max / width).ceil().max(1.0) as usize;
        let w = ray.r_max / panels as f64;
        for p in 0..panels {
            tasks.push((i, p as f64 * w, (p + 1) as f64 * w));
        }
    }
    let nf = Float::with_val(bits, n);
    let parts = cfg.execution.map(&tasks, |&(i, lo, hi)| {
        let ray = &rays[i];
        let mut acc = vec![Complex::new(bits); max_order + 1];
        for (r, wt) in rule.mapped(&Float::with_val(bits, lo), &Float::with_val(bits, hi)) {
            let z = Complex::with_val(bits, &ray.direction * &r);
            let weight = weight(&z, &u, &nf) * &ray.factor * wt;
            let mut power = weight;
            for slot in acc.iter_mut() {
                *slot += &power;
                power *= &z;
            }
        }
        acc
    });
    let mut moments = vec![Complex::new(bits); max_order + 1];
    for part in parts {
        for (m, p) in moments.iter_mut().zip(part) {
            *m += p;
        }
    }
    Ok(moments)
}

/// e^(−N V(z)).
pub(crate) fn weight(z: &Complex, u: &Float, n: &Float) -> Complex {
    let bits = z.prec().0;
    let z2 = Complex::with_val(bits, z.square_ref());
    let z3 = Complex::with_val(bits, &z2 * z);
    let v = z2 / 2u32 - z3 * u;
    (-(v * n)).exp()
}
