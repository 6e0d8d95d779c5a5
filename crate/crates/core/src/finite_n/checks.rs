//! Identities and asymptotic comparisons for the finite-N coefficients.

use std::ops::RangeInclusive;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use super::moments::{rays, weight};
use super::recurrence::{hankel_route, Recurrence};
use super::{abs, approx, solve, ComplexValue, ContourConfig, FiniteNData, FiniteNError};
use crate::exact::BigFloat;
use crate::quadrature::GaussLegendre;
use crate::toda::{t_of_u, u_of_t};

#[derive(Clone, Debug, serde::Serialize)]
pub struct StringResidual {
    pub n: usize,
    /// |3u(γ²_{n+1} + β_n² + γ²_n) − β_n|
    pub first: BigFloat,
    /// |γ²_n(1 − 3u(β_n + β_{n−1})) − n/N|
    pub second: BigFloat,
}

/// Both string equations for every n in `range` that the data covers.
pub fn string_residuals(rec: &Recurrence, u: &Float, nn: usize, range: RangeInclusive<usize>) -> Vec<StringResidual> {
    let bits = rec.h[0].prec().0;
    let top = rec.gamma2.len() - 1;
    let u3 = Float::with_val(bits, u * 3u32);
    range
        .filter(|&n| n >= 1 && n < top)
        .map(|n| {
            let (g, b) = (&rec.gamma2, &rec.beta);
            let sum = Complex::with_val(bits, &g[n + 1] + &g[n]) + Complex::with_val(bits, b[n].square_ref());
            let first = Complex::with_val(bits, &sum * &u3) - &b[n];
            let bb = Complex::with_val(bits, &b[n] + &b[n - 1]) * &u3;
            let ratio = Float::with_val(bits, n) / nn as u32;
            let second = Complex::with_val(bits, &g[n] * (Complex::with_val(bits, 1) - bb)) - ratio;
            StringResidual { n, first: approx(abs(&first), 6), second: approx(abs(&second), 6) }
        })
        .collect()
}

/// ln Z_N = ln N! + Σ_{k<N} ln h_k (principal logs summed).
pub fn log_partition(rec: &Recurrence, nn: usize) -> Complex {
    let bits = rec.h[0].prec().0;
    let mut acc = Complex::with_val(bits, Float::with_val(bits, nn + 1).ln_gamma());
    for h in &rec.h[..nn] {
        acc += Complex::with_val(bits, h.ln_ref());
    }
    acc
}

/// ln Z_N(0) = (N/2) ln 2π − (N²/2) ln N + Σ_{k≤N} ln k!.
pub fn gaussian_log_partition(nn: usize, bits: u32) -> Float {
    let n = Float::with_val(bits, nn);
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let mut acc = Float::with_val(bits, two_pi.ln()) * &n / 2u32;
    acc -= Float::with_val(bits, n.ln_ref()) * (nn * nn) as u32 / 2u32;
    for k in 1..=nn {
        acc += Float::with_val(bits, k + 1).ln_gamma();
    }
    acc
}

/// Leading terms of the 1/N² expansion at (s, u) on a chosen branch.
#[derive(Clone, Debug)]
pub struct GenusTerms {
    pub g_hat0: Complex,
    pub g0: Complex,
    pub g2: Complex,
    pub b0: Complex,
    pub b2: Complex,
}

/// Roots of 72ĝ³ − ĝ² + w² = 0.
fn ghat0_roots(w: &Complex) -> [Complex; 3] {
    let bits = w.prec().0;
    let w2 = Complex::with_val(bits, w.square_ref());
    let f = |x: &Complex| {
        let x2 = Complex::with_val(bits, x.square_ref());
        let x3 = Complex::with_val(bits, &x2 * x);
        x3 * 72u32 - x2 + &w2
    };
    // Durand–Kerner on the monic form
    let mut r = [
        Complex::with_val(bits, (0.4, 0.9)),
        Complex::with_val(bits, (0.4, 0.9)).square(),
        Complex::with_val(bits, (0.4, 0.9)).square() * Complex::with_val(bits, (0.4, 0.9)),
    ];
    for i in 0..r.len() {
        r[i] /= 72u32;
    }
    let tol = Float::with_val(bits, Float::i_exp(1, 16 - bits as i32));
    for _ in 0..(bits as usize) {
        let mut moved = Float::new(bits);
        for i in 0..3 {
            let mut den = Complex::with_val(bits, 72);
            for j in 0..3 {
                if i != j {
                    den *= Complex::with_val(bits, &r[i] - &r[j]);
                }
            }
            let step = f(&r[i]) / den;
            let m = abs(&step);
            if m > moved {
                moved = m;
            }
            r[i] -= step;
        }
        if moved < tol {
            break;
        }
    }
    r
}

fn nearest(roots: [Complex; 3], target: &Complex) -> Complex {
    let bits = target.prec().0;
    roots
        .into_iter()
        .min_by(|a, b| {
            let da = abs(&Complex::with_val(bits, a - target));
            let db = abs(&Complex::with_val(bits, b - target));
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("three roots")
}

/// g₀(1, u), g₂(1, u) on the branch whose ĝ₀ is closest to u²·γ²_hint, and
/// b₀, b₂ at the shifted s = 1 + 1/(2N), continued from that branch.
pub fn genus_terms(u: &Float, nn: usize, gamma2_hint: &Complex) -> GenusTerms {
    let bits = gamma2_hint.prec().0;
    let u = Float::with_val(bits, u);
    let zero = Complex::new(bits);
    if u.is_zero() {
        return GenusTerms { g_hat0: zero.clone(), g0: Complex::with_val(bits, 1), g2: zero.clone(), b0: zero.clone(), b2: zero };
    }
    let u2 = Float::with_val(bits, u.square_ref());
    let d = |g: &Complex| Complex::with_val(bits, 1) - Complex::with_val(bits, g * 108u32);
    let w = Complex::with_val(bits, &u2);
    let g_hat0 = nearest(ghat0_roots(&w), &Complex::with_val(bits, gamma2_hint * &u2));
    let g0 = Complex::with_val(bits, &g_hat0 / &u2);
    let d4 = Complex::with_val(bits, d(&g_hat0).square_ref()).square();
    let five = Complex::with_val(bits, 5) - Complex::with_val(bits, &g_hat0 * 324u32);
    let g2 = Complex::with_val(bits, &g_hat0 * 162u32) * five / &d4 * &u2;

    let s = Float::with_val(bits, 1) + Float::with_val(bits, 1) / (2 * nn) as u32;
    let ws = Complex::with_val(bits, &u2 * &s);
    let gs = nearest(ghat0_roots(&ws), &Complex::with_val(bits, &g_hat0 * &s));
    let b_hat0 = Complex::with_val(bits, &gs - &ws) / Complex::with_val(bits, &gs * 6u32);
    let ds4 = Complex::with_val(bits, d(&gs).square_ref()).square();
    let b_hat2 = Complex::with_val(bits, &ws * 54u32) / (Complex::with_val(bits, &gs * &ds4));
    let b0 = b_hat0 / &u;
    let u3 = Float::with_val(bits, &u2 * &u);
    let b2 = b_hat2 * u3;
    GenusTerms { g_hat0, g0, g2, b0, b2 }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct AsymptoticRow {
    pub n: usize,
    pub gamma2: ComplexValue,
    pub g0: ComplexValue,
    pub g2: ComplexValue,
    /// |γ²_N − g₀ − g₂/N²|
    pub eps_gamma: BigFloat,
    /// |γ²_N − g₀|
    pub leading_gap: BigFloat,
    /// |g₂|/N²
    pub g2_over_n2: BigFloat,
    pub beta: ComplexValue,
    pub b0: ComplexValue,
    pub b2: ComplexValue,
    pub eps_beta: BigFloat,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct AsymptoticReport {
    pub u: BigFloat,
    /// u ≤ u_c − 0.05; outside this the comparison is still made and reported.
    pub within_stated_range: bool,
    /// Which root of 72u²g³ − g² + 1 = 0 the data selected.
    pub branch: String,
    pub rows: Vec<AsymptoticRow>,
    /// ε(N_{i+1})/ε(N_i) for γ² and β.
    pub gamma_ratios: Vec<f64>,
    pub beta_ratios: Vec<f64>,
    /// Observed p in ε ∝ N^(−p).
    pub gamma_orders: Vec<f64>,
}

fn branch_name(g_hat0: &Complex, u2: &Float) -> String {
    let bits = g_hat0.prec().0;
    let im = g_hat0.imag().to_f64();
    let scale = Float::with_val(bits, u2 * 1e-20).to_f64();
    if im.abs() <= scale.abs() {
        if g_hat0.real().to_f64() > 0.0 && g_hat0.real().to_f64() <= 1.0 / 108.0 + 1e-12 {
            "real root continuing g0 = 1 at u = 0".into()
        } else {
            "other real root".into()
        }
    } else if im > 0.0 {
        "complex root, Im g0 > 0".into()
    } else {
        "complex root, Im g0 < 0".into()
    }
}

pub fn check_asymptotic_expansion(cfg: &ContourConfig, u: &Float, ns: &[usize]) -> Result<AsymptoticReport, FiniteNError> {
    let mut rows = Vec::new();
    let mut eps_g = Vec::new();
    let mut eps_b = Vec::new();
    let mut branch = String::new();
    let digits = 8;
    for &nn in ns {
        let data = solve(cfg, u, nn, nn)?;
        let bits = data.working.bits();
        let rec = &data.recurrence;
        let gamma2 = &rec.gamma2[nn];
        let beta = &rec.beta[nn];
        let terms = genus_terms(&data.u, nn, gamma2);
        let n2 = Float::with_val(bits, nn * nn);
        let lead = Complex::with_val(bits, gamma2 - &terms.g0);
        let eg = abs(&(lead.clone() - Complex::with_val(bits, &terms.g2 / &n2)));
        let eb = abs(&(Complex::with_val(bits, beta - &terms.b0) - Complex::with_val(bits, &terms.b2 / &n2)));
        branch = branch_name(&terms.g_hat0, &Float::with_val(bits, data.u.square_ref()));
        eps_g.push((nn, eg.to_f64()));
        eps_b.push(eb.to_f64());
        rows.push(AsymptoticRow {
            n: nn,
            gamma2: ComplexValue::new(gamma2, 20),
            g0: ComplexValue::new(&terms.g0, 20),
            g2: ComplexValue::new(&terms.g2, 20),
            eps_gamma: approx(eg, digits),
            leading_gap: approx(abs(&lead), digits),
            g2_over_n2: approx(abs(&terms.g2) / n2, digits),
            beta: ComplexValue::new(beta, 20),
            b0: ComplexValue::new(&terms.b0, 20),
            b2: ComplexValue::new(&terms.b2, 20),
            eps_beta: approx(eb, digits),
        });
    }
    let gamma_ratios: Vec<f64> = eps_g.windows(2).map(|w| w[1].1 / w[0].1).collect();
    let gamma_orders = eps_g
        .windows(2)
        .map(|w| -(w[1].1 / w[0].1).ln() / (w[1].0 as f64 / w[0].0 as f64).ln())
        .collect();
    let beta_ratios = eps_b.windows(2).map(|w| w[1] / w[0]).collect();
    let uc = crate::equilibrium::u_critical(64).to_f64();
    Ok(AsymptoticReport {
        u: approx(Float::with_val(64, u), 16),
        within_stated_range: u.to_f64() <= uc - 0.05,
        branch,
        rows,
        gamma_ratios,
        beta_ratios,
        gamma_orders,
    })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct TodaReport {
    pub u: BigFloat,
    pub t: BigFloat,
    pub n: usize,
    pub step: BigFloat,
    /// t > t_c = 3·2^(−2/3); the check is run regardless.
    pub above_t_critical: bool,
    pub second_difference: ComplexValue,
    pub gamma2_tilde: ComplexValue,
    pub residual: BigFloat,
}

/// F̃(t) − F̃(t₀) with F̃ = (1/N²) ln Z_N + 1/(108u²) + ln(3u)/3, using per-k
/// principal logs of h_k(t)/h_k(t₀).
fn f_tilde_difference(a: &FiniteNData, base: &FiniteNData, nn: usize, bits: u32) -> Complex {
    let mut acc = Complex::new(bits);
    for k in 0..nn {
        let ratio = Complex::with_val(bits, &a.recurrence.h[k] / &base.recurrence.h[k]);
        acc += ratio.ln();
    }
    acc /= (nn * nn) as u32;
    let shift = |u: &Float| {
        let u = Float::with_val(bits, u);
        let inv = Float::with_val(bits, 1) / (Float::with_val(bits, u.square_ref()) * 108u32);
        inv + Float::with_val(bits, Float::with_val(bits, &u * 3u32).ln()) / 3u32
    };
    acc + (shift(&a.u) - shift(&base.u))
}

/// |Δ²F̃/h² − γ̃²_N| at t = t(u), with γ̃² = γ²/(2√t).
pub fn toda_residual(cfg: &ContourConfig, u: &Float, nn: usize, step: &Float) -> Result<TodaReport, FiniteNError> {
    if u.is_zero() || u.is_sign_negative() {
        return Err(FiniteNError::NegativeU);
    }
    let probe = super::working_precision(cfg.precision, nn, u, nn, cfg);
    let bits = probe.bits();
    let t0 = t_of_u(&Float::with_val(bits, u));
    let h = Float::with_val(bits, step);
    if !h.is_sign_positive() || h >= t0 {
        return Err(FiniteNError::BadStep);
    }
    let at = |t: &Float| solve(cfg, &u_of_t(t), nn, nn);
    let base = at(&t0)?;
    let plus = at(&Float::with_val(bits, &t0 + &h))?;
    let minus = at(&Float::with_val(bits, &t0 - &h))?;
    let bits = base.working.bits();
    let dp = f_tilde_difference(&plus, &base, nn, bits);
    let dm = f_tilde_difference(&minus, &base, nn, bits);
    let h2 = Float::with_val(bits, h.square_ref());
    let second = (dp + dm) / &h2;
    let sqrt_t = Float::with_val(bits, t0.sqrt_ref()) * 2u32;
    let tilde = Complex::with_val(bits, &base.recurrence.gamma2[nn] / &sqrt_t);
    let residual = abs(&Complex::with_val(bits, &second - &tilde));
    let tc = Float::with_val(64, 3) * Float::with_val(64, 2).pow(Float::with_val(64, -2) / 3u32);
    Ok(TodaReport {
        u: approx(Float::with_val(64, u), 16),
        t: approx(Float::with_val(64, &t0), 16),
        n: nn,
        step: approx(Float::with_val(64, &h), 6),
        above_t_critical: t0 > tc,
        second_difference: ComplexValue::new(&second, 16),
        gamma2_tilde: ComplexValue::new(&tilde, 16),
        residual: approx(residual, 6),
    })
}

/// |∫_Γ P_n P_m w dz| for 0 ≤ m < n ≤ n_top, by direct quadrature of the
/// polynomials built from the Hankel route.
pub fn orthogonality_residuals(cfg: &ContourConfig, data: &FiniteNData, n_top: usize) -> Result<Vec<(usize, usize, BigFloat)>, FiniteNError> {
    let n_top = n_top.min(data.n_max);
    let route = hankel_route(&data.moments, n_top)?;
    let wcfg = ContourConfig { precision: data.working, ..cfg.clone() };
    let bits = data.working.bits();
    let rays = rays(&wcfg, &data.u, data.n, 2 * n_top, bits)?;
    let width = (2.2 / (data.n as f64).sqrt()).min(0.5);
    let nodes = cfg.nodes_per_panel.unwrap_or_else(|| (0.6 * data.working.digits() as f64).ceil() as usize + 20);
    let rule = GaussLegendre::new(nodes, bits);
    let nf = Float::with_val(bits, data.n);
    let eval = |n: usize, z: &Complex| {
        let mut acc = Complex::with_val(bits, 1);
        for i in (0..n).rev() {
            acc *= z;
            acc += &route.coeffs[n][i];
        }
        acc
    };
    let pairs: Vec<(usize, usize)> = (1..=n_top).flat_map(|n| (0..n).map(move |m| (n, m))).collect();
    let mut sums = vec![Complex::new(bits); pairs.len()];
    for ray in &rays {
        let panels = (ray.r_max / width).ceil().max(1.0) as usize;
        let pw = ray.r_max / panels as f64;
        for p in 0..panels {
            let lo = Float::with_val(bits, p as f64 * pw);
            let hi = Float::with_val(bits, (p + 1) as f64 * pw);
            for (r, wt) in rule.mapped(&lo, &hi) {
                let z = Complex::with_val(bits, &ray.direction * &r);
                let wz = weight(&z, &data.u, &nf) * &ray.factor * wt;
                let values: Vec<Complex> = (0..=n_top).map(|n| eval(n, &z)).collect();
                for (slot, &(n, m)) in sums.iter_mut().zip(&pairs) {
                    *slot += Complex::with_val(bits, &values[n] * &values[m]) * &wz;
                }
            }
        }
    }
    Ok(pairs.into_iter().zip(sums).map(|((n, m), s)| (n, m, approx(abs(&s), 6))).collect())
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct AlphaSweep {
    pub n: usize,
    pub index: usize,
    pub values: Vec<((f64, f64), ComplexValue)>,
    /// max |γ²_index(α) − γ²_index(α₀)| over the sweep.
    pub max_deviation: BigFloat,
}

pub fn alpha_sweep(cfg: &ContourConfig, u: &Float, nn: usize, index: usize, alphas: &[(f64, f64)]) -> Result<AlphaSweep, FiniteNError> {
    let mut values = Vec::new();
    let mut first: Option<Complex> = None;
    let mut max_dev = Float::new(64);
    for &alpha in alphas {
        let c = ContourConfig { alpha, ..cfg.clone() };
        let data = solve(&c, u, nn, index)?;
        let g = data.recurrence.gamma2[index].clone();
        if let Some(f) = &first {
            let d = abs(&Complex::with_val(g.prec().0, &g - f));
            if d > max_dev {
                max_dev = Float::with_val(64, &d);
            }
        } else {
            first = Some(g.clone());
        }
        values.push((alpha, ComplexValue::new(&g, 40)));
    }
    Ok(AlphaSweep { n: nn, index, values, max_deviation: approx(max_dev, 6) })
}

#[derive(Clone, Debug, Default)]
pub struct ValidationOptions {
    /// Highest n; defaults to ⌈3N/2⌉ + 1 so the string window [N/2, 3N/2] is covered.
    pub n_max: Option<usize>,
    pub toda_step: Option<f64>,
    pub orthogonality_top: Option<usize>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct FiniteNReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub u: BigFloat,
    pub alpha: (f64, f64),
    pub requested_digits: u32,
    pub working_digits: u32,
    pub moments: Vec<ComplexValue>,
    pub h: Vec<ComplexValue>,
    pub gamma2: Vec<ComplexValue>,
    pub beta: Vec<ComplexValue>,
    pub string_window: (usize, usize),
    pub string_residuals: Vec<StringResidual>,
    pub max_string_residual: BigFloat,
    /// max |γ²_n (bordering) − γ²_n (Hankel solve)| and the same for β_n.
    pub route_gap_gamma2: BigFloat,
    pub route_gap_beta: BigFloat,
    /// max |h_n/h_{n−1} − γ²_n from the three-term recurrence|.
    pub three_term_gap: BigFloat,
    /// max |h_n D_{n−1} − D_n| / |D_n|.
    pub determinant_gap: BigFloat,
    pub orthogonality: Vec<(usize, usize, BigFloat)>,
    pub toda: Option<TodaReport>,
}

fn max_gap(a: &[Complex], b: &[Complex], from: usize) -> Float {
    a.iter()
        .zip(b)
        .skip(from)
        .map(|(x, y)| abs(&Complex::with_val(x.prec().0, x - y)))
        .fold(Float::new(64), |m, d| if d > m { d } else { m })
}

pub fn validate(cfg: &ContourConfig, u: &Float, nn: usize, opts: &ValidationOptions) -> Result<FiniteNReport, FiniteNError> {
    let lo = nn / 2;
    let hi = (3 * nn).div_ceil(2);
    let n_max = opts.n_max.unwrap_or(hi + 1);
    let data = solve(cfg, u, nn, n_max)?;
    let rec = &data.recurrence;
    let digits = cfg.precision.digits().min(60);
    let residuals = string_residuals(rec, &data.u, nn, lo..=hi);
    let max_res = residuals
        .iter()
        .flat_map(|r| [r.first.value().clone(), r.second.value().clone()])
        .fold(Float::new(64), |m, d| if d > m { d } else { m });
    let route = hankel_route(&data.moments, n_max)?;
    let bits = data.working.bits();
    let det_gap = (0..=n_max)
        .map(|n| {
            let lhs = Complex::with_val(bits, &rec.h[n] * &route.det[n]);
            abs(&(lhs - &route.det[n + 1])) / abs(&route.det[n + 1])
        })
        .fold(Float::new(64), |m, d| if d > m { d } else { m });
    let orthogonality = orthogonality_residuals(cfg, &data, opts.orthogonality_top.unwrap_or(6))?;
    let toda = match opts.toda_step {
        Some(h) => Some(toda_residual(cfg, u, nn, &Float::with_val(bits, h))?),
        None => None,
    };
    let cv = |v: &[Complex]| v.iter().map(|z| ComplexValue::new(z, digits)).collect();
    Ok(FiniteNReport {
        n: nn,
        u: approx(Float::with_val(64, u), 16),
        alpha: cfg.alpha,
        requested_digits: cfg.precision.digits(),
        working_digits: data.working.digits(),
        moments: cv(&data.moments),
        h: cv(&rec.h),
        gamma2: cv(&rec.gamma2),
        beta: cv(&rec.beta),
        string_window: (lo, hi),
        string_residuals: residuals,
        max_string_residual: approx(max_res, 6),
        route_gap_gamma2: approx(max_gap(&rec.gamma2, &route.gamma2, 1), 6),
        route_gap_beta: approx(max_gap(&rec.beta, &route.beta, 0), 6),
        three_term_gap: approx(max_gap(&route.gamma2, &route.gamma2_three_term, 1), 6),
        determinant_gap: approx(det_gap, 6),
        orthogonality,
        toda,
    })
}
