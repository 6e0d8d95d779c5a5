//! Finite-N orthogonal polynomials on the contour Γ: moments, recurrence
//! coefficients and the identities they satisfy.

mod checks;
mod moments;
mod recurrence;

pub use checks::{
    alpha_sweep, check_asymptotic_expansion, gaussian_log_partition, genus_terms, log_partition, orthogonality_residuals,
    string_residuals, toda_residual, validate, AlphaSweep, AsymptoticReport, AsymptoticRow, FiniteNReport, GenusTerms,
    StringResidual, TodaReport, ValidationOptions,
};
pub use moments::compute_moments;
pub use recurrence::{hankel_route, recurrence_from_moments, HankelRoute, Recurrence};

use rug::{Complex, Float};

use crate::exact::{BigFloat, Precision};
use crate::parallel::Execution;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FiniteNError {
    #[error("u must be nonnegative")]
    NegativeU,
    #[error("rays at ±π/{0} do not give a convergent integral here")]
    InvalidContour(u32),
    #[error("N must be positive")]
    ZeroN,
    #[error("no truncation radius meets the tail bound")]
    TailBound,
    #[error("{have} moments available, {need} needed")]
    TooFewMoments { have: usize, need: usize },
    #[error("Hankel matrix numerically singular at n = {n}")]
    Singular { n: usize },
    #[error("step h must be positive and below t")]
    BadStep,
}

/// Γ = αΓ₀ + (1 − α)Γ₁ with Γ₀ = (−∞, 0] ∪ [0, ∞e^(iπ/d)), Γ₁ the mirror ray.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ContourConfig {
    pub alpha: (f64, f64),
    /// The complex rays sit at ±π/angle_divisor.
    pub angle_divisor: u32,
    /// Truncation radius; `None` derives it from the tail bound.
    pub r_max: Option<f64>,
    pub nodes_per_panel: Option<usize>,
    pub precision: Precision,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            alpha: (1.0, 0.0),
            angle_divisor: 5,
            r_max: None,
            nodes_per_panel: None,
            precision: Precision(80),
            execution: Execution::Auto,
        }
    }
}

impl ContourConfig {
    pub fn with_precision(precision: Precision) -> Self {
        Self { precision, ..Self::default() }
    }

    pub fn validate(&self, u: &Float) -> Result<(), FiniteNError> {
        if u.is_sign_negative() && !u.is_zero() {
            return Err(FiniteNError::NegativeU);
        }
        let theta = std::f64::consts::PI / self.angle_divisor.max(1) as f64;
        let cubic_ok = (3.0 * theta).cos() < 0.0;
        let quadratic_ok = (2.0 * theta).cos() > 0.0;
        let ok = if u.is_zero() { quadratic_ok } else { cubic_ok };
        if !ok {
            return Err(FiniteNError::InvalidContour(self.angle_divisor));
        }
        Ok(())
    }
}

/// Digits actually carried: max(80, 8 n_max, requested) plus a guard for the
/// size of the integrand relative to the moments.
pub fn working_precision(requested: Precision, n_max: usize, u: &Float, n: usize, cfg: &ContourConfig) -> Precision {
    let base = requested.digits().max(80).max(8 * n_max as u32);
    let theta = std::f64::consts::PI / cfg.angle_divisor.max(1) as f64;
    let j = (2 * n_max + 1) as f64;
    let peak = moments::peak_log(theta, u.to_f64(), n as f64, j).max(moments::peak_log(std::f64::consts::PI, u.to_f64(), n as f64, j));
    let extra = (peak / std::f64::consts::LN_10).max(0.0).ceil() as u32;
    Precision(base + 20 + extra)
}

/// Moments and recurrence coefficients for one (u, N).
#[derive(Clone, Debug)]
pub struct FiniteNData {
    pub u: Float,
    pub n: usize,
    pub n_max: usize,
    pub working: Precision,
    pub moments: Vec<Complex>,
    pub recurrence: Recurrence,
}

/// Computes everything up to γ²_{n_max}, β_{n_max}; `cfg.precision` is the requested precision.
pub fn solve(cfg: &ContourConfig, u: &Float, n: usize, n_max: usize) -> Result<FiniteNData, FiniteNError> {
    if n == 0 {
        return Err(FiniteNError::ZeroN);
    }
    cfg.validate(u)?;
    let working = working_precision(cfg.precision, n_max, u, n, cfg);
    let wcfg = ContourConfig { precision: working, ..cfg.clone() };
    let uw = Float::with_val(working.bits(), u);
    let moments = compute_moments(&wcfg, &uw, n, 2 * n_max + 1)?;
    let recurrence = recurrence_from_moments(&moments, n_max)?;
    Ok(FiniteNData { u: uw, n, n_max, working, moments, recurrence })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ComplexValue {
    pub re: String,
    pub im: String,
    pub digits: u32,
}

impl ComplexValue {
    pub fn new(z: &Complex, digits: u32) -> Self {
        let (re, im) = crate::exact::bigfloat::complex_to_decimal(z, digits);
        Self { re, im, digits }
    }
}

pub(crate) fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub(crate) fn approx(x: Float, digits: u32) -> BigFloat {
    BigFloat::new(x, digits)
}
