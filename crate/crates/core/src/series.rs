//! The energy series `e(α) = −Σ α^p c_p / p!`, its radius certificate and
//! remainder bound.

use std::f64::consts::PI;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::integrator::{coefficient, Budget, CoefficientEstimate, Method, Mode};
use crate::kernel::Kernel;

/// Default interpolation constant.
pub const DEFAULT_GAMMA: f64 = 0.5;

/// `α = (λ / 4π)²`
pub fn alpha_from_lambda(lambda: f64) -> f64 {
    let x = lambda / (4.0 * PI);
    x * x
}

/// `λ = 4π √α` for `α ≥ 0`.
pub fn lambda_from_alpha(alpha: f64) -> Result<f64> {
    if alpha < 0.0 || alpha.is_nan() {
        return Err(Error::Argument("alpha must be >= 0 to define a real coupling".into()));
    }
    Ok(4.0 * PI * alpha.sqrt())
}

/// `δ(γ) = e^γ / (4 (1 − γ)²) · max(1, 2(1 − γ))`
pub fn delta_gamma(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Argument(format!("gamma = {gamma} is outside (0, 1)")));
    }
    let q = 1.0 - gamma;
    Ok(gamma.exp() / (4.0 * q * q) * (2.0 * q).max(1.0))
}

/// `max(‖h‖∞, ‖h‖₁)`
pub fn norm_max(kernel: &Kernel) -> f64 {
    kernel.norm_inf().max(kernel.norm_l1())
}

/// `K(γ) = 16 · max(‖h‖∞, ‖h‖₁) · δ(γ) / γ`; the remainder after order
/// `p_max` is at most `Σ_{p > p_max} (K |α|)^p / p`.
pub fn k_constant(kernel: &Kernel, gamma: f64) -> Result<f64> {
    Ok(16.0 * norm_max(kernel) * delta_gamma(gamma)? / gamma)
}

/// Grid point of `{0.01, 0.02, …, 0.99}` minimizing `δ(γ)/γ`.
pub fn optimal_gamma() -> f64 {
    (1..100)
        .map(|i| i as f64 / 100.0)
        .min_by(|a, b| {
            let fa = delta_gamma(*a).unwrap() / a;
            let fb = delta_gamma(*b).unwrap() / b;
            fa.total_cmp(&fb)
        })
        .expect("non-empty grid")
}

/// A radius that may be infinite (zero kernel).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Finite(f64),
    Unbounded,
}

impl Radius {
    pub fn value(self) -> f64 {
        match self {
            Radius::Finite(r) => r,
            Radius::Unbounded => f64::INFINITY,
        }
    }
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Radius::Finite(r) => s.serialize_f64(*r),
            Radius::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// `R_min = 1 / K(1/2) = [32 √e max(‖h‖∞, ‖h‖₁)]⁻¹`
pub fn radius_bound(kernel: &Kernel) -> Radius {
    radius_bound_gamma(kernel, DEFAULT_GAMMA).expect("default gamma is valid")
}

/// `1 / K(γ)`
pub fn radius_bound_gamma(kernel: &Kernel, gamma: f64) -> Result<Radius> {
    let k = k_constant(kernel, gamma)?;
    Ok(if k == 0.0 { Radius::Unbounded } else { Radius::Finite(1.0 / k) })
}

/// Radius in the coupling `λ`.
pub fn lambda_radius(radius: Radius) -> Radius {
    match radius {
        Radius::Finite(r) => Radius::Finite(4.0 * PI * r.sqrt()),
        Radius::Unbounded => Radius::Unbounded,
    }
}

/// `Σ_{p > p_max} x^p / p` for `0 ≤ x < 1`.
pub fn log_series_tail(x: f64, p_max: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::OutsideCertificate(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= 0.5 {
        // direct summation avoids cancellation in −ln(1 − x) − partial sums
        let mut sum = 0.0f64;
        let mut term = x.powi(p_max as i32 + 1);
        let mut p = p_max + 1;
        while term / p as f64 > 1e-18 * sum.max(f64::MIN_POSITIVE) || sum == 0.0 {
            sum += term / p as f64;
            term *= x;
            p += 1;
            if term == 0.0 {
                break;
            }
        }
        return Ok(sum);
    }
    let mut partial = 0.0;
    let mut power = 1.0;
    for p in 1..=p_max {
        power *= x;
        partial += power / p as f64;
    }
    Ok((-(-x).ln_1p() - partial).max(0.0))
}

/// Bound on `Σ_{p > p_max} |α|^p |c_p| / p!`.
pub fn tail_bound(alpha: f64, p_max: usize, kernel: &Kernel, gamma: f64) -> Result<f64> {
    let x = alpha.abs() * k_constant(kernel, gamma)?;
    log_series_tail(x, p_max)
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesResult {
    pub alpha: f64,
    pub lambda: Option<f64>,
    pub coefficients: Vec<CoefficientEstimate>,
    /// `−Σ_{p ≤ p_max} α^p c_p / p!`; equals the ground-state energy given Bloch's formula.
    pub energy: f64,
    /// Numerical error of the truncated sum.
    pub energy_error: f64,
    /// Remainder bound, absent outside `|α| K < 1`.
    pub tail_bound: Option<f64>,
    pub certified: bool,
    pub radius_bound: Radius,
    #[serde(rename = "K")]
    pub k: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Combine pinned coefficients `c_1, c_2, …` into the energy series.
pub fn assemble(alpha: f64, coefficients: Vec<CoefficientEstimate>, kernel: &Kernel, gamma: f64) -> Result<SeriesResult> {
    let k = k_constant(kernel, gamma)?;
    let mut energy = 0.0;
    let mut variance = 0.0;
    let mut scale = 1.0;
    for (i, c) in coefficients.iter().enumerate() {
        scale *= alpha / (i + 1) as f64;
        energy -= scale * c.value;
        variance += (scale * c.total_error()).powi(2);
    }
    let tail = match log_series_tail(alpha.abs() * k, coefficients.len()) {
        Ok(t) => Some(t),
        Err(Error::OutsideCertificate(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(SeriesResult {
        alpha,
        lambda: lambda_from_alpha(alpha).ok(),
        coefficients,
        energy,
        energy_error: variance.sqrt(),
        certified: tail.is_some(),
        tail_bound: tail,
        radius_bound: radius_bound_gamma(kernel, gamma)?,
        k,
        gamma,
        delta: delta_gamma(gamma)?,
    })
}

/// Evaluate the truncated energy series at `α`. With `Method::Quadrature`,
/// orders beyond the quadrature limit fall back to Monte Carlo.
pub fn energy(alpha: f64, p_max: usize, p_cap: usize, kernel: &Kernel, method: Method, budget: &Budget, gamma: f64) -> Result<SeriesResult> {
    if !alpha.is_finite() {
        return Err(Error::Argument("alpha must be finite".into()));
    }
    let mut coefficients = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let m = if method == Method::Quadrature && p > 2 { Method::MonteCarlo } else { method };
        coefficients.push(coefficient(p, p_cap, kernel, Mode::pinned(), m, budget)?);
    }
    assemble(alpha, coefficients, kernel, gamma)
}
