//! Modified Bessel function of the second kind for real order, and the
//! power-exponential integral it closes.
//!
//! `K_ν(x)` comes from `∫₀^∞ exp(-x cosh t) cosh(νt) dt`. The integrand is
//! even and entire in `t`, so the trapezoidal rule on a truncated half-line
//! converges geometrically. Half-integer orders use the terminating closed
//! form, and large orders recur upward from the fractional part.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;

/// Orders above this are reached by upward recurrence.
const RECURRENCE_ORDER: f64 = 25.0;
const MAX_HALVINGS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BesselMethod {
    Integral,
    ClosedHalfOrder,
    Recurrence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselResult {
    pub value: f64,
    pub est_abs_error: f64,
    pub method: BesselMethod,
}

impl BesselResult {
    fn scaled_by(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            est_abs_error: self.est_abs_error * factor,
            method: self.method,
        }
    }
}

/// `K_ν(x)` for real `ν` and `x > 0`.
pub fn bessel_k(nu: f64, x: f64, tol: f64) -> Result<BesselResult> {
    let scaled = bessel_k_scaled(nu, x, tol)?;
    Ok(scaled.scaled_by((-x).exp()))
}

/// `e^x K_ν(x)`, which stays representable for large `x`.
pub fn bessel_k_scaled(nu: f64, x: f64, tol: f64) -> Result<BesselResult> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K_nu(x) needs x > 0, got {x}")));
    }
    if !nu.is_finite() {
        return Err(Error::Domain(format!("order must be finite, got {nu}")));
    }
    let tol = tol.max(f64::EPSILON);
    let nu = nu.abs();
    let twice = 2.0 * nu;
    if twice.fract() == 0.0 && (twice as u64) % 2 == 1 && nu < 60.0 {
        return Ok(half_order_scaled((nu - 0.5) as u32, x));
    }
    if nu > RECURRENCE_ORDER {
        return recurrence_scaled(nu, x, tol);
    }
    integral_scaled(nu, x, tol)
}

/// `e^x K_{n+1/2}(x) = √(π/2x) Σ_k (n+k)!/(k!(n-k)!) (2x)^-k`.
fn half_order_scaled(n: u32, x: f64) -> BesselResult {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let k = k as f64;
        let n = n as f64;
        term *= (n + k + 1.0) * (n - k) / ((k + 1.0) * 2.0 * x);
        sum += term;
    }
    let value = (std::f64::consts::PI / (2.0 * x)).sqrt() * sum;
    BesselResult {
        value,
        est_abs_error: value * f64::EPSILON * (n as f64 + 2.0),
        method: BesselMethod::ClosedHalfOrder,
    }
}

/// Exponent of the integrand, `-x (cosh t - 1) + ν t`.
fn exponent(nu: f64, x: f64, t: f64) -> f64 {
    // cosh t - 1 = 2 sinh²(t/2), exact for small t
    let s = (0.5 * t).sinh();
    -2.0 * x * s * s + nu * t
}

fn integral_scaled(nu: f64, x: f64, tol: f64) -> Result<BesselResult> {
    let t_peak = (nu / x).asinh();
    let g_peak = exponent(nu, x, t_peak);
    let drop = -tol.ln() + 12.0;
    let mut t_max = t_peak + 1.0;
    while exponent(nu, x, t_max) > g_peak - drop {
        t_max += 0.5 * (1.0 + t_max);
    }
    let f = |t: f64| {
        let g = exponent(nu, x, t);
        // cosh(νt) e^{-x(cosh t - 1)} = e^{g} (1 + e^{-2νt}) / 2
        0.5 * g.exp() * (1.0 + (-2.0 * nu * t).exp())
    };
    let mut n = 32usize;
    let mut h = t_max / n as f64;
    let mut sum = 0.5 * f(0.0) + (1..n).map(|j| f(j as f64 * h)).sum::<f64>() + 0.5 * f(t_max);
    let mut prev = sum * h;
    for _ in 0..MAX_HALVINGS {
        let mids: f64 = (0..n).map(|j| f((j as f64 + 0.5) * h)).sum();
        sum += mids;
        n *= 2;
        h *= 0.5;
        let value = sum * h;
        let diff = (value - prev).abs();
        if diff <= (0.1 * tol).max(8.0 * f64::EPSILON) * value {
            return Ok(BesselResult {
                value,
                est_abs_error: diff + 4.0 * f64::EPSILON * value,
                method: BesselMethod::Integral,
            });
        }
        prev = value;
    }
    Err(Error::ToleranceNotMet {
        value: sum * h,
        est_error: (sum * h - prev).abs(),
    })
}

fn recurrence_scaled(nu: f64, x: f64, tol: f64) -> Result<BesselResult> {
    let base = nu.fract();
    let steps = (nu - base).round() as usize;
    let k0 = integral_scaled(base, x, tol)?;
    let k1 = integral_scaled(base + 1.0, x, tol)?;
    let (mut lower, mut upper) = (k0.value, k1.value);
    let mut rel_err = (k0.est_abs_error / k0.value).max(k1.est_abs_error / k1.value);
    for i in 1..steps {
        let order = base + i as f64;
        let next = lower + 2.0 * order / x * upper;
        lower = upper;
        upper = next;
        rel_err += f64::EPSILON;
    }
    Ok(BesselResult {
        value: upper,
        est_abs_error: rel_err * upper,
        method: BesselMethod::Recurrence,
    })
}

/// `∫₀^∞ r^(v-1) exp(-(λ₂/r + λ₁ r)) dr = 2 (λ₂/λ₁)^(v/2) K_v(2√(λ₁λ₂))`.
pub fn power_exp_integral(v: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    let x = bessel_argument(lambda1, lambda2)?;
    Ok(power_exp_integral_scaled(v, lambda1, lambda2)? * (-x).exp())
}

/// [`power_exp_integral`] times `exp(2√(λ₁λ₂))`.
pub fn power_exp_integral_scaled(v: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    let x = bessel_argument(lambda1, lambda2)?;
    let k = bessel_k_scaled(v, x, DEFAULT_TOL)?;
    Ok(2.0 * (lambda2 / lambda1).powf(0.5 * v) * k.value)
}

fn bessel_argument(lambda1: f64, lambda2: f64) -> Result<f64> {
    if !(lambda1 > 0.0 && lambda2 > 0.0) || !lambda1.is_finite() || !lambda2.is_finite() {
        return Err(Error::Domain(format!(
            "power-exponential integral needs positive lambdas, got ({lambda1}, {lambda2})"
        )));
    }
    Ok(2.0 * (lambda1 * lambda2).sqrt())
}
