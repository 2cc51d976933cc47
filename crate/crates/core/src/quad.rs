//! Double-exponential quadrature on `(0, ∞)`.
//!
//! The substitution `r = s · exp((π/2) sinh t)` maps the half-line onto the
//! real line with doubly-exponential decay at both ends, after which the
//! trapezoidal rule converges geometrically. The step is halved until two
//! successive levels agree; their difference is the error estimate.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ExpSinh {
    /// Relative tolerance on successive levels.
    pub rel_tol: f64,
    /// Location of `t = 0`; choose near the bulk of the integrand.
    pub scale: f64,
    pub max_levels: usize,
}

impl Default for ExpSinh {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            scale: 1.0,
            max_levels: 10,
        }
    }
}

const COARSE_STEP: f64 = 0.125;
const T_LIMIT: f64 = 6.5;
const WINDOW_CUTOFF: f64 = 1e-22;

impl ExpSinh {
    pub fn with_scale(scale: f64) -> Self {
        Self {
            scale,
            ..Self::default()
        }
    }

    fn node(&self, t: f64) -> (f64, f64) {
        let e = FRAC_PI_2 * t.sinh();
        let r = self.scale * e.exp();
        (r, r * FRAC_PI_2 * t.cosh())
    }

    /// Transformed integrand at `t`, or `None` past the representable range.
    fn term<F: Fn(f64) -> f64>(&self, f: &F, t: f64) -> Option<f64> {
        let (r, w) = self.node(t);
        if r == 0.0 || !r.is_finite() || !w.is_finite() {
            return None;
        }
        let v = f(r) * w;
        v.is_finite().then_some(v)
    }

    /// Outermost coarse nodes on each side that still carry weight. A
    /// non-finite value is an error only inside that window; past it the
    /// integrand has decayed and overflow in a factor is harmless.
    fn window<F: Fn(f64) -> f64>(&self, f: &F) -> Result<(f64, f64)> {
        let steps = (T_LIMIT / COARSE_STEP) as i32;
        let mut finite = Vec::new();
        let mut broken = Vec::new();
        for j in -steps..=steps {
            let t = j as f64 * COARSE_STEP;
            let (r, _) = self.node(t);
            if r == 0.0 || !r.is_finite() {
                continue;
            }
            match self.term(f, t) {
                Some(v) => finite.push((t, v.abs())),
                None => broken.push((t, r)),
            }
        }
        let peak = finite.iter().map(|s| s.1).fold(0.0, f64::max);
        if peak == 0.0 {
            return match broken.first() {
                Some(&(_, r)) => Err(Error::Quadrature(format!("non-finite integrand at r = {r:e}"))),
                None => Ok((0.0, 0.0)),
            };
        }
        let keep = finite.iter().filter(|s| s.1 > WINDOW_CUTOFF * peak).map(|s| s.0);
        let (lo, hi) = keep.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
        let (lo, hi) = ((lo - 2.0 * COARSE_STEP).max(-T_LIMIT), (hi + 2.0 * COARSE_STEP).min(T_LIMIT));
        if let Some(&(_, r)) = broken.iter().find(|(t, _)| *t >= lo && *t <= hi) {
            return Err(Error::Quadrature(format!("non-finite integrand at r = {r:e}")));
        }
        Ok((lo, hi))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<QuadResult> {
        let (lo, hi) = self.window(&f)?;
        if lo == hi {
            return Ok(QuadResult {
                value: 0.0,
                est_error: 0.0,
                evaluations: 0,
            });
        }
        let eval = |t: f64| self.term(&f, t).unwrap_or(0.0);
        let mut h = COARSE_STEP;
        let n0 = ((hi - lo) / h).ceil() as usize;
        let mut sum: f64 = (0..=n0).map(|j| eval(lo + j as f64 * h)).sum();
        let mut evaluations = n0 + 1;
        let mut n = n0;
        let mut prev = sum * h;
        for level in 1..=self.max_levels {
            // add the midpoints of the previous level
            let mids: f64 = (0..n).map(|j| eval(lo + (j as f64 + 0.5) * h)).sum();
            evaluations += n;
            sum += mids;
            n *= 2;
            h *= 0.5;
            let value = sum * h;
            let diff = (value - prev).abs();
            if level >= 2 && diff <= self.rel_tol * value.abs() {
                return Ok(QuadResult {
                    value,
                    est_error: diff.max(f64::EPSILON * value.abs()),
                    evaluations,
                });
            }
            prev = value;
        }
        let value = sum * h;
        Err(Error::ToleranceNotMet {
            value,
            est_error: (value - prev).abs(),
        })
    }
}

pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F) -> Result<QuadResult> {
    ExpSinh::default().integrate(f)
}
