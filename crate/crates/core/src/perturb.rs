//! First-order energy corrections from expectation values of powers of `r`.
//!
//! Every moment of a QES state reduces to sums of
//! `∫ r^(v-1) exp(-λ₂/r - λ₁ r) dr = 2 (λ₂/λ₁)^(v/2) K_v(2√(λ₁λ₂))`,
//! after `u = r²` for the even family. Each moment is also computed by
//! direct quadrature as an independent check.
//!
//! The self-adjoint measure of the reduced equation is `dr`
//! ([`Measure::Line`]); [`Measure::Planar`] (`r dr`) is available to
//! reproduce the Bessel-order bookkeeping of the planar convention.

use serde::{Deserialize, Serialize};

use crate::deform::{theta_expand, DeformationContext, DeformedPotential};
use crate::error::{Error, Result};
use crate::potential::{FamilyTag, LaurentPotential};
use crate::qes_even::{solve_even_deformed, tune_even_b, EvenQesSolution};
use crate::qes_inverse::{solve_inverse_deformed, tune_inverse_b, InvQesSolution};
use crate::quad::ExpSinh;
use crate::specfun::{bessel_k_scaled, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// `dr`, under which the radial operator is self-adjoint.
    #[default]
    Line,
    /// `r dr`.
    Planar,
}

impl Measure {
    fn weight(self) -> i32 {
        match self {
            Measure::Line => 0,
            Measure::Planar => 1,
        }
    }
}

/// A solved QES level of either family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum QesState {
    EvenPower(EvenQesSolution),
    InversePower(InvQesSolution),
}

impl QesState {
    pub fn energy(&self) -> f64 {
        match self {
            QesState::EvenPower(s) => s.energy,
            QesState::InversePower(s) => s.energy,
        }
    }

    pub fn energy_base(&self) -> f64 {
        match self {
            QesState::EvenPower(s) => s.energy_base(),
            QesState::InversePower(s) => s.energy_base(),
        }
    }

    pub fn constant_shift(&self) -> f64 {
        match self {
            QesState::EvenPower(s) => s.constant_shift,
            QesState::InversePower(s) => s.constant_shift,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            QesState::EvenPower(s) => s.n,
            QesState::InversePower(s) => s.n,
        }
    }

    pub fn family(&self) -> FamilyTag {
        match self {
            QesState::EvenPower(_) => FamilyTag::EvenPower,
            QesState::InversePower(_) => FamilyTag::InversePower,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            QesState::EvenPower(s) => s.value(r),
            QesState::InversePower(s) => s.value(r),
        }
    }

    pub fn bulk_scale(&self) -> f64 {
        match self {
            QesState::EvenPower(s) => s.bulk_scale(),
            QesState::InversePower(s) => s.bulk_scale(),
        }
    }

    /// Nodes on the half-line; the oracle index of this level.
    pub fn nodes(&self) -> usize {
        match self {
            QesState::EvenPower(s) => s.node_count(),
            QesState::InversePower(s) => usize::from(s.sigma.is_some_and(|x| x > 0.0)),
        }
    }

    /// Closed-form `⟨r^k⟩` under `measure`.
    pub fn expectation(&self, k: i32, measure: Measure) -> Result<f64> {
        match self {
            QesState::EvenPower(s) => expectation_even(s, k, measure),
            QesState::InversePower(s) => expectation_inverse(s, k, measure),
        }
    }

    pub fn bessel_terms(&self, k: i32, measure: Measure) -> Result<Vec<BesselTerm>> {
        match self {
            QesState::EvenPower(s) => even_bessel_terms(s, k, measure),
            QesState::InversePower(s) => inverse_bessel_terms(s, k, measure),
        }
    }
}

fn family_of(p: &LaurentPotential) -> Result<FamilyTag> {
    const EVEN: [i32; 5] = [2, 0, -2, -4, -6];
    const INVERSE: [i32; 5] = [0, -1, -2, -3, -4];
    match p.classify() {
        FamilyTag::General => {
            if p.exponents().all(|k| EVEN.contains(&k)) && (p.contains(2) || p.contains(-6)) {
                Ok(FamilyTag::EvenPower)
            } else if p.exponents().all(|k| INVERSE.contains(&k)) {
                Ok(FamilyTag::InversePower)
            } else {
                Err(Error::UnsupportedFamily(format!("{p} is in neither family")))
            }
        }
        tag => Ok(tag),
    }
}

/// Solves level `n` of the deformed potential with the solver of its family.
pub fn solve_qes(p: &LaurentPotential, ctx: &DeformationContext, n: usize, b_tolerance: f64) -> Result<QesState> {
    solve_qes_deformed(&theta_expand(p, ctx), n, b_tolerance)
}

pub fn solve_qes_deformed(deformed: &DeformedPotential, n: usize, b_tolerance: f64) -> Result<QesState> {
    match family_of(&deformed.original)? {
        FamilyTag::EvenPower => solve_even_deformed(deformed, n, b_tolerance).map(QesState::EvenPower),
        _ => solve_inverse_deformed(deformed, n, b_tolerance).map(QesState::InversePower),
    }
}

/// Copy of `p` with `b` on the nearest solvability root for level `n`.
pub fn tune_b(p: &LaurentPotential, ctx: &DeformationContext, n: usize) -> Result<LaurentPotential> {
    match family_of(p)? {
        FamilyTag::EvenPower => tune_even_b(p, ctx, n),
        _ => tune_inverse_b(p, ctx, n),
    }
}

/// One Bessel term of a moment integral: `weight · K̃_order(x)` where
/// `K̃ = e^x K` and `x` is the shared argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselTerm {
    pub order: f64,
    pub weight: f64,
    pub argument: f64,
}

fn square_coefficients(c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * c.len() - 1];
    for (i, a) in c.iter().enumerate() {
        for (j, b) in c.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `∫ P(r²)² r^(2δ+k) e^(-α r² - β/r²) r^w dr` as Bessel terms, one per
/// power of `r²` in `P²`.
pub fn even_bessel_terms(sol: &EvenQesSolution, k: i32, measure: Measure) -> Result<Vec<BesselTerm>> {
    let g = &sol.gauge;
    let x = 2.0 * (g.alpha * g.beta).sqrt();
    let ratio = g.beta / g.alpha;
    let base = g.delta + (k + measure.weight() + 1) as f64 / 2.0;
    Ok(square_coefficients(&sol.coeffs)
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            let order = base + j as f64;
            // (1/2) from du = 2r dr, times 2 (λ₂/λ₁)^(v/2)
            BesselTerm {
                order,
                weight: c * ratio.powf(0.5 * order),
                argument: x,
            }
        })
        .collect())
}

/// `∫ P(r)² r^(2C+k) e^(2α_W/r + 2β r) r^w dr` as Bessel terms.
pub fn inverse_bessel_terms(sol: &InvQesSolution, k: i32, measure: Measure) -> Result<Vec<BesselTerm>> {
    let g = &sol.gauge;
    let (l1, l2) = (-2.0 * g.beta, -2.0 * g.alpha_w);
    let x = 2.0 * (l1 * l2).sqrt();
    let poly = match sol.sigma {
        Some(s) => vec![-s, 1.0],
        None => vec![1.0],
    };
    let scale = sol.normalization * sol.normalization;
    let base = 2.0 * g.c + (k + measure.weight() + 1) as f64;
    Ok(square_coefficients(&poly)
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            let order = base + j as f64;
            BesselTerm {
                order,
                weight: 2.0 * scale * c * (l2 / l1).powf(0.5 * order),
                argument: x,
            }
        })
        .collect())
}

fn sum_terms(terms: &[BesselTerm]) -> Result<(f64, f64)> {
    let mut value = 0.0;
    let mut err = 0.0;
    for t in terms {
        let kv = bessel_k_scaled(t.order, t.argument, DEFAULT_TOL)?;
        value += t.weight * kv.value;
        err += (t.weight * kv.est_abs_error).abs();
    }
    Ok((value, err))
}

/// Ratio of the `r^k` moment to the norm, with its error estimate. The
/// common `e^-x` of both sums cancels.
fn moment_ratio(num: &[BesselTerm], den: &[BesselTerm]) -> Result<(f64, f64)> {
    let (n, n_err) = sum_terms(num)?;
    let (d, d_err) = sum_terms(den)?;
    let value = n / d;
    Ok((value, value.abs() * (n_err / n.abs() + d_err / d.abs())))
}

pub fn expectation_even(sol: &EvenQesSolution, k: i32, measure: Measure) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    Ok(moment_ratio(&even_bessel_terms(sol, k, measure)?, &even_bessel_terms(sol, 0, measure)?)?.0)
}

pub fn expectation_inverse(sol: &InvQesSolution, k: i32, measure: Measure) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    Ok(moment_ratio(&inverse_bessel_terms(sol, k, measure)?, &inverse_bessel_terms(sol, 0, measure)?)?.0)
}

/// `⟨r^k⟩ = ∫ R² r^k dμ / ∫ R² dμ` by double-exponential quadrature.
/// `scale` should sit near the bulk of `R`.
pub fn quadrature_expectation<F: Fn(f64) -> f64>(radial: F, k: i32, measure: Measure, scale: f64) -> Result<(f64, f64)> {
    let w = measure.weight();
    let quad = ExpSinh::with_scale(scale);
    let density = |r: f64, power: i32| {
        let v = radial(r);
        if v == 0.0 {
            0.0
        } else {
            v * v * r.powi(power)
        }
    };
    let num = quad.integrate(|r| density(r, k + w))?;
    let den = quad.integrate(|r| density(r, w))?;
    let value = num.value / den.value;
    let err = value.abs() * (num.est_error / num.value.abs() + den.est_error / den.value.abs());
    Ok((value, err))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionTerm {
    pub k: i32,
    pub weight: f64,
    pub expectation: f64,
    pub expectation_quadrature: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionBreakdown {
    pub terms: Vec<CorrectionTerm>,
    pub total_closed: f64,
    pub total_quadrature: f64,
    pub est_error: f64,
}

impl CorrectionBreakdown {
    pub fn zero() -> Self {
        Self {
            terms: vec![],
            total_closed: 0.0,
            total_quadrature: 0.0,
            est_error: 0.0,
        }
    }

    /// Closed form and quadrature agree to the module tolerance.
    pub fn consistent(&self) -> bool {
        let tol = (1e-8 * self.total_closed.abs()).max(self.est_error);
        (self.total_closed - self.total_quadrature).abs() <= tol
    }
}

/// `Σ w_k ⟨r^k⟩` over the terms of `potential`, under the line measure.
pub fn expectation_sum(state: &QesState, potential: &LaurentPotential) -> Result<CorrectionBreakdown> {
    if potential.is_empty() {
        return Ok(CorrectionBreakdown::zero());
    }
    let mut out = CorrectionBreakdown::zero();
    let den = state.bessel_terms(0, Measure::Line)?;
    for (k, w) in potential.terms() {
        let (closed, closed_err) = if k == 0 {
            (1.0, 0.0)
        } else {
            moment_ratio(&state.bessel_terms(k, Measure::Line)?, &den)?
        };
        let (quad, quad_err) = quadrature_expectation(|r| state.value(r), k, Measure::Line, state.bulk_scale())?;
        out.total_closed += w * closed;
        out.total_quadrature += w * quad;
        out.est_error += w.abs() * (closed_err + quad_err);
        out.terms.push(CorrectionTerm {
            k,
            weight: w,
            expectation: closed,
            expectation_quadrature: quad,
            contribution: w * closed,
        });
    }
    Ok(out)
}

/// First-order correction `⟨ψ|V_pert|ψ⟩` from the residual perturbation.
pub fn first_order_shift(state: &QesState, deformed: &DeformedPotential) -> Result<CorrectionBreakdown> {
    expectation_sum(state, &deformed.perturbation)
}

/// First-order change of the level from the shifts of the absorbed
/// coefficients (Hellmann–Feynman).
pub fn absorbed_chain(state: &QesState, deformed: &DeformedPotential) -> Result<CorrectionBreakdown> {
    expectation_sum(state, &deformed.absorbed_delta())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeBreakdown {
    pub shift: f64,
    pub absorbed: f64,
    pub perturbation: f64,
    pub total: f64,
}

/// `dE/dθ` at `θ = 0` for level `n`: constant shift plus the absorbed
/// coefficient chain plus the perturbation, all per unit `θ`.
pub fn analytic_slope(p: &LaurentPotential, ctx: &DeformationContext, n: usize, b_tolerance: f64) -> Result<SlopeBreakdown> {
    let state = solve_qes(p, &ctx.with_theta(0.0), n, b_tolerance)?;
    let unit = theta_expand(p, &ctx.with_theta(1.0));
    let absorbed = absorbed_chain(&state, &unit)?.total_closed;
    let perturbation = first_order_shift(&state, &unit)?.total_closed;
    Ok(SlopeBreakdown {
        shift: unit.constant_shift,
        absorbed,
        perturbation,
        total: unit.constant_shift + absorbed + perturbation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelMethod {
    /// The deformed absorbed potential is itself quasi-exactly solvable.
    Qes,
    /// Commutative QES level plus first-order coefficient shifts.
    QesLinearized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelEstimate {
    pub e_base: f64,
    pub shift_const: f64,
    pub de_pert: f64,
    pub e_total: f64,
    pub method: LevelMethod,
    pub state: QesState,
    pub correction: CorrectionBreakdown,
}

/// First-order level of the deformed potential. When the absorbed potential
/// stays on a solvability root the exact deformed QES level is used;
/// otherwise the commutative level is carried to first order in `θ`.
pub fn first_order_level(p: &LaurentPotential, ctx: &DeformationContext, n: usize, b_tolerance: f64) -> Result<LevelEstimate> {
    let deformed = theta_expand(p, ctx);
    match solve_qes_deformed(&deformed, n, b_tolerance) {
        Ok(state) => {
            let correction = first_order_shift(&state, &deformed)?;
            Ok(LevelEstimate {
                e_base: state.energy_base(),
                shift_const: deformed.constant_shift,
                de_pert: correction.total_closed,
                e_total: state.energy_base() + deformed.constant_shift + correction.total_closed,
                method: LevelMethod::Qes,
                state,
                correction,
            })
        }
        Err(Error::NotQuasiExactlySolvable { .. }) if deformed.theta_eff() != 0.0 => {
            let state = solve_qes(p, &ctx.with_theta(0.0), n, b_tolerance)?;
            let chain = absorbed_chain(&state, &deformed)?;
            let correction = first_order_shift(&state, &deformed)?;
            let e_base = state.energy_base() + chain.total_closed;
            Ok(LevelEstimate {
                e_base,
                shift_const: deformed.constant_shift,
                de_pert: correction.total_closed,
                e_total: e_base + deformed.constant_shift + correction.total_closed,
                method: LevelMethod::QesLinearized,
                state,
                correction,
            })
        }
        Err(e) => Err(e),
    }
}
