//! First-order noncommutative deformation of a radial potential.
//!
//! The shifted radius `r - θ_eff / (2r)` turns each term `v_k r^k` into
//! `v_k r^k - (k/2) v_k θ_eff r^(k-2)` at first order in `θ_eff`. Product
//! terms landing on an exponent that the potential already has are absorbed
//! into that coefficient, the exponent-0 product is a constant energy shift,
//! and everything else is a residual perturbation.
//!
//! In the complex formulation the two orderings of `z` and `z̄` give
//! `θ_eff = θ (m - 1)` and `θ_eff = θ (m + 1)`, read as spin down and spin up.
//! Negative `m` is represented by the same `|m|` with `θ → -θ`, so the
//! context accepts either sign of `θ`.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::potential::{FamilyTag, LaurentPotential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// Real noncommutative plane, no spin.
    #[serde(alias = "RealNC")]
    Real,
    /// Complex coordinates with the two-component spinor.
    #[serde(alias = "ComplexNC")]
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
    None,
}

impl Spin {
    pub fn s_z(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
            Spin::None => 0.0,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
            Spin::None => Spin::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationContext {
    pub theta: f64,
    pub m: u32,
    pub spin: Spin,
    pub space: Space,
}

impl DeformationContext {
    pub fn new(theta: f64, m: u32, spin: Spin, space: Space) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Invalid(format!("theta must be finite, got {theta}")));
        }
        match (space, spin) {
            (Space::Real, Spin::None) | (Space::Complex, Spin::Up | Spin::Down) => {}
            (Space::Real, _) => {
                return Err(Error::Invalid("real noncommutative space carries no spin".into()))
            }
            (Space::Complex, Spin::None) => {
                return Err(Error::Invalid("complex noncommutative space needs spin up or down".into()))
            }
        }
        Ok(Self { theta, m, spin, space })
    }

    /// Commutative context: `θ = 0` in real space.
    pub fn commutative(m: u32) -> Self {
        Self {
            theta: 0.0,
            m,
            spin: Spin::None,
            space: Space::Real,
        }
    }

    pub fn real(theta: f64, m: u32) -> Self {
        Self {
            theta,
            m,
            spin: Spin::None,
            space: Space::Real,
        }
    }

    pub fn complex(theta: f64, m: u32, spin: Spin) -> Self {
        Self::new(theta, m, spin, Space::Complex).expect("complex context requires up or down spin")
    }

    pub fn s_z(&self) -> f64 {
        self.spin.s_z()
    }

    /// `m + 2 s_z`, the state-dependent multiplier of θ.
    pub fn coupling(&self) -> f64 {
        self.m as f64 + 2.0 * self.s_z()
    }

    pub fn theta_eff(&self) -> f64 {
        self.theta * self.coupling()
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }
}

/// A potential split into family-absorbable terms, a constant shift and a
/// residual perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedPotential {
    pub absorbed: LaurentPotential,
    pub constant_shift: f64,
    pub perturbation: LaurentPotential,
    pub context: DeformationContext,
    pub original: LaurentPotential,
}

impl DeformedPotential {
    pub fn theta_eff(&self) -> f64 {
        self.context.theta_eff()
    }

    /// Absorbed terms, the shift as an exponent-0 term, and the perturbation.
    pub fn total(&self) -> LaurentPotential {
        &(&self.absorbed + &LaurentPotential::monomial(0, self.constant_shift)) + &self.perturbation
    }

    pub fn eval_total(&self, r: f64) -> f64 {
        self.absorbed.eval(r) + self.constant_shift + self.perturbation.eval(r)
    }

    /// Change of each absorbed coefficient relative to the original potential.
    pub fn absorbed_delta(&self) -> LaurentPotential {
        &self.absorbed - &self.original
    }
}

impl Serialize for DeformedPotential {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            absorbed: &'a LaurentPotential,
            constant_shift: f64,
            perturbation: &'a LaurentPotential,
            theta_eff: f64,
        }
        Repr {
            absorbed: &self.absorbed,
            constant_shift: self.constant_shift,
            perturbation: &self.perturbation,
            theta_eff: self.theta_eff(),
        }
        .serialize(serializer)
    }
}

/// First-order Taylor expansion of `p(r - θ_eff/(2r))`, split by exponent.
pub fn theta_expand(p: &LaurentPotential, ctx: &DeformationContext) -> DeformedPotential {
    let theta_eff = ctx.theta_eff();
    let mut absorbed: Vec<(i32, f64)> = p.terms().collect();
    let mut shift = 0.0;
    let mut perturbation = Vec::new();
    for (k, v) in p.terms() {
        let weight = -(k as f64 / 2.0) * v * theta_eff;
        if weight == 0.0 {
            continue;
        }
        let target = k - 2;
        if target == 0 {
            shift += weight;
        } else if p.contains(target) {
            absorbed.push((target, weight));
        } else {
            perturbation.push((target, weight));
        }
    }
    DeformedPotential {
        absorbed: LaurentPotential::from_terms(absorbed),
        // +0.0 turns a -0.0 accumulator into +0.0
        constant_shift: shift + 0.0,
        perturbation: LaurentPotential::from_terms(perturbation),
        context: *ctx,
        original: p.clone(),
    }
}

/// The deformation as printed in the source derivation, including its
/// inconsistencies, for side-by-side comparison with [`theta_expand`].
/// Solvers never use it.
pub fn printed_coefficients(
    family: FamilyTag,
    p: &LaurentPotential,
    ctx: &DeformationContext,
) -> Result<DeformedPotential> {
    let t = ctx.theta_eff();
    let complex = ctx.space == Space::Complex;
    let constant = LaurentPotential::monomial(0, p.constant());
    let (absorbed, shift, perturbation) = match family {
        FamilyTag::EvenPower => {
            let (a, b, c, d) = (p.coeff(2), p.coeff(-2), p.coeff(-4), p.coeff(-6));
            let d_hat = if complex { d + c * t } else { d + 2.0 * c * t };
            let pert = if complex { 3.0 * d * t } else { d * t };
            (
                LaurentPotential::from_terms([(2, a), (-2, b), (-4, c + b * t), (-6, d_hat)]),
                -a * t,
                LaurentPotential::monomial(-8, pert),
            )
        }
        FamilyTag::InversePower => {
            let (a, b, c, d) = (p.coeff(-1), p.coeff(-2), p.coeff(-3), p.coeff(-4));
            let sign = if complex { 1.0 } else { -1.0 };
            (
                LaurentPotential::from_terms([(-1, a), (-2, b), (-3, c + a * t), (-4, d - b * t)]),
                0.0,
                LaurentPotential::from_terms([(-5, sign * 2.0 * c * t), (-6, sign * 3.0 * d * t)]),
            )
        }
        FamilyTag::General => return Err(Error::UnsupportedFamily(family.to_string())),
    };
    Ok(DeformedPotential {
        absorbed: &absorbed + &constant,
        constant_shift: shift + 0.0,
        perturbation,
        context: *ctx,
        original: p.clone(),
    })
}
