//! Side-by-side comparison of the commonly printed deformation and
//! correction formulas against the values this engine derives.
//!
//! Coefficient rows compare the change per unit `θ`, so the ratio between
//! printed and derived values is independent of the chosen `θ`.

use std::fmt;

use serde::Serialize;

use crate::deform::{printed_coefficients, theta_expand, DeformationContext, Spin};
use crate::error::Result;
use crate::perturb::{solve_qes, tune_b, QesState};
use crate::potential::{FamilyTag, LaurentPotential};
use crate::qes_even::DEFAULT_B_TOLERANCE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Agrees,
    FactorDiscrepancy,
    SignDiscrepancy,
    NotDerivable,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Agrees => "agrees",
            Classification::FactorDiscrepancy => "factor-discrepancy",
            Classification::SignDiscrepancy => "sign-discrepancy",
            Classification::NotDerivable => "not-derivable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub location: &'static str,
    pub printed: f64,
    pub engine: f64,
    pub classification: Classification,
    pub note: String,
}

fn numeric_row(location: &'static str, printed: f64, engine: f64, what: &str) -> CheckRow {
    let scale = printed.abs().max(engine.abs());
    let (classification, note) = if (printed - engine).abs() <= 1e-12 * scale {
        (Classification::Agrees, what.to_string())
    } else if (printed + engine).abs() <= 1e-12 * scale {
        (Classification::SignDiscrepancy, format!("{what}: opposite sign"))
    } else {
        let ratio = engine / printed;
        (Classification::FactorDiscrepancy, format!("{what}: engine/printed = ×{ratio:.6}"))
    };
    CheckRow {
        location,
        printed,
        engine,
        classification,
        note,
    }
}

/// Rows for one family at the quantum numbers of `ctx`.
pub fn check_family(family: FamilyTag, p: &LaurentPotential, ctx: &DeformationContext) -> Result<Vec<CheckRow>> {
    // unit θ with a coupling that cannot vanish
    let m = ctx.m.max(1);
    let spin = if ctx.spin == Spin::None { Spin::Up } else { ctx.spin };
    let real = DeformationContext::real(1.0, m);
    let complex = DeformationContext::complex(1.0, m, spin);
    let mut rows = Vec::new();
    match family {
        FamilyTag::EvenPower => {
            let (a, c, d) = (p.coeff(2), p.coeff(-4), p.coeff(-6));
            let engine_r = theta_expand(p, &real);
            let printed_r = printed_coefficients(family, p, &real)?;
            let engine_c = theta_expand(p, &complex);
            let printed_c = printed_coefficients(family, p, &complex)?;
            rows.push(numeric_row(
                "even.absorbed_c.real",
                printed_r.absorbed.coeff(-4) - c,
                engine_r.absorbed.coeff(-4) - c,
                "change of the r^-4 coefficient per unit theta",
            ));
            rows.push(numeric_row(
                "even.perturbation_r^-8.real",
                printed_r.perturbation.coeff(-8),
                engine_r.perturbation.coeff(-8),
                "r^-8 coefficient per unit theta",
            ));
            rows.push(numeric_row(
                "even.absorbed_d.complex",
                printed_c.absorbed.coeff(-6) - d,
                engine_c.absorbed.coeff(-6) - d,
                "change of the r^-6 coefficient per unit theta",
            ));
            rows.push(CheckRow {
                location: "even.gauge_r^2_exponent",
                printed: -0.5 * a,
                engine: -0.5 * a.sqrt(),
                classification: Classification::NotDerivable,
                note: "exp(-a r²/2) does not solve the radial equation unless a = 1; the gauge needs exp(-√a r²/2)".into(),
            });
            let mut row = numeric_row(
                "correction.spin_factor",
                -2.0,
                2.0,
                "coefficient of s_z in the spin factor of the correction",
            );
            row.note.push_str("; the two printed forms (m±1) and (m∓1) disagree with each other");
            rows.push(row);
            rows.push(ground_prefactor_row(p, ctx.m)?);
        }
        FamilyTag::InversePower => {
            let d = p.coeff(-4);
            let engine = theta_expand(p, &real);
            let printed = printed_coefficients(family, p, &real)?;
            rows.push(numeric_row(
                "inverse.absorbed_d.real",
                printed.absorbed.coeff(-4) - d,
                engine.absorbed.coeff(-4) - d,
                "change of the r^-4 coefficient per unit theta",
            ));
        }
        FamilyTag::General => {}
    }
    Ok(rows)
}

/// Prefactor of the ground-state `⟨r⁻⁸⟩` correction: printed `(3/2) d a₀`
/// against the derivable `3 d a₀²`, with `a₀` of the normalized state.
fn ground_prefactor_row(p: &LaurentPotential, m: u32) -> Result<CheckRow> {
    let ctx = DeformationContext::commutative(m);
    let tuned = tune_b(p, &ctx, 0)?;
    let a0 = match solve_qes(&tuned, &ctx, 0, DEFAULT_B_TOLERANCE)? {
        QesState::EvenPower(s) => s.coeffs[0],
        QesState::InversePower(_) => f64::NAN,
    };
    let d = p.coeff(-6);
    Ok(numeric_row(
        "even.ground_correction_prefactor",
        1.5 * d * a0,
        3.0 * d * a0 * a0,
        "prefactor of the ground-state r^-8 integral",
    ))
}

/// The full report for one potential of each family.
pub fn check_report(even: &LaurentPotential, inverse: &LaurentPotential, ctx: &DeformationContext) -> Result<Vec<CheckRow>> {
    let mut rows = check_family(FamilyTag::EvenPower, even, ctx)?;
    rows.extend(check_family(FamilyTag::InversePower, inverse, ctx)?);
    Ok(rows)
}
