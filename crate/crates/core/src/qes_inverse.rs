//! Quasi-exact solutions of `V = a r⁻¹ + b r⁻² + c r⁻³ + d r⁻⁴` for the
//! nodeless and the one-node state.
//!
//! With `ψ = P(r) · r^C · exp(α_W/r + β r)` and `P` of degree `n ≤ 1`,
//! matching powers of `r` in `-ψ'' + [(m²-1/4)/r² + V] ψ = E ψ` gives
//! `α_W = -√d`, `C = 1 + c/(2√d)`, `β = a/(2(C+n))` and `E = -β²`. The
//! remaining power fixes `b`:
//!
//! * `n = 0`: `b = C² - C - 2α_W β - m² + 1/4`;
//! * `n = 1`, `P = r - σ`: `Q² + 2C Q - 4α_W β = 0`, `σ = -2α_W/Q` and
//!   `b = -Q + C² - C - 2α_W β - m² + 1/4`.
//!
//! The two roots `Q` give two branches; only `σ > 0` puts the node on the
//! half-line.

use serde::Serialize;

use crate::deform::{theta_expand, DeformationContext, DeformedPotential};
use crate::error::{Error, Result};
use crate::potential::LaurentPotential;
use crate::quad::ExpSinh;

pub use crate::qes_even::DEFAULT_B_TOLERANCE;

const INVERSE_EXPONENTS: [i32; 5] = [0, -1, -2, -3, -4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvGauge {
    pub alpha_w: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub beta: f64,
    /// `-β²`, before offsets and shifts.
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvBranch {
    pub q2: f64,
    pub sigma: f64,
    pub required_b: f64,
    /// The node lies on the half-line.
    pub physical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvQesSolution {
    pub n: usize,
    pub m: u32,
    pub gauge: InvGauge,
    pub sigma: Option<f64>,
    /// Both branches for `n = 1`, empty for `n = 0`.
    pub branches: Vec<InvBranch>,
    pub branch: Option<usize>,
    pub required_b: f64,
    pub energy: f64,
    pub constant_shift: f64,
    pub offset: f64,
    /// Overall factor making `∫ ψ² dr = 1`.
    pub normalization: f64,
    pub context: DeformationContext,
}

/// Gauge of level `n` for the absorbed coefficients.
pub fn inverse_gauge(absorbed: &LaurentPotential, n: usize) -> Result<InvGauge> {
    let d = absorbed.coeff(-4);
    if !(d > 0.0) {
        return Err(Error::NegativeGauge { what: "d", value: d });
    }
    if let Some(k) = absorbed.exponents().find(|k| !INVERSE_EXPONENTS.contains(k)) {
        return Err(Error::UnsupportedFamily(format!(
            "exponent {k} is outside the inverse-power family"
        )));
    }
    let a = absorbed.coeff(-1);
    if !(a < 0.0) {
        return Err(Error::NoBoundState(format!("needs an attractive r^-1 term, got a = {a}")));
    }
    let sd = d.sqrt();
    let c = 1.0 + absorbed.coeff(-3) / (2.0 * sd);
    if !(c + n as f64 > 0.0) {
        return Err(Error::NoBoundState(format!("C + n = {} is not positive", c + n as f64)));
    }
    let beta = a / (2.0 * (c + n as f64));
    Ok(InvGauge {
        alpha_w: -sd,
        c,
        beta,
        energy: -beta * beta,
    })
}

fn b_base(g: &InvGauge, m: u32) -> f64 {
    g.c * g.c - g.c - 2.0 * g.alpha_w * g.beta - (m as f64).powi(2) + 0.25
}

/// The two one-node branches, ascending in `Q`.
pub fn one_node_branches(g: &InvGauge, m: u32) -> [InvBranch; 2] {
    // Q² + 2C Q - 4 α_W β = 0, in cancellation-free form
    let p = 2.0 * g.c;
    let c = -4.0 * g.alpha_w * g.beta;
    let s = (p * p - 4.0 * c).sqrt();
    let big = -0.5 * (p + s.copysign(p));
    let mut qs = [big, c / big];
    qs.sort_by(f64::total_cmp);
    qs.map(|q2| {
        let sigma = -2.0 * g.alpha_w / q2;
        InvBranch {
            q2,
            sigma,
            required_b: -q2 + b_base(g, m),
            physical: sigma > 0.0,
        }
    })
}

/// Admissible `b` values for level `n`.
pub fn inverse_solvability_b(g: &InvGauge, m: u32, n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Ok(vec![b_base(g, m)]),
        1 => Ok(one_node_branches(g, m).iter().map(|br| br.required_b).collect()),
        _ => Err(Error::UnsupportedDegree(n)),
    }
}

pub fn solve_inverse(p: &LaurentPotential, ctx: &DeformationContext, n: usize, b_tolerance: f64) -> Result<InvQesSolution> {
    solve_inverse_deformed(&theta_expand(p, ctx), n, b_tolerance)
}

pub fn solve_inverse_deformed(deformed: &DeformedPotential, n: usize, b_tolerance: f64) -> Result<InvQesSolution> {
    if n > 1 {
        return Err(Error::UnsupportedDegree(n));
    }
    let absorbed = &deformed.absorbed;
    let gauge = inverse_gauge(absorbed, n)?;
    let m = deformed.context.m;
    let b = absorbed.coeff(-2);
    let (branches, branch, required_b) = if n == 0 {
        (vec![], None, b_base(&gauge, m))
    } else {
        let br = one_node_branches(&gauge, m);
        let pick = if (br[0].required_b - b).abs() <= (br[1].required_b - b).abs() { 0 } else { 1 };
        (br.to_vec(), Some(pick), br[pick].required_b)
    };
    let distance = (b - required_b).abs();
    if distance > b_tolerance * required_b.abs().max(1.0) {
        return Err(Error::NotQuasiExactlySolvable {
            b,
            closest_root: required_b,
            distance,
        });
    }
    let offset = absorbed.constant();
    let sol = InvQesSolution {
        n,
        m,
        gauge,
        sigma: branch.map(|i| branches[i].sigma),
        branch,
        branches,
        required_b,
        energy: gauge.energy + offset + deformed.constant_shift,
        constant_shift: deformed.constant_shift,
        offset,
        normalization: 1.0,
        context: deformed.context,
    };
    sol.normalize()
}

/// Copy of `p` with `b` on the nearest admissible value for level `n`; for
/// `n = 1` the physical branch is used. Under deformation `b` also feeds
/// `d̂`, so the value is found by fixed-point iteration.
pub fn tune_inverse_b(p: &LaurentPotential, ctx: &DeformationContext, n: usize) -> Result<LaurentPotential> {
    let mut current = p.clone();
    for _ in 0..200 {
        let deformed = theta_expand(&current, ctx);
        let gauge = inverse_gauge(&deformed.absorbed, n)?;
        let root = match n {
            0 => b_base(&gauge, ctx.m),
            1 => {
                let br = one_node_branches(&gauge, ctx.m);
                br.iter().find(|b| b.physical).unwrap_or(&br[1]).required_b
            }
            _ => return Err(Error::UnsupportedDegree(n)),
        };
        let b = current.coeff(-2);
        current = current.with_coeff(-2, root);
        if (root - b).abs() <= 1e-15 * root.abs().max(1.0) {
            return Ok(current);
        }
    }
    Err(Error::Invalid(format!("b did not settle on a solvability root for {p}")))
}

impl InvQesSolution {
    pub fn energy_base(&self) -> f64 {
        self.energy - self.constant_shift
    }

    pub fn polynomial(&self, r: f64) -> f64 {
        match self.sigma {
            Some(s) => r - s,
            None => 1.0,
        }
    }

    pub fn ln_gauge(&self, r: f64) -> f64 {
        let g = &self.gauge;
        g.c * r.ln() + g.alpha_w / r + g.beta * r
    }

    pub fn eval_radial_inverse(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radial function needs r > 0, got {r}")));
        }
        Ok(self.value(r))
    }

    pub(crate) fn value(&self, r: f64) -> f64 {
        let p = self.polynomial(r);
        if p == 0.0 {
            return 0.0;
        }
        self.normalization * p * self.ln_gauge(r).exp()
    }

    pub fn bulk_scale(&self) -> f64 {
        (self.gauge.alpha_w / self.gauge.beta).sqrt()
    }

    pub fn norm(&self) -> Result<f64> {
        let q = ExpSinh::with_scale(self.bulk_scale()).integrate(|r| {
            let v = self.value(r);
            v * v
        })?;
        Ok(q.value)
    }

    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm()?;
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Quadrature(format!("normalization integral is {norm}")));
        }
        self.normalization /= norm.sqrt();
        Ok(self)
    }

    pub fn is_physical(&self) -> bool {
        self.sigma.is_none_or(|s| s > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaRow {
    pub quantity: String,
    pub printed_plus: f64,
    pub printed_minus: f64,
    pub derived: f64,
}

/// Evaluates the closed-form energy expressions in the form they are
/// commonly printed for this family, next to the power-matching results.
/// Nothing depends on the printed values; `NaN` marks expressions that are
/// undefined for the given signs (e.g. `√a` with `a < 0`).
pub fn printed_energy_formulas(p: &LaurentPotential, ctx: &DeformationContext) -> Vec<FormulaRow> {
    let deformed = theta_expand(p, ctx);
    let abs = &deformed.absorbed;
    let (a, b, c_hat, d_hat) = (abs.coeff(-1), abs.coeff(-2), abs.coeff(-3), abs.coeff(-4));
    let mu = b / (2.0 * a.sqrt());
    let lam0 = mu * (1.0 + mu) + d_hat * a.sqrt() / (1.0 + mu);
    let disc0 = (lam0 * lam0 - 2.0 * b * d_hat).sqrt();
    let e0 = |s: f64| (lam0 + s * disc0).powi(2) / (16.0 * a);

    let derived0 = tune_inverse_b(p, ctx, 0)
        .and_then(|q| solve_inverse(&q, ctx, 0, DEFAULT_B_TOLERANCE))
        .map(|s| s.energy)
        .unwrap_or(f64::NAN);
    let one = tune_inverse_b(p, ctx, 1).and_then(|q| solve_inverse(&q, ctx, 1, DEFAULT_B_TOLERANCE));
    let (derived1, sigma) = match &one {
        Ok(s) => (s.energy, s.sigma.unwrap_or(f64::NAN)),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let shift = sigma + a.sqrt();
    let lam1 = (1.0 + mu) * (2.0 + mu) + d_hat * a.sqrt() / (2.0 + mu) * shift;
    let disc1 = (lam1 * lam1 - 4.0 * d_hat * shift * (1.0 + mu)).sqrt();
    let e1 = |s: f64| -((lam1 + s * disc1) / (4.0 * shift)).powi(2);

    let exponent = inverse_gauge(abs, 0).map(|g| g.c - 1.0).unwrap_or(f64::NAN);
    vec![
        FormulaRow {
            quantity: "ground-state energy".into(),
            printed_plus: e0(1.0),
            printed_minus: e0(-1.0),
            derived: derived0,
        },
        FormulaRow {
            quantity: "one-node energy".into(),
            printed_plus: e1(1.0),
            printed_minus: e1(-1.0),
            derived: derived1,
        },
        FormulaRow {
            quantity: "power-law exponent minus one".into(),
            printed_plus: c_hat - 1.0,
            printed_minus: f64::NAN,
            derived: exponent,
        },
    ]
}
