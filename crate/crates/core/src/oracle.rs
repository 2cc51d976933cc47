//! Finite-difference radial eigensolver, independent of the analytic gauges.
//!
//! The 2D radial operator `-(1/r)(r R')' + m²/r² R + V R` is discretized in
//! conservative form on a cell-centred uniform grid. The similarity
//! transform `u = √r R` makes the matrix symmetric tridiagonal, and `u` is
//! then the reduced radial function of `-u'' + [(m²-1/4)/r² + V] u = E u`.
//! Because the flux weight vanishes at `r = 0`, a regular origin needs no
//! boundary condition at all, which keeps `m = 0` second-order accurate.
//! A positive inner radius gets a Dirichlet wall.
//!
//! Eigenvalues come from Sturm bisection on three grids (N/2, N, 2N); the
//! two finer ones are Richardson-extrapolated and the coarse one guards the
//! asymptotic regime.

use serde::Serialize;

use crate::deform::{theta_expand, DeformationContext};
use crate::error::{Error, Result};
use crate::potential::LaurentPotential;
use crate::tridiag::SymTridiagonal;

pub const DEFAULT_POINTS: usize = 20_000;
/// Gauge factor at the domain boundaries.
pub const BOUNDARY_DECAY: f64 = 1e-14;
/// Largest tolerated density next to a wall, relative to the peak density.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-8;
/// Cells adjacent to each wall inspected by the boundary check.
const WALL_CELLS: usize = 8;
const OUTER_SAFETY: f64 = 1.3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProblem {
    pub potential: LaurentPotential,
    pub m: u32,
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub eigenvalues: Vec<f64>,
    pub grid_estimate_error: Vec<f64>,
    pub node_counts: Vec<usize>,
    /// Unextrapolated eigenvalues on the requested grid.
    pub raw: Vec<f64>,
}

fn decay_length() -> f64 {
    -BOUNDARY_DECAY.ln()
}

/// Domain for the even gauge `exp(-α r²/2 - β/(2r²))`.
pub fn even_domain(alpha: f64, beta: f64) -> (f64, f64) {
    let l = decay_length();
    ((beta / (2.0 * l)).sqrt(), OUTER_SAFETY * (2.0 * l / alpha).sqrt())
}

/// Domain for the inverse gauge `exp(α_W/r + β r)`, with `α_W, β < 0`.
pub fn inverse_domain(alpha_w: f64, beta: f64) -> (f64, f64) {
    let l = decay_length();
    (alpha_w.abs() / l, 2.0 * l / beta.abs())
}

impl RadialProblem {
    pub fn new(potential: LaurentPotential, m: u32, r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_min >= 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::Invalid(format!("radial domain [{r_min}, {r_max}] is empty")));
        }
        if n_points < 100 {
            return Err(Error::Invalid(format!("need at least 100 grid points, got {n_points}")));
        }
        Ok(Self {
            potential,
            m,
            r_min,
            r_max,
            n_points,
        })
    }

    /// Picks a domain from the leading coefficients. `states` is the number
    /// of levels wanted, which widens the outer edge for the inverse family.
    pub fn auto(potential: LaurentPotential, m: u32, states: usize) -> Result<Self> {
        let (r_min, r_max) = auto_domain(&potential, states)?;
        Self::new(potential, m, r_min, r_max, DEFAULT_POINTS)
    }

    pub fn with_points(mut self, n_points: usize) -> Self {
        self.n_points = n_points;
        self
    }

    fn matrix(&self, n: usize) -> SymTridiagonal {
        let h = (self.r_max - self.r_min) / n as f64;
        let m2 = (self.m as f64).powi(2);
        let face = |i: usize| self.r_min + i as f64 * h;
        let centre = |i: usize| self.r_min + (i as f64 + 0.5) * h;
        let h2 = h * h;
        // the constant term is an exact eigenvalue offset; keeping it out of
        // the matrix avoids rounding it against the O(1/h²) diagonal
        let variable = self.potential.without_constant();
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n - 1);
        for i in 0..n {
            let r = centre(i);
            let mut inner = face(i);
            let mut outer = face(i + 1);
            // ghost-cell Dirichlet walls
            if i == 0 {
                inner *= 2.0;
            }
            if i == n - 1 {
                outer *= 2.0;
            }
            diag.push((inner + outer) / (h2 * r) + m2 / (r * r) + variable.eval(r));
            if i + 1 < n {
                off.push(-face(i + 1) / (h2 * (r * centre(i + 1)).sqrt()));
            }
        }
        SymTridiagonal::new(diag, off)
    }

    /// Lowest `k` eigenvalues on an `n`-point grid, without extrapolation.
    pub fn fd_eigenvalues(&self, n: usize, k: usize) -> Vec<f64> {
        let offset = self.potential.constant();
        self.matrix(n).lowest(k).into_iter().map(|e| e + offset).collect()
    }
}

pub fn auto_domain(p: &LaurentPotential, states: usize) -> Result<(f64, f64)> {
    let a = p.coeff(2);
    let d6 = p.coeff(-6);
    let d4 = p.coeff(-4);
    let a1 = p.coeff(-1);
    let (r_min, r_max) = if a > 0.0 && d6 > 0.0 {
        even_domain(a.sqrt(), d6.sqrt())
    } else if a > 0.0 {
        (0.0, even_domain(a.sqrt(), 1.0).1)
    } else if d4 > 0.0 && a1 < 0.0 {
        let alpha_w = -d4.sqrt();
        let c = 1.0 + p.coeff(-3) / (2.0 * d4.sqrt());
        let level = (c + states.saturating_sub(1) as f64).max(0.5);
        inverse_domain(alpha_w, a1 / (2.0 * level))
    } else {
        return Err(Error::Invalid(format!("cannot infer a bound-state domain for {p}")));
    };
    Ok((r_min.max(collapse_radius(p)), r_max))
}

/// Radius inside which an attractive term more singular than the leading
/// repulsive one takes over. The potential is unbounded below there, so the
/// inner wall must stay outside it.
fn collapse_radius(p: &LaurentPotential) -> f64 {
    let Some((k_lead, v_lead)) = p.terms().filter(|&(k, v)| k < 0 && v > 0.0).min_by_key(|&(k, _)| k) else {
        return 0.0;
    };
    p.terms()
        .filter(|&(k, v)| k < k_lead && v < 0.0)
        .map(|(k, v)| 1.5 * (v.abs() / v_lead).powf(1.0 / (k_lead - k) as f64))
        .fold(0.0, f64::max)
}

/// Lowest `k` eigenvalues with Richardson extrapolation and node counts.
pub fn solve_radial_numeric(prob: &RadialProblem, k: usize) -> Result<OracleResult> {
    if k == 0 {
        return Err(Error::Invalid("need at least one eigenvalue".into()));
    }
    let n = prob.n_points;
    let coarse = prob.fd_eigenvalues(n / 2, k);
    let fine_matrix = prob.matrix(n);
    let offset = prob.potential.constant();
    let mid: Vec<f64> = fine_matrix.lowest(k).into_iter().map(|e| e + offset).collect();
    let fine = prob.fd_eigenvalues(2 * n, k);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut errors = Vec::with_capacity(k);
    for i in 0..k {
        let d1 = coarse[i] - mid[i];
        let d2 = mid[i] - fine[i];
        let noise = 1e-11 * fine[i].abs().max(1.0);
        if d1.abs() > noise && d2.abs() > noise && (d1.signum() != d2.signum() || d2.abs() > d1.abs()) {
            return Err(Error::GridTooCoarse(format!(
                "level {i}: drift {d1:e} then {d2:e} is not in the asymptotic regime"
            )));
        }
        eigenvalues.push(fine[i] - d2 / 3.0);
        errors.push(d2.abs() / 3.0);
    }
    for w in eigenvalues.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::GridTooCoarse("eigenvalues are not strictly ascending".into()));
        }
    }
    let mut node_counts = Vec::with_capacity(k);
    for &lambda in &mid {
        let u = fine_matrix.eigenvector(lambda - offset);
        check_boundary_mass(&u, prob.r_min > 0.0)?;
        node_counts.push(count_nodes(&u));
    }
    Ok(OracleResult {
        eigenvalues,
        grid_estimate_error: errors,
        node_counts,
        raw: mid,
    })
}

fn check_boundary_mass(u: &[f64], inner_wall: bool) -> Result<()> {
    let density = |v: &f64| v * v;
    let peak = u.iter().map(density).fold(0.0, f64::max);
    let strip = WALL_CELLS.min(u.len() / 2);
    let outer = u[u.len() - strip..].iter().map(density).fold(0.0, f64::max);
    let inner = if inner_wall {
        u[..strip].iter().map(density).fold(0.0, f64::max)
    } else {
        0.0
    };
    let mass = outer.max(inner) / peak;
    if mass > BOUNDARY_MASS_LIMIT {
        return Err(Error::DomainTooNarrow {
            mass,
            threshold: BOUNDARY_MASS_LIMIT,
        });
    }
    Ok(())
}

fn count_nodes(u: &[f64]) -> usize {
    let peak = u.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let floor = 1e-6 * peak;
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &v in u.iter().filter(|v| v.abs() > floor) {
        if last != 0.0 && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    nodes
}

/// Central-difference slope `dE/dθ` of level `n_state` for the full
/// deformed potential (absorbed terms, shift and perturbation together).
/// Both sides share one grid so the discretization error cancels.
pub fn d_e_d_theta(p: &LaurentPotential, ctx: &DeformationContext, n_state: usize, theta_step: f64) -> Result<f64> {
    if !(theta_step > 0.0) {
        return Err(Error::Invalid(format!("theta step must be positive, got {theta_step}")));
    }
    let (r_min, r_max) = auto_domain(p, n_state + 1)?;
    let level = |theta: f64| -> Result<f64> {
        let total = theta_expand(p, &ctx.with_theta(theta)).total();
        let prob = RadialProblem::new(total, ctx.m, r_min, r_max, DEFAULT_POINTS)?;
        Ok(solve_radial_numeric(&prob, n_state + 1)?.eigenvalues[n_state])
    };
    let plus = level(theta_step)?;
    let minus = level(-theta_step)?;
    Ok((plus - minus) / (2.0 * theta_step))
}
