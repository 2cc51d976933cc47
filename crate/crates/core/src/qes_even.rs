//! Quasi-exact solutions of `V = a r² + b r⁻² + c r⁻⁴ + d r⁻⁶`.
//!
//! The ansatz is `R = P(r²) · r^δ · exp(-α r²/2 - β/(2r²))` with
//! `α = √a`, `β = √d`, `δ = 3/2 + c/(2β)`. Substituting into
//! `-R'' + [(m²-1/4)/r² + V] R = E R` and collecting `r^(2k)` gives the
//! three-term recursion
//!
//! ```text
//! 4β(k+2) a_{k+2} + [(2k+2)(2k+1) + 4(k+1)δ + Q] a_{k+1} + (ε - 4kα) a_k = 0
//! ```
//!
//! with `Q = δ² - δ - 2αβ - (m² - 1/4) - b` and `ε = E - α(2δ+1)`. A degree-n
//! polynomial needs `ε = 4nα` and a null vector of the remaining
//! `(n+1) × (n+1)` system, which is a condition on `Q` and therefore on `b`.

use serde::Serialize;

use crate::deform::{theta_expand, DeformationContext, DeformedPotential};
use crate::error::{Error, Result};
use crate::potential::LaurentPotential;
use crate::quad::ExpSinh;
use crate::tridiag::SymTridiagonal;

pub const DEFAULT_B_TOLERANCE: f64 = 1e-9;
const EVEN_EXPONENTS: [i32; 5] = [2, 0, -2, -4, -6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvenGauge {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub mu: f64,
}

/// Gauge parameters from the (absorbed) coefficients.
pub fn even_gauge(absorbed: &LaurentPotential) -> Result<EvenGauge> {
    let a = absorbed.coeff(2);
    let d = absorbed.coeff(-6);
    if !(a > 0.0) {
        return Err(Error::NegativeGauge { what: "a", value: a });
    }
    if !(d > 0.0) {
        return Err(Error::NegativeGauge { what: "d", value: d });
    }
    if let Some(k) = absorbed.exponents().find(|k| !EVEN_EXPONENTS.contains(k)) {
        return Err(Error::UnsupportedFamily(format!(
            "exponent {k} is outside the even-power family"
        )));
    }
    let alpha = a.sqrt();
    let beta = d.sqrt();
    let mu = absorbed.coeff(-4) / (2.0 * beta);
    Ok(EvenGauge {
        alpha,
        beta,
        delta: mu + 1.5,
        mu,
    })
}

/// `Q = δ² - δ - 2αβ - (m² - 1/4) - b`.
pub fn q_parameter(g: &EvenGauge, m: u32, b: f64) -> f64 {
    q_offset(g, m) - b
}

pub fn b_from_q(g: &EvenGauge, m: u32, q: f64) -> f64 {
    q_offset(g, m) - q
}

fn q_offset(g: &EvenGauge, m: u32) -> f64 {
    let m2 = (m as f64).powi(2);
    g.delta * g.delta - g.delta - 2.0 * g.alpha * g.beta - (m2 - 0.25)
}

/// Multipliers `(c₂, c₁, c₀)` of `a_{k+2}, a_{k+1}, a_k` at order `r^(2k)`,
/// with `energy_internal` measured without the constant shift and offset.
pub fn recursion_coefficients(g: &EvenGauge, m: u32, b: f64, energy_internal: f64, k: i32) -> (f64, f64, f64) {
    let q = q_parameter(g, m, b);
    recursion_with_q(g, q, energy_internal - g.alpha * (2.0 * g.delta + 1.0), k)
}

fn recursion_with_q(g: &EvenGauge, q: f64, eps: f64, k: i32) -> (f64, f64, f64) {
    // below k = 0 the last multiplier would act on a nonexistent a_{-1}
    let c0 = if k < 0 { 0.0 } else { eps - 4.0 * k as f64 * g.alpha };
    let k = k as f64;
    (
        4.0 * g.beta * (k + 2.0),
        (2.0 * k + 2.0) * (2.0 * k + 1.0) + 4.0 * (k + 1.0) * g.delta + q,
        c0,
    )
}

/// Values of `Q` admitting a degree-`n` polynomial, ascending.
///
/// The recursion system with `ε = 4nα` is `(D + Q I) a = 0` for a
/// tridiagonal `D` whose off-diagonal products `16αβ i (n-i+1)` are
/// positive, so `D` is similar to a symmetric matrix and all `n + 1` roots
/// are real.
pub fn solvability_q(g: &EvenGauge, n: usize) -> Vec<f64> {
    match n {
        0 => vec![0.0],
        1 => {
            // Q² + (2 + 4δ) Q - 16αβ = 0, in cancellation-free form
            let p = 2.0 + 4.0 * g.delta;
            let c = -16.0 * g.alpha * g.beta;
            let s = (p * p - 4.0 * c).sqrt();
            let big = -0.5 * (p + s.copysign(p));
            let mut roots = vec![big, c / big];
            roots.sort_by(f64::total_cmp);
            roots
        }
        _ => {
            let diag = (0..=n)
                .map(|i| {
                    let i = i as f64;
                    2.0 * i * (2.0 * i - 1.0) + 4.0 * i * g.delta
                })
                .collect();
            let off = (1..=n)
                .map(|i| (16.0 * g.alpha * g.beta * i as f64 * (n - i + 1) as f64).sqrt())
                .collect();
            let t = SymTridiagonal::new(diag, off);
            let mut roots: Vec<f64> = t.lowest(n + 1).into_iter().map(|lam| -lam).collect();
            roots.sort_by(f64::total_cmp);
            roots
        }
    }
}

/// Values of `b` admitting a degree-`n` polynomial, ascending.
pub fn solvability_b(g: &EvenGauge, m: u32, n: usize) -> Vec<f64> {
    let mut bs: Vec<f64> = solvability_q(g, n).iter().map(|&q| b_from_q(g, m, q)).collect();
    bs.sort_by(f64::total_cmp);
    bs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvenQesSolution {
    pub n: usize,
    pub m: u32,
    /// Coefficients of `P(u) = Σ a_p u^p`, `u = r²`.
    pub coeffs: Vec<f64>,
    pub gauge: EvenGauge,
    pub q: f64,
    pub required_b: f64,
    /// Total energy including the constant shift and any constant term.
    pub energy: f64,
    pub constant_shift: f64,
    /// Constant term of the potential, an exact energy offset.
    pub offset: f64,
    pub context: DeformationContext,
}

/// Solves level `n` for the deformed potential of `p` under `ctx`.
pub fn solve_even(p: &LaurentPotential, ctx: &DeformationContext, n: usize, b_tolerance: f64) -> Result<EvenQesSolution> {
    solve_even_deformed(&theta_expand(p, ctx), n, b_tolerance)
}

pub fn solve_even_deformed(deformed: &DeformedPotential, n: usize, b_tolerance: f64) -> Result<EvenQesSolution> {
    let absorbed = &deformed.absorbed;
    let gauge = even_gauge(absorbed)?;
    let m = deformed.context.m;
    let b = absorbed.coeff(-2);
    let qs = solvability_q(&gauge, n);
    let (q, required_b) = qs
        .iter()
        .map(|&q| (q, b_from_q(&gauge, m, q)))
        .min_by(|x, y| (x.1 - b).abs().total_cmp(&(y.1 - b).abs()))
        .expect("at least one solvability root");
    let distance = (b - required_b).abs();
    if distance > b_tolerance * required_b.abs().max(1.0) {
        return Err(Error::NotQuasiExactlySolvable {
            b,
            closest_root: required_b,
            distance,
        });
    }
    let coeffs = series_coefficients(&gauge, q, n);
    let offset = absorbed.constant();
    let energy = gauge.alpha * (2.0 * gauge.mu + 4.0 + 4.0 * n as f64) + offset + deformed.constant_shift;
    let sol = EvenQesSolution {
        n,
        m,
        coeffs,
        gauge,
        q,
        required_b,
        energy,
        constant_shift: deformed.constant_shift,
        offset,
        context: deformed.context,
    };
    sol.normalize()
}

/// Copy of `p` with `b` moved onto the solvability root nearest to it,
/// evaluated on the deformed coefficients. Under deformation `b` also feeds
/// `ĉ`, so the root is found by fixed-point iteration.
pub fn tune_even_b(p: &LaurentPotential, ctx: &DeformationContext, n: usize) -> Result<LaurentPotential> {
    let mut current = p.clone();
    for _ in 0..200 {
        let deformed = theta_expand(&current, ctx);
        let gauge = even_gauge(&deformed.absorbed)?;
        let b = current.coeff(-2);
        let root = solvability_b(&gauge, ctx.m, n)
            .into_iter()
            .min_by(|x, y| (x - b).abs().total_cmp(&(y - b).abs()))
            .expect("at least one solvability root");
        let next = current.with_coeff(-2, root);
        if (root - b).abs() <= 1e-15 * root.abs().max(1.0) {
            return Ok(next);
        }
        current = next;
    }
    Err(Error::Invalid(format!("b did not settle on a solvability root for {p}")))
}

fn series_coefficients(g: &EvenGauge, q: f64, n: usize) -> Vec<f64> {
    let eps = 4.0 * n as f64 * g.alpha;
    let mut a = vec![1.0];
    let mut prev = 0.0;
    for k in -1..(n as i32 - 1) {
        let (c2, c1, c0) = recursion_with_q(g, q, eps, k);
        let next = -(c1 * a[a.len() - 1] + c0 * prev) / c2;
        prev = a[a.len() - 1];
        a.push(next);
    }
    a
}

impl EvenQesSolution {
    /// Energy on the absorbed potential, without the constant shift.
    pub fn energy_base(&self) -> f64 {
        self.energy - self.constant_shift
    }

    pub fn polynomial(&self, r: f64) -> f64 {
        let u = r * r;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    /// Logarithm of the gauge factor `r^δ exp(-α r²/2 - β/(2r²))`.
    pub fn ln_gauge(&self, r: f64) -> f64 {
        let g = &self.gauge;
        g.delta * r.ln() - 0.5 * g.alpha * r * r - 0.5 * g.beta / (r * r)
    }

    pub fn eval_radial(&self, r: f64) -> Result<f64> {
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
        p * self.ln_gauge(r).exp()
    }

    /// Radius where the two gauge exponentials balance.
    pub fn bulk_scale(&self) -> f64 {
        (self.gauge.beta / self.gauge.alpha).powf(0.25)
    }

    /// `∫ R² dr` by quadrature.
    pub fn norm(&self) -> Result<f64> {
        let q = ExpSinh::with_scale(self.bulk_scale()).integrate(|r| {
            let v = self.value(r);
            v * v
        })?;
        Ok(q.value)
    }

    /// Rescales the coefficients so that `∫ R² dr = 1`.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm()?;
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Quadrature(format!("normalization integral is {norm}")));
        }
        let s = norm.sqrt().recip();
        self.coeffs.iter_mut().for_each(|c| *c *= s);
        Ok(self)
    }

    /// Positive zeros of the polynomial factor.
    pub fn node_count(&self) -> usize {
        let mut nodes = 0;
        let mut last = 0.0f64;
        for i in 0..=4800 {
            let r = 10f64.powf(-6.0 + i as f64 * 12.0 / 4800.0);
            let v = self.polynomial(r);
            if v != 0.0 {
                if last != 0.0 && v.signum() != last.signum() {
                    nodes += 1;
                }
                last = v;
            }
        }
        nodes
    }

    /// Largest relative residual of the recursion at orders `n+1` and `n+2`.
    pub fn recursion_residual(&self) -> f64 {
        let n = self.n as i32;
        let eps = 4.0 * self.n as f64 * self.gauge.alpha;
        let at = |i: i32| if i < 0 || i > n { 0.0 } else { self.coeffs[i as usize] };
        let scale = self.coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        [n - 1, n]
            .iter()
            .map(|&k| {
                let (c2, c1, c0) = recursion_with_q(&self.gauge, self.q, eps, k);
                (c2 * at(k + 2) + c1 * at(k + 1) + c0 * at(k)).abs() / (scale * c2.abs().max(c1.abs()).max(1.0))
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::Spin;
    use crate::potential::parse_potential;

    fn worked() -> LaurentPotential {
        parse_potential("r^2 + 2*r^-2 + 2*r^-4 + r^-6").unwrap()
    }

    /// Fourth-order finite-difference residual of the radial equation.
    fn residual(sol: &EvenQesSolution, lo: f64, hi: f64) -> f64 {
        let p = theta_expand(&worked_like(sol), &sol.context).absorbed;
        let h = 1e-3;
        let m2 = (sol.m as f64).powi(2);
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        let steps = 400;
        for i in 0..=steps {
            let r = lo + (hi - lo) * i as f64 / steps as f64;
            let f = |x: f64| sol.value(x);
            let d2 = (-f(r + 2.0 * h) + 16.0 * f(r + h) - 30.0 * f(r) + 16.0 * f(r - h) - f(r - 2.0 * h)) / (12.0 * h * h);
            let lhs = -d2 + ((m2 - 0.25) / (r * r) + p.eval(r)) * f(r);
            worst = worst.max((lhs - sol.energy_base() * f(r)).abs());
            scale = scale.max((sol.energy_base() * f(r)).abs());
        }
        worst / scale
    }

    fn worked_like(sol: &EvenQesSolution) -> LaurentPotential {
        // rebuild the undeformed potential the solution came from
        LaurentPotential::from_terms([
            (2, sol.gauge.alpha.powi(2)),
            (-2, sol.required_b),
            (-4, 2.0 * sol.gauge.beta * sol.gauge.mu),
            (-6, sol.gauge.beta.powi(2)),
        ])
    }

    #[test]
    fn gauge_examples() {
        let g = even_gauge(&worked()).unwrap();
        assert_eq!((g.alpha, g.beta, g.delta, g.mu), (1.0, 1.0, 2.5, 1.0));
        let g = even_gauge(&parse_potential("4*r^2 + 0.1*r^-2 + 9*r^-6").unwrap()).unwrap();
        assert_eq!((g.alpha, g.beta, g.delta, g.mu), (2.0, 3.0, 1.5, 0.0));
        assert!(matches!(
            even_gauge(&parse_potential("-r^2 + r^-6").unwrap()),
            Err(Error::NegativeGauge { what: "a", .. })
        ));
        assert!(matches!(
            even_gauge(&parse_potential("r^2 + r^-3 + r^-6").unwrap()),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn first_recursion_row() {
        let g = even_gauge(&worked()).unwrap();
        let (c2, c1, c0) = recursion_coefficients(&g, 0, 2.0, 6.0, -1);
        assert_eq!((c2, c1, c0), (4.0, q_parameter(&g, 0, 2.0), 0.0));
        assert_eq!(q_parameter(&g, 0, 2.0), 0.0);
    }

    #[test]
    fn worked_ground_state() {
        let sol = solve_even(&worked(), &DeformationContext::commutative(0), 0, DEFAULT_B_TOLERANCE).unwrap();
        assert_eq!(sol.energy, 6.0);
        assert_eq!(sol.required_b, 2.0);
        assert!(residual(&sol, 0.1, 5.0) < 1e-6);
        assert!((sol.norm().unwrap() - 1.0).abs() < 1e-10);
        // positive wherever the factors are representable; near r = 0.01 the
        // gauge is e^-5000 and the value itself underflows
        for i in 0..100 {
            let r = 1e-2 + i as f64 * 0.1;
            assert!(sol.polynomial(r) > 0.0 && sol.ln_gauge(r).is_finite());
            assert!(sol.eval_radial(r).unwrap() >= 0.0);
            if r > 0.05 {
                assert!(sol.eval_radial(r).unwrap() > 0.0);
            }
        }
        assert_eq!(sol.eval_radial(1e-3).unwrap(), 0.0);
        assert!(sol.eval_radial(60.0).unwrap() < 1e-300);
        assert!(sol.eval_radial(0.0).is_err());
    }

    #[test]
    fn one_node_roots() {
        let g = even_gauge(&worked()).unwrap();
        let qs = solvability_q(&g, 1);
        for q in &qs {
            let val = q * q + (2.0 + 4.0 * g.delta) * q - 16.0 * g.alpha * g.beta;
            assert!(val.abs() < 1e-12, "{val}");
        }
        // the tridiagonal route reproduces the closed form
        let t = SymTridiagonal::new(vec![0.0, 2.0 + 4.0 * g.delta], vec![4.0 * (g.alpha * g.beta).sqrt()]);
        let mut via_matrix: Vec<f64> = t.lowest(2).iter().map(|l| -l).collect();
        via_matrix.sort_by(f64::total_cmp);
        for (a, b) in qs.iter().zip(&via_matrix) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn higher_degree_roots_solve_the_system() {
        let g = even_gauge(&parse_potential("1.3*r^2 + 0.7*r^-4 + 0.8*r^-6").unwrap()).unwrap();
        for n in 2..5 {
            let qs = solvability_q(&g, n);
            assert_eq!(qs.len(), n + 1);
            for &q in &qs {
                let a = series_coefficients(&g, q, n);
                let sol = EvenQesSolution {
                    n,
                    m: 0,
                    coeffs: a,
                    gauge: g,
                    q,
                    required_b: b_from_q(&g, 0, q),
                    energy: 0.0,
                    constant_shift: 0.0,
                    offset: 0.0,
                    context: DeformationContext::commutative(0),
                };
                assert!(sol.recursion_residual() < 1e-10, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn excited_state_and_ladder() {
        let g = even_gauge(&worked()).unwrap();
        let b_roots = solvability_b(&g, 1, 1);
        // the physical one-node state sits on the root with a₀/a₁ < 0
        for &b in &b_roots {
            let p = worked().with_coeff(-2, b);
            let sol = solve_even(&p, &DeformationContext::commutative(1), 1, DEFAULT_B_TOLERANCE).unwrap();
            assert!(sol.recursion_residual() < 1e-12);
            assert!(residual(&sol, 0.1, 5.0) < 1e-6);
            let expected_nodes = if sol.coeffs[0] / sol.coeffs[1] < 0.0 { 1 } else { 0 };
            assert_eq!(sol.node_count(), expected_nodes);
            assert_eq!(sol.energy - 4.0 * g.alpha, g.alpha * (2.0 * g.mu + 4.0));
        }
    }

    #[test]
    fn not_solvable_reports_root() {
        let p = worked().with_coeff(-2, 2.5);
        match solve_even(&p, &DeformationContext::commutative(0), 0, DEFAULT_B_TOLERANCE) {
            Err(Error::NotQuasiExactlySolvable { closest_root, .. }) => assert_eq!(closest_root, 2.0),
            other => panic!("{other:?}"),
        }
        let tuned = tune_even_b(&p, &DeformationContext::commutative(0), 0).unwrap();
        assert_eq!(tuned.coeff(-2), 2.0);
    }

    #[test]
    fn spin_down_cancels_deformation() {
        let ctx = DeformationContext::complex(0.01, 1, Spin::Down);
        let p = tune_even_b(&worked(), &DeformationContext::commutative(1), 0).unwrap();
        let sol = solve_even(&p, &ctx, 0, DEFAULT_B_TOLERANCE).unwrap();
        assert_eq!(sol.constant_shift, 0.0);
        let plain = solve_even(&p, &DeformationContext::commutative(1), 0, DEFAULT_B_TOLERANCE).unwrap();
        assert_eq!(sol.energy, plain.energy);
    }

    #[test]
    fn spin_up_deformed_state() {
        let ctx = DeformationContext::complex(0.01, 1, Spin::Up);
        let p = tune_even_b(&worked(), &ctx, 0).unwrap();
        let sol = solve_even(&p, &ctx, 0, DEFAULT_B_TOLERANCE).unwrap();
        assert!((sol.constant_shift + 0.02).abs() < 1e-15);
        let c_hat = 2.0 + p.coeff(-2) * 0.02;
        let d_hat: f64 = 1.0 + 2.0 * 2.0 * 0.02;
        assert!((sol.gauge.mu - c_hat / (2.0 * d_hat.sqrt())).abs() < 1e-15);
        assert!((sol.energy - (2.0 * sol.gauge.mu + 4.0) + 0.02).abs() < 1e-13);
    }

    #[test]
    fn normalization_is_idempotent() {
        let sol = solve_even(&worked(), &DeformationContext::commutative(0), 0, DEFAULT_B_TOLERANCE).unwrap();
        let mut doubled = sol.clone();
        doubled.coeffs.iter_mut().for_each(|c| *c *= 2.0);
        let again = doubled.normalize().unwrap();
        assert!((again.coeffs[0] - sol.coeffs[0]).abs() < 1e-12 * sol.coeffs[0]);
        // the worked ground state is r^(5/2) e^(-r²/2 - 1/(2r²)), whose
        // norm is ∫ r⁵ e^(-r² - 1/r²) dr = (1/2) · 2 K₃(2)
        let k3 = crate::specfun::bessel_k(3.0, 2.0, 1e-14).unwrap().value;
        assert!((sol.coeffs[0].powi(-2) - k3).abs() < 1e-9 * k3);
    }

    #[test]
    fn theta_zero_is_commutative() {
        let p = worked();
        let a = solve_even(&p, &DeformationContext::commutative(0), 0, DEFAULT_B_TOLERANCE).unwrap();
        let b = solve_even(&p, &DeformationContext::real(0.0, 0), 0, DEFAULT_B_TOLERANCE).unwrap();
        assert_eq!(a, b);
        let c = solve_even(&p, &DeformationContext::complex(0.0, 0, Spin::Up), 0, DEFAULT_B_TOLERANCE).unwrap();
        assert_eq!(a.coeffs, c.coeffs);
        assert_eq!(a.energy.to_bits(), c.energy.to_bits());
    }
}
