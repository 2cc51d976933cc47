//! First-order levels and the analytic slope dE/dθ for both worked examples.

use ncqes::perturb::analytic_slope;
use ncqes::qes_even::DEFAULT_B_TOLERANCE;
use ncqes::{first_order_level, parse_potential, tune_b, DeformationContext, Spin};

fn main() -> ncqes::Result<()> {
    let even = parse_potential("r^2 + 2*r^-2 + 2*r^-4 + r^-6")?;
    let even = tune_b(&even, &DeformationContext::commutative(1), 0)?;
    let inverse = parse_potential("-3*r^-1 - r^-2 + r^-3 + r^-4")?;
    for (name, p, m) in [("even", &even, 1), ("inverse", &inverse, 0)] {
        let ctx = DeformationContext::complex(1e-3, m, Spin::Up);
        let lvl = first_order_level(p, &ctx, 0, DEFAULT_B_TOLERANCE)?;
        let slope = analytic_slope(p, &ctx, 0, DEFAULT_B_TOLERANCE)?;
        println!(
            "{name}: E_base = {:.10}, shift = {:.3e}, dE = {:.6e}, E_total = {:.10} ({:?})",
            lvl.e_base, lvl.shift_const, lvl.de_pert, lvl.e_total, lvl.method
        );
        println!("  slope: {slope:?}");
        for t in &lvl.correction.terms {
            println!("  <r^{}> = {:.12e} (quadrature {:.12e})", t.k, t.expectation, t.expectation_quadrature);
        }
    }
    Ok(())
}
