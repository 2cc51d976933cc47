//! Finite-difference eigenvalues: the oscillator and the deformed even-power
//! example.

use ncqes::{parse_potential, solve_radial_numeric, theta_expand, DeformationContext, RadialProblem, Spin};

fn main() -> ncqes::Result<()> {
    let osc = parse_potential("r^2")?;
    for m in 0..3 {
        let res = solve_radial_numeric(&RadialProblem::auto(osc.clone(), m, 3)?, 3)?;
        println!("oscillator m = {m}: {:?} (est. errors {:?})", res.eigenvalues, res.grid_estimate_error);
    }
    let p = parse_potential("r^2 + 2*r^-2 + 2*r^-4 + r^-6")?;
    let deformed = theta_expand(&p, &DeformationContext::complex(1e-3, 0, Spin::Up)).total();
    let res = solve_radial_numeric(&RadialProblem::auto(deformed, 0, 2)?, 2)?;
    println!("deformed even-power: {:?}, nodes {:?}", res.eigenvalues, res.node_counts);
    Ok(())
}
