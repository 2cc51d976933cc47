//! Split the deformed even-power potential into absorbed, constant and
//! perturbative parts for both spins.

use ncqes::{parse_potential, theta_expand, DeformationContext, Spin};

fn main() -> ncqes::Result<()> {
    let p = parse_potential("r^2 + 2*r^-2 + 2*r^-4 + r^-6")?;
    for spin in [Spin::Up, Spin::Down] {
        let d = theta_expand(&p, &DeformationContext::complex(1e-3, 1, spin));
        println!("s_z = {:+}: theta_eff = {:e}", spin.s_z(), d.theta_eff());
        println!("  absorbed      {}", ncqes::format_potential(&d.absorbed));
        println!("  constant      {:e}", d.constant_shift);
        println!("  perturbation  {}", ncqes::format_potential(&d.perturbation));
    }
    Ok(())
}
