//! Printed-versus-derived formula comparison for both families.

use ncqes::{check_report, parse_potential, DeformationContext};

fn main() -> ncqes::Result<()> {
    let even = parse_potential("r^2 + 2*r^-2 + 2*r^-4 + r^-6")?;
    let inverse = parse_potential("-3*r^-1 - r^-2 + r^-3 + r^-4")?;
    for row in check_report(&even, &inverse, &DeformationContext::commutative(1))? {
        println!("{:36} {:20} {}", row.location, row.classification.to_string(), row.note);
    }
    Ok(())
}
