//! Exact levels of the singular even-power family: solvability roots for
//! `b` and the resulting polynomial states.

use ncqes::qes_even::{even_gauge, solve_even, solvability_b, DEFAULT_B_TOLERANCE};
use ncqes::{parse_potential, DeformationContext};

fn main() -> ncqes::Result<()> {
    let p = parse_potential("r^2 + 2*r^-2 + 2*r^-4 + r^-6")?;
    let g = even_gauge(&p)?;
    for m in 0..3 {
        for n in 0..3 {
            println!("m = {m}, n = {n}: admissible b = {:?}", solvability_b(&g, m, n));
        }
    }
    let s = solve_even(&p, &DeformationContext::commutative(0), 0, DEFAULT_B_TOLERANCE)?;
    println!("worked example: E = {}, nodes = {}, a_0 = {:.12}", s.energy, s.node_count(), s.coeffs[0]);
    Ok(())
}
