//! Exact levels of the inverse-power family, including both one-node branches.

use ncqes::qes_inverse::{inverse_gauge, one_node_branches, solve_inverse};
use ncqes::qes_even::DEFAULT_B_TOLERANCE;
use ncqes::{parse_potential, DeformationContext};

fn main() -> ncqes::Result<()> {
    let p = parse_potential("-3*r^-1 - r^-2 + r^-3 + r^-4")?;
    let ctx = DeformationContext::commutative(0);
    let s = solve_inverse(&p, &ctx, 0, DEFAULT_B_TOLERANCE)?;
    println!("ground state: E = {}, gauge = {:?}", s.energy, s.gauge);
    let g = inverse_gauge(&p, 1)?;
    for branch in one_node_branches(&g, 0) {
        println!(
            "one-node branch: Q2 = {:.12}, sigma = {:.12}, b = {:.12}, physical = {}",
            branch.q2, branch.sigma, branch.required_b, branch.physical
        );
    }
    Ok(())
}
