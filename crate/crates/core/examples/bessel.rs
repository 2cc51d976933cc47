//! Modified Bessel functions of the second kind and the power-exponential
//! integral they close, checked against direct quadrature.

use ncqes::quad::integrate_half_line;
use ncqes::specfun::{bessel_k, power_exp_integral, DEFAULT_TOL};

fn main() -> ncqes::Result<()> {
    for (nu, x) in [(0.0, 1.0), (0.5, 2.0), (2.5, 0.3), (7.25, 4.0)] {
        let k = bessel_k(nu, x, DEFAULT_TOL)?;
        println!("K_{nu}({x}) = {:.15e} via {:?}", k.value, k.method);
    }
    let (v, l1, l2) = (1.7, 0.8, 2.3);
    let closed = power_exp_integral(v, l1, l2)?;
    let quad = integrate_half_line(|r| r.powf(v - 1.0) * (-(l2 / r + l1 * r)).exp())?;
    println!("power-exp integral: closed {closed:.15e}, quadrature {:.15e}", quad.value);
    Ok(())
}
