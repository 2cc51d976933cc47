//! Parse a Laurent potential, print its canonical form and family.

use ncqes::{classify_family, format_potential, parse_potential};

fn main() -> ncqes::Result<()> {
    for text in ["r^2 + 2*r^-2 + 2*r^-4 + r^-6", "-3*r^-1 - r^-2 + r^-3 + r^-4", "r^2 + 0.5*r^-8"] {
        let p = parse_potential(text)?;
        println!("{text:32} -> {:32} {:?}", format_potential(&p), classify_family(&p));
    }
    match parse_potential("r^2 + * r") {
        Err(e) => println!("malformed input: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
