//! Orthogonal polynomials from the recurrence and from the monodromy.
//!
//! Run with `cargo run --example orthogonal_polynomials`.

use std::error::Error;

use specband::polynomials::{poly_closed_form, poly_recurrence, rho_sequence};
use specband::{JacobiOperator, MonodromyData};

fn main() -> Result<(), Box<dyn Error>> {
    let op = JacobiOperator::new(vec![0.8, 1.3, 1.1], vec![0.4, -0.2, 0.0])?;
    let mono = MonodromyData::new(&op);
    let x = 0.35;
    let p = poly_recurrence(&op, x, 24);

    println!(" n   recurrence          closed form         difference");
    for n in (0..=24).step_by(3) {
        let c = poly_closed_form(&mono, x, n)?;
        println!("{n:2}   {:<19.12} {c:<19.12} {:.1e}", p[n], (p[n] - c).abs());
    }

    let rho = rho_sequence(mono.delta(x), 8);
    println!("\nρ_0..ρ_8 at Δ = {:.6}: {rho:.6?}", mono.delta(x));
    Ok(())
}
