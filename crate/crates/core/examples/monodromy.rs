//! Transfer matrices, the discriminant and powers of the monodromy.
//!
//! Run with `cargo run --example monodromy`.

use std::error::Error;

use specband::{JacobiOperator, MonodromyData};

fn main() -> Result<(), Box<dyn Error>> {
    let op = JacobiOperator::new(vec![1.0, 2.0, 0.7], vec![0.3, -0.5, 0.1])?;
    let mono = MonodromyData::new(&op);
    println!("period q = {}, norm bound = {:.3}", op.period(), op.norm_bound());

    for x in [-1.0, 0.2, 1.5] {
        let t = mono.matrix(x);
        println!(
            "x = {x:5.2}: Δ = {:9.5}, det T = {:.12}, T = [[{:.4}, {:.4}], [{:.4}, {:.4}]]",
            mono.delta(x),
            t.det(),
            t.m11,
            t.m12,
            t.m21,
            t.m22
        );
    }

    // T^s from the ρ recurrence against repeated multiplication
    let x = 0.2;
    let t = mono.matrix(x);
    let mut power = t;
    for s in 2..=6 {
        power = power * t;
        let closed = mono.power_via_rho(s, x)?;
        println!("s = {s}: max |T^s − ρ formula| = {:.2e}", (power - closed).max_abs());
    }

    let d = mono.delta_derivatives(x, 3);
    println!("Δ, Δ', Δ'', Δ''' at {x}: {d:.5?}");
    Ok(())
}
