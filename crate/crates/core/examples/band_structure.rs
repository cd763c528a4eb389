//! Bands, gaps and eigenvalues of a few reference operators.
//!
//! Run with `cargo run --example band_structure [a1,a2,..] [b1,b2,..]`.

use std::error::Error;

use specband::{JacobiOperator, SpectralModel};

fn parse(list: &str) -> Result<Vec<f64>, Box<dyn Error>> {
    Ok(list.split(',').map(|v| v.trim().parse()).collect::<Result<_, _>>()?)
}

fn describe(name: &str, op: &JacobiOperator) -> Result<(), Box<dyn Error>> {
    let model = SpectralModel::new(op)?;
    println!("{name}: a = {:?}, b = {:?}", op.hopping(), op.diagonal());
    for band in &model.bands.bands {
        println!(
            "  band {}: [{:.6}, {:.6}]  Δ {}  gapped ends ({}, {})",
            band.index,
            band.lo,
            band.hi,
            if band.increasing { "increasing" } else { "decreasing" },
            band.lo_gapped,
            band.hi_gapped
        );
    }
    for (i, kappa) in model.bands.critical_points.iter().enumerate() {
        println!("  critical point κ_{} = {kappa:.6}", i + 1);
    }
    for ev in &model.eigenvalues {
        println!("  eigenvalue {:.8} in gap {} with mass {:.8}", ev.value, ev.gap, ev.weight);
    }
    if model.eigenvalues.is_empty() {
        println!("  no eigenvalues");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [a, b] = &args[..] {
        return describe("custom", &JacobiOperator::new(parse(a)?, parse(b)?)?);
    }
    describe("free Laplacian", &JacobiOperator::laplacian())?;
    describe("SSH", &JacobiOperator::new(vec![1.0, 2.0], vec![0.0, 0.0])?)?;
    describe("SSH, bonds swapped", &JacobiOperator::new(vec![2.0, 1.0], vec![0.0, 0.0])?)?;
    // Δ(x) − 2 has a double root at x = 4, so bands 2 and 3 touch
    describe("closed gap", &JacobiOperator::new(vec![6.0, 9.0, 6.0], vec![0.0, -5.0, -5.0])?)?;
    Ok(())
}
