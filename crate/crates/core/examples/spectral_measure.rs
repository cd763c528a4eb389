//! The spectral measure of δ_1: density, point masses and moments.
//!
//! Run with `cargo run --example spectral_measure`.

use std::error::Error;

use specband::measure::density;
use specband::{JacobiOperator, SpectralModel};

fn main() -> Result<(), Box<dyn Error>> {
    let op = JacobiOperator::new(vec![1.0, 2.0], vec![0.0, 0.0])?;
    let model = SpectralModel::new(&op)?;
    let mu = &model.measure;

    println!("continuous mass {:.12}", mu.continuous_mass());
    for m in mu.point_masses() {
        println!("point mass {:.12} at {:.6}", m.weight, m.value);
    }
    println!("total mass {:.12}", mu.total_mass());

    println!("\n   x      w(x)");
    for x in [-2.9, -2.0, -1.1, 1.1, 2.0, 2.9] {
        println!("{x:5.2}  {:.8}", density(&model.monodromy, &model.bands, x)?);
    }

    println!("\n k   ∫x^k dμ            (J^k)_11");
    for k in (0..=12).step_by(2) {
        println!("{k:2}   {:<18.10} {}", mu.moment(k), op.moment_exact(k));
    }
    println!("\nmax |∫p_n p_m dμ − δ_nm| for n, m ≤ 40: {:.2e}", mu.orthonormality_defect(40));
    Ok(())
}
