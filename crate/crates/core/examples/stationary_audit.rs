//! Zeros of k'' and k''' on every band and the decay exponents they predict.
//!
//! Run with `cargo run --example stationary_audit`.

use std::error::Error;

use specband::{JacobiOperator, SpectralModel};

fn main() -> Result<(), Box<dyn Error>> {
    let operators = [
        ("Laplacian", JacobiOperator::laplacian()),
        ("SSH", JacobiOperator::new(vec![1.0, 2.0], vec![0.0, 0.0])?),
        ("period 3", JacobiOperator::new(vec![0.9, 1.3, 1.1], vec![0.2, -0.4, 0.1])?),
    ];
    for (name, op) in &operators {
        let model = SpectralModel::new(op)?;
        let report = model.audit();
        println!("{name} ({:?}):", report.global_class);
        for b in &report.bands {
            println!(
                "  band {}: T2 = {:.6?}, T3 = {:.6?}, min |k'''| on T2 = {:?}",
                b.index, b.t2, b.t3, b.min_abs_k3_on_t2
            );
        }
        println!(
            "  predicted exponents: local {}, global {:?}, c_est {:?}",
            report.predicted_local_exponent, report.predicted_global_exponent, report.c_est
        );

        let k = model.phase(1)?;
        let phi = -1.0;
        let d = k.derivatives(phi)?;
        println!("  band 1 at φ = {phi}: k = {:.6}, k' = {:.6}, k'' = {:.6}, k''' = {:.6}", d.k, d.d1, d.d2, d.d3);
    }
    Ok(())
}
