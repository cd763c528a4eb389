//! Fitted decay exponents of δ_1 against the predicted ones.
//!
//! Run with `cargo run --release --example decay_rates [t_max] [count]`.
//! The default grid is short; `2000 24` reproduces the full experiment.

use std::error::Error;

use specband::decay::{decay_experiment, envelope, geometric_grid, DecayOptions, NormKind};
use specband::{FiniteState, JacobiOperator, SpectralModel};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let t_max: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(400.0);
    let count: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(16);
    let times = geometric_grid(20.0, t_max, count)?;

    for (name, op) in
        [("Laplacian", JacobiOperator::laplacian()), ("SSH", JacobiOperator::new(vec![1.0, 2.0], vec![0.0, 0.0])?)]
    {
        let model = SpectralModel::new(&op)?;
        let e = decay_experiment(&model, &FiniteState::delta(1), &times, &NormKind::ALL, DecayOptions::default())?;
        println!("{name}, t in [20, {t_max}], {count} points");
        print!("{}", e.table());
        let sup = e.fit(NormKind::Sup).expect("sup fitted");
        let env = envelope(&sup.times, &sup.norms, -1.0 / 3.0);
        println!("max of sup·t^(1/3): {:.4}\n", env.last().copied().unwrap_or(0.0));
    }
    Ok(())
}
