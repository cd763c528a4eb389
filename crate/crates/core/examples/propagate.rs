//! Evolve δ_1 with both propagators and compare.
//!
//! Run with `cargo run --release --example propagate [t]`.

use std::error::Error;

use specband::decay::default_n_max;
use specband::propagator::{bound_state_overlap, Method, Propagator};
use specband::validate::max_difference;
use specband::{FiniteState, JacobiOperator, SpectralModel};

fn main() -> Result<(), Box<dyn Error>> {
    let t: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(50.0);
    let model = SpectralModel::new(&JacobiOperator::new(vec![1.0, 2.0], vec![0.0, 0.0])?)?;
    let u = FiniteState::delta(1);
    let n_max = default_n_max(&model, &u, t);
    let p = Propagator::new(&model);

    let s = p.at(Method::Spectral, &u, t, n_max)?;
    let o = p.at(Method::Oracle, &u, t, n_max)?;
    println!("t = {t}, sites 1..={n_max}");
    println!("max |spectral − oracle| = {:.2e}", max_difference(&s, &o));

    let l2: f64 = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    println!("‖ψ(t)‖ = {l2:.12} (‖P_c δ_1‖ = √(1/4) = 0.5)");
    for ev in &model.eigenvalues {
        let c = bound_state_overlap(&model, ev.value, ev.weight, &s);
        println!("overlap with the bound state at {:.3}: {:.2e}", ev.value, c.norm());
    }

    let (peak, at) =
        s.iter().enumerate().map(|(i, z)| (z.norm(), i + 1)).fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    println!("largest amplitude {peak:.6} at site {at}");
    for n in [1, 2, 3, 10, at] {
        println!("ψ_{n}({t}) = {:.6}", s[n - 1]);
    }
    Ok(())
}
