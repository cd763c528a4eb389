#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specband::{JacobiOperator, SpectralModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a_n ∈ [0.5, 1.5]`, `b_n ∈ [−1, 1]`, redrawn until the minimal period is `q`.
pub fn random_operator(rng: &mut impl Rng, q: usize) -> JacobiOperator {
    loop {
        let a = (0..q).map(|_| rng.random_range(0.5..=1.5)).collect();
        let b = (0..q).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let op = JacobiOperator::new(a, b).expect("valid coefficients");
        if op.period() == q {
            return op;
        }
    }
}

/// First random operator of period `q` whose gaps are all open.
pub fn random_gapped(rng: &mut impl Rng, q: usize) -> SpectralModel {
    loop {
        let model = SpectralModel::new(&random_operator(rng, q)).expect("spectral model");
        if model.bands.all_gapped() {
            return model;
        }
    }
}

pub fn ssh() -> JacobiOperator {
    JacobiOperator::new(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap()
}
