use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specband::propagator::{evolve_oracle, project_continuous};
use specband::transfer::transfer_matrix;
use specband::{FiniteState, JacobiOperator, MonodromyData, SpectralModel};

fn operator() -> impl Strategy<Value = JacobiOperator> {
    (1usize..=4).prop_flat_map(|q| {
        (prop::collection::vec(0.5f64..1.5, q), prop::collection::vec(-1.0f64..1.0, q))
            .prop_map(|(a, b)| JacobiOperator::new(a, b).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transfer_matrices_are_unimodular(op in operator(), x in -4.0f64..4.0, n in 0usize..40) {
        let t = transfer_matrix(&op, n, x);
        prop_assert!((t.det() - 1.0).abs() <= 1e-9 * t.max_abs().powi(2).max(1.0));
    }

    #[test]
    fn truncations_are_symmetric_and_nested(op in operator(), n in 1usize..30, extra in 1usize..10, seed in any::<u64>()) {
        let small = op.truncate(n).to_dense();
        let big = op.truncate(n + extra).to_dense();
        prop_assert_eq!(&small, &big.view((0, 0), (n, n)).into_owned());
        prop_assert_eq!(&big, &big.transpose());
        // ⟨Jv, w⟩ = ⟨v, Jw⟩ on finitely supported vectors
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let jv = op.apply_real(&v);
        let jw = op.apply_real(&w);
        let lhs: f64 = jv.iter().zip(&w).map(|(a, b)| a * b).sum();
        let rhs: f64 = v.iter().zip(&jw).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn discriminant_matches_trace(op in operator(), x in -3.0f64..3.0) {
        let m = MonodromyData::new(&op);
        let t = transfer_matrix(&op, op.period(), x);
        prop_assert!((m.delta(x) - t.trace()).abs() <= 1e-9 * t.max_abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn oracle_is_additive_in_time(op in operator(), t1 in 0.5f64..8.0, t2 in 0.5f64..8.0, site in 1usize..4) {
        let m = SpectralModel::new(&op).unwrap();
        let u = FiniteState::delta(site);
        let pu = project_continuous(&m, &u);
        let n_max = pu.len() + (op.norm_bound() * (t1 + t2)).ceil() as usize + 64;
        let direct = evolve_oracle(&m, &u, t1 + t2, n_max).unwrap();
        let mid = evolve_oracle(&m, &u, t1, n_max).unwrap();
        let two_step = evolve_oracle(&m, &FiniteState::new(mid), t2, n_max).unwrap();
        let diff = direct.iter().zip(&two_step).map(|(a, b): (&Complex64, &Complex64)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-8, "diff {}", diff);
    }

    #[test]
    fn spectral_mass_is_one(op in operator()) {
        let m = SpectralModel::new(&op).unwrap();
        prop_assert!((m.measure.total_mass() - 1.0).abs() < 1e-10);
        for ev in &m.eigenvalues {
            prop_assert!(ev.weight > 0.0 && ev.weight < 1.0);
            prop_assert!(m.bands.band_of(ev.value).is_none());
        }
    }
}
