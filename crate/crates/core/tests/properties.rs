mod common;

use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use qdb_core::measurement::{measure_probability, D_ALONE_UNCERTAIN_WEIGHT};
use qdb_core::model::block_action_probabilities;
use qdb_core::{
    action_probabilities, build_block_hamiltonian, build_full_hamiltonian, cd_measurement_operator,
    closed_form_conditional, condition_on_category, d_alone_measurement_operator, evolve,
    initial_state_from_priors, matrix_exponential_unitary, pignistic_transform, qdb_conditional,
    reported_conditional_attack, transition_matrix, BlockState, Category, HamiltonianParams,
    MassFunction, StateVector,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn h_value() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn unit_block() -> impl Strategy<Value = BlockState> {
    prop::array::uniform6(-1.0..1.0f64)
        .prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let z = |re: f64, im: f64| qdb_core::Complex::new(re / norm, im / norm);
            BlockState::new([z(v[0], v[1]), z(v[2], v[3]), z(v[4], v[5])]).unwrap()
        })
}

proptest! {
    #[test]
    fn evolution_composes(h in h_value(), t1 in -4.0..4.0f64, t2 in -4.0..4.0f64) {
        let hm = build_block_hamiltonian(h);
        let a = matrix_exponential_unitary(&hm, t1).unwrap();
        let b = matrix_exponential_unitary(&hm, t2).unwrap();
        let ab = matrix_exponential_unitary(&hm, t1 + t2).unwrap();
        let product = a.matrix().matmul(b.matrix()).unwrap();
        prop_assert!(product.max_abs_diff(ab.matrix()) < 1e-11);
    }

    #[test]
    fn evolution_preserves_norm(state in unit_block(), h in h_value(), t in -10.0..10.0f64) {
        let evolved = evolve(&state, &build_block_hamiltonian(h), t).unwrap();
        prop_assert!((evolved.norm_squared() - 1.0).abs() < 1e-12);
        prop_assert!((action_probabilities(&evolved).sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transition_matrix_is_doubly_stochastic(h in h_value(), t in -10.0..10.0f64) {
        let p = transition_matrix(&matrix_exponential_unitary(&build_block_hamiltonian(h), t).unwrap());
        for s in p.row_sums().into_iter().chain(p.col_sums()) {
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn blocks_evolve_independently(p_g in 0.01..0.99f64, h_g in h_value(), h_b in h_value()) {
        let params = HamiltonianParams::at_default_time(h_g, h_b).unwrap();
        let state = initial_state_from_priors(p_g, 1.0 - p_g).unwrap();
        let evolved = evolve(&state, &build_full_hamiltonian(&params), params.t).unwrap();
        let weights = qdb_core::block_weights(&evolved);
        prop_assert!((weights.0 - p_g).abs() < 1e-12);
        for category in [Category::Good, Category::Bad] {
            let whole = condition_on_category(&evolved, category).unwrap();
            let alone = evolve(
                &condition_on_category(&state, category).unwrap(),
                &build_block_hamiltonian(params.h(category)),
                params.t,
            )
            .unwrap();
            for (x, y) in whole.amplitudes().iter().zip(alone.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn uncertain_share_is_a_third(h in h_value(), t in -10.0..10.0f64) {
        prop_assert!((block_action_probabilities(h, t).uncertain - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn conditionals_ignore_priors(p1 in 0.01..0.99f64, p2 in 0.01..0.99f64, h_g in h_value(), h_b in h_value()) {
        let params = HamiltonianParams::at_default_time(h_g, h_b).unwrap();
        let a = qdb_core::predict(p1, 1.0 - p1, &params).unwrap();
        let b = qdb_core::predict(p2, 1.0 - p2, &params).unwrap();
        prop_assert!((a.p_attack_given_good - b.p_attack_given_good).abs() < 1e-14);
        prop_assert!((a.p_attack_given_bad - b.p_attack_given_bad).abs() < 1e-14);
    }

    #[test]
    fn conditional_grows_with_weight(h in h_value(), w1 in 0.0..1.0f64, w2 in 0.0..1.0f64) {
        let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
        prop_assert!(qdb_conditional(h, FRAC_PI_2, lo) <= qdb_conditional(h, FRAC_PI_2, hi) + 1e-15);
        prop_assert!((closed_form_conditional(h, hi) - closed_form_conditional(h, lo) - (hi - lo) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn operators_match_reported_weights(state in unit_block()) {
        let probs = action_probabilities(&state);
        let cd = measure_probability(&state, &cd_measurement_operator()).unwrap();
        let d = measure_probability(&state, &d_alone_measurement_operator()).unwrap();
        prop_assert!((cd - reported_conditional_attack(&probs, 0.25)).abs() < 1e-12);
        prop_assert!((d - reported_conditional_attack(&probs, D_ALONE_UNCERTAIN_WEIGHT)).abs() < 1e-12);
    }

    #[test]
    fn pignistic_is_identity_on_singletons(raw in prop::collection::vec(0.01..1.0f64, 1..6)) {
        let total: f64 = raw.iter().sum();
        let labels: Vec<String> = (0..raw.len()).map(|i| format!("x{i}")).collect();
        let focal = labels.iter().zip(&raw).map(|(l, m)| (vec![l.clone()], m / total));
        let mass = MassFunction::new(focal, &[]).unwrap();
        let bet = pignistic_transform(&mass);
        for (l, m) in labels.iter().zip(&raw) {
            prop_assert!((bet[l] - m / total).abs() < 1e-15);
        }
    }

    #[test]
    fn expm_matches_series_oracle(seed in any::<u64>(), t in -2.0..2.0f64) {
        let mut rng = StdRng::seed_from_u64(seed);
        let h = common::random_hermitian(&mut rng, 3, 3.0);
        let u = matrix_exponential_unitary(&h, t).unwrap();
        prop_assert!(u.matrix().max_abs_diff(&common::series_exp(&h, t)) < 1e-10);
    }
}
