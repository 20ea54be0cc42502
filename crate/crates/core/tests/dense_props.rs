mod common;

use common::{graph_and_alpha, rng};
use proptest::prelude::*;
use rand::Rng;
use stabmetro::dense::{cfi_local, model_qfi, qfi, random, DenseState, LocalModel, Mat2};
use stabmetro::qfi_formula::protocol1_model;
use stabmetro::VertexSet;

fn random_model(n: usize, seed: u64, mixed: bool) -> LocalModel {
    let mut r = rng(seed);
    let probe = if mixed {
        let rank = r.gen_range(1..=1usize << n);
        random::mixed_state(n, rank, &mut r)
    } else {
        random::pure_state(n, &mut r)
    };
    let mut terms = Vec::new();
    for k in 0..n {
        if r.gen_bool(0.8) {
            terms.push((k, random::hermitian2(&mut r)));
        }
    }
    let meas = (0..n).map(|_| random::hermitian2(&mut r)).collect();
    LocalModel::new(probe, terms, meas, r.gen_range(0.0..3.2)).unwrap()
}

fn conj(u: &Mat2, m: &Mat2) -> Mat2 {
    u.mul(m).mul(&u.adjoint())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_one_mixed_matches_pure(n in 1usize..6, seed in any::<u64>()) {
        let m = random_model(n, seed, false);
        let pure = qfi(&m.probe, &m.h_terms).unwrap();
        let mixed = qfi(&m.probe.to_mixed(), &m.h_terms).unwrap();
        prop_assert!((pure - mixed).abs() <= 1e-9 * pure.max(1.0), "{} vs {}", pure, mixed);
    }

    #[test]
    fn cfi_never_exceeds_qfi(n in 1usize..6, seed in any::<u64>(), mixed in any::<bool>()) {
        let m = random_model(n, seed, mixed);
        let q = model_qfi(&m).unwrap();
        let c = cfi_local(&m).unwrap();
        prop_assert!(c <= q + 1e-8, "CFI {} > QFI {}", c, q);
    }

    #[test]
    fn protocol_models_saturate_at_any_theta((g, mask) in graph_and_alpha(3, 7), theta in 0.0f64..6.3) {
        let m = protocol1_model(&g, &VertexSet::from_mask(g.n(), mask)).unwrap();
        let local = m.to_local_model(16, theta).unwrap();
        let q = model_qfi(&local).unwrap();
        let c = cfi_local(&local).unwrap();
        prop_assert!((q - c).abs() < 1e-7, "QFI {} CFI {}", q, c);
    }

    #[test]
    fn invariant_under_common_local_unitaries(n in 1usize..6, seed in any::<u64>(), mixed in any::<bool>()) {
        let m = random_model(n, seed, mixed);
        let mut r = rng(seed ^ 0x5eed);
        let us: Vec<Mat2> = (0..n).map(|_| random::unitary2(&mut r)).collect();
        let probe = m.probe.conjugated_by_local(&us.iter().cloned().map(Some).collect::<Vec<_>>());
        let terms = m.h_terms.iter().map(|(k, h)| (*k, conj(&us[*k], h))).collect();
        let meas = m.measurement.iter().enumerate().map(|(k, o)| conj(&us[k], o)).collect();
        let rotated = LocalModel::new(probe, terms, meas, m.theta).unwrap();
        let (q0, q1) = (model_qfi(&m).unwrap(), model_qfi(&rotated).unwrap());
        let (c0, c1) = (cfi_local(&m).unwrap(), cfi_local(&rotated).unwrap());
        prop_assert!((q0 - q1).abs() < 1e-8 * q0.max(1.0), "QFI {} vs {}", q0, q1);
        prop_assert!((c0 - c1).abs() < 1e-7 * c0.max(1.0), "CFI {} vs {}", c0, c1);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences(n in 1usize..5, seed in any::<u64>(), mixed in any::<bool>()) {
        let m = random_model(n, seed, mixed);
        let table = m.probability_table().unwrap();
        let fd = m.finite_difference_derivatives(1e-5).unwrap();
        let total: f64 = table.iter().map(|r| r.p).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for (row, d) in table.iter().zip(&fd) {
            prop_assert!((row.dp - d).abs() < 1e-6, "{} vs {}", row.dp, d);
        }
    }

    #[test]
    fn random_mixed_states_are_valid(n in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let rank = r.gen_range(1..=1usize << n);
        let rho = random::mixed_state(n, rank, &mut r).density();
        prop_assert!(DenseState::mixed(n, rho).is_ok());
    }
}
