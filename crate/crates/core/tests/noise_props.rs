mod common;

use common::{rng, subspace_spec, subspace_state};
use proptest::prelude::*;
use rand::Rng;
use stabmetro::dense::{ghz, qfi, random, sum_x, DenseState, Mat2, C64};
use stabmetro::noise::{apply_dephasing_encoding, f_dap, f_dap_subspace, DephasingModel};
use stabmetro::PauliLetter;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn encoding_is_trace_and_positivity_preserving(n in 1usize..=6, seed in any::<u64>(), p in 0.0f64..=1.0, theta in -4.0f64..4.0) {
        let mut r = rng(seed);
        let rank = r.gen_range(1..=4);
        let rho = random::mixed_state(n, rank, &mut r);
        let out = apply_dephasing_encoding(&rho, &DephasingModel::new(n, p, theta).unwrap(), 10).unwrap();
        let m = out.density();
        prop_assert!((m.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(m.hermiticity_error() < 1e-10);
        let (vals, _) = m.eigh();
        prop_assert!(vals[0] > -1e-10, "eigenvalue {}", vals[0]);
        prop_assert!(DenseState::mixed(n, m).is_ok());
    }

    #[test]
    fn dephasing_commutes_with_the_rotation(n in 1usize..=5, seed in any::<u64>(), p in 0.0f64..=1.0, theta in -4.0f64..4.0) {
        let mut r = rng(seed);
        let rho = random::mixed_state(n, 2, &mut r).density();
        let x = Mat2::pauli(PauliLetter::X);
        let u = x.half_angle_unitary(theta);
        let dephase = |m: &mut stabmetro::dense::CMatrix, j: usize| {
            let mut f = m.clone();
            f.conjugate_local(j, &x);
            m.scale(C64::new(1.0 - p, 0.0));
            m.add_scaled(&f, C64::new(p, 0.0));
        };
        let (mut a, mut b) = (rho.clone(), rho);
        for j in 0..n {
            a.conjugate_local(j, &u);
            dephase(&mut a, j);
            dephase(&mut b, j);
            b.conjugate_local(j, &u);
        }
        prop_assert!(a.distance(&b) < 1e-12);
    }

    #[test]
    fn noiseless_value_is_the_qfi(n in 1usize..=5, seed in any::<u64>(), theta in -4.0f64..4.0, pure in any::<bool>()) {
        let mut r = rng(seed);
        let rho = if pure { random::pure_state(n, &mut r) } else { random::mixed_state(n, 3, &mut r) };
        let a = f_dap(&rho, 0.0, theta, 10).unwrap();
        let b = qfi(&rho, &sum_x(n)).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * b.max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn ghz_value_is_theta_independent(n in 1usize..=7, p in 0.0f64..0.5, t1 in -4.0f64..4.0, t2 in -4.0f64..4.0) {
        let a = f_dap(&ghz(n), p, t1, 10).unwrap();
        let b = f_dap(&ghz(n), p, t2, 10).unwrap();
        // Near p = 1/2 the value drops toward round-off, so allow an
        // absolute floor of 1e-13 beside the relative 1e-8.
        prop_assert!((a - b).abs() <= (1e-8 * a).max(1e-13), "{} vs {}", a, b);
    }

    #[test]
    fn subspace_states_stay_within_qfi_bounds(spec in subspace_spec(4, 7), seed in any::<u64>(), p in 0.0f64..=1.0, theta in -4.0f64..4.0) {
        let s = subspace_state(spec, seed);
        let n = s.spec().n();
        let reduced = f_dap_subspace(&s, p, theta).unwrap();
        let dense = f_dap(&s.to_dense(10).unwrap(), p, theta, 10).unwrap();
        prop_assert!(reduced >= -1e-12 && reduced <= (n * n) as f64 + 1e-9);
        prop_assert!((reduced - dense).abs() <= 1e-7 * dense.max(1.0), "reduced {} dense {}", reduced, dense);
    }
}
