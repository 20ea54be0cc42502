mod common;

use common::{subspace_spec, subspace_state};
use proptest::prelude::*;
use stabmetro::dense::{apply_hamiltonian, qfi, sum_x, C64};
use stabmetro::protocol2::{
    basis_vector, extremal_qfi, membership_check, qfi_subspace, subspace_generators, SubspaceState,
};

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn joint_eigenspace_has_dimension_two_to_the_m(spec in subspace_spec(4, 8)) {
        let gens = subspace_generators(&spec);
        prop_assert_eq!(gens.len(), spec.n() - spec.m());
        let d = 1usize << spec.n();
        let mut trace = 0.0;
        for b in 0..d {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[b] = C64::new(1.0, 0.0);
            for g in &gens {
                let gv = g.apply_to_vector(&v);
                for (x, y) in v.iter_mut().zip(gv) {
                    *x = (*x + y) * 0.5;
                }
            }
            trace += v[b].re;
        }
        prop_assert!((trace - spec.dim() as f64).abs() < 1e-9, "trace {}", trace);
        for l in 0..spec.dim() {
            let v = basis_vector(&spec, l);
            for g in &gens {
                let gv = g.apply_to_vector(&v);
                let dev: f64 = gv.iter().zip(&v).map(|(a, b)| (a - b).norm_sqr()).sum();
                prop_assert!(dev < 1e-20);
            }
        }
    }

    #[test]
    fn formula_matches_oracle_with_coherences(spec in subspace_spec(4, 9), seed in any::<u64>()) {
        let s = subspace_state(spec, seed);
        let n = s.spec().n();
        let o = qfi(&s.to_dense(10).unwrap(), &sum_x(n)).unwrap();
        let f = qfi_subspace(&s);
        prop_assert!((o - f).abs() <= 1e-8 * f.max(1.0), "oracle {} formula {}", o, f);
        prop_assert!(membership_check(&s.to_dense(10).unwrap(), s.spec()).unwrap());
    }

    #[test]
    fn qfi_lies_between_the_extremes(spec in subspace_spec(4, 16), seed in any::<u64>()) {
        let s = subspace_state(spec.clone(), seed);
        let ex = extremal_qfi(&spec);
        let n2 = (spec.n() * spec.n()) as f64;
        let f = qfi_subspace(&s);
        prop_assert!(f >= n2 * ex.r_min - 1e-9 && f <= n2 + 1e-9);
        prop_assert!((ex.max - n2).abs() < 1e-9);
        let attained: Vec<f64> = (0..spec.dim())
            .map(|l| qfi_subspace(&SubspaceState::basis(spec.clone(), l).unwrap()))
            .collect();
        prop_assert!(attained.iter().any(|&v| (v - n2).abs() < 1e-9));
        prop_assert!(attained.iter().any(|&v| (v - n2 * ex.r_min).abs() < 1e-9));
    }

    #[test]
    fn generator_maps_subspace_to_its_complement(spec in subspace_spec(4, 9)) {
        let h = sum_x(spec.n());
        let basis: Vec<Vec<C64>> = (0..spec.dim()).map(|l| basis_vector(&spec, l)).collect();
        for a in &basis {
            let ha = apply_hamiltonian(a, &h);
            for b in &basis {
                prop_assert!(inner(b, &ha).norm() < 1e-10);
            }
            prop_assert!((inner(a, a).re - 1.0).abs() < 1e-10);
        }
    }
}
