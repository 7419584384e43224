use chandet_core::measure::{group_settings, pauli_decompose};
use chandet_core::pptdetect::detect_npt;
use chandet_core::random::{random_channel, random_density};
use chandet_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn partial_transpose_is_an_involution(dims in dims_strategy(), sub in 0usize..3, seed: u64) {
        let sub = sub % dims.len();
        let rho = random_density(&dims, &mut ChaCha8Rng::seed_from_u64(seed));
        let twice = rho.partial_transpose(sub).unwrap().partial_transpose(sub).unwrap();
        prop_assert!(twice.max_abs_diff(&rho) < 1e-15);
        let pt = rho.partial_transpose(sub).unwrap();
        prop_assert!((pt.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn permutation_preserves_spectrum(dims in dims_strategy(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&dims, &mut rng);
        let perm: Vec<usize> = (0..dims.len()).rev().collect();
        let permuted = rho.permute_subsystems(&perm).unwrap();
        let a = hermitian_eig(&rho).unwrap().values;
        let b = hermitian_eig(&permuted).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn channel_choi_is_a_state(dims in dims_strategy().prop_filter("small", |d| d.iter().product::<usize>() <= 12),
                               n in 1usize..4, seed: u64) {
        let ch = random_channel(&dims, n, &mut ChaCha8Rng::seed_from_u64(seed));
        let c = ch.choi().matrix();
        prop_assert!((c.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(hermitian_eig(c).unwrap().min() > -1e-10);
        let class = classify(&ch);
        prop_assert!(class.cp && class.tp);
    }

    #[test]
    fn schmidt_coefficients_are_normalized_for_unitaries(d in 2usize..=3, seed: u64) {
        let u = haar_unitary(d * d, seed).with_dims(vec![d, d]).unwrap();
        let s = operator_schmidt(&u, d, d).unwrap();
        let total: f64 = s.sigmas.iter().map(|x| x * x).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(s.reconstruct().max_abs_diff(&u) < 1e-10);
    }

    #[test]
    fn settings_partition_random_qubit_witnesses(n in 1usize..=3, seed: u64) {
        let dims = vec![2; n];
        let w = random_density(&dims, &mut ChaCha8Rng::seed_from_u64(seed));
        let terms = pauli_decompose(&w).unwrap();
        let settings = group_settings(&terms);
        let mut covered = vec![0; terms.len()];
        for s in &settings {
            for &t in &s.covered_terms {
                prop_assert!(s.covers(&terms[t].string));
                covered[t] += 1;
            }
        }
        for (t, c) in terms.iter().zip(covered) {
            prop_assert_eq!(c, usize::from(!t.string.is_identity()));
        }
    }

    #[test]
    fn npt_two_term_form_agrees(seed: u64, n in 1usize..4) {
        let ch = random_channel(&[2, 2], n, &mut ChaCha8Rng::seed_from_u64(seed));
        let r = detect_npt(&ch).unwrap();
        prop_assert!((r.expectation - r.two_term_expectation).abs() < 1e-10);
    }
}
