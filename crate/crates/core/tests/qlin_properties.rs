mod common;

use collapse_core::qlin::{
    evolve, partial_trace, purity, tensor_product, tensor_states, ComplexMatrix, DensityMatrix,
    TensorSpace,
};
use collapse_core::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn space_strategy() -> impl Strategy<Value = TensorSpace> {
    prop::collection::vec(1usize..=3, 1..=3).prop_map(|d| TensorSpace::new(d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_preserves_trace(space in space_strategy(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let rho = common::random_density(&mut rng, space.clone());
        let n = space.num_subsystems();
        let keep: Vec<usize> = (0..n).filter(|_| rng.random::<bool>()).collect();
        let keep = if keep.is_empty() { vec![n - 1] } else { keep };
        let red = partial_trace(&rho, &keep).unwrap();
        prop_assert!((red.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert_eq!(red.space().dims().len(), keep.len());
    }

    #[test]
    fn partial_trace_inverts_tensor(
        a in space_strategy(), b in space_strategy(), seed in any::<u64>()
    ) {
        let mut rng = common::rng(seed);
        let rho = common::random_density(&mut rng, a.clone());
        let sigma = common::random_density(&mut rng, b);
        let joint = tensor_states(&rho, &sigma);
        let keep: Vec<usize> = (0..a.num_subsystems()).collect();
        let back = partial_trace(&joint, &keep).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-12);
    }

    #[test]
    fn evolve_preserves_spectrum_and_purity(space in space_strategy(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let rho = common::random_density(&mut rng, space.clone());
        let u = common::random_unitary(&mut rng, space);
        let out = evolve(&rho, &u).unwrap();
        for (x, y) in rho.eigenvalues().iter().zip(out.eigenvalues()) {
            prop_assert!((x - y).abs() <= 1e-8);
        }
        prop_assert!((purity(&rho) - purity(&out)).abs() <= 1e-10);
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(out.matrix().is_hermitian(1e-10));
    }

    #[test]
    fn tensor_product_associative_on_dyadic_entries(
        entries in prop::collection::vec((-8i32..8, -8i32..8), 12)
    ) {
        // dyadic rationals multiply exactly, so both groupings agree bit for bit
        let z: Vec<Complex64> = entries.iter().map(|&(r, i)| Complex64::new(r as f64 / 4.0, i as f64 / 4.0)).collect();
        let a = ComplexMatrix::new(2, 2, z[0..4].to_vec()).unwrap();
        let b = ComplexMatrix::new(1, 2, z[4..6].to_vec()).unwrap();
        let c = ComplexMatrix::new(2, 3, z[6..12].to_vec()).unwrap();
        let left = tensor_product(&tensor_product(&a, &b), &c);
        let right = tensor_product(&a, &tensor_product(&b, &c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn tensor_product_associative_on_random_entries(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let a = common::random_matrix(&mut rng, 2);
        let b = common::random_matrix(&mut rng, 3);
        let c = common::random_matrix(&mut rng, 2);
        let left = tensor_product(&tensor_product(&a, &b), &c);
        let right = tensor_product(&a, &tensor_product(&b, &c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-15);
    }

    #[test]
    fn matrix_json_round_trip(seed in any::<u64>(), n in 1usize..5) {
        let m = common::random_matrix(&mut common::rng(seed), n);
        let back: ComplexMatrix = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn validation_tolerance_on_trace() {
    let q = TensorSpace::single(2).unwrap();
    let off = |eps: f64| ComplexMatrix::from_real_diagonal(&[0.5 + eps, 0.5]);
    assert!(DensityMatrix::new(q.clone(), off(1e-6)).is_err());
    assert!(DensityMatrix::new(q, off(1e-12)).is_ok());
}

#[test]
fn random_density_matrices_pass_validation_at_full_size() {
    let mut rng = common::rng(99);
    for dims in [vec![4, 4, 4], vec![2, 2, 3], vec![16]] {
        let rho = common::random_density(&mut rng, TensorSpace::new(dims).unwrap());
        assert!(DensityMatrix::new(rho.space().clone(), rho.matrix().clone()).is_ok());
        assert!(rho.eigenvalues()[0] >= -1e-9);
    }
}
