mod common;

use collapse_core::measurement::{
    born_distribution, dephasing_channel, ideal_measurement_unitary, spin_projectors,
};
use collapse_core::qlin::{evolve, partial_trace, tensor_states, ComplexMatrix, PureState, TensorSpace};
use collapse_core::{Angle, Complex64};
use proptest::prelude::*;

fn pointer_reset(dim: usize) -> collapse_core::qlin::DensityMatrix {
    PureState::basis(TensorSpace::single(dim).unwrap(), 0).unwrap().density()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn born_probabilities_form_a_distribution(dim in 1usize..=5, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let space = TensorSpace::single(dim).unwrap();
        let rho = common::random_density(&mut rng, space.clone());
        let m = common::random_projectors(&mut rng, space);
        let out = born_distribution(&rho, &m).unwrap();
        prop_assert_eq!(out.len(), m.len());
        let total: f64 = out.iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        for o in &out {
            prop_assert!(o.probability >= -1e-12);
            prop_assert_eq!(o.conditional_state.is_some(), o.probability > 1e-12);
        }
    }

    #[test]
    fn measurement_never_purifies(dim in 1usize..=5, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let space = TensorSpace::single(dim).unwrap();
        let rho = common::random_density(&mut rng, space.clone());
        let m = common::random_projectors(&mut rng, space);
        let out = dephasing_channel(&rho, &m).unwrap();
        prop_assert!(out.purity() <= rho.purity() + 1e-10);
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(out.eigenvalues()[0] >= -1e-9);
    }

    #[test]
    fn dephasing_zeroes_cross_blocks(dim in 2usize..=5, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let space = TensorSpace::single(dim).unwrap();
        let rho = common::random_density(&mut rng, space.clone());
        let m = common::random_projectors(&mut rng, space);
        let out = dephasing_channel(&rho, &m).unwrap();
        for (i, (_, p)) in m.iter().enumerate() {
            // diagonal blocks untouched
            let block_in = p.matmul(rho.matrix()).unwrap().matmul(p).unwrap();
            let block_out = p.matmul(out.matrix()).unwrap().matmul(p).unwrap();
            prop_assert!(block_in.max_abs_diff(&block_out) <= 1e-12);
            for (_, q) in m.iter().skip(i + 1) {
                let cross = p.matmul(out.matrix()).unwrap().matmul(q).unwrap();
                prop_assert!(cross.max_abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn collapse_is_repeatable(dim in 1usize..=5, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let space = TensorSpace::single(dim).unwrap();
        let rho = common::random_density(&mut rng, space.clone());
        let m = common::random_projectors(&mut rng, space);
        for (a, o) in born_distribution(&rho, &m).unwrap().iter().enumerate() {
            if let Some(post) = &o.conditional_state {
                let again = born_distribution(post, &m).unwrap();
                prop_assert!((again[a].probability - 1.0).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn pointer_trace_out_equals_channel(dim in 2usize..=3, extra in 0usize..=2, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let space = TensorSpace::single(dim).unwrap();
        let rho = common::random_density(&mut rng, space.clone());
        let m = common::random_projectors(&mut rng, space);
        let pointer_dim = m.len() + extra;
        let u = ideal_measurement_unitary(&m, pointer_dim).unwrap();
        let joint = evolve(&tensor_states(&rho, &pointer_reset(pointer_dim)), &u).unwrap();
        let reduced = partial_trace(&joint, &[0]).unwrap();
        let channel = dephasing_channel(&rho, &m).unwrap();
        prop_assert!(reduced.matrix().max_abs_diff(channel.matrix()) <= 1e-10);
    }

    #[test]
    fn spin_projectors_complete(theta in -720.0f64..720.0) {
        let m = spin_projectors(Angle::from_degrees(theta));
        let sum = m.projector(0).unwrap().add(m.projector(1).unwrap()).unwrap();
        prop_assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-15);
    }
}

/// The joint state before the trace is sum_{a,b} P_a rho P_b (x) |a><b|.
#[test]
fn correlated_joint_state_structure() {
    let mut rng = common::rng(5);
    let space = TensorSpace::single(3).unwrap();
    let rho = common::random_density(&mut rng, space.clone());
    let m = common::random_projectors(&mut rng, space);
    let k = m.len();
    let u = ideal_measurement_unitary(&m, k).unwrap();
    let joint = evolve(&tensor_states(&rho, &pointer_reset(k)), &u).unwrap();

    let mut expected = ComplexMatrix::zeros(3 * k, 3 * k);
    for (a, (_, pa)) in m.iter().enumerate() {
        for (b, (_, pb)) in m.iter().enumerate() {
            let mut ket_bra = vec![Complex64::new(0.0, 0.0); k * k];
            ket_bra[a * k + b] = Complex64::new(1.0, 0.0);
            let ket_bra = ComplexMatrix::new(k, k, ket_bra).unwrap();
            let term = pa.matmul(rho.matrix()).unwrap().matmul(pb).unwrap().kron(&ket_bra);
            expected = expected.add(&term).unwrap();
        }
    }
    assert!(joint.matrix().max_abs_diff(&expected) < 1e-12);
}
