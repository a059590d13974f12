#![allow(dead_code)]

use collapse_core::measurement::{Label, ProjectorSet};
use collapse_core::qlin::{ComplexMatrix, DensityMatrix, TensorSpace, UnitaryOperator};
use collapse_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(n, n, (0..n * n).map(|_| random_complex(rng)).collect()).unwrap()
}

/// `G G^dagger / trace`, optionally of reduced rank.
pub fn random_density(rng: &mut impl Rng, space: TensorSpace) -> DensityMatrix {
    let n = space.dim();
    let rank = rng.random_range(1..=n);
    let g = ComplexMatrix::new(n, rank, (0..n * rank).map(|_| random_complex(rng)).collect()).unwrap();
    let m = g.matmul(&g.adjoint()).unwrap();
    let tr = m.trace().re;
    DensityMatrix::new(space, m.scale(Complex64::new(1.0 / tr, 0.0))).unwrap()
}

/// Orthonormal columns by modified Gram-Schmidt, returned as vectors.
pub fn random_basis(rng: &mut impl Rng, n: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| random_complex(rng)).collect();
        for b in &basis {
            let overlap: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= overlap * bi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    basis
}

pub fn random_unitary(rng: &mut impl Rng, space: TensorSpace) -> UnitaryOperator {
    let n = space.dim();
    let cols = random_basis(rng, n);
    let data = (0..n).flat_map(|r| cols.iter().map(move |c| c[r])).collect();
    UnitaryOperator::new(space, ComplexMatrix::new(n, n, data).unwrap()).unwrap()
}

/// Random complete projector family: a random basis split into random groups.
pub fn random_projectors(rng: &mut impl Rng, space: TensorSpace) -> ProjectorSet {
    let n = space.dim();
    let basis = random_basis(rng, n);
    let groups = rng.random_range(1..=n);
    let mut parts = vec![ComplexMatrix::zeros(n, n); groups];
    for (i, v) in basis.iter().enumerate() {
        // every group gets at least one vector
        let g = if i < groups { i } else { rng.random_range(0..groups) };
        parts[g] = parts[g].add(&ComplexMatrix::outer(v, v)).unwrap();
    }
    let projectors = parts.into_iter().enumerate().map(|(i, p)| (Label::Value(i as f64), p)).collect();
    ProjectorSet::new(space, projectors).unwrap()
}
