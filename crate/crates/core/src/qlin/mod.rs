//! Dense complex linear algebra on small multipartite Hilbert spaces.
//!
//! Subsystem 0 is always the leftmost Kronecker factor, so in a space with
//! dims `[d0, d1, ..]` the basis index is `i0 * (d1 * d2 ..) + i1 * (d2 ..) + ..`.

mod eigen;
mod matrix;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::hermitian_eigenvalues;
pub use matrix::ComplexMatrix;

/// Tolerance for algebraic identities (Hermiticity, trace, unitarity, norms).
pub const ALGEBRA_TOL: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-9;

/// Ordered list of subsystem dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TensorSpace {
    dims: Vec<usize>,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Domain("a tensor space needs at least one subsystem".into()));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Domain(format!("subsystem {i} has dimension 0")));
        }
        Ok(Self { dims })
    }

    /// Single-subsystem space.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &TensorSpace) -> TensorSpace {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        TensorSpace { dims }
    }

    /// Row-major strides of each subsystem.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }
}

impl TryFrom<Vec<usize>> for TensorSpace {
    type Error = Error;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        TensorSpace::new(dims)
    }
}

impl From<TensorSpace> for Vec<usize> {
    fn from(s: TensorSpace) -> Vec<usize> {
        s.dims
    }
}

/// Normalized state vector on a [`TensorSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: TensorSpace,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(space: TensorSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_vector(&space, &amplitudes)?;
        let norm_sq = norm_sq(&amplitudes);
        if (norm_sq - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm_sq} differs from 1"
            )));
        }
        Ok(Self { space, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm; fails on the zero vector.
    pub fn normalized(space: TensorSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_vector(&space, &amplitudes)?;
        let norm = norm_sq(&amplitudes).sqrt();
        if norm <= 1e-300 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector cannot be normalized".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { space, amplitudes })
    }

    pub fn basis(space: TensorSpace, index: usize) -> Result<Self> {
        let dim = space.dim();
        if index >= dim {
            return Err(Error::IndexOutOfRange { what: "basis state", index, len: dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch("inner product of unequal dimensions".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        PureState { space: self.space.concat(&other.space), amplitudes }
    }

    /// `|psi><psi|`
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn check_vector(space: &TensorSpace, v: &[Complex64]) -> Result<()> {
    if v.len() != space.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for a space of dimension {}",
            v.len(),
            space.dim()
        )));
    }
    if v.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::InvalidState("non-finite amplitude".into()));
    }
    Ok(())
}

/// Hermitian, unit-trace, positive semidefinite operator on a [`TensorSpace`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    space: TensorSpace,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(space: TensorSpace, matrix: ComplexMatrix) -> Result<Self> {
        check_operator_shape(&space, &matrix)?;
        let defect = matrix.hermitian_defect();
        if defect > ALGEBRA_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > ALGEBRA_TOL || tr.im.abs() > ALGEBRA_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lowest = hermitian_eigenvalues(&matrix)[0];
        if lowest < PSD_FLOOR {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (eigenvalue {lowest:e})"
            )));
        }
        Ok(Self { space, matrix })
    }

    /// For results of operations that preserve validity by construction.
    pub(crate) fn from_parts(space: TensorSpace, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(space.dim(), matrix.rows());
        Self { space, matrix }
    }

    pub fn maximally_mixed(space: TensorSpace) -> Self {
        let d = space.dim();
        let matrix = ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
        Self { space, matrix }
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Real part of the diagonal: the distribution over basis states.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }
}

/// Square operator satisfying `U^dagger U = I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitaryOperator {
    space: TensorSpace,
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(space: TensorSpace, matrix: ComplexMatrix) -> Result<Self> {
        check_operator_shape(&space, &matrix)?;
        if !matrix.is_unitary(ALGEBRA_TOL) {
            return Err(Error::InvalidOperator("matrix is not unitary".into()));
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: TensorSpace) -> Self {
        let matrix = ComplexMatrix::identity(space.dim());
        Self { space, matrix }
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `self` acting on the left factor, `other` on the right.
    pub fn tensor(&self, other: &UnitaryOperator) -> UnitaryOperator {
        UnitaryOperator {
            space: self.space.concat(&other.space),
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryOperator) -> Result<UnitaryOperator> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch("composing unitaries on different spaces".into()));
        }
        Ok(UnitaryOperator {
            space: self.space.clone(),
            matrix: self.matrix.mul_unchecked(&other.matrix),
        })
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if self.space != psi.space {
            return Err(Error::DimensionMismatch("unitary and state live on different spaces".into()));
        }
        Ok(PureState { space: psi.space.clone(), amplitudes: self.matrix.apply(&psi.amplitudes)? })
    }
}

fn check_operator_shape(space: &TensorSpace, m: &ComplexMatrix) -> Result<()> {
    let d = space.dim();
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on a space of dimension {d}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Kronecker product with `a` as the slow (leftmost) factor.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// `rho (x) sigma` with concatenated subsystem dims.
pub fn tensor_states(rho: &DensityMatrix, sigma: &DensityMatrix) -> DensityMatrix {
    DensityMatrix {
        space: rho.space.concat(&sigma.space),
        matrix: rho.matrix.kron(&sigma.matrix),
    }
}

/// Reduced state on the subsystems in `keep` (order of the original space
/// is kept regardless of the order of `keep`).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (space, matrix) = partial_trace_matrix(&rho.space, &rho.matrix, keep)?;
    Ok(DensityMatrix { space, matrix })
}

/// Partial trace of an arbitrary operator on `space`.
pub fn partial_trace_matrix(
    space: &TensorSpace,
    m: &ComplexMatrix,
    keep: &[usize],
) -> Result<(TensorSpace, ComplexMatrix)> {
    check_operator_shape(space, m)?;
    let n = space.num_subsystems();
    if keep.is_empty() {
        return Err(Error::Domain("partial trace must keep at least one subsystem".into()));
    }
    if let Some(&index) = keep.iter().find(|&&i| i >= n) {
        return Err(Error::SubsystemOutOfRange { index, count: n });
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();

    let strides = space.strides();
    let offsets = |subsystems: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &s in subsystems {
            let mut next = Vec::with_capacity(offs.len() * space.dims[s]);
            for &o in &offs {
                for v in 0..space.dims[s] {
                    next.push(o + v * strides[s]);
                }
            }
            offs = next;
        }
        offs
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);

    let dk = kept_off.len();
    let full = space.dim();
    let mut data = vec![Complex64::new(0.0, 0.0); dk * dk];
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            data[r * dk + c] = traced_off
                .iter()
                .map(|&t| m.entries()[(ro + t) * full + co + t])
                .sum();
        }
    }
    let new_space = TensorSpace { dims: kept.iter().map(|&i| space.dims[i]).collect() };
    Ok((new_space, ComplexMatrix::from_parts(dk, dk, data)))
}

/// `U rho U^dagger`
pub fn evolve(rho: &DensityMatrix, u: &UnitaryOperator) -> Result<DensityMatrix> {
    if rho.space != u.space {
        return Err(Error::DimensionMismatch(format!(
            "state on {:?} evolved by unitary on {:?}",
            rho.space.dims, u.space.dims
        )));
    }
    let matrix = u.matrix.mul_unchecked(&rho.matrix).mul_unchecked(&u.matrix.adjoint());
    Ok(DensityMatrix { space: rho.space.clone(), matrix })
}

/// `trace(rho A)` for a Hermitian observable `A`.
pub fn expectation(rho: &DensityMatrix, obs: &ComplexMatrix) -> Result<f64> {
    let d = rho.dim();
    if obs.rows() != d || obs.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} observable against a state of dimension {d}",
            obs.rows(),
            obs.cols()
        )));
    }
    let defect = obs.hermitian_defect();
    if defect > ALGEBRA_TOL {
        return Err(Error::InvalidOperator(format!("observable not Hermitian (defect {defect:e})")));
    }
    let value: Complex64 = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| rho.matrix.get(i, j) * obs.get(j, i))
        .sum();
    if value.im.abs() > ALGEBRA_TOL {
        return Err(Error::Internal(format!("expectation has imaginary part {:e}", value.im)));
    }
    Ok(value.re)
}

/// `trace(rho^2)`
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.entries().iter().map(|z| z.norm_sqr()).sum()
}
