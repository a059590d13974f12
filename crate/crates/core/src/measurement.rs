//! Projective measurement: Born probabilities, conditioning on an outcome,
//! the dephasing channel `rho -> sum_a P_a rho P_a`, and the ideal
//! measurement unitary `sum_a P_a (x) D_a` that copies the outcome into a
//! pointer register.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::qlin::{
    ComplexMatrix, DensityMatrix, PureState, TensorSpace, UnitaryOperator, ALGEBRA_TOL,
};

/// Probabilities at or below this are treated as null branches.
pub const NULL_BRANCH: f64 = 1e-12;

/// Physical value attached to a projector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Value(f64),
    Tuple(Vec<f64>),
}

impl Label {
    pub fn components(&self) -> Vec<f64> {
        match self {
            Label::Value(v) => vec![*v],
            Label::Tuple(vs) => vs.clone(),
        }
    }
}

impl From<f64> for Label {
    fn from(v: f64) -> Self {
        Label::Value(v)
    }
}

/// Complete family of orthogonal projectors with outcome labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    space: TensorSpace,
    projectors: Vec<(Label, ComplexMatrix)>,
}

impl ProjectorSet {
    pub fn new(space: TensorSpace, projectors: Vec<(Label, ComplexMatrix)>) -> Result<Self> {
        let d = space.dim();
        if projectors.is_empty() {
            return Err(Error::InvalidOperator("empty projector set".into()));
        }
        let mut total = ComplexMatrix::zeros(d, d);
        for (i, (_, p)) in projectors.iter().enumerate() {
            if p.rows() != d || p.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "projector {i} is {}x{} on a space of dimension {d}",
                    p.rows(),
                    p.cols()
                )));
            }
            if !p.is_hermitian(ALGEBRA_TOL) {
                return Err(Error::InvalidOperator(format!("projector {i} is not Hermitian")));
            }
            if p.mul_unchecked(p).max_abs_diff(p) > ALGEBRA_TOL {
                return Err(Error::InvalidOperator(format!("projector {i} is not idempotent")));
            }
            for (j, (_, q)) in projectors.iter().enumerate().skip(i + 1) {
                if p.mul_unchecked(q).max_abs() > ALGEBRA_TOL {
                    return Err(Error::InvalidOperator(format!(
                        "projectors {i} and {j} are not orthogonal"
                    )));
                }
            }
            total = total.add(p)?;
        }
        if total.max_abs_diff(&ComplexMatrix::identity(d)) > ALGEBRA_TOL {
            return Err(Error::InvalidOperator("projectors do not sum to the identity".into()));
        }
        Ok(Self { space, projectors })
    }

    /// Rank-one projectors onto an orthonormal basis.
    pub fn from_basis(space: TensorSpace, basis: Vec<(Label, Vec<Complex64>)>) -> Result<Self> {
        let projectors = basis
            .into_iter()
            .map(|(label, v)| (label, ComplexMatrix::outer(&v, &v)))
            .collect();
        Self::new(space, projectors)
    }

    /// Projectors `P_a (x) Q_b` with labels `(a.., b..)`.
    pub fn product(&self, other: &ProjectorSet) -> ProjectorSet {
        let mut projectors = Vec::with_capacity(self.len() * other.len());
        for (la, pa) in &self.projectors {
            for (lb, pb) in &other.projectors {
                let mut label = la.components();
                label.extend(lb.components());
                projectors.push((Label::Tuple(label), pa.kron(pb)));
            }
        }
        ProjectorSet { space: self.space.concat(&other.space), projectors }
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.projectors.iter().map(|(l, _)| l)
    }

    pub fn projector(&self, index: usize) -> Option<&ComplexMatrix> {
        self.projectors.get(index).map(|(_, p)| p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Label, ComplexMatrix)> {
        self.projectors.iter()
    }
}

/// One branch of a measurement. `conditional_state` is `None` for null
/// branches (`probability <= NULL_BRANCH`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementOutcome {
    pub label: Label,
    #[serde(rename = "p")]
    pub probability: f64,
    #[serde(skip)]
    pub conditional_state: Option<DensityMatrix>,
}

fn check_space(rho: &DensityMatrix, m: &ProjectorSet) -> Result<()> {
    if rho.space() != m.space() {
        return Err(Error::DimensionMismatch(format!(
            "state on {:?} measured with projectors on {:?}",
            rho.space().dims(),
            m.space().dims()
        )));
    }
    Ok(())
}

fn sandwich(p: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    p.mul_unchecked(rho).mul_unchecked(p)
}

/// Born distribution with the post-measurement state of every non-null branch.
pub fn born_distribution(rho: &DensityMatrix, m: &ProjectorSet) -> Result<Vec<MeasurementOutcome>> {
    check_space(rho, m)?;
    Ok(m.projectors
        .iter()
        .map(|(label, p)| {
            let projected = sandwich(p, rho.matrix());
            let probability = projected.trace().re;
            let conditional_state = (probability > NULL_BRANCH).then(|| {
                DensityMatrix::from_parts(
                    rho.space().clone(),
                    projected.scale(Complex64::new(1.0 / probability, 0.0)),
                )
            });
            MeasurementOutcome { label: label.clone(), probability, conditional_state }
        })
        .collect())
}

/// Probabilities only, in projector order.
pub fn born_probabilities(rho: &DensityMatrix, m: &ProjectorSet) -> Result<Vec<f64>> {
    check_space(rho, m)?;
    Ok(m.projectors.iter().map(|(_, p)| sandwich(p, rho.matrix()).trace().re).collect())
}

/// State after observing outcome `index`. Conditioning on a null branch is
/// an error.
pub fn collapse(rho: &DensityMatrix, m: &ProjectorSet, index: usize) -> Result<DensityMatrix> {
    check_space(rho, m)?;
    let p = m
        .projector(index)
        .ok_or(Error::IndexOutOfRange { what: "outcome", index, len: m.len() })?;
    let projected = sandwich(p, rho.matrix());
    let prob = projected.trace().re;
    if prob <= NULL_BRANCH {
        return Err(Error::Domain(format!(
            "outcome {index} has probability {prob:e}; cannot condition on it"
        )));
    }
    Ok(DensityMatrix::from_parts(
        rho.space().clone(),
        projected.scale(Complex64::new(1.0 / prob, 0.0)),
    ))
}

/// `|<phi|psi>|^2`
pub fn projection_probability(phi: &PureState, psi: &PureState) -> Result<f64> {
    Ok(phi.inner(psi)?.norm_sqr())
}

/// `sum_a P_a rho P_a`
pub fn dephasing_channel(rho: &DensityMatrix, m: &ProjectorSet) -> Result<DensityMatrix> {
    check_space(rho, m)?;
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (_, p) in &m.projectors {
        out = out.add(&sandwich(p, rho.matrix()))?;
    }
    Ok(DensityMatrix::from_parts(rho.space().clone(), out))
}

/// Cyclic shift `|q> -> |q + shift mod dim>` on the pointer register.
pub fn pointer_shift(dim: usize, shift: usize) -> ComplexMatrix {
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for q in 0..dim {
        m[((q + shift) % dim) * dim + q] = Complex64::new(1.0, 0.0);
    }
    ComplexMatrix::new(dim, dim, m).expect("shift matrix is well formed")
}

/// `sum_a P_a (x) D_a` on system (x) pointer, where `D_a` shifts the pointer
/// by the position `a` of the projector in `m`.
pub fn ideal_measurement_unitary(m: &ProjectorSet, pointer_dim: usize) -> Result<UnitaryOperator> {
    if pointer_dim < m.len() {
        return Err(Error::Domain(format!(
            "pointer dimension {pointer_dim} cannot record {} outcomes",
            m.len()
        )));
    }
    let d = m.space().dim() * pointer_dim;
    let mut u = ComplexMatrix::zeros(d, d);
    for (a, (_, p)) in m.projectors.iter().enumerate() {
        u = u.add(&p.kron(&pointer_shift(pointer_dim, a)))?;
    }
    UnitaryOperator::new(m.space().concat(&TensorSpace::single(pointer_dim)?), u)
}

/// `n . sigma` for the analyzer `n = (sin theta, 0, cos theta)` in the x-z plane.
pub fn spin_observable(theta: Angle) -> ComplexMatrix {
    let (s, c) = theta.radians().sin_cos();
    ComplexMatrix::from_real(2, 2, &[c, s, s, -c]).expect("finite entries")
}

/// Stern-Gerlach projectors `(I +- n . sigma)/2` along `theta`, labels +1 and -1.
pub fn spin_projectors(theta: Angle) -> ProjectorSet {
    let (s, c) = theta.radians().sin_cos();
    let up = ComplexMatrix::from_real(2, 2, &[0.5 * (1.0 + c), 0.5 * s, 0.5 * s, 0.5 * (1.0 - c)])
        .expect("finite entries");
    let down = ComplexMatrix::from_real(2, 2, &[0.5 * (1.0 - c), -0.5 * s, -0.5 * s, 0.5 * (1.0 + c)])
        .expect("finite entries");
    ProjectorSet {
        space: TensorSpace::single(2).expect("qubit"),
        projectors: vec![(Label::Value(1.0), up), (Label::Value(-1.0), down)],
    }
}

/// Site projectors `|x><x|`, labelled by the 1-based site number.
pub fn position_projectors(n_sites: usize) -> Result<ProjectorSet> {
    let space = TensorSpace::single(n_sites)?;
    let projectors = (0..n_sites)
        .map(|x| {
            let mut diag = vec![0.0; n_sites];
            diag[x] = 1.0;
            (Label::Value((x + 1) as f64), ComplexMatrix::from_real_diagonal(&diag))
        })
        .collect();
    Ok(ProjectorSet { space, projectors })
}

/// Momentum projectors on a ring of `n_sites`: onto the Fourier modes
/// `v_k(x) = exp(i 2 pi k x / n) / sqrt(n)`, labelled `k (2 pi / n)`.
pub fn ring_momentum_projectors(n_sites: usize) -> Result<ProjectorSet> {
    let space = TensorSpace::single(n_sites)?;
    let n = n_sites as f64;
    let norm = 1.0 / n.sqrt();
    let basis = (0..n_sites)
        .map(|k| {
            let v: Vec<Complex64> = (0..n_sites)
                .map(|x| Complex64::from_polar(norm, 2.0 * PI * (k * x % n_sites) as f64 / n))
                .collect();
            (Label::Value(k as f64 * 2.0 * PI / n), v)
        })
        .collect();
    ProjectorSet::from_basis(space, basis)
}
