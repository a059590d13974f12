//! The quantum side of the Bell experiment: two spins in the singlet state,
//! each measured by a Stern-Gerlach analyzer in the x-z plane.
//!
//! With `n(theta) = (sin theta, 0, cos theta)` the singlet correlation is
//! `<ab> = -n_A . n_B = -cos(theta_A - theta_B)`. Flipping one analyzer
//! globally would flip the sign.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::angle::Angle;
use crate::error::Result;
use crate::lhv::ChshSettings;
use crate::mc_harness::{run_trials, StreamSpec, TrialSummary};
use crate::measurement::{born_probabilities, spin_observable, spin_projectors};
use crate::qlin::{expectation, tensor_product, DensityMatrix, PureState, TensorSpace};

/// `2 sqrt 2`, the largest quantum CHSH value.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

/// `(|up,down> - |down,up>) / sqrt 2`
pub fn singlet_state() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    PureState::new(
        TensorSpace::new(vec![2, 2]).expect("two qubits"),
        vec![z, Complex64::new(s, 0.0), Complex64::new(-s, 0.0), z],
    )
    .expect("normalized")
}

pub fn singlet() -> DensityMatrix {
    singlet_state().density()
}

/// `-cos(theta_A - theta_B)`
pub fn closed_form_correlation(theta_a: Angle, theta_b: Angle) -> f64 {
    -(theta_a - theta_b).radians().cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    #[serde(rename = "theta_a_deg")]
    pub theta_a: Angle,
    #[serde(rename = "theta_b_deg")]
    pub theta_b: Angle,
    #[serde(rename = "exact")]
    pub exact_value: f64,
    pub closed_form: f64,
    pub n_trials: Option<u64>,
    pub empirical: Option<f64>,
    pub stderr: Option<f64>,
}

impl CorrelationReport {
    pub fn with_empirical(mut self, summary: &TrialSummary) -> Self {
        self.n_trials = Some(summary.n_trials);
        self.empirical = Some(summary.mean);
        self.stderr = Some(summary.stderr);
        self
    }
}

/// `<ab>` as `trace(rho_singlet (n_A.sigma (x) n_B.sigma))`.
pub fn correlation(theta_a: Angle, theta_b: Angle) -> CorrelationReport {
    let obs = tensor_product(&spin_observable(theta_a), &spin_observable(theta_b));
    let exact_value = expectation(&singlet(), &obs).expect("Hermitian observable on two qubits");
    CorrelationReport {
        theta_a,
        theta_b,
        exact_value,
        closed_form: closed_form_correlation(theta_a, theta_b),
        n_trials: None,
        empirical: None,
        stderr: None,
    }
}

/// Joint outcome distribution over `(a, b)` in the order
/// `(+1,+1), (+1,-1), (-1,+1), (-1,-1)`.
pub fn joint_distribution(theta_a: Angle, theta_b: Angle) -> [((i8, i8), f64); 4] {
    let m = spin_projectors(theta_a).product(&spin_projectors(theta_b));
    let p = born_probabilities(&singlet(), &m).expect("matching two-qubit spaces");
    [((1, 1), p[0]), ((1, -1), p[1]), ((-1, 1), p[2]), ((-1, -1), p[3])]
}

/// `<ab>` summed from the four-outcome Born distribution.
pub fn correlation_from_distribution(theta_a: Angle, theta_b: Angle) -> f64 {
    joint_distribution(theta_a, theta_b)
        .iter()
        .map(|&((a, b), p)| f64::from(a * b) * p)
        .sum()
}

/// `S = C(A-B) + C(A-B') + C(A'-B) - C(A'-B')`
pub fn chsh_quantum(settings: ChshSettings) -> f64 {
    chsh_terms(settings)
        .iter()
        .map(|(sign, r)| sign * r.exact_value)
        .sum()
}

/// The four correlations of `S` with their signs.
pub fn chsh_terms(s: ChshSettings) -> [(f64, CorrelationReport); 4] {
    [
        (1.0, correlation(s.theta_a, s.theta_b)),
        (1.0, correlation(s.theta_a, s.theta_b_prime)),
        (1.0, correlation(s.theta_a_prime, s.theta_b)),
        (-1.0, correlation(s.theta_a_prime, s.theta_b_prime)),
    ]
}

/// Samples `(a, b)` from the singlet's Born distribution at fixed settings.
#[derive(Debug, Clone, Copy)]
pub struct SingletSampler {
    outcomes: [(i8, i8); 4],
    cumulative: [f64; 4],
}

impl SingletSampler {
    pub fn new(theta_a: Angle, theta_b: Angle) -> Self {
        let dist = joint_distribution(theta_a, theta_b);
        let mut cumulative = [0.0; 4];
        let mut acc = 0.0;
        for (c, (_, p)) in cumulative.iter_mut().zip(dist) {
            acc += p.max(0.0);
            *c = acc;
        }
        Self { outcomes: dist.map(|(o, _)| o), cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (i8, i8) {
        let u = rng.random::<f64>() * self.cumulative[3];
        let i = self.cumulative.iter().position(|&c| u < c).unwrap_or(3);
        self.outcomes[i]
    }
}

pub fn sample_singlet_pair<R: Rng + ?Sized>(theta_a: Angle, theta_b: Angle, rng: &mut R) -> (i8, i8) {
    SingletSampler::new(theta_a, theta_b).sample(rng)
}

/// Monte Carlo estimate of `<ab>` from `n` sampled pairs.
pub fn empirical_correlation(
    theta_a: Angle,
    theta_b: Angle,
    n: u64,
    spec: StreamSpec,
    workers: usize,
) -> Result<TrialSummary> {
    let sampler = SingletSampler::new(theta_a, theta_b);
    run_trials(
        |rng| {
            let (a, b) = sampler.sample(rng);
            f64::from(a * b)
        },
        n,
        spec,
        workers,
    )
}

/// Exact and sampled CHSH value; each correlation gets its own stream.
#[derive(Debug, Clone, Serialize)]
pub struct ChshEstimate {
    pub terms: Vec<CorrelationReport>,
    pub empirical: f64,
    pub stderr: f64,
    pub n_trials_per_term: u64,
}

pub fn empirical_chsh(settings: ChshSettings, n: u64, seed: u64, workers: usize) -> Result<ChshEstimate> {
    let mut terms = Vec::with_capacity(4);
    let mut empirical = 0.0;
    let mut var = 0.0;
    for (stream_id, (sign, report)) in (0u64..).zip(chsh_terms(settings)) {
        let summary = empirical_correlation(
            report.theta_a,
            report.theta_b,
            n,
            StreamSpec::new(seed, stream_id),
            workers,
        )?;
        empirical += sign * summary.mean;
        var += summary.stderr * summary.stderr;
        terms.push(report.with_empirical(&summary));
    }
    Ok(ChshEstimate { terms, empirical, stderr: var.sqrt(), n_trials_per_term: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::{partial_trace, ComplexMatrix};

    fn deg(x: f64) -> Angle {
        Angle::from_degrees(x)
    }

    #[test]
    fn singlet_is_pure_with_mixed_marginals() {
        let rho = singlet();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        let half = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        for k in [0, 1] {
            assert!(partial_trace(&rho, &[k]).unwrap().matrix().max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn zz_correlation_is_minus_one() {
        let zz = tensor_product(
            &ComplexMatrix::from_real_diagonal(&[1.0, -1.0]),
            &ComplexMatrix::from_real_diagonal(&[1.0, -1.0]),
        );
        assert!((expectation(&singlet(), &zz).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_table() {
        let cases = [(0.0, -1.0), (45.0, -std::f64::consts::FRAC_1_SQRT_2), (90.0, 0.0), (180.0, 1.0)];
        for (d, expected) in cases {
            let r = correlation(deg(0.0), deg(d));
            assert!((r.exact_value - expected).abs() < 1e-10, "C({d}) = {}", r.exact_value);
            assert!((r.exact_value - r.closed_form).abs() < 1e-10);
        }
    }

    #[test]
    fn distribution_route_agrees() {
        for (a, b) in [(0.0, 45.0), (10.0, -70.0), (200.0, 33.0)] {
            let trace = correlation(deg(a), deg(b)).exact_value;
            assert!((trace - correlation_from_distribution(deg(a), deg(b))).abs() < 1e-12);
        }
    }

    #[test]
    fn chsh_at_maximal_violation() {
        let s = chsh_quantum(ChshSettings::maximal_violation());
        assert!((s.abs() - TSIRELSON_BOUND).abs() < 1e-12);
        assert!(s < 0.0);
    }

    #[test]
    fn degenerate_settings() {
        let s = chsh_quantum(ChshSettings::from_degrees(0.0, 0.0, 0.0, 0.0).unwrap());
        assert!((s + 2.0).abs() < 1e-12);
    }

    #[test]
    fn equal_angles_always_anticorrelated() {
        let spec = StreamSpec::new(3, 0);
        for (i, d) in [0.0, 37.0, 90.0, -120.0].into_iter().enumerate() {
            let sampler = SingletSampler::new(deg(d), deg(d));
            for t in 0..2000 {
                let (a, b) = sampler.sample(&mut spec.trial_rng((i * 10_000 + t) as u64));
                assert_eq!(a * b, -1);
            }
        }
    }

    #[test]
    fn marginals_are_unbiased_exactly() {
        let dist = joint_distribution(deg(20.0), deg(75.0));
        let mean_a: f64 = dist.iter().map(|&((a, _), p)| f64::from(a) * p).sum();
        let mean_b: f64 = dist.iter().map(|&((_, b), p)| f64::from(b) * p).sum();
        assert!(mean_a.abs() < 1e-12 && mean_b.abs() < 1e-12);
    }
}
