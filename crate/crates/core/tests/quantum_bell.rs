use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use collapse_core::lhv::ChshSettings;
use collapse_core::mc_harness::{run_trials, StreamSpec};
use collapse_core::quantum_bell::{
    chsh_quantum, correlation, empirical_correlation, joint_distribution, SingletSampler,
    TSIRELSON_BOUND,
};
use collapse_core::Angle;
use rand::Rng;

fn deg(x: f64) -> Angle {
    Angle::from_degrees(x)
}

#[test]
fn closed_form_agreement_on_random_angles() {
    let mut rng = StreamSpec::new(1, 0).trial_rng(0);
    for _ in 0..1000 {
        let a = Angle::from_radians(rng.random_range(-10.0..10.0));
        let b = Angle::from_radians(rng.random_range(-10.0..10.0));
        let r = correlation(a, b);
        assert!((r.exact_value + (a - b).radians().cos()).abs() <= 1e-10);
        assert!(r.exact_value.abs() <= 1.0 + 1e-12);
    }
}

#[test]
fn correlation_depends_only_on_difference() {
    let mut rng = StreamSpec::new(2, 0).trial_rng(0);
    for _ in 0..500 {
        let a = deg(rng.random_range(-180.0..180.0));
        let b = deg(rng.random_range(-180.0..180.0));
        let shift = deg(rng.random_range(-360.0..360.0));
        let base = correlation(a, b).exact_value;
        let moved = correlation(a + shift, b + shift).exact_value;
        assert!((base - moved).abs() <= 1e-10);
    }
}

#[test]
fn tsirelson_envelope() {
    let mut rng = StreamSpec::new(3, 0).trial_rng(0);
    for _ in 0..1000 {
        let mut d = || rng.random_range(-360.0..360.0);
        let s = ChshSettings::from_degrees(d(), d(), d(), d()).unwrap();
        assert!(chsh_quantum(s).abs() <= TSIRELSON_BOUND + 1e-9);
    }
}

#[test]
fn grid_search_locates_tsirelson_point() {
    // with theta_A fixed at 0, S only needs C at integer-degree differences
    let c: Vec<f64> = (0..360).map(|d| -(f64::from(d)).to_radians().cos()).collect();
    let at = |x: i32| c[x.rem_euclid(360) as usize];
    let mut best = (0.0f64, (0, 0, 0));
    for a2 in 0..360 {
        for b in 0..360 {
            for b2 in 0..360 {
                let s = at(-b) + at(-b2) + at(a2 - b) - at(a2 - b2);
                if s.abs() > best.0 {
                    best = (s.abs(), (a2, b, b2));
                }
            }
        }
    }
    let (max_abs, (a2, b, b2)) = best;
    assert!((max_abs - 2.0 * SQRT_2).abs() < 1e-9, "grid max {max_abs}");
    let via_trace = chsh_quantum(ChshSettings::from_degrees(0.0, a2 as f64, b as f64, b2 as f64).unwrap());
    assert!((via_trace.abs() - max_abs).abs() < 1e-10);
    let standard = chsh_quantum(ChshSettings::maximal_violation());
    assert!((standard.abs() - max_abs).abs() < 1e-10);
}

#[test]
fn sampled_pairs_follow_born_distribution() {
    let (a, b) = (deg(10.0), deg(70.0));
    let sampler = SingletSampler::new(a, b);
    let spec = StreamSpec::new(11, 0);
    let n = 1_000_000u64;
    let mut counts = [0u64; 4];
    let dist = joint_distribution(a, b);
    for i in 0..n {
        let o = sampler.sample(&mut spec.trial_rng(i));
        let k = dist.iter().position(|(x, _)| *x == o).unwrap();
        counts[k] += 1;
    }
    for (k, (_, p)) in dist.iter().enumerate() {
        let freq = counts[k] as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() <= 4.0 * sigma, "outcome {k}: {freq} vs {p}");
    }
}

#[test]
fn sampled_correlation_at_45_degrees() {
    let s = empirical_correlation(deg(0.0), deg(45.0), 1_000_000, StreamSpec::new(42, 0), 4).unwrap();
    assert!((s.mean + FRAC_1_SQRT_2).abs() <= 4.0 * s.stderr, "{s:?}");
}

#[test]
fn sampled_marginal_is_unbiased() {
    let sampler = SingletSampler::new(deg(0.0), deg(45.0));
    let s = run_trials(|r| f64::from(sampler.sample(r).0), 1_000_000, StreamSpec::new(43, 0), 2).unwrap();
    assert!(s.mean.abs() <= 4.0 * s.stderr, "{s:?}");
}
