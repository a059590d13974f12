use collapse_core::mc_harness::{run_trials, StreamSpec};
use collapse_core::monty::{
    posterior, ratio_to_f64, simulate_game, win_probability, MontyInstance, Strategy,
};
use num_rational::Ratio;

type Q = Ratio<u128>;

fn subsets_of_size(doors: &[usize], k: usize) -> Vec<Vec<usize>> {
    let m = doors.len();
    (0u32..1 << m)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).map(|i| doors[i]).collect())
        .collect()
}

/// Enumerates car position, every legal host set, and every switch target.
fn enumerate_win(n: usize, k: usize, strategy: Strategy) -> Q {
    let pick = 0;
    let mut total = Q::from_integer(0);
    for car in 0..n {
        let legal: Vec<usize> = (0..n).filter(|&d| d != pick && d != car).collect();
        let sets = subsets_of_size(&legal, k);
        let p_set = Q::new(1, n as u128) * Q::new(1, sets.len() as u128);
        for opened in &sets {
            match strategy {
                Strategy::Stay => {
                    if car == pick {
                        total += p_set;
                    }
                }
                Strategy::Switch => {
                    let targets: Vec<usize> =
                        (0..n).filter(|d| *d != pick && !opened.contains(d)).collect();
                    let p_target = p_set * Q::new(1, targets.len() as u128);
                    total += p_target * Q::from_integer(targets.iter().filter(|&&t| t == car).count() as u128);
                }
            }
        }
    }
    total
}

/// P(car = d | opened) from the joint over (car, host set).
fn enumerate_posterior(n: usize, opened: &[usize]) -> Vec<Q> {
    let pick = 0;
    let mut joint = vec![Q::from_integer(0); n];
    for (car, slot) in joint.iter_mut().enumerate() {
        let legal: Vec<usize> = (0..n).filter(|&d| d != pick && d != car).collect();
        let sets = subsets_of_size(&legal, opened.len());
        if sets.iter().any(|s| s == opened) {
            *slot = Q::new(1, n as u128) * Q::new(1, sets.len() as u128);
        }
    }
    let z: Q = joint.iter().copied().sum();
    joint.into_iter().map(|p| p / z).collect()
}

#[test]
fn closed_form_equals_enumeration() {
    for n in 3..=7 {
        for k in 1..=n - 2 {
            for strategy in [Strategy::Stay, Strategy::Switch] {
                let exact = win_probability(n as u64, k as u64, strategy).unwrap();
                assert_eq!(exact, enumerate_win(n, k, strategy), "n={n} k={k} {strategy:?}");
            }
        }
    }
}

#[test]
fn five_doors_two_opened() {
    assert_eq!(enumerate_win(5, 2, Strategy::Switch), Q::new(2, 5));
}

#[test]
fn posterior_equals_enumerated_bayes() {
    for n in 3..=6 {
        let others: Vec<usize> = (1..n).collect();
        for k in 1..=n - 2 {
            for opened in subsets_of_size(&others, k) {
                let p = posterior(&MontyInstance::new(n, 0, &opened).unwrap()).unwrap();
                let q = enumerate_posterior(n, &opened);
                for d in 0..n {
                    assert!((p[d] - ratio_to_f64(&q[d])).abs() < 1e-12, "n={n} opened={opened:?}");
                }
                assert_eq!(p[0], 1.0 / n as f64);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(opened.iter().all(|&d| p[d] == 0.0));
            }
        }
    }
}

fn check_monte_carlo(n: u64, k: u64, strategy: Strategy, games: u64, seed: u64) {
    let summary = run_trials(
        |r| f64::from(u8::from(simulate_game(n, k, strategy, r).unwrap())),
        games,
        StreamSpec::new(seed, 0),
        4,
    )
    .unwrap();
    let p = ratio_to_f64(&win_probability(n, k, strategy).unwrap());
    let sigma = (p * (1.0 - p) / games as f64).sqrt();
    assert!(
        (summary.mean - p).abs() <= 5.0 * sigma,
        "n={n} k={k} {strategy:?}: {} vs {p} (sigma {sigma})",
        summary.mean
    );
}

#[test]
fn classic_game_monte_carlo() {
    check_monte_carlo(3, 1, Strategy::Switch, 1_000_000, 42);
    check_monte_carlo(3, 1, Strategy::Stay, 1_000_000, 43);
}

#[test]
fn generalized_game_monte_carlo() {
    check_monte_carlo(5, 2, Strategy::Switch, 1_000_000, 44);
    check_monte_carlo(7, 3, Strategy::Switch, 200_000, 45);
    check_monte_carlo(7, 2, Strategy::Stay, 200_000, 46);
}

#[test]
fn million_door_game() {
    let n = 1_000_000;
    assert_eq!(ratio_to_f64(&win_probability(n, n - 2, Strategy::Switch).unwrap()), 0.999_999);
    check_monte_carlo(n, n - 2, Strategy::Switch, 100_000, 47);
}
