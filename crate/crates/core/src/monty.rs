//! Generalized Monty Hall: `n` doors, the host opens `k` empty doors other
//! than the player's pick, chosen uniformly among the legal sets.
//!
//! Doors are 0-indexed here; reports add one.

use num_rational::Ratio;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lhv::PMF_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Stay,
    /// Uniform choice among the closed doors other than the pick.
    Switch,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Stay => "stay",
            Strategy::Switch => "switch",
        }
    }
}

/// The host opens `k` doors uniformly among those that are neither the
/// pick nor the car.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HostPolicy;

impl HostPolicy {
    /// Number of doors the host may choose from.
    pub fn legal_doors(n: u64, car_is_pick: bool) -> u64 {
        if car_is_pick {
            n - 1
        } else {
            n - 2
        }
    }

    /// Likelihood of any particular legal opened set, up to a factor common
    /// to all car positions: `P(set | car)` is `1/C(n-1,k)` when the car is
    /// behind the pick and `1/C(n-2,k)` when it is behind an unopened other
    /// door. Their ratio is `(n-1-k) : (n-1)`.
    fn relative_likelihood(n: u64, k: u64, car_is_pick: bool) -> f64 {
        if car_is_pick {
            (n - 1 - k) as f64
        } else {
            (n - 1) as f64
        }
    }
}

fn check_game(n: u64, k: u64) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain(format!("need at least 3 doors, got {n}")));
    }
    if k < 1 || k > n - 2 {
        return Err(Error::Domain(format!("host must open between 1 and {} doors, got {k}", n - 2)));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MontyInstance {
    n_doors: usize,
    player_pick: usize,
    opened: Vec<bool>,
    k_opened: usize,
    /// `None` is the uniform prior.
    prior: Option<Vec<f64>>,
}

impl MontyInstance {
    /// Uniform prior over the doors.
    pub fn new(n_doors: usize, player_pick: usize, opened: &[usize]) -> Result<Self> {
        check_game(n_doors as u64, opened.len() as u64)?;
        if player_pick >= n_doors {
            return Err(Error::IndexOutOfRange { what: "player pick", index: player_pick, len: n_doors });
        }
        let mut mask = vec![false; n_doors];
        for &d in opened {
            if d >= n_doors {
                return Err(Error::IndexOutOfRange { what: "opened door", index: d, len: n_doors });
            }
            if d == player_pick {
                return Err(Error::Domain(format!("the host cannot open the picked door {}", d + 1)));
            }
            if std::mem::replace(&mut mask[d], true) {
                return Err(Error::Domain(format!("door {} opened twice", d + 1)));
            }
        }
        Ok(Self { n_doors, player_pick, opened: mask, k_opened: opened.len(), prior: None })
    }

    pub fn with_prior(n_doors: usize, player_pick: usize, opened: &[usize], prior: Vec<f64>) -> Result<Self> {
        let uniform = Self::new(n_doors, player_pick, opened)?;
        if prior.len() != n_doors {
            return Err(Error::DimensionMismatch(format!(
                "prior has {} entries for {n_doors} doors",
                prior.len()
            )));
        }
        if prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Domain("prior entries must be non-negative".into()));
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > PMF_TOL {
            return Err(Error::Domain(format!("prior sums to {total}, not 1")));
        }
        Ok(Self { prior: Some(prior), ..uniform })
    }

    pub fn n_doors(&self) -> usize {
        self.n_doors
    }

    pub fn k_opened(&self) -> usize {
        self.k_opened
    }

    pub fn player_pick(&self) -> usize {
        self.player_pick
    }

    pub fn is_opened(&self, door: usize) -> bool {
        self.opened[door]
    }

    pub fn prior(&self, door: usize) -> f64 {
        match &self.prior {
            Some(p) => p[door],
            None => 1.0 / self.n_doors as f64,
        }
    }
}

/// `P(car = d | opened) ∝ prior(d) P(host opens this set | car = d)`.
pub fn posterior(instance: &MontyInstance) -> Result<Vec<f64>> {
    let n = instance.n_doors as u64;
    let k = instance.k_opened as u64;
    // a uniform prior cancels; the remaining integer weights sum exactly
    let weights: Vec<f64> = (0..instance.n_doors)
        .map(|d| {
            if instance.opened[d] {
                0.0
            } else {
                let prior = instance.prior.as_ref().map_or(1.0, |p| p[d]);
                prior * HostPolicy::relative_likelihood(n, k, d == instance.player_pick)
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain("the prior gives zero probability to what the host did".into()));
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Exact win probability: `1/n` for stay, `(n-1) / (n (n-k-1))` for switch.
pub fn win_probability(n: u64, k: u64, strategy: Strategy) -> Result<Ratio<u128>> {
    check_game(n, k)?;
    let n = u128::from(n);
    let k = u128::from(k);
    Ok(match strategy {
        Strategy::Stay => Ratio::new(1, n),
        Strategy::Switch => Ratio::new(n - 1, n * (n - k - 1)),
    })
}

pub fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// One game with the pick fixed at door 0.
///
/// The host's uniform `k`-subset of the legal doors is drawn through its
/// complement (the legal doors left closed), which costs `O(n - k)`.
pub fn simulate_game<R: Rng + ?Sized>(n: u64, k: u64, strategy: Strategy, rng: &mut R) -> Result<bool> {
    check_game(n, k)?;
    let pick = 0u64;
    let car = rng.random_range(0..n);
    let legal = HostPolicy::legal_doors(n, car == pick);
    let left_closed = (legal - k) as usize;
    // legal doors in increasing order: 1..n without the car
    let door_of = |pos: u64| {
        let d = pos + 1;
        if car != pick && d >= car {
            d + 1
        } else {
            d
        }
    };
    let mut closed: Vec<u64> = index::sample(rng, legal as usize, left_closed)
        .into_iter()
        .map(|p| door_of(p as u64))
        .collect();
    if car != pick {
        closed.push(car);
    }
    let choice = match strategy {
        Strategy::Stay => pick,
        Strategy::Switch => closed[rng.random_range(0..closed.len())],
    };
    Ok(choice == car)
}
