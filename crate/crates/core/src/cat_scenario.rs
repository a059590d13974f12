//! Schroedinger's cat as unitary evolution on nucleus (x) cat (x) observer.
//!
//! Basis labels, in subsystem order:
//!
//! | subsystem | index 0            | index 1       | index 2        |
//! |-----------|--------------------|---------------|----------------|
//! | nucleus   | up (radioactive)   | down (decayed)|                |
//! | cat       | q = +1 (alive)     | q = -1 (dead) |                |
//! | observer  | Q = 0 (ignorant)   | Q = +1 (happy)| Q = -1 (shocked)|
//!
//! Waiting `t` half-lives leaves survival probability `2^-t`. Seeing is a
//! controlled permutation of the observer memory: alive swaps
//! ignorant/happy, dead swaps ignorant/shocked. Everything stays pure.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlin::{
    evolve, partial_trace, ComplexMatrix, DensityMatrix, PureState, TensorSpace, UnitaryOperator,
};

pub const NUCLEUS: usize = 0;
pub const CAT: usize = 1;
pub const OBSERVER: usize = 2;

pub const ALIVE: usize = 0;
pub const DEAD: usize = 1;
pub const IGNORANT: usize = 0;
pub const HAPPY: usize = 1;
pub const SHOCKED: usize = 2;

pub fn universe_space() -> TensorSpace {
    TensorSpace::new(vec![2, 2, 3]).expect("fixed dims")
}

/// Joint state of nucleus, cat and observer memory.
#[derive(Debug, Clone, PartialEq)]
pub struct CatUniverse {
    state: DensityMatrix,
}

impl CatUniverse {
    pub fn new(state: DensityMatrix) -> Result<Self> {
        if state.space() != &universe_space() {
            return Err(Error::DimensionMismatch(format!(
                "cat universe needs dims [2, 2, 3], got {:?}",
                state.space().dims()
            )));
        }
        Ok(Self { state })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn evolve(&self, u: &UnitaryOperator) -> Result<CatUniverse> {
        Ok(CatUniverse { state: evolve(&self.state, u)? })
    }
}

/// `|up> (x) |alive> (x) |ignorant>`
pub fn initial_state() -> CatUniverse {
    let psi = PureState::basis(universe_space(), 0).expect("index 0 exists");
    CatUniverse { state: psi.density() }
}

/// Decay over `t` half-lives: `|up, alive> -> sqrt(2^-t) |up, alive> +
/// sqrt(1 - 2^-t) |down, dead>`, completed as a rotation in that plane;
/// the observer is untouched.
pub fn u_waiting(t: f64) -> Result<UnitaryOperator> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("waiting time must be finite and non-negative, got {t}")));
    }
    let survive = 2f64.powf(-t).sqrt();
    // 1 - 2^-t without cancellation
    let decay = (-(-t * std::f64::consts::LN_2).exp_m1()).sqrt();
    let (up_alive, down_dead) = (0usize, 3usize);
    let mut block = ComplexMatrix::identity(4).entries().to_vec();
    let mut set = |r: usize, c: usize, v: f64| block[r * 4 + c] = Complex64::new(v, 0.0);
    set(up_alive, up_alive, survive);
    set(down_dead, up_alive, decay);
    set(up_alive, down_dead, -decay);
    set(down_dead, down_dead, survive);
    let block = ComplexMatrix::new(4, 4, block)?;
    UnitaryOperator::new(universe_space(), block.kron(&ComplexMatrix::identity(3)))
}

/// The observer opens the box and records the cat's state.
pub fn u_seeing() -> UnitaryOperator {
    let swap = |a: usize, b: usize| {
        let mut m = vec![Complex64::new(0.0, 0.0); 9];
        for q in 0..3 {
            let to = if q == a { b } else if q == b { a } else { q };
            m[to * 3 + q] = Complex64::new(1.0, 0.0);
        }
        ComplexMatrix::new(3, 3, m).expect("permutation")
    };
    let alive = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
    let dead = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
    let controlled = alive
        .kron(&swap(IGNORANT, HAPPY))
        .add(&dead.kron(&swap(IGNORANT, SHOCKED)))
        .expect("same shape");
    UnitaryOperator::new(universe_space(), ComplexMatrix::identity(2).kron(&controlled))
        .expect("controlled permutation is unitary")
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedState {
    pub matrix: ComplexMatrix,
    pub purity: f64,
}

/// Read-only diagnostics of one stage of the story.
#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub full_purity: f64,
    pub nucleus: ReducedState,
    pub cat: ReducedState,
    pub observer: ReducedState,
    /// `joint_cat_observer[q][Q]` with q in (alive, dead), Q in (ignorant, happy, shocked).
    pub joint_cat_observer: [[f64; 3]; 2],
    /// `P(alive, happy) + P(dead, shocked)`
    pub agreement: f64,
    pub p_alive: f64,
    pub p_dead: f64,
    pub p_ignorant: f64,
    pub p_happy: f64,
    pub p_shocked: f64,
}

fn reduced(rho: &DensityMatrix, keep: usize) -> ReducedState {
    let r = partial_trace(rho, &[keep]).expect("subsystem exists");
    ReducedState { purity: r.purity(), matrix: r.matrix().clone() }
}

pub fn stage_report(universe: &CatUniverse) -> StageReport {
    let rho = &universe.state;
    let cat_observer = partial_trace(rho, &[CAT, OBSERVER]).expect("subsystems exist");
    let pops = cat_observer.populations();
    let mut joint = [[0.0; 3]; 2];
    for (q, row) in joint.iter_mut().enumerate() {
        for (obs, p) in row.iter_mut().enumerate() {
            *p = pops[q * 3 + obs];
        }
    }
    let cat = reduced(rho, CAT);
    let observer = reduced(rho, OBSERVER);
    let cat_pops: Vec<f64> = cat.matrix.diagonal().iter().map(|z| z.re).collect();
    let obs_pops: Vec<f64> = observer.matrix.diagonal().iter().map(|z| z.re).collect();
    StageReport {
        full_purity: rho.purity(),
        nucleus: reduced(rho, NUCLEUS),
        agreement: joint[ALIVE][HAPPY] + joint[DEAD][SHOCKED],
        joint_cat_observer: joint,
        p_alive: cat_pops[ALIVE],
        p_dead: cat_pops[DEAD],
        p_ignorant: obs_pops[IGNORANT],
        p_happy: obs_pops[HAPPY],
        p_shocked: obs_pops[SHOCKED],
        cat,
        observer,
    }
}

/// Stage reports for the initial state, after waiting `t`, and after seeing.
pub fn run_story(t: f64) -> Result<Vec<(&'static str, StageReport)>> {
    let start = initial_state();
    let waited = start.evolve(&u_waiting(t)?)?;
    let seen = waited.evolve(&u_seeing())?;
    Ok(vec![
        ("initial", stage_report(&start)),
        ("after_waiting", stage_report(&waited)),
        ("after_seeing", stage_report(&seen)),
    ])
}
