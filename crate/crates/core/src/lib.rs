//! Exact and Monte Carlo reproductions of the textbook quantum-measurement
//! arguments: the CHSH bound for local hidden variable models and its
//! violation by the spin singlet, projective measurement as dephasing,
//! the Schroedinger-cat story as a sequence of unitaries, and the Monty
//! Hall posterior as a classical counterpart of collapse.
//!
//! Conventions used everywhere in the crate:
//!
//! - subsystem 0 is the leftmost Kronecker factor (slowest-varying index);
//! - angles are [`Angle`] values, entered and reported in degrees and
//!   stored in radians;
//! - every Monte Carlo routine draws its randomness through
//!   [`mc_harness::StreamSpec`], so results do not depend on the worker
//!   count.

pub mod angle;
pub mod cat_scenario;
pub mod error;
pub mod lhv;
pub mod mc_harness;
pub mod measurement;
pub mod monty;
pub mod qlin;
pub mod quantum_bell;

pub use angle::Angle;
pub use error::{Error, Result};
pub use num_complex::Complex64;
