//! POVM-level simulation and estimation for weak-measurement tomography.
//!
//! The crate builds the measurement operators of direct state tomography
//! (original and σx-augmented) and of the Das–Arvind double weak
//! measurement, checks whether they reduce to random one-dimensional
//! orthogonal projective measurements (random ODOPs), and quantifies their
//! tomographic efficacy through Cramér–Rao bounds and sequential Monte Carlo
//! average-fidelity experiments.

pub mod dasarvind;
pub mod dst;
pub mod error;
pub mod estimate;
pub mod fisher;
pub mod povm;
pub mod protocol;
pub mod qcore;
pub mod quadrature;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
