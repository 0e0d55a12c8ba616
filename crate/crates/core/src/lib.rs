//! Photodetection of a single cavity mode with an imperfect atom-pointer detector.
//!
//! A two-level atom prepared in its ground state crosses the cavity, interacts
//! resonantly with the field for a fixed time and is then analysed by an
//! ionization chamber with two state-selective detectors. The chamber may miss
//! the atom or report the wrong level. This crate models that chain:
//!
//! - [`linalg`]: dense complex operators on the truncated Fock space, the atom
//!   space and their tensor product, plus validated density operators.
//! - [`jaynes_cummings`]: the ground-state column of the atom-field unitary.
//! - [`detector`]: detector imperfections, atomic POVM elements and state
//!   transformers.
//! - [`channel`]: the induced field-space measurement channel, conditional
//!   states and Monte Carlo trajectories.
//! - [`bayes`]: grid posteriors over the initial field state together with
//!   the closed-form posterior for the vacuum/one-photon family.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
// negated comparisons are how NaN inputs end up on the error path
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bayes;
pub mod channel;
pub mod detector;
mod error;
pub mod jaynes_cummings;
pub mod linalg;

pub use bayes::HypothesisGrid;
pub use channel::{FieldChannel, TrajectorySampler, TrajectoryStep};
pub use detector::{ChamberProcess, DetectorParams, FlipFractions, Outcome};
pub use error::{Constraint, ConstraintViolation, DensityViolation, Error, Result};
pub use jaynes_cummings::JcParams;
pub use linalg::{AtomLevel, DensityOperator, Operator};

pub use num_complex::Complex64;
