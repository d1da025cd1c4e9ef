//! Determinant dimension witness for qubits.
//!
//! Five preparations and four dichotomic measurements define a 5×5 matrix
//! `p` whose last row is all ones. Its determinant `W = det p` vanishes
//! whenever every preparation and measurement lives in the same two-level
//! space, and can be nonzero once a third level takes part. This crate
//! holds the algebra needed to test that statement in simulation and on
//! recorded data:
//!
//! * [`bloch`]: `S_γ` gates, Bloch-vector states and effects.
//! * [`witness`]: the determinant, its adjugate and the shot-noise variance.
//! * [`configs`]: the built-in angle sets and their predicted matrices.
//! * [`noise`]: incoherent leakage, readout error, calibration drift and a
//!   coherent qutrit leakage model.
//! * [`sampler`]: binomial shot sampling and the two witness estimators.
//! * [`extremal`]: witness maximization in dimensions 2 to 4 and the
//!   classical bound.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the command
//! line and parallel drivers live in the `dimwit` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bloch;
pub mod configs;
mod error;
pub mod extremal;
mod linalg;
mod math;
pub mod noise;
pub mod sampler;
pub mod seed;
pub mod witness;

pub use bloch::{BlochVector, Effect, GateAngle};
pub use configs::{builtin_config, ConfigSet, BUILTIN_IDS};
pub use error::Error;
pub use extremal::{ExtremalProblem, Field, SearchResult, StrategyPoint};
pub use sampler::{EstimatorOutput, ExperimentPlan, ExperimentRecord};
pub use witness::{ProbMatrix, WitnessResult};

pub type Result<T, E = Error> = core::result::Result<T, E>;
