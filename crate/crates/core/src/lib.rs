//! Parameter identification for the reduced-order electrochemical
//! equivalent-circuit model (E-ECM) of lithium-ion cells.
//!
//! * [`model`] simulates the terminal voltage for a parameter set and a
//!   current profile.
//! * [`identification`] defines the parameter box and the least-squares
//!   identification loss.
//! * [`gp`] and [`bayes_opt`] implement Gaussian-process regression and
//!   expected-improvement Bayesian optimization.
//! * [`baselines`] provides finite-difference gradient descent, particle
//!   swarm optimization and random search under the same evaluation budget.
//! * [`harness`] generates synthetic data and runs the benchmark protocol.

// `!(x > 0.0)` is how the validators reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bayes_opt;
pub mod error;
pub mod gp;
pub mod harness;
pub mod identification;
mod linalg;
pub mod model;
pub mod optim;
pub mod qmc;
mod serde_secs;

pub use error::{Error, Result};
pub use identification::{IdentificationDataset, IdentificationProblem, ParameterBox};
pub use model::{Cell, CellParameters, CurrentProfile, VoltageSeries};
pub use optim::OptimizationResult;
