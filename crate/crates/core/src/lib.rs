//! Simulation, optimization and certification for sequential qubit random
//! access codes in the prepare–transform–measure scenario.
//!
//! Alice encodes two bits into a qubit, Bob applies a two-outcome instrument
//! and passes the post-measurement state on, and Charlie measures it. The
//! pair of success probabilities `(W_AB, W_AC)` is the object of study.

pub mod analytics;
pub mod error;
pub mod optimizer;
pub mod qubit;
pub mod random;
pub mod report;
pub mod scenario;
pub mod sequence;
pub mod strategies;
pub mod tolerance;

pub use error::{Error, Result};
