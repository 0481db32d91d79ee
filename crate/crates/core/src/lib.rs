//! Classical and quantum Nambu-bracket mechanics of the Kepler / Hydrogen problem.
//!
//! Classical side: [`phase_space`] invariants and gradients, [`cnb`] brackets,
//! [`dynamics`] flow laws and integration. Quantum side: [`su2`] chiral
//! generators and the Balmer spectrum, [`qnb`] quantum Nambu brackets and
//! the entwined evolution laws. [`report`] carries verification results.

pub mod cnb;
pub mod dynamics;
pub mod error;
pub mod operator;
pub mod pairing;
pub mod phase_space;
pub mod qnb;
pub mod report;
pub mod sampling;
pub mod su2;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use operator::Operator;
pub use phase_space::{Gradient, GradientTable, InvariantSet, PhaseState};
pub use su2::{RepSpec, Spin};
