//! Lifted (non-reversible) and reversible tempering dynamics.
//!
//! * [`chain`]: the double birth-death walk on `Z × {+, −}`, its regenerative
//!   blocks and Monte Carlo volatility estimates.
//! * [`scaling`]: efficiency as a function of proposal spacing and acceptance
//!   rate, and the optimal-scaling constants.
//! * [`tempering`]: simulated tempering on a Gaussian product target with
//!   exact within-level resampling, counting temperature round trips.
//! * [`oracle`]: exact expected round-trip rates for finite ladders.
//! * [`harness`]: sweeps, CSV output and curve fitting behind the CLI.

pub mod chain;
pub mod error;
pub mod harness;
pub mod minimize;
pub mod normal;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod scaling;
pub mod stats;
pub mod tempering;

pub use error::{Error, Result};
