//! Overshoot laws of symmetric alpha-stable processes and the
//! recurrence/transience classification of two-sided stable-like jump
//! processes.
//!
//! The crate provides:
//!
//! * exact first-passage overshoot densities, CDFs, quantiles and samplers
//!   ([`law`]);
//! * closed-form overshoot moments with an independent quadrature oracle
//!   ([`moments`]);
//! * the overshoot Markov chain of successive barrier up-crossings and the
//!   analytic witnesses for its limit behavior ([`chain`]);
//! * the `alpha + beta` vs `2` classifier with Monte Carlo cross-validation
//!   ([`classify`]);
//! * a brute-force path-simulation oracle ([`oracle`]);
//! * the exact deterministic counterexample chains ([`counterexamples`]);
//! * the acceptance check suite ([`acceptance`]).

pub mod acceptance;
pub mod chain;
pub mod classify;
pub mod counterexamples;
pub mod error;
pub mod law;
pub mod moments;
pub mod oracle;
pub mod rng;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
pub use law::{Direction, OvershootLaw, StabilityIndex};
pub use moments::MomentValue;
