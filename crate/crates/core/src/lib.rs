//! Operational security guarantees implied by a variational-distance level
//! `d` for an `l`-bit key.
//!
//! * [`dist`]: dense adversary posteriors, variational distance, marginals,
//!   conditioning, guessing probabilities and bit error rate.
//! * [`extremal`]: distributions meeting the subset guessing bound with
//!   equality, plus a greedy oracle for the best guess under a budget.
//! * [`bounds`]: closed forms for any key length (log domain), collected in a
//!   [`GuaranteeReport`](bounds::GuaranteeReport).
//! * [`ensemble`]: averaged versus individual guarantees via Markov's inequality.
//! * [`cli`]: the `tracesec` command line.
//!
//! Numeric code is generic over [`Scalar`] (`f64` and `f32`); the aliases
//! below fix the common double-precision instantiations.

pub mod analysis;
pub mod bounds;
pub mod cli;
pub mod dist;
pub mod ensemble;
pub mod error;
pub mod extremal;
pub mod format;
pub mod report;
pub mod scalar;

pub use dist::{KeySubset, SubsetOutcome, MAX_KEY_LENGTH};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type KeyDistribution = dist::KeyDistribution<f64>;
pub type KeyDistributionF32 = dist::KeyDistribution<f32>;
pub type ExtremalRecipe = extremal::ExtremalRecipe<f64>;
pub type SecurityParameters = bounds::SecurityParameters<f64>;
pub type GuaranteeReport = bounds::GuaranteeReport<f64>;
pub type GuaranteeReportF32 = bounds::GuaranteeReport<f32>;
pub type DistanceEnsemble = ensemble::DistanceEnsemble<f64>;
pub type DistanceEnsembleF32 = ensemble::DistanceEnsemble<f32>;
