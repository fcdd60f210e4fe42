//! Online discrete bin covering with frequency predictions.
//!
//! The crate covers the whole experimental pipeline:
//!
//! * [`model`]: exact sizes, size sets, instances, frequency vectors, bins and coverings.
//! * [`bintypes`]: the catalog of non-wasteful bin types of a size set.
//! * [`optcover`]: the exact offline optimum and closed-form optima for generator families.
//! * [`online`]: Dual-Next-Fit, Group Covering, the trust-parametrized hybrids,
//!   the ℓ-splitting and the self-learning POPC algorithm.
//! * [`generators`]: adversarial and stochastic instance families.
//! * [`harness`]: ratio reports, λ sweeps and Monte-Carlo expected-ratio estimates.
//!
//! All covering decisions are made on exact integer levels; no floating point is
//! involved in deciding whether a bin is covered.

pub mod bintypes;
pub mod error;
pub mod generators;
pub mod harness;
pub mod model;
pub mod online;
pub mod optcover;

pub use error::{Error, Result};
pub use model::{
    CountVector, Covering, FrequencyVector, Instance, Rational, Size, SizeIdx, SizeSet,
};
