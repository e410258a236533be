//! Property testing of discrete distributions through conditional samples.
//!
//! The crate is organized around a [`CondOracle`](oracle::CondOracle): a
//! source of samples from an unknown distribution that can be conditioned on
//! any subset of the domain. On top of it sit
//!
//! - [`adaptive`]: near-uniformity and identity testers whose query count
//!   does not grow with the domain (or grows as `log* n`),
//! - [`nonadaptive`]: the same questions with every conditioning set fixed
//!   before the first sample,
//! - [`sampler`]: ratio trees and an explicit persistent sampler that
//!   reports the probability of each sample it returns,
//! - [`learner`]: learning a distribution up to relabeling, and the
//!   resulting tester for any label-invariant property,
//! - [`adversarial`]: hard instances (uniblock ensembles, the balanced-string
//!   reduction) for watching testers fail or succeed.
//!
//! [`trials`] runs seeded batches of any of these and reports JSON records.

pub mod adaptive;
pub mod adversarial;
pub mod bucketing;
pub mod distribution;
pub mod error;
pub mod fixture;
pub mod learner;
pub mod nonadaptive;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod trials;
pub mod verdict;

pub use distribution::{linf_distance, smooth, tv_distance, Distribution};
pub use error::{Error, Result};
pub use oracle::{CondOracle, SampleAccount, SetClass, SimulatedOracle};
pub use verdict::{Decision, Verdict};
