//! Learning under instance-targeted data poisoning over finite domains.
//!
//! The crate covers the data model ([`domain`]), robust learning rules
//! ([`learners`]), sample-space and oblivious adversaries ([`adversaries`]),
//! structural analysis of classes and learners ([`analysis`]) and the Monte
//! Carlo and exhaustive experiment harness ([`experiments`]).
//!
//! All randomness flows through [`rng::RandomSource`], so every result is a
//! deterministic function of its inputs and seed.

pub mod adversaries;
pub mod analysis;
pub mod budget;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod learners;
pub mod rng;
pub mod stats;

pub use budget::Budget;
pub use error::{Error, Result};
pub use rng::RandomSource;
