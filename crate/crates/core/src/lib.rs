//! Certified search and proof pipeline for Padovan numbers whose decimal
//! expansion is a concatenation of three repdigits.
//!
//! The crate is organised bottom-up:
//!
//! - [`precision`]: midpoint–radius ball arithmetic over exact dyadics.
//! - [`sequence`]: exact Padovan terms and certified Binet data.
//! - [`search`]: the repdigit-concatenation model and brute-force search.
//! - [`baker`]: logarithmic heights, Matveev's lower bound, the bound chain.
//! - [`reduction`]: continued fractions and de Weger reduction rounds.
//! - [`prover`]: end-to-end orchestration and the JSON certificate.

pub mod baker;
pub mod precision;
pub mod prover;
pub mod reduction;
pub mod search;
pub mod sequence;
mod serde_big;

pub use precision::{Ball, Certified, Dyadic, Enclosure, PrecisionError, PrecisionPolicy};
