//! Continued-fraction expansion of `ϑ = ln α / ln 10` and the de Weger
//! reduction of the absolute bound in three rounds.

pub mod cf;
pub mod deweger;
pub mod rounds;

use num_bigint::BigUint;
use thiserror::Error;

use crate::precision::{ln10, Ball, PrecisionError, PrecisionPolicy};
use crate::sequence::alpha_enclosure;

pub use crate::baker::EtaParams as Combo;
pub use cf::{cf_expand, cf_expand_with, CFExpansion, CFReport};
pub use deweger::{deweger_reduce, OutcomeReport, Reducer, ReductionOutcome, ReductionProblem, Status};
pub use rounds::{
    published_denominator, run_round, ConvergentPolicy, Delta, Lambda3Sign, PsiContext, RoundConfig, RoundResult,
    PUBLISHED_DENOMINATORS,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Precision(#[from] PrecisionError),
    #[error("expansion too short: {available} convergents above X0, need {needed}")]
    ExpansionTooShort { needed: usize, available: usize },
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("round {round} failed for {} combos, first {:?}", failures.len(), failures.first())]
    RoundFailed { round: u8, failures: Vec<Combo> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// `ϑ = ln α / ln 10`.
pub fn theta(prec: u32) -> Result<Ball, PrecisionError> {
    alpha_enclosure(prec + 16)
        .ln()?
        .div(&ln10(prec + 16))
        .map(|t| t.rounded(prec))
}

/// Certified expansion of `ϑ` up to the first `q > x0` plus `margin` terms.
pub fn theta_expansion(x0: &BigUint, margin: usize, policy: &PrecisionPolicy) -> Result<CFExpansion, ReductionError> {
    cf_expand_with(|bits| Ok(theta(bits)?), x0, margin, policy)
}

/// The first `terms` certified quotients of `ϑ`, refining precision as needed.
pub fn theta_terms(terms: usize, policy: &PrecisionPolicy) -> Result<CFExpansion, ReductionError> {
    policy.validate()?;
    for bits in policy.schedule() {
        let mut e = CFExpansion::of_ball(&theta(bits)?, terms + 1);
        if e.len() > terms {
            e.check_invariants().map_err(ReductionError::CertificationFailed)?;
            e.truncate(terms);
            return Ok(e);
        }
    }
    Err(PrecisionError::PrecisionExhausted {
        max_bits: policy.max_bits,
    }
    .into())
}
