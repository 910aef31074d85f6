//! End-to-end proof: exhaustive search below a ceiling, the bound chain for
//! larger indices, three reduction rounds, and the final comparison.

mod notes;
mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baker::chain::{BoundChainReport, HYPOTHESIS_N};
use crate::baker::{bound_chain, BakerError, ChainMode};
use crate::precision::{Enclosure, PrecisionError, PrecisionPolicy};
use crate::reduction::{
    run_round, theta_expansion, ConvergentPolicy, Lambda3Sign, ReductionError, RoundConfig, RoundResult,
};
use crate::search::{search, SearchError, Solution};
use crate::sequence::{binet_data, certify_range, RecurrenceDef, SequenceError};

pub use notes::Note;
pub use report::{canonical_json, emit_report, ReportFormat};

pub const CERTIFICATE_VERSION: &str = "1.0";
pub const DEFAULT_SEARCH_CEILING: u64 = HYPOTHESIS_N - 1;
pub const DEFAULT_BINET_RANGE: u64 = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProveOptions {
    pub search_ceiling: u64,
    pub precision: PrecisionPolicy,
    /// Run round 3 under both signs of the `(b−c)` term.
    pub paper_faithful: bool,
    /// Also run the bound chain with recomputed heights and report it next
    /// to the published one.
    pub tight: bool,
    pub policy: ConvergentPolicy,
    pub margin: usize,
    pub binet_range: u64,
}

impl Default for ProveOptions {
    fn default() -> Self {
        ProveOptions {
            search_ceiling: DEFAULT_SEARCH_CEILING,
            precision: PrecisionPolicy::default(),
            paper_faithful: false,
            tight: false,
            policy: ConvergentPolicy::default(),
            margin: RoundConfig::DEFAULT_MARGIN,
            binet_range: DEFAULT_BINET_RANGE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Search,
    BinetChecks,
    BoundChain,
    Expansion,
    Round1,
    Round2,
    Round3,
    Contradiction,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        write!(f, "{}", s.as_str().expect("string"))
    }
}

#[derive(Debug, Error)]
pub enum ProveError {
    /// Some stage did not certify. The certificate is attached when every
    /// stage ran and only the final comparison failed.
    #[error("proof incomplete at {stage}: {reason}")]
    ProofIncomplete {
        stage: Stage,
        reason: String,
        certificate: Option<Box<Certificate>>,
    },
    #[error("precision exhausted at {stage} ({max_bits} bits)")]
    PrecisionExhausted { stage: Stage, max_bits: u32 },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
}

impl ProveError {
    fn incomplete(stage: Stage, reason: impl std::fmt::Display) -> Self {
        ProveError::ProofIncomplete {
            stage,
            reason: reason.to_string(),
            certificate: None,
        }
    }

    fn from_precision(stage: Stage, e: PrecisionError) -> Self {
        match e {
            PrecisionError::PrecisionExhausted { max_bits } => ProveError::PrecisionExhausted { stage, max_bits },
            other => Self::incomplete(stage, other),
        }
    }

    fn from_sequence(stage: Stage, e: SequenceError, max_bits: u32) -> Self {
        match e {
            SequenceError::Precision(p) => Self::from_precision(stage, p),
            SequenceError::CertificationFailed(_) => ProveError::PrecisionExhausted { stage, max_bits },
            other => Self::incomplete(stage, other),
        }
    }

    fn from_baker(stage: Stage, e: BakerError, max_bits: u32) -> Self {
        match e {
            BakerError::Precision(p) => Self::from_precision(stage, p),
            BakerError::Undecided(_) => ProveError::PrecisionExhausted { stage, max_bits },
            other => Self::incomplete(stage, other),
        }
    }

    fn from_reduction(stage: Stage, e: ReductionError) -> Self {
        match e {
            ReductionError::Precision(p) => Self::from_precision(stage, p),
            other => Self::incomplete(stage, other),
        }
    }

    fn from_search(e: SearchError) -> Self {
        Self::incomplete(Stage::Search, e)
    }
}

/// Range checks of the Binet error and the growth bracket.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinetChecks {
    pub n_min: u64,
    pub n_max: u64,
    /// Indices where `|P_n − C_α αⁿ| < α^(−n/2)` is certified false.
    pub binet_error_failures: Vec<u64>,
    /// Indices where `α^(n−3) ≤ P_n ≤ α^(n−1)` is certified false.
    pub growth_bracket_failures: Vec<u64>,
    /// The Binet error bound at the first index of the analytic range.
    pub binet_error_at_hypothesis: bool,
    pub c_alpha: Enclosure,
    /// `|C_β|`; with `|β| < 1` this gives `|C_β βⁿ| < 1`, which rules out
    /// `Γ_i = 0` after applying the automorphism `α ↦ β`.
    pub c_beta_modulus: Enclosure,
    pub beta_modulus: Enclosure,
    pub conjugate_term_below_one: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contradiction {
    pub search_ceiling: u64,
    /// The bound chain assumes `n` at least this large.
    pub hypothesis_n_at_least: u64,
    pub reduced_bound: u64,
    pub proof_complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: String,
    /// Excluded from the canonical form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub sequence: RecurrenceDef,
    pub options: ProveOptionsEcho,
    pub solutions: Vec<Solution>,
    pub binet_checks: BinetChecks,
    pub bound_chain: BoundChainReport,
    /// The chain with recomputed heights; informational, `X₀` comes from
    /// `bound_chain`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tight_chain: Option<BoundChainReport>,
    /// Bounds of each round; with `paper_faithful` the last entry is round 3
    /// under the other sign.
    pub reduction_rounds: Vec<RoundResult>,
    pub final_bound: u64,
    pub contradiction: Contradiction,
    pub resolved_typos: Vec<Note>,
    pub open_questions: Vec<Note>,
}

/// Options as recorded in the certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProveOptionsEcho {
    pub search_ceiling: u64,
    pub initial_bits: u32,
    pub max_bits: u32,
    pub paper_faithful: bool,
    pub tight: bool,
    pub policy: ConvergentPolicy,
    pub margin: usize,
}

impl Certificate {
    pub fn solution_values(&self) -> Vec<String> {
        crate::search::solution_values(&self.solutions)
    }

    /// Largest bound over the runs of `round`.
    pub fn round_bound(&self, round: u8) -> Option<u64> {
        self.reduction_rounds
            .iter()
            .filter(|r| r.round == round)
            .map(|r| r.max_y)
            .max()
    }
}

pub fn binet_checks(n_max: u64, policy: &PrecisionPolicy) -> Result<BinetChecks, SequenceError> {
    let binet_error_failures = certify_range(n_max, policy, |d, n| d.binet_error_holds(n))?;
    let growth_bracket_failures = certify_range(n_max, policy, |d, n| d.growth_bracket_holds(n))?;
    let binet_error_at_hypothesis = crate::sequence::binet_error_certified(HYPOTHESIS_N, policy)?;
    let d = binet_data(policy)?;
    let one = crate::Ball::one(d.precision_bits);
    let conjugate_term_below_one =
        d.c_beta_modulus.certify_lt(&one) == Some(true) && d.beta_modulus.certify_lt(&one) == Some(true);
    Ok(BinetChecks {
        n_min: 1,
        n_max,
        binet_error_failures,
        growth_bracket_failures,
        binet_error_at_hypothesis,
        c_alpha: Enclosure::of(&d.c_alpha),
        c_beta_modulus: Enclosure::of(&d.c_beta_modulus),
        beta_modulus: Enclosure::of(&d.beta_modulus),
        conjugate_term_below_one,
    })
}

/// Run the whole proof.
///
/// Returns the certificate when every stage certifies and the reduced bound
/// closes the gap; otherwise [`ProveError::ProofIncomplete`] names the stage.
pub fn prove(options: &ProveOptions) -> Result<Certificate, ProveError> {
    let policy = &options.precision;
    policy
        .validate()
        .map_err(|e| ProveError::InvalidOptions(e.to_string()))?;
    let max_bits = policy.max_bits;
    let sequence = RecurrenceDef::padovan();

    let solutions = search(1, options.search_ceiling, &sequence).map_err(ProveError::from_search)?;

    let binet = binet_checks(options.binet_range, policy)
        .map_err(|e| ProveError::from_sequence(Stage::BinetChecks, e, max_bits))?;
    if !binet.binet_error_at_hypothesis || !binet.conjugate_term_below_one {
        return Err(ProveError::incomplete(
            Stage::BinetChecks,
            "Binet estimates not certified",
        ));
    }

    let chain = bound_chain(ChainMode::Published, policy)
        .map_err(|e| ProveError::from_baker(Stage::BoundChain, e, max_bits))?;
    if !chain.all_hold() {
        let names: Vec<_> = chain.failed_checks().iter().map(|c| c.name.clone()).collect();
        return Err(ProveError::incomplete(
            Stage::BoundChain,
            format!("failed checks: {names:?}"),
        ));
    }
    let tight_chain = if options.tight {
        let t = bound_chain(ChainMode::Tight, policy)
            .map_err(|e| ProveError::from_baker(Stage::BoundChain, e, max_bits))?;
        Some(t.report())
    } else {
        None
    };
    let x0 = chain.x0.clone();

    let expansion =
        theta_expansion(&x0, options.margin, policy).map_err(|e| ProveError::from_reduction(Stage::Expansion, e))?;
    let base = RoundConfig {
        policy: options.policy,
        margin: options.margin,
        max_bits,
        ..RoundConfig::new(1, x0)
    };
    let r1 = run_round(&base, &expansion).map_err(|e| ProveError::from_reduction(Stage::Round1, e))?;
    let cfg2 = RoundConfig {
        round: 2,
        ..base.clone().with_bounds(r1.max_y, 0)
    };
    let r2 = run_round(&cfg2, &expansion).map_err(|e| ProveError::from_reduction(Stage::Round2, e))?;
    let cfg3 = RoundConfig {
        round: 3,
        ..base.clone().with_bounds(r1.max_y, r2.max_y)
    };
    let mut rounds = vec![r1, r2];
    let signs: &[Lambda3Sign] = if options.paper_faithful {
        &[Lambda3Sign::Minus, Lambda3Sign::Plus]
    } else {
        &[Lambda3Sign::Minus]
    };
    for &sign in signs {
        let cfg = RoundConfig { sign, ..cfg3.clone() };
        rounds.push(run_round(&cfg, &expansion).map_err(|e| ProveError::from_reduction(Stage::Round3, e))?);
    }
    let final_bound = rounds
        .iter()
        .filter(|r| r.round == 3)
        .map(|r| r.max_y)
        .max()
        .expect("round 3 ran");

    // the chain covers n >= HYPOTHESIS_N, the search covers n <= ceiling
    let covered = options.search_ceiling + 1 >= HYPOTHESIS_N;
    let proof_complete = covered && final_bound <= options.search_ceiling;
    let certificate = Certificate {
        version: CERTIFICATE_VERSION.to_string(),
        generated_at: None,
        sequence,
        options: ProveOptionsEcho {
            search_ceiling: options.search_ceiling,
            initial_bits: policy.initial_bits,
            max_bits,
            paper_faithful: options.paper_faithful,
            tight: options.tight,
            policy: options.policy,
            margin: options.margin,
        },
        solutions,
        binet_checks: binet,
        bound_chain: chain.report(),
        tight_chain,
        reduction_rounds: rounds,
        final_bound,
        contradiction: Contradiction {
            search_ceiling: options.search_ceiling,
            hypothesis_n_at_least: HYPOTHESIS_N,
            reduced_bound: final_bound,
            proof_complete,
        },
        resolved_typos: notes::resolved_typos(),
        open_questions: notes::open_questions(),
    };
    if proof_complete {
        Ok(certificate)
    } else {
        let reason = if covered {
            format!(
                "reduced bound {final_bound} exceeds search ceiling {}",
                options.search_ceiling
            )
        } else {
            format!(
                "indices {}..{} are covered neither by the search nor by the bound chain",
                options.search_ceiling + 1,
                HYPOTHESIS_N
            )
        };
        Err(ProveError::ProofIncomplete {
            stage: Stage::Contradiction,
            reason,
            certificate: Some(Box::new(certificate)),
        })
    }
}
