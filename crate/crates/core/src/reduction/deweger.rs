//! de Weger's reduction. With `Λ/ϑ₂ = ψ − x₁ϑ + x₂`, `max|x_i| ≤ X₀` and a
//! convergent `p/q` of `ϑ` with `q > X₀`: if `‖qψ‖ > 2X₀/q`, every solution
//! of `|Λ| < c·exp(−δY)` has `Y < ln(q²c / (|ϑ₂| X₀)) / δ`.

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use super::cf::CFExpansion;
use super::{Combo, ReductionError};
use crate::precision::{Ball, Dyadic, Enclosure, PrecisionError};

/// Bits of `ψ` beyond `bits(q)`, so that `q·ψ` keeps 128 fractional bits
/// for `|ψ| < 2^8`.
pub const GUARD_BITS: u32 = 136;
const ESCALATION_BITS: u32 = 64;
/// How many leading candidates the initial `ψ` precision covers.
const BASE_CANDIDATES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Reduced,
    Failed,
}

/// A convergent tried by the reducer, with its precomputed Lemma bound.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub index: usize,
    pub q: BigUint,
    q_int: BigInt,
    /// `ln(q²c / (|ϑ₂| X₀)) / δ`.
    pub bound: Ball,
    /// Largest integer strictly below `bound`.
    pub y_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutcome {
    pub combo: Combo,
    pub status: Status,
    /// Convergent that reduced the combo, or the last one tried.
    pub q_index: usize,
    pub q_used: BigUint,
    /// Position of `q_used` in the scan order, from zero.
    pub attempts: usize,
    pub psi: Ball,
    /// Certified lower bound on `‖q ψ‖`.
    pub qpsi_lower: Dyadic,
    pub y_bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeReport {
    pub combo: Combo,
    pub status: Status,
    pub q_index: usize,
    #[serde(with = "crate::serde_big::biguint")]
    pub q: BigUint,
    pub attempts: usize,
    pub psi: Enclosure,
    pub qpsi_lower: String,
    /// `2X₀/q`, rounded up.
    pub threshold: String,
    pub y_bound: Option<u64>,
}

impl ReductionOutcome {
    pub fn report(&self, x0: &BigUint) -> OutcomeReport {
        let threshold = Dyadic::div(
            &Dyadic::from_int(BigInt::from(x0 * 2u32)),
            &Dyadic::from_int(BigInt::from(self.q_used.clone())),
            80,
            crate::precision::Round::Up,
        );
        OutcomeReport {
            combo: self.combo,
            status: self.status,
            q_index: self.q_index,
            q: self.q_used.clone(),
            attempts: self.attempts,
            psi: Enclosure::with_digits(&self.psi, 80),
            qpsi_lower: self.qpsi_lower.to_sci_string(20, crate::precision::Round::Down),
            threshold: threshold.to_sci_string(20, crate::precision::Round::Up),
            y_bound: self.y_bound,
        }
    }
}

/// `x > num / den` for `den > 0`, decided exactly.
fn dyadic_gt_ratio(x: &Dyadic, num: &BigInt, den: &BigInt) -> bool {
    let e = x.exponent();
    if e >= 0 {
        (x.mantissa() << e as u64) * den > *num
    } else {
        x.mantissa() * den > num << (-e) as u64
    }
}

enum Verdict {
    Pass(Dyadic),
    Fail(Dyadic),
    Undecided,
}

fn classify(psi: &Ball, q: &BigInt, two_x0: &BigInt) -> Verdict {
    if psi.contains_zero() {
        return Verdict::Undecided;
    }
    let Ok((dist, lower)) = psi.mul_int(q).nearest_int_distance() else {
        return Verdict::Undecided;
    };
    if dyadic_gt_ratio(&lower, two_x0, q) {
        Verdict::Pass(lower)
    } else if !dyadic_gt_ratio(&dist.hi(), two_x0, q) {
        Verdict::Fail(lower)
    } else {
        Verdict::Undecided
    }
}

/// Shared setup for many reductions against one expansion: the scan order
/// of convergents and their Lemma bounds.
#[derive(Debug, Clone)]
pub struct Reducer {
    pub x0: BigUint,
    pub candidates: Vec<Candidate>,
    pub max_bits: u32,
    two_x0: BigInt,
}

impl Reducer {
    /// `order` lists convergent indices in scan order; each must have `q > X₀`.
    pub fn new(
        expansion: &CFExpansion,
        c: &Ball,
        delta: &Ball,
        theta2: &Ball,
        x0: &BigUint,
        order: &[usize],
        max_bits: u32,
    ) -> Result<Self, ReductionError> {
        for (name, v) in [("c", c), ("delta", delta), ("|theta2|", theta2)] {
            if !v.is_positive() {
                return Err(ReductionError::InvalidInput(format!("{name} must be positive")));
            }
        }
        if x0 == &BigUint::default() {
            return Err(ReductionError::InvalidInput("X0 must be positive".into()));
        }
        if order.is_empty() {
            return Err(ReductionError::ExpansionTooShort {
                needed: 1,
                available: 0,
            });
        }
        let prec = 256;
        let denom = theta2.mul(&Ball::from_int(BigInt::from(x0.clone()), prec));
        let mut candidates = Vec::with_capacity(order.len());
        for &index in order {
            let q = expansion.q(index);
            if &q <= x0 {
                return Err(ReductionError::InvalidInput(format!("q_{index} does not exceed X0")));
            }
            let q_int = BigInt::from(q.clone());
            let ratio = Ball::from_int(&q_int * &q_int, prec).mul(c).div(&denom)?;
            let bound = ratio.ln()?.div(delta)?;
            let y: BigInt = bound.hi().ceil() - 1;
            let y_bound = u64::try_from(y.max(BigInt::default()))
                .map_err(|_| ReductionError::InvalidInput("Lemma bound out of range".into()))?;
            candidates.push(Candidate {
                index,
                q,
                q_int,
                bound,
                y_bound,
            });
        }
        Ok(Reducer {
            x0: x0.clone(),
            candidates,
            max_bits,
            two_x0: BigInt::from(x0 * 2u32),
        })
    }

    /// Precision of the first `ψ` evaluation, enough for the leading candidates.
    pub fn base_bits(&self) -> u32 {
        self.candidates
            .iter()
            .take(BASE_CANDIDATES)
            .map(|c| c.q.bits() as u32 + GUARD_BITS)
            .max()
            .expect("at least one candidate")
    }

    /// Scan the candidates for one combo; `psi_at(bits)` evaluates `ψ`.
    pub fn reduce(
        &self,
        combo: Combo,
        psi_at: &dyn Fn(u32) -> Result<Ball, PrecisionError>,
    ) -> Result<ReductionOutcome, ReductionError> {
        let mut psi = psi_at(self.base_bits())?;
        let mut last_lower = Dyadic::zero();
        for (attempts, cand) in self.candidates.iter().enumerate() {
            let mut need = cand.q.bits() as u32 + GUARD_BITS;
            loop {
                if psi.prec() < need {
                    psi = psi_at(need)?;
                }
                match classify(&psi, &cand.q_int, &self.two_x0) {
                    Verdict::Pass(lower) => {
                        return Ok(ReductionOutcome {
                            combo,
                            status: Status::Reduced,
                            q_index: cand.index,
                            q_used: cand.q.clone(),
                            attempts,
                            psi,
                            qpsi_lower: lower,
                            y_bound: Some(cand.y_bound),
                        });
                    }
                    Verdict::Fail(lower) => {
                        last_lower = lower;
                        break;
                    }
                    Verdict::Undecided => {
                        need = need.max(psi.prec()) + ESCALATION_BITS;
                        if need > self.max_bits {
                            return Err(PrecisionError::PrecisionExhausted {
                                max_bits: self.max_bits,
                            }
                            .into());
                        }
                    }
                }
            }
        }
        let last = self.candidates.last().expect("at least one candidate");
        Ok(ReductionOutcome {
            combo,
            status: Status::Failed,
            q_index: last.index,
            q_used: last.q.clone(),
            attempts: self.candidates.len() - 1,
            psi,
            qpsi_lower: last_lower,
            y_bound: None,
        })
    }

    /// Re-certify a reduced outcome with `ψ` evaluated at `bits`.
    pub fn verify(&self, outcome: &ReductionOutcome, psi: &Ball) -> bool {
        outcome.status == Status::Reduced
            && matches!(
                classify(psi, &BigInt::from(outcome.q_used.clone()), &self.two_x0),
                Verdict::Pass(_)
            )
    }
}

/// One reduction with a fixed `ψ`; convergents with `q > X₀` are scanned in
/// increasing order, up to `margin` of them after the first.
#[derive(Debug, Clone)]
pub struct ReductionProblem<'a> {
    pub c: Ball,
    pub delta: Ball,
    pub x0: BigUint,
    pub expansion: &'a CFExpansion,
    pub psi: Ball,
    pub combo: Combo,
    pub margin: usize,
}

pub fn deweger_reduce(problem: &ReductionProblem<'_>) -> Result<ReductionOutcome, ReductionError> {
    let e = problem.expansion;
    let first = e.first_above(&problem.x0).ok_or(ReductionError::ExpansionTooShort {
        needed: problem.margin + 1,
        available: 0,
    })?;
    let last = (first + problem.margin).min(e.len() - 1);
    let order: Vec<usize> = (first..=last).collect();
    let theta2 = crate::precision::ln10(256);
    let reducer = Reducer::new(
        e,
        &problem.c,
        &problem.delta,
        &theta2,
        &problem.x0,
        &order,
        problem.psi.prec(),
    )?;
    let psi = problem.psi.clone();
    reducer.reduce(problem.combo, &move |_| Ok(psi.clone()))
}
