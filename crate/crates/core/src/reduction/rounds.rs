//! The three reduction rounds.
//!
//! Round 1 bounds `l` from `Λ₁ = (l+m+k) ln 10 − n ln α − ln(9C_α/a)`,
//! round 2 bounds `m` from `Λ₂` with `a·10^l − (a−b)` in place of `a`, and
//! round 3 bounds `n` from
//! `Λ₃ = k ln 10 − n ln α + ln((a·10^(l+m) − (a−b)·10^m ∓ (b−c)) / 9C_α)`.
//! In each case `ϑ = ln α / ln 10` and `ψ = (ln N − ln 9C_α) / ln 10`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Pow;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cf::CFExpansion;
use super::deweger::{OutcomeReport, Reducer, ReductionOutcome, Status};
use super::{Combo, ReductionError};
use crate::precision::{ln10, Ball, PrecisionError};
use crate::sequence::{alpha_enclosure, BinetData};

/// Denominators of the convergents published for rounds 1, 2 and 3.
pub const PUBLISHED_DENOMINATORS: [&str; 3] = [
    "143694755301644024543505669827725455817494147218758974051600",
    "5135649646898035023105055510310316619786462973990152740408498",
    "21422489321292086600361648904597606825079844749495429580710675",
];

pub fn published_denominator(round: u8) -> BigUint {
    PUBLISHED_DENOMINATORS[usize::from(round) - 1]
        .parse()
        .expect("valid literal")
}

/// Order in which convergents with `q > X₀` are tried for each combo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConvergentPolicy {
    /// The published denominator of the round first, then the rest in
    /// increasing order.
    #[default]
    PublishedFirst,
    /// Increasing order from the first `q > X₀`.
    Increasing,
}

/// Sign of the `(b−c)` term inside `Λ₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Lambda3Sign {
    /// `a·10^(l+m) − (a−b)·10^m − (b−c)`, the value of the concatenation.
    #[default]
    Minus,
    /// `a·10^(l+m) − (a−b)·10^m + (b−c)`.
    Plus,
}

/// The constant `δ` of `|Λ| < c·exp(−δY)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delta {
    Ln10,
    LnAlpha,
}

impl Delta {
    pub fn eval(self, prec: u32) -> Result<Ball, PrecisionError> {
        match self {
            Delta::Ln10 => Ok(ln10(prec)),
            Delta::LnAlpha => alpha_enclosure(prec).ln(),
        }
    }
}

/// `(c, δ)` for each round.
pub fn round_constants(round: u8) -> Result<(u32, Delta), ReductionError> {
    match round {
        1 | 2 => Ok((22, Delta::Ln10)),
        3 => Ok((5, Delta::LnAlpha)),
        _ => Err(ReductionError::InvalidInput(format!("no round {round}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundConfig {
    pub round: u8,
    pub x0: BigUint,
    /// Bound on `l` from round 1; used by rounds 2 and 3.
    pub l_max: u64,
    /// Bound on `m` from round 2; used by round 3.
    pub m_max: u64,
    pub policy: ConvergentPolicy,
    pub sign: Lambda3Sign,
    /// Further convergents tried after the first.
    pub margin: usize,
    pub max_bits: u32,
}

impl RoundConfig {
    pub const DEFAULT_MARGIN: usize = 30;

    pub fn new(round: u8, x0: BigUint) -> Self {
        RoundConfig {
            round,
            x0,
            l_max: 0,
            m_max: 0,
            policy: ConvergentPolicy::default(),
            sign: Lambda3Sign::default(),
            margin: Self::DEFAULT_MARGIN,
            max_bits: 4096,
        }
    }

    pub fn with_bounds(mut self, l_max: u64, m_max: u64) -> Self {
        self.l_max = l_max;
        self.m_max = m_max;
        self
    }

    fn validate(&self) -> Result<(), ReductionError> {
        round_constants(self.round)?;
        if self.round >= 2 && self.l_max == 0 {
            return Err(ReductionError::InvalidInput("rounds 2 and 3 need l_max".into()));
        }
        if self.round == 3 && self.m_max == 0 {
            return Err(ReductionError::InvalidInput("round 3 needs m_max".into()));
        }
        Ok(())
    }
}

/// Scan order of convergent indices under `policy`.
pub fn candidate_order(
    expansion: &CFExpansion,
    x0: &BigUint,
    policy: ConvergentPolicy,
    round: u8,
    margin: usize,
) -> Result<Vec<usize>, ReductionError> {
    let first = expansion.first_above(x0).ok_or(ReductionError::ExpansionTooShort {
        needed: margin + 1,
        available: 0,
    })?;
    let available = expansion.len() - first;
    if available < margin + 1 {
        return Err(ReductionError::ExpansionTooShort {
            needed: margin + 1,
            available,
        });
    }
    let mut order: Vec<usize> = (first..=first + margin).collect();
    if policy == ConvergentPolicy::PublishedFirst {
        if let Some(i) = expansion.index_of_denominator(&published_denominator(round)) {
            if i >= first {
                order.retain(|&j| j != i);
                order.insert(0, i);
                order.truncate(margin + 1);
            }
        }
    }
    Ok(order)
}

/// Constants shared by every `ψ` at one precision.
#[derive(Debug, Clone)]
pub struct PsiContext {
    pub prec: u32,
    ln10: Ball,
    inv_ln10: Ball,
    ln_9c: Ball,
    ln_digit: Vec<Ball>,
}

impl PsiContext {
    pub fn new(prec: u32) -> Result<Self, PrecisionError> {
        let work = prec + 32;
        let c_alpha = BinetData::compute(work)?.c_alpha;
        let ln_9c = c_alpha.mul_int(&BigInt::from(9)).ln()?.rounded(prec);
        let l10 = ln10(work);
        let inv_ln10 = l10.recip()?.rounded(prec);
        let ln_digit = (1..=9)
            .map(|a| Ball::ln_ratio(&BigInt::from(a), &BigInt::from(1), prec))
            .collect::<Result<_, _>>()?;
        Ok(PsiContext {
            prec,
            ln10: l10.rounded(prec),
            inv_ln10,
            ln_9c,
            ln_digit,
        })
    }

    fn ln_a(&self, a: u8) -> &Ball {
        &self.ln_digit[usize::from(a) - 1]
    }

    /// `ψ₁ = (ln a − ln 9C_α) / ln 10`.
    pub fn psi1(&self, a: u8) -> Ball {
        self.ln_a(a).sub(&self.ln_9c).mul(&self.inv_ln10)
    }

    /// `ln(a·10^l − (a−b))`.
    pub fn ln_n2(&self, a: u8, b: u8, l: u64) -> Result<Ball, PrecisionError> {
        let scale = BigInt::from(a) * BigInt::from(10u32).pow(l);
        let n2 = &scale - (i32::from(a) - i32::from(b));
        let r = Ball::ln_ratio(&n2, &scale, self.prec)?;
        Ok(self.ln_a(a).add(&self.ln10.mul_int(&BigInt::from(l))).add(&r))
    }

    /// `ψ₂ = (ln(a·10^l − (a−b)) − ln 9C_α) / ln 10`.
    pub fn psi2(&self, a: u8, b: u8, l: u64) -> Result<Ball, PrecisionError> {
        Ok(self.ln_n2(a, b, l)?.sub(&self.ln_9c).mul(&self.inv_ln10))
    }

    /// `ψ₃` from `ψ₂` of the same `(a, b, l)`:
    /// `ψ₃ = ψ₂ + m + ln(N₃ / (N₂·10^m)) / ln 10`.
    pub fn psi3_from(
        &self,
        psi2: &Ball,
        n2: &BigInt,
        b: u8,
        c: u8,
        m: u64,
        sign: Lambda3Sign,
    ) -> Result<Ball, PrecisionError> {
        let shifted = n2 * BigInt::from(10u32).pow(m);
        let d = i32::from(b) - i32::from(c);
        let n3 = match sign {
            Lambda3Sign::Minus => &shifted - d,
            Lambda3Sign::Plus => &shifted + d,
        };
        let r = Ball::ln_ratio(&n3, &shifted, self.prec)?;
        Ok(psi2.add(&Ball::from_int(m, self.prec)).add(&r.mul(&self.inv_ln10)))
    }

    /// `ψ` of any combo, computed from scratch.
    pub fn psi(&self, combo: Combo, sign: Lambda3Sign) -> Result<Ball, PrecisionError> {
        match combo {
            Combo::Round1 { a } => Ok(self.psi1(a)),
            Combo::Round2 { a, b, l } => self.psi2(a, b, l),
            Combo::Round3 { a, b, c, l, m } => {
                let psi2 = self.psi2(a, b, l)?;
                self.psi3_from(&psi2, &n2_value(a, b, l), b, c, m, sign)
            }
        }
    }
}

/// `a·10^l − (a−b)`.
pub fn n2_value(a: u8, b: u8, l: u64) -> BigInt {
    BigInt::from(a) * BigInt::from(10u32).pow(l) - (i32::from(a) - i32::from(b))
}

/// `ψ` of `combo` at `bits`, reusing `base` when the precision matches.
fn psi_at(base: &PsiContext, combo: Combo, sign: Lambda3Sign, bits: u32) -> Result<Ball, PrecisionError> {
    if bits == base.prec {
        base.psi(combo, sign)
    } else {
        PsiContext::new(bits)?.psi(combo, sign)
    }
}

/// Per-convergent statistics of a round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateUsage {
    pub index: usize,
    #[serde(with = "crate::serde_big::biguint")]
    pub q: BigUint,
    pub y_bound: u64,
    pub combos_reduced: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundResult {
    pub round: u8,
    pub policy: ConvergentPolicy,
    pub lambda3_sign: Option<Lambda3Sign>,
    #[serde(with = "crate::serde_big::biguint")]
    pub x0: BigUint,
    pub c: u32,
    pub delta: Delta,
    pub l_max: Option<u64>,
    pub m_max: Option<u64>,
    pub combos: u64,
    pub max_y: u64,
    /// Convergents in scan order with how many combos each reduced.
    pub candidates: Vec<CandidateUsage>,
    /// Combos not reduced by the first convergent of the scan.
    pub fallbacks: u64,
    /// Smallest combos attaining `max_y`.
    pub worst_cases: Vec<OutcomeReport>,
    /// Smallest combos that needed a fallback convergent.
    pub fallback_examples: Vec<OutcomeReport>,
}

const KEEP: usize = 8;

/// Partial result of a slice of combos; merging is associative and
/// commutative, so the total does not depend on how work was split.
#[derive(Default)]
struct Acc {
    combos: u64,
    max_y: u64,
    worst: Vec<ReductionOutcome>,
    usage: BTreeMap<usize, u64>,
    fallbacks: u64,
    fallback_examples: Vec<ReductionOutcome>,
    failed: Vec<Combo>,
    error: Option<(Combo, ReductionError)>,
}

fn keep_smallest(v: &mut Vec<ReductionOutcome>) {
    v.sort_by_key(|o| o.combo);
    v.truncate(KEEP);
}

impl Acc {
    fn push(&mut self, combo: Combo, r: Result<ReductionOutcome, ReductionError>) {
        self.combos += 1;
        let o = match r {
            Ok(o) => o,
            Err(e) => {
                if self.error.as_ref().is_none_or(|(c, _)| combo < *c) {
                    self.error = Some((combo, e));
                }
                return;
            }
        };
        if o.status == Status::Failed {
            self.failed.push(combo);
            return;
        }
        *self.usage.entry(o.q_index).or_default() += 1;
        if o.attempts > 0 {
            self.fallbacks += 1;
            if self.fallback_examples.len() < KEEP {
                self.fallback_examples.push(o.clone());
            }
        }
        let y = o.y_bound.expect("reduced outcome has a bound");
        if y > self.max_y {
            self.max_y = y;
            self.worst.clear();
        }
        if y == self.max_y && self.worst.len() < KEEP {
            self.worst.push(o);
        }
    }

    fn merge(mut self, mut other: Acc) -> Acc {
        self.combos += other.combos;
        match self.max_y.cmp(&other.max_y) {
            std::cmp::Ordering::Less => {
                self.max_y = other.max_y;
                self.worst = std::mem::take(&mut other.worst);
            }
            std::cmp::Ordering::Equal => self.worst.append(&mut other.worst),
            std::cmp::Ordering::Greater => {}
        }
        keep_smallest(&mut self.worst);
        for (k, v) in other.usage {
            *self.usage.entry(k).or_default() += v;
        }
        self.fallbacks += other.fallbacks;
        self.fallback_examples.append(&mut other.fallback_examples);
        keep_smallest(&mut self.fallback_examples);
        self.failed.append(&mut other.failed);
        self.error = match (self.error, other.error) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Every combo of `cfg`, grouped by the prefix `(a)` or `(a, b, l)` that
/// shares work.
fn groups(cfg: &RoundConfig) -> Vec<(u8, u8, u64)> {
    match cfg.round {
        1 => (1..=9).map(|a| (a, 0, 0)).collect(),
        _ => {
            let mut g = Vec::new();
            for a in 1..=9u8 {
                for b in 0..=9u8 {
                    for l in 1..=cfg.l_max {
                        g.push((a, b, l));
                    }
                }
            }
            g
        }
    }
}

fn run_group(cfg: &RoundConfig, reducer: &Reducer, ctx: &PsiContext, (a, b, l): (u8, u8, u64)) -> Acc {
    let mut acc = Acc::default();
    let sign = cfg.sign;
    match cfg.round {
        1 => {
            let combo = Combo::Round1 { a };
            acc.push(combo, reducer.reduce(combo, &|bits| psi_at(ctx, combo, sign, bits)));
        }
        2 => {
            let combo = Combo::Round2 { a, b, l };
            acc.push(combo, reducer.reduce(combo, &|bits| psi_at(ctx, combo, sign, bits)));
        }
        _ => {
            let n2 = n2_value(a, b, l);
            let psi2 = match ctx.psi2(a, b, l) {
                Ok(p) => p,
                Err(e) => {
                    acc.push(Combo::Round3 { a, b, c: 0, l, m: 1 }, Err(e.into()));
                    return acc;
                }
            };
            for c in 0..=9u8 {
                for m in 1..=cfg.m_max {
                    let combo = Combo::Round3 { a, b, c, l, m };
                    let psi = |bits: u32| {
                        if bits == ctx.prec {
                            ctx.psi3_from(&psi2, &n2, b, c, m, sign)
                        } else {
                            psi_at(ctx, combo, sign, bits)
                        }
                    };
                    acc.push(combo, reducer.reduce(combo, &psi));
                }
            }
        }
    }
    acc
}

/// Reduce every combo of one round.
///
/// Returns [`ReductionError::RoundFailed`] if any combo is not reduced by
/// the scanned convergents.
pub fn run_round(cfg: &RoundConfig, expansion: &CFExpansion) -> Result<RoundResult, ReductionError> {
    cfg.validate()?;
    let (c, delta) = round_constants(cfg.round)?;
    let (reducer, ctx) = round_reducer(cfg, expansion)?;
    let acc = groups(cfg)
        .into_par_iter()
        .map(|g| run_group(cfg, &reducer, &ctx, g))
        .reduce(Acc::default, Acc::merge);
    if let Some((_, e)) = acc.error {
        return Err(e);
    }
    if !acc.failed.is_empty() {
        let mut failures = acc.failed;
        failures.sort();
        return Err(ReductionError::RoundFailed {
            round: cfg.round,
            failures,
        });
    }
    let report = |v: &[ReductionOutcome]| v.iter().map(|o| o.report(&cfg.x0)).collect();
    Ok(RoundResult {
        round: cfg.round,
        policy: cfg.policy,
        lambda3_sign: (cfg.round == 3).then_some(cfg.sign),
        x0: cfg.x0.clone(),
        c,
        delta,
        l_max: (cfg.round >= 2).then_some(cfg.l_max),
        m_max: (cfg.round == 3).then_some(cfg.m_max),
        combos: acc.combos,
        max_y: acc.max_y,
        candidates: reducer
            .candidates
            .iter()
            .map(|cand| CandidateUsage {
                index: cand.index,
                q: cand.q.clone(),
                y_bound: cand.y_bound,
                combos_reduced: acc.usage.get(&cand.index).copied().unwrap_or(0),
            })
            .collect(),
        fallbacks: acc.fallbacks,
        worst_cases: report(&acc.worst),
        fallback_examples: report(&acc.fallback_examples),
    })
}

/// Reducer and `ψ` context for a round, for callers that reduce single
/// combos themselves.
pub fn round_reducer(cfg: &RoundConfig, expansion: &CFExpansion) -> Result<(Reducer, PsiContext), ReductionError> {
    let (c, delta) = round_constants(cfg.round)?;
    let order = candidate_order(expansion, &cfg.x0, cfg.policy, cfg.round, cfg.margin)?;
    let prec = 256;
    let reducer = Reducer::new(
        expansion,
        &Ball::from_int(c, prec),
        &delta.eval(prec)?,
        &ln10(prec),
        &cfg.x0,
        &order,
        cfg.max_bits,
    )?;
    if reducer.base_bits() > cfg.max_bits {
        return Err(PrecisionError::PrecisionExhausted { max_bits: cfg.max_bits }.into());
    }
    let ctx = PsiContext::new(reducer.base_bits())?;
    Ok((reducer, ctx))
}
