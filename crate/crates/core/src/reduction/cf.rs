//! Continued fractions of a real number known only through a ball.
//!
//! Both endpoints are expanded exactly by Euclid's algorithm. The set of
//! reals whose expansion starts with `a₀, …, a_k` is an interval, so every
//! quotient on which the two endpoints agree is a quotient of every point
//! of the ball.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::ReductionError;
use crate::precision::{Ball, Dyadic, Enclosure, PrecisionError, PrecisionPolicy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFExpansion {
    pub theta: Ball,
    pub partial_quotients: Vec<BigInt>,
    /// `(p_i, q_i)` for every certified quotient.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// Index of the last certified quotient.
    pub certified_upto: usize,
}

/// `x` as `num / den` with `den` a power of two.
fn dyadic_ratio(x: &Dyadic) -> (BigInt, BigInt) {
    let e = x.exponent();
    if e >= 0 {
        (x.mantissa() << e as u64, BigInt::one())
    } else {
        (x.mantissa().clone(), BigInt::one() << (-e) as u64)
    }
}

/// Partial quotients shared by every point of `theta`, at most `max_terms`.
pub fn certified_quotients(theta: &Ball, max_terms: usize) -> Vec<BigInt> {
    let (mut u1, mut v1) = dyadic_ratio(&theta.lo());
    let (mut u2, mut v2) = dyadic_ratio(&theta.hi());
    let mut out = Vec::new();
    while out.len() < max_terms && !v1.is_zero() && !v2.is_zero() {
        let a1 = u1.div_floor(&v1);
        let a2 = u2.div_floor(&v2);
        if a1 != a2 {
            break;
        }
        let r1 = &u1 - &a1 * &v1;
        let r2 = &u2 - &a2 * &v2;
        u1 = std::mem::replace(&mut v1, r1);
        u2 = std::mem::replace(&mut v2, r2);
        out.push(a1);
    }
    out
}

/// Convergents from partial quotients, seeded with `p₋₂ = 0, p₋₁ = 1,
/// q₋₂ = 1, q₋₁ = 0`.
pub fn convergents(quotients: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let (mut p2, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q2, mut q1) = (BigInt::one(), BigInt::zero());
    quotients
        .iter()
        .map(|a| {
            let p = a * &p1 + &p2;
            let q = a * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, p.clone());
            q2 = std::mem::replace(&mut q1, q.clone());
            (p, q)
        })
        .collect()
}

impl CFExpansion {
    /// Expansion of everything `theta` certifies, with no target. The
    /// expansion stops at the first index whose approximation bound the ball
    /// cannot decide.
    pub fn of_ball(theta: &Ball, max_terms: usize) -> Self {
        let partial_quotients = certified_quotients(theta, max_terms);
        let convergents = convergents(&partial_quotients);
        let mut e = CFExpansion {
            theta: theta.clone(),
            certified_upto: partial_quotients.len().saturating_sub(1),
            partial_quotients,
            convergents,
        };
        if let Some(i) = (0..e.len().saturating_sub(1)).find(|&i| !e.approximation_certified(i)) {
            e.truncate(i + 1);
        }
        e
    }

    /// `|θ − p_i/q_i| < 1/(q_i q_{i+1})`, decided on the ball.
    fn approximation_certified(&self, i: usize) -> bool {
        let prec = self.theta.prec();
        let (p, q) = &self.convergents[i];
        let q_next = &self.convergents[i + 1].1;
        let err = self.theta.mul_int(q).sub(&Ball::from_int(p.clone(), prec)).abs();
        err.mul_int(q_next).certify_lt(&Ball::one(prec)) == Some(true)
    }

    pub fn len(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_quotients.is_empty()
    }

    pub fn q(&self, i: usize) -> BigUint {
        self.convergents[i].1.to_biguint().expect("denominators are positive")
    }

    /// First index with `q_i > bound`.
    pub fn first_above(&self, bound: &BigUint) -> Option<usize> {
        let b = BigInt::from(bound.clone());
        self.convergents.iter().position(|(_, q)| q > &b)
    }

    /// Index of a convergent whose denominator equals `q`.
    pub fn index_of_denominator(&self, q: &BigUint) -> Option<usize> {
        let q = BigInt::from(q.clone());
        self.convergents.iter().position(|(_, d)| d == &q)
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.partial_quotients.truncate(len);
        self.convergents.truncate(len);
        self.certified_upto = len.saturating_sub(1);
    }

    /// Recurrence, coprimality, and `|θ − p_i/q_i| < 1/(q_i q_{i+1})` for
    /// every index that has a successor.
    pub fn check_invariants(&self) -> Result<(), String> {
        let recomputed = convergents(&self.partial_quotients);
        if recomputed != self.convergents {
            return Err("convergents do not follow the recurrence".into());
        }
        for (i, (p, q)) in self.convergents.iter().enumerate() {
            if !p.gcd(q).is_one() {
                return Err(format!("gcd(p_{i}, q_{i}) != 1"));
            }
            if i > 0 && self.partial_quotients[i] < BigInt::one() {
                return Err(format!("a_{i} < 1"));
            }
        }
        for i in 0..self.convergents.len().saturating_sub(1) {
            if !self.approximation_certified(i) {
                return Err(format!("approximation bound not certified at index {i}"));
            }
        }
        Ok(())
    }

    pub fn report(&self, digits: u32) -> CFReport {
        CFReport {
            theta: Enclosure::with_digits(&self.theta, digits),
            certified_upto: self.certified_upto,
            convergents: self
                .convergents
                .iter()
                .zip(&self.partial_quotients)
                .enumerate()
                .map(|(index, ((p, q), a))| ConvergentEntry {
                    index,
                    a: a.to_string(),
                    p: p.to_string(),
                    q: q.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergentEntry {
    pub index: usize,
    pub a: String,
    pub p: String,
    pub q: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFReport {
    pub theta: Enclosure,
    pub certified_upto: usize,
    pub convergents: Vec<ConvergentEntry>,
}

/// Expansion up to the first `q > q_target` plus `margin` further terms.
///
/// The result is truncated to exactly that length, so it does not depend on
/// how precise `theta` was, and its invariants are checked before returning.
pub fn cf_expand(theta: &Ball, q_target: &BigUint, margin: usize) -> Result<CFExpansion, ReductionError> {
    let mut e = CFExpansion::of_ball(theta, usize::MAX);
    let first = e.first_above(q_target).ok_or(ReductionError::ExpansionTooShort {
        needed: margin + 1,
        available: 0,
    })?;
    let want = first + margin + 1;
    // one spare quotient so the approximation bound of the last kept index
    // is checked against a certified successor
    if e.len() < want + 1 {
        return Err(ReductionError::ExpansionTooShort {
            needed: margin + 1,
            available: e.len().saturating_sub(first + 1),
        });
    }
    e.truncate(want + 1);
    e.check_invariants().map_err(ReductionError::CertificationFailed)?;
    e.truncate(want);
    Ok(e)
}

/// [`cf_expand`] with `theta` recomputed along the precision schedule until
/// the expansion is long enough.
pub fn cf_expand_with<F>(
    theta: F,
    q_target: &BigUint,
    margin: usize,
    policy: &PrecisionPolicy,
) -> Result<CFExpansion, ReductionError>
where
    F: Fn(u32) -> Result<Ball, ReductionError>,
{
    policy.validate()?;
    for bits in policy.schedule() {
        match cf_expand(&theta(bits)?, q_target, margin) {
            Ok(e) => return Ok(e),
            Err(ReductionError::ExpansionTooShort { .. } | ReductionError::CertificationFailed(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Err(PrecisionError::PrecisionExhausted {
        max_bits: policy.max_bits,
    }
    .into())
}
