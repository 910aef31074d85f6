//! Certified arbitrary-precision real arithmetic.
//!
//! [`Ball`] is a midpoint–radius enclosure over exact [`Dyadic`] numbers.
//! [`refine`] reruns a computation at growing precision until a caller
//! predicate certifies the result.

mod ball;
mod dyadic;
mod elementary;

pub use ball::{Ball, Certified};
pub use dyadic::{parse_decimal_ratio, Dyadic, Round};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrecisionError {
    #[error("argument interval is not strictly positive")]
    NonPositive,
    #[error("divisor interval contains zero")]
    ContainsZero,
    #[error("ball radius is too large to identify the nearest integer")]
    RadiusTooLarge,
    #[error("argument too large for exp")]
    Overflow,
    #[error("precision exhausted at {max_bits} bits without certification")]
    PrecisionExhausted { max_bits: u32 },
    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),
    #[error("cannot parse decimal literal {0:?}")]
    Parse(String),
}

/// Precision schedule for [`refine`]: `initial_bits`, then multiplied by
/// `growth` until `max_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub initial_bits: u32,
    pub max_bits: u32,
    pub growth: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial_bits: 256,
            max_bits: 16384,
            growth: 2.0,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(initial_bits: u32, max_bits: u32, growth: f64) -> Result<Self, PrecisionError> {
        let p = PrecisionPolicy {
            initial_bits,
            max_bits,
            growth,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PrecisionError> {
        if self.initial_bits == 0 {
            return Err(PrecisionError::InvalidPolicy("initial_bits must be positive".into()));
        }
        if self.initial_bits > self.max_bits {
            return Err(PrecisionError::InvalidPolicy(format!(
                "initial_bits {} exceeds max_bits {}",
                self.initial_bits, self.max_bits
            )));
        }
        if self.growth.is_nan() || self.growth <= 1.0 || !self.growth.is_finite() {
            return Err(PrecisionError::InvalidPolicy(format!(
                "growth {} must be a finite multiplier > 1",
                self.growth
            )));
        }
        Ok(())
    }

    /// The precision schedule, ending exactly at `max_bits`.
    pub fn schedule(&self) -> Vec<u32> {
        let mut out = vec![self.initial_bits];
        let mut cur = self.initial_bits;
        while cur < self.max_bits {
            let next = ((cur as f64) * self.growth).ceil() as u64;
            cur = next.max(cur as u64 + 1).min(self.max_bits as u64) as u32;
            out.push(cur);
        }
        out
    }

    /// Same policy starting no lower than `bits`.
    pub fn at_least(&self, bits: u32) -> Self {
        let initial_bits = self.initial_bits.max(bits).min(self.max_bits);
        PrecisionPolicy { initial_bits, ..*self }
    }
}

/// Run `compute` at each precision of `policy` until `accept` holds.
///
/// Errors from `compute` other than [`PrecisionError::ContainsZero`],
/// [`PrecisionError::NonPositive`] and [`PrecisionError::RadiusTooLarge`]
/// abort immediately; those three are treated as "not yet certified" since
/// they usually vanish at higher precision.
pub fn refine<T, F, P>(policy: &PrecisionPolicy, mut compute: F, mut accept: P) -> Result<(T, u32), PrecisionError>
where
    F: FnMut(u32) -> Result<T, PrecisionError>,
    P: FnMut(&T) -> bool,
{
    policy.validate()?;
    for bits in policy.schedule() {
        match compute(bits) {
            Ok(v) if accept(&v) => return Ok((v, bits)),
            Ok(_) => {}
            Err(PrecisionError::ContainsZero | PrecisionError::NonPositive | PrecisionError::RadiusTooLarge) => {}
            Err(e) => return Err(e),
        }
    }
    Err(PrecisionError::PrecisionExhausted {
        max_bits: policy.max_bits,
    })
}

/// Decimal rendering of a [`Ball`] for reports: midpoint and a radius that
/// already covers the rounding of the printed midpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    pub mid: String,
    pub rad: String,
}

impl Enclosure {
    pub const DIGITS: u32 = 30;

    pub fn of(b: &Ball) -> Self {
        Self::with_digits(b, Self::DIGITS)
    }

    pub fn with_digits(b: &Ball, digits: u32) -> Self {
        let (mid, rad) = b.to_decimal_pair(digits);
        Enclosure { mid, rad }
    }

    /// Reconstruct a ball that contains the original one.
    pub fn to_ball(&self, prec: u32) -> Result<Ball, PrecisionError> {
        let m = Ball::from_decimal(&self.mid, prec)?;
        let r = Ball::from_decimal(&self.rad, prec)?;
        let rad = m.rad().add(&r.hi());
        Ok(Ball::with_radius(m.mid().clone(), rad, prec))
    }
}

/// `ln 2` at `prec` bits.
pub fn ln2(prec: u32) -> Ball {
    Ball::ln_ratio(&2.into(), &1.into(), prec).expect("positive")
}

/// `ln 10` at `prec` bits.
pub fn ln10(prec: u32) -> Ball {
    Ball::ln_ratio(&10.into(), &1.into(), prec).expect("positive")
}
