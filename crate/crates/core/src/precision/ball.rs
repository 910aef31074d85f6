use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::{parse_decimal_ratio, Dyadic, Round};
use super::elementary;
use super::PrecisionError;

/// Significant bits kept in a radius; radii are always rounded upward.
const RAD_BITS: u32 = 32;

/// A real number known to lie in `[mid - rad, mid + rad]`.
///
/// Arithmetic rounds the midpoint to `prec` bits and widens the radius by
/// the rounding error, so the interval of every result contains the exact
/// result of the operation applied to any points of the input intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

/// Outcome of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certified {
    Less,
    Greater,
    Undecidable,
}

fn up(x: Dyadic) -> Dyadic {
    x.round(RAD_BITS, Round::Up)
}

impl Ball {
    /// Exact ball; the midpoint is kept as given even if wider than `prec`.
    pub fn exact(mid: Dyadic, prec: u32) -> Self {
        Ball {
            mid,
            rad: Dyadic::zero(),
            prec,
        }
    }

    pub fn with_radius(mid: Dyadic, rad: Dyadic, prec: u32) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        Ball {
            mid,
            rad: up(rad),
            prec,
        }
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Self::exact(Dyadic::from_int(n), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::exact(Dyadic::one(), prec)
    }

    /// Enclosure of `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Self, PrecisionError> {
        if den.is_zero() {
            return Err(PrecisionError::ContainsZero);
        }
        let n = Dyadic::from_int(num.clone());
        let d = Dyadic::from_int(den.clone());
        let q = Dyadic::div(&n, &d, prec, Round::Nearest);
        // |n/d - q| = |n - q·d| / |d|, computed exactly then rounded up
        let resid = n.sub(&q.mul(&d)).abs();
        let rad = if resid.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::div(&resid, &d.abs(), RAD_BITS, Round::Up)
        };
        Ok(Ball { mid: q, rad, prec })
    }

    /// Enclosure of a decimal literal such as `"8.59e13"`.
    pub fn from_decimal(s: &str, prec: u32) -> Result<Self, PrecisionError> {
        let (n, d) = parse_decimal_ratio(s).ok_or_else(|| PrecisionError::Parse(s.to_string()))?;
        Self::from_ratio(&n, &d, prec)
    }

    /// Exact enclosure of an `f64` value.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        Self::exact(Dyadic::from_f64(x).expect("finite f64"), prec)
    }

    /// Smallest ball containing both endpoints.
    pub fn from_endpoints(lo: &Dyadic, hi: &Dyadic, prec: u32) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mid = lo.add(hi).mul_pow2(-1).round(prec.max(2), Round::Nearest);
        let rad = hi.sub(&mid).max(mid.sub(lo));
        Self::with_radius(mid, rad, prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.prec = prec;
        self
    }

    /// Round the midpoint to `prec` bits, folding the rounding into the radius.
    pub fn rounded(&self, prec: u32) -> Self {
        Self::finish(self.mid.clone(), self.rad.clone(), prec)
    }

    pub fn lo(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn hi(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.lo() <= *x && *x <= self.hi()
    }

    /// `other` lies inside `self`.
    pub fn contains_ball(&self, other: &Ball) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Dyadic::zero())
    }

    pub fn is_positive(&self) -> bool {
        self.lo().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi().is_negative()
    }

    /// Bits of relative accuracy, roughly `log2(|mid| / rad)`.
    pub fn accuracy_bits(&self) -> i64 {
        if self.rad.is_zero() {
            return i64::MAX;
        }
        if self.mid.is_zero() {
            return i64::MIN;
        }
        self.mid.msb() - self.rad.msb()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Round the midpoint to `prec` bits and add `extra` plus the rounding
    /// error to the radius.
    fn finish(exact_mid: Dyadic, extra: Dyadic, prec: u32) -> Self {
        let mid = exact_mid.round(prec, Round::Nearest);
        let err = exact_mid.sub(&mid).abs();
        Ball {
            mid,
            rad: up(extra.add(&err)),
            prec,
        }
    }

    pub fn neg(&self) -> Self {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        if self.mid.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &Ball) -> Self {
        let prec = self.prec.max(other.prec);
        Self::finish(self.mid.add(&other.mid), self.rad.add(&other.rad), prec)
    }

    pub fn sub(&self, other: &Ball) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Ball) -> Self {
        let prec = self.prec.max(other.prec);
        let prop = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        Self::finish(self.mid.mul(&other.mid), prop, prec)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let kd = Dyadic::from_int(k.clone());
        Self::finish(self.mid.mul(&kd), self.rad.mul(&kd.abs()), self.prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Ball {
            mid: self.mid.mul_pow2(k),
            rad: self.rad.mul_pow2(k),
            prec: self.prec,
        }
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    pub fn div(&self, other: &Ball) -> Result<Self, PrecisionError> {
        let prec = self.prec.max(other.prec);
        let den_lo = other.mid.abs().sub(&other.rad);
        if !den_lo.is_positive() {
            return Err(PrecisionError::ContainsZero);
        }
        let q = Dyadic::div(&self.mid, &other.mid, prec, Round::Nearest);
        // rounding error of q: |a - q·b| / |b|
        let resid = self.mid.sub(&q.mul(&other.mid)).abs();
        let q_err = if resid.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::div(&resid, &other.mid.abs(), RAD_BITS, Round::Up)
        };
        // |a/b - ma/mb| <= (ra + |ma/mb|·rb) / (|mb| - rb)
        let prop = if self.rad.is_zero() && other.rad.is_zero() {
            Dyadic::zero()
        } else {
            let num = self.rad.add(&q.abs().add(&q_err).mul(&other.rad));
            Dyadic::div(&up(num), &den_lo.round(RAD_BITS + 8, Round::Down), RAD_BITS, Round::Up)
        };
        Ok(Ball {
            mid: q,
            rad: up(q_err.add(&prop)),
            prec,
        })
    }

    pub fn recip(&self) -> Result<Self, PrecisionError> {
        Ball::one(self.prec).div(self)
    }

    pub fn div_int(&self, k: &BigInt) -> Result<Self, PrecisionError> {
        self.div(&Ball::from_int(k.clone(), self.prec))
    }

    pub fn powi(&self, n: i64) -> Result<Self, PrecisionError> {
        let mut base = self.clone();
        let mut e = n.unsigned_abs();
        let mut acc = Ball::one(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }

    pub fn sqrt(&self) -> Result<Self, PrecisionError> {
        if self.is_exact() && self.mid.is_zero() {
            return Ok(self.clone());
        }
        if !self.lo().is_positive() {
            return Err(PrecisionError::NonPositive);
        }
        let w = (self.prec as i64 + 8 - self.mid.msb() / 2).max(8) as u64;
        let f = elementary::sqrt_dyadic(&self.mid, w);
        let s_lo = f.mid().sub(&f.err());
        // |sqrt x - sqrt m| <= r / sqrt m
        let prop = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::div(&self.rad, &s_lo, RAD_BITS, Round::Up)
        };
        Ok(Self::finish(f.mid(), f.err().add(&prop), self.prec))
    }

    /// Natural logarithm.
    pub fn ln(&self) -> Result<Self, PrecisionError> {
        let lo = self.lo();
        if !lo.is_positive() {
            return Err(PrecisionError::NonPositive);
        }
        if self.mid == Dyadic::one() && self.rad.is_zero() {
            return Ok(Ball::zero(self.prec));
        }
        let w = self.prec as u64 + 16;
        let f = elementary::ln_dyadic(&self.mid, w);
        // |ln x - ln m| <= r / (m - r)
        let prop = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::div(&self.rad, &lo.round(RAD_BITS + 8, Round::Down), RAD_BITS, Round::Up)
        };
        Ok(Self::finish(f.mid(), f.err().add(&prop), self.prec))
    }

    /// `ln(num / den)` for positive integers, with no intermediate rounding
    /// of the ratio. Accurate when the ratio is very close to one.
    pub fn ln_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Self, PrecisionError> {
        if !num.is_positive() || !den.is_positive() {
            return Err(PrecisionError::NonPositive);
        }
        if num == den {
            return Ok(Ball::zero(prec));
        }
        let w = prec as u64 + 16;
        let f = elementary::ln_ratio(num, den, w);
        Ok(Self::finish(f.mid(), f.err(), prec))
    }

    pub fn exp(&self) -> Result<Self, PrecisionError> {
        if self.mid.to_f64().abs() > (1u64 << 20) as f64 {
            return Err(PrecisionError::Overflow);
        }
        if self.rad > Dyadic::pow2(-1) {
            // monotone: evaluate both endpoints
            let lo = Ball::exact(self.lo(), self.prec).exp()?;
            let hi = Ball::exact(self.hi(), self.prec).exp()?;
            return Ok(Ball::from_endpoints(&lo.lo(), &hi.hi(), self.prec));
        }
        let w = self.prec as u64 + 16;
        let (f, k) = elementary::exp_dyadic(&self.mid, w);
        let mid = f.mid().mul_pow2(k);
        let err = f.err().mul_pow2(k);
        // |e^x - e^m| <= e^m (e^r - 1) <= 2 r e^m for r <= 1/2
        let prop = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            mid.add(&err).mul(&self.rad).mul_pow2(1)
        };
        Ok(Self::finish(mid, err.add(&prop), self.prec))
    }

    /// `x^y = exp(y ln x)` for positive `x`.
    pub fn pow(&self, y: &Ball) -> Result<Self, PrecisionError> {
        self.ln()?.mul(y).exp()
    }

    /// Three-way comparison that only answers when the intervals are disjoint.
    pub fn cmp_certified(&self, other: &Ball) -> Certified {
        if self.hi() < other.lo() {
            Certified::Less
        } else if self.lo() > other.hi() {
            Certified::Greater
        } else {
            Certified::Undecidable
        }
    }

    /// `Some(true)` if `self < other` everywhere, `Some(false)` if
    /// `self >= other` everywhere, `None` otherwise.
    pub fn certify_lt(&self, other: &Ball) -> Option<bool> {
        if self.hi() < other.lo() {
            Some(true)
        } else if self.lo() >= other.hi() {
            Some(false)
        } else {
            None
        }
    }

    /// As [`certify_lt`](Self::certify_lt) for `<=`.
    pub fn certify_le(&self, other: &Ball) -> Option<bool> {
        if self.hi() <= other.lo() {
            Some(true)
        } else if self.lo() > other.hi() {
            Some(false)
        } else {
            None
        }
    }

    /// Distance to the nearest integer, `‖x‖`.
    ///
    /// Returns a ball enclosing `‖x‖` for every `x` in `self` and a sound
    /// lower bound `max(0, ‖mid‖ - rad)`.
    pub fn nearest_int_distance(&self) -> Result<(Ball, Dyadic), PrecisionError> {
        if self.rad >= Dyadic::pow2(-2) {
            return Err(PrecisionError::RadiusTooLarge);
        }
        let n = self.mid.round_int();
        let d = self.mid.sub(&Dyadic::from_int(n)).abs();
        let lower = d.sub(&self.rad).max(Dyadic::zero());
        Ok((
            Ball {
                mid: d,
                rad: self.rad.clone(),
                prec: self.prec,
            },
            lower,
        ))
    }

    /// Integer part certified when the interval does not straddle an integer.
    pub fn floor_certified(&self) -> Option<BigInt> {
        let a = self.lo().floor();
        let b = self.hi().floor();
        (a == b).then_some(a)
    }

    /// Decimal rendering `(mid, rad)` with `digits` significant digits;
    /// the radius string is rounded up and widened by the midpoint rounding.
    pub fn to_decimal_pair(&self, digits: u32) -> (String, String) {
        let mid_s = self.mid.to_sci_string(digits, Round::Nearest);
        let (n, d) = parse_decimal_ratio(&mid_s).expect("own output parses");
        let shown = Dyadic::div(
            &Dyadic::from_int(n),
            &Dyadic::from_int(d.clone()),
            self.prec + 64,
            Round::Nearest,
        );
        // conversion error of the printed midpoint plus the division slack
        let slack = Dyadic::pow2(shown.msb() - self.prec as i64 - 60);
        let rad = self.rad.add(&shown.sub(&self.mid).abs()).add(&slack);
        (mid_s, up(rad).to_sci_string(4, Round::Up))
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, r) = self.to_decimal_pair(20);
        write!(f, "[{m} +/- {r}]")
    }
}
