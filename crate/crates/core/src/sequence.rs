//! Exact Padovan terms and certified data for the Binet representation
//! `P_n = C_α α^n + C_β β^n + C_γ γ^n` over the roots of `x³ − x − 1`.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::precision::{refine, Ball, Dyadic, PrecisionError, PrecisionPolicy, Round};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error(transparent)]
    Precision(#[from] PrecisionError),
    #[error("index must be at least 1, got {0}")]
    IndexTooSmall(u64),
    #[error("certification of {0} failed")]
    CertificationFailed(String),
}

/// A third-order recurrence `u_{n+3} = u_{n+1} + u_n` with chosen initial terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceDef {
    pub initial_terms: [u64; 3],
}

impl Default for RecurrenceDef {
    fn default() -> Self {
        Self::padovan()
    }
}

impl RecurrenceDef {
    pub fn padovan() -> Self {
        RecurrenceDef {
            initial_terms: [1, 1, 1],
        }
    }

    /// Perrin numbers `3, 0, 2, …`.
    pub fn perrin() -> Self {
        RecurrenceDef {
            initial_terms: [3, 0, 2],
        }
    }

    pub fn is_padovan(&self) -> bool {
        self.initial_terms == [1, 1, 1]
    }

    pub fn term(&self, n: u64) -> BigUint {
        let [a, b, c] = self.initial_terms.map(BigUint::from);
        if n < 3 {
            return [a, b, c][n as usize].clone();
        }
        let mut w = [a, b, c];
        for _ in 3..=n {
            let next = &w[1] + &w[0];
            w = [w[1].clone(), w[2].clone(), next];
        }
        w[2].clone()
    }

    /// Iterator over `(n, u_n)` starting at `n = 0`.
    pub fn iter(&self) -> Terms {
        let [a, b, c] = self.initial_terms.map(BigUint::from);
        Terms {
            window: [a, b, c],
            n: 0,
        }
    }
}

pub struct Terms {
    window: [BigUint; 3],
    n: u64,
}

impl Iterator for Terms {
    type Item = (u64, BigUint);

    fn next(&mut self) -> Option<Self::Item> {
        let out = (self.n, self.window[0].clone());
        let next = &self.window[1] + &self.window[0];
        let [_, b, c] = std::mem::take(&mut self.window);
        self.window = [b, c, next];
        self.n += 1;
        Some(out)
    }
}

/// `P_n` with `P_0 = P_1 = P_2 = 1`.
pub fn padovan_exact(n: u64) -> BigUint {
    RecurrenceDef::padovan().term(n)
}

pub fn decimal_digits(x: &BigUint) -> u64 {
    if x.is_zero() {
        1
    } else {
        x.to_str_radix(10).len() as u64
    }
}

/// Certified constants of the Binet formula at one working precision.
#[derive(Debug, Clone)]
pub struct BinetData {
    pub alpha: Ball,
    /// `|β| = |γ| = α^(-1/2)`.
    pub beta_modulus: Ball,
    pub c_alpha: Ball,
    /// `|C_β| = |C_γ| = (23 C_α)^(-1/2)`, from `C_α C_β C_γ = 1/23`.
    pub c_beta_modulus: Ball,
    pub precision_bits: u32,
}

/// Sign of `x³ − x − 1` at an exact dyadic point.
fn cubic_sign(x: &Dyadic) -> i32 {
    let x3 = x.mul(x).mul(x);
    x3.sub(x).sub(&Dyadic::one()).signum()
}

/// Sign of `num³ − num·den² − den³`, i.e. of `f(num/den)` for `den > 0`.
fn cubic_sign_ratio(num: i64, den: i64) -> i32 {
    let (n, d) = (BigInt::from(num), BigInt::from(den));
    let v = &n * &n * &n - &n * &d * &d - &d * &d * &d;
    match v.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Certified enclosure of the real root of `x³ − x − 1`.
///
/// Bisection on a dyadic bracket inside `[1.32, 1.33]`, then Newton steps;
/// the final interval is certified by exact sign evaluation at both ends.
pub fn alpha_enclosure(prec: u32) -> Ball {
    debug_assert!(cubic_sign_ratio(132, 100) < 0 && cubic_sign_ratio(133, 100) > 0);
    let mut lo = Dyadic::new(BigInt::from(169), -7);
    let mut hi = Dyadic::new(BigInt::from(170), -7);
    debug_assert!(cubic_sign(&lo) < 0 && cubic_sign(&hi) > 0);
    for _ in 0..40 {
        let m = lo.add(&hi).mul_pow2(-1);
        if cubic_sign(&m) < 0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    // Newton from the bisection midpoint
    let work = prec + 16;
    let mut x = lo.add(&hi).mul_pow2(-1);
    let mut acc = 40u32;
    while acc < work + 8 {
        let fx = x.mul(&x).mul(&x).sub(&x).sub(&Dyadic::one());
        let dfx = x.mul(&x).mul_int(&BigInt::from(3)).sub(&Dyadic::one());
        let step = Dyadic::div(&fx, &dfx, (2 * acc).min(work + 16), Round::Nearest);
        x = x.sub(&step).round(work + 16, Round::Nearest);
        acc *= 2;
    }
    let x = x.round(work, Round::Nearest);
    let mut eps = Dyadic::pow2(-(work as i64) + 2);
    loop {
        let l = x.sub(&eps);
        let h = x.add(&eps);
        if cubic_sign(&l) < 0 && cubic_sign(&h) > 0 {
            return Ball::with_radius(x, eps, prec);
        }
        eps = eps.mul_pow2(4);
    }
}

impl BinetData {
    pub fn compute(prec: u32) -> Result<Self, PrecisionError> {
        let alpha = alpha_enclosure(prec);
        let one = Ball::one(prec);
        let three = Ball::from_int(3, prec);
        let denom = alpha.sqr().neg().add(&three.mul(&alpha)).add(&one);
        let c_alpha = alpha.add(&one).div(&denom)?;
        let beta_modulus = alpha.sqrt()?.recip()?;
        let c_beta_modulus = c_alpha.mul_int(&BigInt::from(23)).sqrt()?.recip()?;
        Ok(BinetData {
            alpha,
            beta_modulus,
            c_alpha,
            c_beta_modulus,
            precision_bits: prec,
        })
    }

    /// Residuals of `α³ − α − 1` and `23C³ − 23C² + 6C − 1`; both must contain 0.
    pub fn residuals(&self) -> (Ball, Ball) {
        let p = self.precision_bits;
        let a = &self.alpha;
        let ra = a.powi(3).expect("nonneg power").sub(a).sub(&Ball::one(p));
        let c = &self.c_alpha;
        let c2 = c.sqr();
        let c3 = c2.mul(c);
        let rc = c3
            .mul_int(&BigInt::from(23))
            .sub(&c2.mul_int(&BigInt::from(23)))
            .add(&c.mul_int(&BigInt::from(6)))
            .sub(&Ball::one(p));
        (ra, rc)
    }

    /// All invariants: the numeric brackets and both polynomial residuals.
    pub fn invariants_hold(&self) -> bool {
        let p = self.precision_bits;
        let within = |b: &Ball, lo: &str, hi: &str| {
            let lo = Ball::from_decimal(lo, p).expect("literal");
            let hi = Ball::from_decimal(hi, p).expect("literal");
            b.certify_lt(&hi) == Some(true) && lo.certify_lt(b) == Some(true)
        };
        let (ra, rc) = self.residuals();
        within(&self.alpha, "1.32", "1.33")
            && within(&self.c_alpha, "0.72", "0.73")
            && within(&self.beta_modulus, "0.86", "0.87")
            && within(&self.c_beta_modulus, "0.24", "0.25")
            && ra.contains_zero()
            && rc.contains_zero()
    }

    /// `|P_n − C_α α^n| < α^(-n/2)`, or `None` when undecided at this precision.
    pub fn binet_error_holds(&self, n: u64) -> Option<bool> {
        let p = self.precision_bits;
        let pn = Ball::from_int(BigInt::from(padovan_exact(n)), p);
        let main = self.c_alpha.mul(&self.alpha.powi(n as i64).ok()?);
        let err = pn.sub(&main).abs();
        let bound = self.beta_modulus.powi(n as i64).ok()?;
        err.certify_lt(&bound)
    }

    /// `α^(n−3) <= P_n <= α^(n−1)`, or `None` when undecided.
    pub fn growth_bracket_holds(&self, n: u64) -> Option<bool> {
        let p = self.precision_bits;
        let pn = Ball::from_int(BigInt::from(padovan_exact(n)), p);
        let lower = self.alpha.powi(n as i64 - 3).ok()?;
        let upper = self.alpha.powi(n as i64 - 1).ok()?;
        match (lower.certify_le(&pn), pn.certify_le(&upper)) {
            (Some(true), Some(true)) => Some(true),
            (Some(false), _) | (_, Some(false)) => Some(false),
            _ => None,
        }
    }
}

/// Refine [`BinetData`] until its invariants are certified.
pub fn binet_data(policy: &PrecisionPolicy) -> Result<BinetData, SequenceError> {
    let (data, _) = refine(policy, BinetData::compute, |d| d.invariants_hold())?;
    Ok(data)
}

fn decide<F>(policy: &PrecisionPolicy, what: &str, mut check: F) -> Result<bool, SequenceError>
where
    F: FnMut(&BinetData) -> Option<bool>,
{
    let mut answer = None;
    let r = refine(policy, BinetData::compute, |d| {
        answer = check(d);
        answer.is_some()
    });
    match r {
        Ok(_) => Ok(answer.expect("accepted only when decided")),
        Err(PrecisionError::PrecisionExhausted { .. }) => Err(SequenceError::CertificationFailed(what.to_string())),
        Err(e) => Err(e.into()),
    }
}

/// Certified truth of `|P_n − C_α α^n| < α^(-n/2)`.
pub fn binet_error_certified(n: u64, policy: &PrecisionPolicy) -> Result<bool, SequenceError> {
    if n < 1 {
        return Err(SequenceError::IndexTooSmall(n));
    }
    decide(policy, &format!("Binet error bound at n = {n}"), |d| {
        d.binet_error_holds(n)
    })
}

/// Certified truth of `α^(n−3) <= P_n <= α^(n−1)`.
pub fn growth_bracket_certified(n: u64, policy: &PrecisionPolicy) -> Result<bool, SequenceError> {
    if n < 1 {
        return Err(SequenceError::IndexTooSmall(n));
    }
    decide(policy, &format!("growth bracket at n = {n}"), |d| {
        d.growth_bracket_holds(n)
    })
}

/// Range check over `1..=n_max`, reusing one [`BinetData`] per precision level.
///
/// Returns the indices where the property is certified false.
pub fn certify_range<F>(n_max: u64, policy: &PrecisionPolicy, check: F) -> Result<Vec<u64>, SequenceError>
where
    F: Fn(&BinetData, u64) -> Option<bool>,
{
    let schedule = policy.schedule();
    let mut levels: Vec<BinetData> = Vec::new();
    let mut failures = Vec::new();
    for n in 1..=n_max {
        let mut decided = None;
        for (i, &bits) in schedule.iter().enumerate() {
            if levels.len() <= i {
                levels.push(BinetData::compute(bits)?);
            }
            decided = check(&levels[i], n);
            if decided.is_some() {
                break;
            }
        }
        match decided {
            Some(true) => {}
            Some(false) => failures.push(n),
            None => return Err(SequenceError::CertificationFailed(format!("index {n}"))),
        }
    }
    Ok(failures)
}

/// Range of `s = l + m + k` with `s·ln 10 − 3 < n·ln α < s·ln 10 + 1`.
///
/// Both ends are certified; `s_min` is clamped to at least 1.
pub fn digit_sum_bracket(n: u64, policy: &PrecisionPolicy) -> Result<(u64, u64), SequenceError> {
    if n < 1 {
        return Err(SequenceError::IndexTooSmall(n));
    }
    let compute = |bits: u32| -> Result<(Option<BigInt>, Option<BigInt>), PrecisionError> {
        let alpha = alpha_enclosure(bits);
        let ln10 = crate::precision::ln10(bits);
        let x = alpha.ln()?.mul_int(&BigInt::from(n));
        let lower = x.sub(&Ball::one(bits)).div(&ln10)?;
        let upper = x.add(&Ball::from_int(3, bits)).div(&ln10)?;
        Ok((lower.floor_certified(), upper.floor_certified()))
    };
    let ((lo, hi), _) = refine(policy, compute, |(a, b)| a.is_some() && b.is_some())
        .map_err(|_| SequenceError::CertificationFailed(format!("digit bracket at n = {n}")))?;
    // s > lower and s < upper with both irrational: s in floor(lower)+1 ..= floor(upper)
    let lo: BigInt = lo.expect("certified");
    let hi: BigInt = hi.expect("certified");
    let s_min = (lo + 1u32).to_i64().unwrap_or(1).max(1) as u64;
    let s_max = hi.to_i64().unwrap_or(0).max(0) as u64;
    Ok((s_min, s_max))
}
