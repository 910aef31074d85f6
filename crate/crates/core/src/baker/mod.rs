//! Lower bounds for linear forms in logarithms and the chain of estimates
//! that turns them into an absolute bound on the index.
//!
//! Matveev's theorem: if `Γ = η₁^b₁ ⋯ η_t^b_t − 1 ≠ 0` with the `η_j` in a
//! real field of degree `d`, then
//!
//! ```text
//! ln|Γ| > −1.4 · 30^(t+3) · t^4.5 · d² · (1 + ln d) · (1 + ln D) · A₁ ⋯ A_t
//! ```
//!
//! with `D >= max|b_j|` and `A_j >= max(d·h(η_j), |ln η_j|, 0.16)`.

pub mod chain;
pub mod height;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use thiserror::Error;

use crate::precision::{Ball, PrecisionError};

pub use chain::{bound_chain, BoundChain, ChainMode, ConstantCheck};
pub use height::{
    cubic_log_height, height_c_alpha, height_eta1, height_eta1_tight, rational_height, CubicHeight, EtaParams,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BakerError {
    #[error(transparent)]
    Precision(#[from] PrecisionError),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("undecided at this precision: {0}")]
    Undecided(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// `1.4 · 30^(t+3) · t^4.5 · d² · (1 + ln d)`.
pub fn matveev_constant(t: u32, d: u32, prec: u32) -> Result<Ball, BakerError> {
    if t == 0 || d == 0 {
        return Err(BakerError::InvalidInput("t and d must be positive".into()));
    }
    let c = Ball::from_ratio(&BigInt::from(7), &BigInt::from(5), prec)?;
    let p30 = Ball::from_int(BigInt::from(30u32).pow(t + 3), prec);
    let t4 = Ball::from_int(BigInt::from(t).pow(4), prec);
    let sqrt_t = Ball::from_int(t, prec).sqrt()?;
    let d2 = Ball::from_int(d * d, prec);
    let ln_d = Ball::ln_ratio(&BigInt::from(d), &BigInt::from(1), prec)?;
    let one_ln_d = Ball::one(prec).add(&ln_d);
    Ok(c.mul(&p30).mul(&t4).mul(&sqrt_t).mul(&d2).mul(&one_ln_d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormLabel {
    Gamma1,
    Gamma2,
    Gamma3,
}

/// `A_j = coeff · (1 + ln n)^log_power`.
#[derive(Debug, Clone)]
pub struct HeightFactor {
    pub coeff: Ball,
    pub log_power: u32,
}

impl HeightFactor {
    pub fn constant(coeff: Ball) -> Self {
        HeightFactor { coeff, log_power: 0 }
    }

    pub fn eval(&self, one_ln_n: &Ball) -> Ball {
        self.coeff
            .mul(&one_ln_n.powi(self.log_power as i64).expect("nonnegative power"))
    }
}

/// One instance of Matveev's theorem with `D = n`.
#[derive(Debug, Clone)]
pub struct LinearFormSpec {
    pub label: FormLabel,
    pub num_terms: u32,
    pub field_degree: u32,
    pub a: Vec<HeightFactor>,
}

impl LinearFormSpec {
    /// The three standard instances: `A₁` given, `A₂ = ln α`, `A₃ = 3 ln 10`.
    pub fn standard(label: FormLabel, a1: HeightFactor, prec: u32) -> Result<Self, BakerError> {
        let alpha = crate::sequence::alpha_enclosure(prec);
        let a2 = HeightFactor::constant(alpha.ln()?);
        let a3 = HeightFactor::constant(crate::precision::ln10(prec).mul_int(&BigInt::from(3)));
        Ok(LinearFormSpec {
            label,
            num_terms: 3,
            field_degree: 3,
            a: vec![a1, a2, a3],
        })
    }

    pub fn validate(&self) -> Result<(), BakerError> {
        if self.a.len() != self.num_terms as usize {
            return Err(BakerError::InvalidInput("one height factor per term".into()));
        }
        let floor = Ball::from_decimal("0.16", 64)?;
        for (j, f) in self.a.iter().enumerate() {
            if floor.certify_le(&f.coeff) != Some(true) {
                return Err(BakerError::HypothesisFailed(format!("A_{} < 0.16", j + 1)));
            }
        }
        Ok(())
    }

    /// Product `C · A₁ ⋯ A_t` with the `(1 + ln n)` powers stripped, and the
    /// total power of `(1 + ln n)` including the one from `D = n`.
    pub fn coefficient(&self, prec: u32) -> Result<(Ball, u32), BakerError> {
        let mut c = matveev_constant(self.num_terms, self.field_degree, prec)?;
        let mut power = 1;
        for f in &self.a {
            c = c.mul(&f.coeff);
            power += f.log_power;
        }
        Ok((c, power))
    }
}

/// Lower bound `−C · (1 + ln n) · A₁ ⋯ A_t` for `ln|Γ|`.
pub fn matveev_log_lower(spec: &LinearFormSpec, n: u64, prec: u32) -> Result<Ball, BakerError> {
    if n < 2 {
        return Err(BakerError::InvalidInput("n must be at least 2".into()));
    }
    spec.validate()?;
    let one_ln_n = Ball::one(prec).add(&Ball::ln_ratio(&BigInt::from(n), &BigInt::from(1), prec)?);
    let mut v = matveev_constant(spec.num_terms, spec.field_degree, prec)?.mul(&one_ln_n);
    for f in &spec.a {
        v = v.mul(&f.eval(&one_ln_n));
    }
    Ok(v.neg())
}

/// From `|e^z − 1| < y < 1/2` conclude `|z| < 2y`.
pub fn small_linear_form_transfer(y: &Ball) -> Result<Ball, BakerError> {
    let half = Ball::from_ratio(&BigInt::from(1), &BigInt::from(2), y.prec())?;
    match y.certify_lt(&half) {
        Some(true) => Ok(y.mul_int(&BigInt::from(2))),
        _ => Err(BakerError::HypothesisFailed(format!("{y} < 1/2 not certified"))),
    }
}

/// `⌈2^r · H · (ln H)^r⌉`, valid when `H > (4r²)^r`: any `L` with
/// `L / (ln L)^r < H` satisfies `L < 2^r H (ln H)^r`.
pub fn guzman_luca(r: u32, h: &Ball) -> Result<BigUint, BakerError> {
    if r == 0 {
        return Err(BakerError::InvalidInput("r must be at least 1".into()));
    }
    let prec = h.prec();
    let threshold = Ball::from_int(BigInt::from(4 * r * r).pow(r), prec);
    if threshold.certify_lt(h) != Some(true) {
        return Err(BakerError::HypothesisFailed(format!("H > (4r²)^r fails for r = {r}")));
    }
    let v = h.mul(&h.ln()?.powi(r as i64)?).mul_pow2(r as i64);
    let hi = v.hi();
    // ceiling of the upper end is a valid bound whatever the radius
    Ok(hi.ceil().to_biguint().expect("positive"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matveev_values() {
        let c11 = matveev_constant(1, 1, 128).unwrap();
        assert!(c11.contains(&crate::Dyadic::from_int(1_134_000)));
        let c33 = matveev_constant(3, 3, 128).unwrap().to_f64();
        assert!((c33 / 2.7044e12 - 1.0).abs() < 1e-4, "{c33}");
        let c23 = matveev_constant(2, 3, 128).unwrap();
        assert_eq!(c23.certify_lt(&matveev_constant(3, 3, 128).unwrap()), Some(true));
        assert!(matveev_constant(0, 3, 64).is_err());
    }

    #[test]
    fn transfer() {
        let y = Ball::from_ratio(&BigInt::from(11), &BigInt::from(100), 128).unwrap();
        let z = small_linear_form_transfer(&y).unwrap();
        let expect = Ball::from_ratio(&BigInt::from(22), &BigInt::from(100), 128).unwrap();
        assert!(z.sub(&expect).contains_zero());
        let bad = Ball::from_decimal("0.6", 64).unwrap();
        assert!(matches!(
            small_linear_form_transfer(&bad),
            Err(BakerError::HypothesisFailed(_))
        ));
    }

    #[test]
    fn guzman_luca_small() {
        let h = Ball::from_int(100, 128);
        assert_eq!(guzman_luca(1, &h).unwrap(), BigUint::from(922u32));
        let boundary = Ball::from_int(46656, 128);
        assert!(matches!(
            guzman_luca(3, &boundary),
            Err(BakerError::HypothesisFailed(_))
        ));
    }
}
