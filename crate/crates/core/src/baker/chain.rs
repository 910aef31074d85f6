//! The chain `l < K₁(1+ln n)`, `m < K₂(1+ln n)²`, `n < H(1+ln n)³`, closed
//! to an absolute bound `n < X₀`, under the hypothesis `n > 560`.
//!
//! Each linear form gives `ln|Γ_i| > −G_i (1+ln n)^i` from Matveev and an
//! upper bound for `|Γ_i|` from the equation; comparing the two and
//! absorbing the additive constants (`ln 11`, `ln 2.5`) into the leading
//! coefficient via `1 + ln n > 1 + ln 561 = s₀` yields the next constant.
//!
//! In [`ChainMode::Published`] every computed quantity is certified against the
//! published rounded value, which is then carried forward. In
//! [`ChainMode::Tight`] the computed enclosures are carried forward and `A₁`
//! is taken from exact heights of `9C_α`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use super::height::{eta1_height_constant, height_c_alpha, height_nine_c_alpha_over};
use super::{guzman_luca, matveev_constant, BakerError};
use crate::precision::{ln10, Ball, Enclosure, PrecisionError, PrecisionPolicy};
use crate::sequence::BinetData;

/// Lower end of the index range treated analytically.
pub const HYPOTHESIS_N: u64 = 561;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    #[default]
    Published,
    Tight,
}

/// One certified inequality of the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantCheck {
    pub name: String,
    pub statement: String,
    pub computed: Enclosure,
    /// Right-hand side as a decimal literal, when it is a published constant.
    pub bound: Option<String>,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct BoundChain {
    pub mode: ChainMode,
    pub precision_bits: u32,
    /// `1 + ln 561`.
    pub s0: Ball,
    pub matveev_c: Ball,
    /// `A₁` coefficients of the three forms (before the `(1+ln n)^j` factor).
    pub a1: [Ball; 3],
    /// Computed Matveev coefficients `G_i`.
    pub gamma: [Ball; 3],
    /// `l ln 10 < K₁ (1+ln n)`.
    pub k1: Ball,
    /// `m ln 10 < K₂ (1+ln n)²`.
    pub k2: Ball,
    /// `ln|Γ₃| > −K₃ (1+ln n)³`.
    pub k3: Ball,
    /// `n < H (1+ln n)³`.
    pub h: Ball,
    pub guzman_luca_bound: BigUint,
    /// `n < X₀`.
    pub x0: BigUint,
    pub checks: Vec<ConstantCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundChainReport {
    pub mode: ChainMode,
    pub precision_bits: u32,
    pub hypothesis_n_at_least: u64,
    pub matveev_constant: Enclosure,
    pub a1: Vec<Enclosure>,
    pub gamma_coefficients: Vec<Enclosure>,
    pub k1: Enclosure,
    pub k2: Enclosure,
    pub k3: Enclosure,
    pub h: Enclosure,
    #[serde(with = "crate::serde_big::biguint")]
    pub guzman_luca_bound: BigUint,
    #[serde(with = "crate::serde_big::biguint")]
    pub x0: BigUint,
    pub checks: Vec<ConstantCheck>,
}

impl BoundChain {
    pub fn report(&self) -> BoundChainReport {
        BoundChainReport {
            mode: self.mode,
            precision_bits: self.precision_bits,
            hypothesis_n_at_least: HYPOTHESIS_N,
            matveev_constant: Enclosure::of(&self.matveev_c),
            a1: self.a1.iter().map(Enclosure::of).collect(),
            gamma_coefficients: self.gamma.iter().map(Enclosure::of).collect(),
            k1: Enclosure::of(&self.k1),
            k2: Enclosure::of(&self.k2),
            k3: Enclosure::of(&self.k3),
            h: Enclosure::of(&self.h),
            guzman_luca_bound: self.guzman_luca_bound.clone(),
            x0: self.x0.clone(),
            checks: self.checks.clone(),
        }
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failed_checks(&self) -> Vec<&ConstantCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }
}

struct Recorder {
    prec: u32,
    checks: Vec<ConstantCheck>,
}

impl Recorder {
    fn lit(&self, s: &str) -> Result<Ball, BakerError> {
        Ok(Ball::from_decimal(s, self.prec)?)
    }

    /// Record `lhs < rhs`; undecided comparisons abort this precision level.
    fn lt(
        &mut self,
        name: &str,
        statement: &str,
        lhs: &Ball,
        rhs: &Ball,
        bound: Option<&str>,
    ) -> Result<bool, BakerError> {
        let holds = lhs
            .certify_lt(rhs)
            .ok_or_else(|| BakerError::Undecided(name.to_string()))?;
        self.checks.push(ConstantCheck {
            name: name.to_string(),
            statement: statement.to_string(),
            computed: Enclosure::of(lhs),
            bound: bound.map(str::to_string),
            holds,
        });
        Ok(holds)
    }

    /// Record `value <= literal` and return the literal as a ball.
    fn at_most(&mut self, name: &str, value: &Ball, literal: &str) -> Result<Ball, BakerError> {
        let b = self.lit(literal)?;
        let holds = value
            .certify_le(&b)
            .ok_or_else(|| BakerError::Undecided(name.to_string()))?;
        self.checks.push(ConstantCheck {
            name: name.to_string(),
            statement: format!("{name} <= {literal}"),
            computed: Enclosure::of(value),
            bound: Some(literal.to_string()),
            holds,
        });
        Ok(b)
    }

    fn at_least(&mut self, name: &str, value: &Ball, literal: &str) -> Result<(), BakerError> {
        let b = self.lit(literal)?;
        let holds = b
            .certify_le(value)
            .ok_or_else(|| BakerError::Undecided(name.to_string()))?;
        self.checks.push(ConstantCheck {
            name: name.to_string(),
            statement: format!("{name} >= {literal}"),
            computed: Enclosure::of(value),
            bound: Some(literal.to_string()),
            holds,
        });
        Ok(())
    }
}

fn int(prec: u32, v: u64) -> Ball {
    Ball::from_int(v, prec)
}

/// Round up to two significant decimal digits.
fn round_up_2sig(x: &BigUint) -> BigUint {
    let digits = x.to_string().len() as u32;
    if digits <= 2 {
        return x.clone();
    }
    let scale = BigUint::from(10u32).pow(digits - 2);
    (x / &scale + BigUint::one()) * scale
}

/// Build the chain at one precision.
pub fn bound_chain_at(mode: ChainMode, prec: u32) -> Result<BoundChain, BakerError> {
    let mut r = Recorder {
        prec,
        checks: Vec::new(),
    };
    let published = mode == ChainMode::Published;
    let binet = BinetData::compute(prec)?;
    let ln_alpha = binet.alpha.ln()?;
    let l10 = ln10(prec);
    let one = Ball::one(prec);
    let ln = |v: u64| Ball::ln_ratio(&BigInt::from(v), &BigInt::one(), prec);
    let s0 = one.add(&ln(HYPOTHESIS_N)?);
    let s0_2 = s0.sqr();
    let s0_3 = s0_2.mul(&s0);
    let c = matveev_constant(3, 3, prec)?;
    let three_ln10 = l10.mul_int(&BigInt::from(3));
    let half = Ball::from_ratio(&BigInt::one(), &BigInt::from(2), prec)?;
    let n0 = HYPOTHESIS_N;

    // side conditions
    r.lt(
        "digit_count_below_index",
        "3 < 561 (ln 10 - ln alpha), so l+m+k < n and D = n is admissible",
        &int(prec, 3),
        &l10.sub(&ln_alpha).mul_int(&BigInt::from(n0)),
        None,
    )?;
    r.at_least("A2 = ln alpha", &ln_alpha, "0.16")?;
    r.lt(
        "conjugate_modulus",
        "|beta| < 1, so h(alpha) = ln(alpha)/3",
        &binet.beta_modulus,
        &one,
        None,
    )?;
    let hc = height_c_alpha(prec)?;
    let ln23_3 = ln(23)?.div_int(&BigInt::from(3))?;
    r.lt(
        "c_alpha_root_moduli",
        "all roots of 23x^3-23x^2+6x-1 have modulus < 1, so h(C_alpha) = ln(23)/3",
        &hc.max_root_modulus(),
        &one,
        None,
    )?;
    r.lt(
        "h(C_alpha)",
        "the computed height of C_alpha agrees with ln(23)/3",
        &hc.height.sub(&ln23_3).abs(),
        &Ball::exact(crate::Dyadic::pow2(-(prec as i64) / 2), prec),
        None,
    )?;
    r.lt(
        "c_alpha_real_root",
        "the real root of 23x^3-23x^2+6x-1 is C_alpha",
        &hc.real_root.sub(&binet.c_alpha).abs(),
        &Ball::exact(crate::Dyadic::pow2(-(prec as i64) / 2), prec),
        None,
    )?;
    let ten_over = int(prec, 10).div(&binet.c_alpha.mul_int(&BigInt::from(9)))?;
    r.at_most("10/(9 C_alpha)", &ten_over, "2.5")?;
    r.lt(
        "conjugate_terms",
        "9 alpha^(-280) < 1, so 9 alpha^(-n/2) + 9 < 10 for n > 560",
        &binet.alpha.powi(-280)?.mul_int(&BigInt::from(9)),
        &one,
        None,
    )?;
    r.lt(
        "transfer_gamma1",
        "11/10^2 < 1/2",
        &Ball::from_ratio(&BigInt::from(11), &BigInt::from(100), prec)?,
        &half,
        None,
    )?;
    r.lt(
        "transfer_gamma3",
        "2.5 alpha^(-561) < 1/2",
        &r.lit("2.5")?.mul(&binet.alpha.powi(-(n0 as i64))?),
        &half,
        None,
    )?;

    let matveev_tail = ln_alpha.mul(&three_ln10);
    let h9c = height_nine_c_alpha_over(1, prec)?.height;

    // first form
    let (h1c, lit1) = eta1_height_constant(1, prec)?;
    r.lt(
        "h(eta1) round 1",
        "2 ln 9 + ln(23)/3 < 5.44",
        &h1c,
        &r.lit(lit1)?,
        Some(lit1),
    )?;
    let a1_1 = if published {
        // 16.32 = 3 · 5.44
        r.lit("16.32")?
    } else {
        let mut best = r.lit("0.16")?;
        for a in 1..=9u32 {
            let h = height_nine_c_alpha_over(a, prec)?.height.mul_int(&BigInt::from(3));
            best = Ball::from_endpoints(&best.hi().max(h.hi()), &best.hi().max(h.hi()), prec);
        }
        best
    };
    let g1 = c.mul(&a1_1).mul(&matveev_tail);
    let g1_used = if published {
        r.at_least("Gamma1 coefficient", &g1, "8.50e13")?;
        r.at_most("Gamma1 coefficient", &g1, "8.58e13")?
    } else {
        g1.clone()
    };
    let k1 = g1_used.add(&ln(11)?.div(&s0)?);
    let k1_used = if published {
        r.at_most("K1", &k1, "8.59e13")?
    } else {
        k1
    };

    // second form
    let (h2c, lit2) = eta1_height_constant(2, prec)?;
    r.lt(
        "h(eta1) round 2",
        "4 ln 9 + ln(23)/3 + 2 ln 2 < 11.23",
        &h2c,
        &r.lit(lit2)?,
        Some(lit2),
    )?;
    let a1_2 = if published {
        let coef = r.lit("11.23")?.div(&s0)?.add(&k1_used);
        r.at_most("h(eta1) round 2 coefficient", &coef, "8.6e13")?;
        r.lit("25.8e13")?
    } else {
        h9c.add(&ln(9)?).div(&s0)?.add(&k1_used).mul_int(&BigInt::from(3))
    };
    let g2 = c.mul(&a1_2).mul(&matveev_tail);
    let g2_used = if published {
        r.at_most("Gamma2 coefficient", &g2, "1.36e27")?
    } else {
        g2.clone()
    };
    let k2 = g2_used.add(&ln(11)?.div(&s0_2)?);
    let k2_used = if published {
        r.at_most("K2", &k2, "1.37e27")?
    } else {
        k2
    };

    // third form
    let (h3c, lit3) = eta1_height_constant(3, prec)?;
    r.lt(
        "h(eta1) round 3",
        "6 ln 9 + ln(23)/3 + 4 ln 2 < 17.1",
        &h3c,
        &r.lit(lit3)?,
        Some(lit3),
    )?;
    let a1_3 = if published {
        let coef = r
            .lit("17.1")?
            .div(&s0_2)?
            .add(&k1_used.div(&s0)?)
            .add(&k2_used.mul_int(&BigInt::from(2)));
        r.at_most("h(eta1) round 3 coefficient", &coef, "2.76e27")?;
        r.lit("8.28e27")?
    } else {
        h9c.add(&l10)
            .div(&s0_2)?
            .add(&k1_used.div(&s0)?)
            .add(&k2_used)
            .mul_int(&BigInt::from(3))
    };
    let g3 = c.mul(&a1_3).mul(&matveev_tail);
    r.at_most("Gamma3 coefficient (computed)", &g3, "4.35e40")?;
    let k3 = if published {
        r.at_most("Gamma3 coefficient", &g3, "4.35e48")?
    } else {
        g3.clone()
    };
    let h = k3.add(&r.lit("2.5")?.ln()?.div(&s0_3)?).div(&ln_alpha)?;
    let h_used = if published { r.at_most("H", &h, "15.6e48")? } else { h };

    // closure
    let gl = guzman_luca(3, &h_used)?;
    let x0 = if published {
        let x0 = BigUint::from(2u32) * BigUint::from(10u32).pow(56u32);
        let gl_ball = Ball::from_int(BigInt::from(gl.clone()), prec);
        r.at_least("guzman_luca(3, H)", &gl_ball, "1.7e56")?;
        r.at_most("guzman_luca(3, H)", &gl_ball, "2e56")?;
        x0
    } else {
        round_up_2sig(&gl)
    };
    // x/(1+ln x)^3 increases for x > e², so n < H(1+ln n)^3 forces n < X0
    let x0_ball = Ball::from_int(BigInt::from(x0.clone()), prec);
    let ln_x0 = x0_ball.ln()?;
    r.lt("X0 above e^2", "ln X0 > 2", &int(prec, 2), &ln_x0, None)?;
    r.lt(
        "X0 closes the chain",
        "H (1 + ln X0)^3 < X0",
        &h_used.mul(&one.add(&ln_x0).powi(3)?),
        &x0_ball,
        None,
    )?;

    Ok(BoundChain {
        mode,
        precision_bits: prec,
        s0,
        matveev_c: c,
        a1: [a1_1, a1_2, a1_3],
        gamma: [g1, g2, g3],
        k1: k1_used,
        k2: k2_used,
        k3,
        h: h_used,
        guzman_luca_bound: gl,
        x0,
        checks: r.checks,
    })
}

/// Build the chain, raising precision until every comparison is decided.
///
/// Fails with [`BakerError::CertificationFailed`] if a decided check is false.
pub fn bound_chain(mode: ChainMode, policy: &PrecisionPolicy) -> Result<BoundChain, BakerError> {
    policy.validate()?;
    for bits in policy.schedule() {
        match bound_chain_at(mode, bits) {
            Ok(chain) => {
                if chain.all_hold() {
                    return Ok(chain);
                }
                let names: Vec<_> = chain.failed_checks().iter().map(|c| c.statement.clone()).collect();
                return Err(BakerError::CertificationFailed(names.join("; ")));
            }
            Err(BakerError::Undecided(_))
            | Err(BakerError::Precision(
                PrecisionError::ContainsZero | PrecisionError::NonPositive | PrecisionError::RadiusTooLarge,
            )) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(PrecisionError::PrecisionExhausted {
        max_bits: policy.max_bits,
    }
    .into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_up() {
        assert_eq!(round_up_2sig(&BigUint::from(1234u32)), BigUint::from(1300u32));
        assert_eq!(round_up_2sig(&BigUint::from(99u32)), BigUint::from(99u32));
    }

    #[test]
    fn published_chain_holds() {
        let chain = bound_chain(ChainMode::Published, &PrecisionPolicy::default()).unwrap();
        assert!(chain.all_hold());
        assert_eq!(chain.x0, BigUint::from(2u32) * BigUint::from(10u32).pow(56u32));
    }
}
