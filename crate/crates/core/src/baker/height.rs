//! Logarithmic heights of rationals and of cubic algebraic numbers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::BakerError;
use crate::precision::{Ball, Dyadic, Enclosure};

/// `h(p/q) = ln max(|p|, |q|)` for the reduced fraction; `h(0) = 0`.
pub fn rational_height(num: &BigInt, den: &BigInt, prec: u32) -> Result<Ball, BakerError> {
    if den.is_zero() {
        return Err(BakerError::InvalidInput("zero denominator".into()));
    }
    if num.is_zero() {
        return Ok(Ball::zero(prec));
    }
    let g = num.gcd(den);
    let m = (num / &g).abs().max((den / &g).abs());
    Ok(Ball::ln_ratio(&m, &BigInt::one(), prec)?)
}

/// Discriminant of `a x³ + b x² + c x + d`.
pub fn cubic_discriminant(p: &[BigInt; 4]) -> BigInt {
    let [a, b, c, d] = p;
    BigInt::from(18) * a * b * c * d - BigInt::from(4) * b * b * b * d + b * b * c * c
        - BigInt::from(4) * a * c * c * c
        - BigInt::from(27) * a * a * d * d
}

fn eval_sign(p: &[BigInt; 4], x: &Dyadic) -> i32 {
    let mut acc = Dyadic::zero();
    for c in p {
        acc = acc.mul(x).add(&Dyadic::from_int(c.clone()));
    }
    acc.signum()
}

fn has_rational_root(p: &[BigInt; 4]) -> Result<bool, BakerError> {
    let limit = BigInt::from(1_000_000_000_000u64);
    if p[0].abs() > limit || p[3].abs() > limit {
        return Err(BakerError::CertificationFailed(
            "coefficients too large for the rational root test".into(),
        ));
    }
    if p[3].is_zero() {
        return Ok(true);
    }
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.abs().to_u64().expect("bounded above");
        let mut out = Vec::new();
        let mut i = 1u64;
        while i * i <= n {
            if n.is_multiple_of(i) {
                out.push(BigInt::from(i));
                out.push(BigInt::from(n / i));
            }
            i += 1;
        }
        out
    };
    for num in divisors(&p[3]) {
        for den in divisors(&p[0]) {
            for s in [1, -1] {
                // p(num/den)·den³
                let x = BigInt::from(s) * &num;
                let v = &p[0] * &x * &x * &x
                    + &p[1] * &x * &x * &den
                    + &p[2] * &x * &den * &den
                    + &p[3] * &den * &den * &den;
                if v.is_zero() {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Real root of a cubic with exactly one real root, isolated by bisection
/// with exact sign evaluation.
pub fn cubic_real_root(p: &[BigInt; 4], prec: u32) -> Ball {
    // Cauchy bound
    let bound = p[1..]
        .iter()
        .map(|c| (c.abs() + p[0].abs() - 1u32) / p[0].abs())
        .max()
        .unwrap_or_default()
        + 1u32;
    let mut lo = Dyadic::from_int(-bound.clone());
    let mut hi = Dyadic::from_int(bound);
    let s_lo = eval_sign(p, &lo);
    let target = -(prec as i64) - 8;
    while hi.sub(&lo).msb() > target {
        let m = lo.add(&hi).mul_pow2(-1);
        let s = eval_sign(p, &m);
        if s == 0 {
            return Ball::exact(m, prec);
        }
        if s == s_lo {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ball::from_endpoints(&lo, &hi, prec)
}

/// Height data of a cubic algebraic number, derived from its minimal polynomial.
#[derive(Debug, Clone)]
pub struct CubicHeight {
    /// Primitive minimal polynomial with positive leading coefficient.
    pub poly: [BigInt; 4],
    pub discriminant: BigInt,
    pub real_root: Ball,
    /// Common modulus of the complex-conjugate pair.
    pub pair_modulus: Ball,
    pub height: Ball,
}

#[derive(Debug, Clone, Serialize)]
pub struct CubicHeightReport {
    pub poly: Vec<String>,
    pub discriminant: String,
    pub real_root: Enclosure,
    pub pair_modulus: Enclosure,
    pub height: Enclosure,
}

impl CubicHeight {
    pub fn report(&self) -> CubicHeightReport {
        CubicHeightReport {
            poly: self.poly.iter().map(|c| c.to_string()).collect(),
            discriminant: self.discriminant.to_string(),
            real_root: Enclosure::of(&self.real_root),
            pair_modulus: Enclosure::of(&self.pair_modulus),
            height: Enclosure::of(&self.height),
        }
    }

    pub fn max_root_modulus(&self) -> Ball {
        let r = self.real_root.abs();
        match r.certify_le(&self.pair_modulus) {
            Some(true) => self.pair_modulus.clone(),
            Some(false) => r,
            None => Ball::from_endpoints(
                &r.lo().max(self.pair_modulus.lo()),
                &r.hi().max(self.pair_modulus.hi()),
                r.prec(),
            ),
        }
    }
}

/// `max(0, ln x)` for a positive ball, or `None` if `x` straddles 1.
fn log_plus(x: &Ball) -> Result<Option<Ball>, BakerError> {
    let one = Ball::one(x.prec());
    Ok(match x.certify_le(&one) {
        Some(true) => Some(Ball::zero(x.prec())),
        Some(false) => Some(x.ln()?),
        None => None,
    })
}

/// Height of a root of an irreducible cubic with negative discriminant.
pub fn cubic_log_height(poly: &[BigInt; 4], prec: u32) -> Result<CubicHeight, BakerError> {
    let mut p = poly.clone();
    if p[0].is_zero() {
        return Err(BakerError::InvalidInput("leading coefficient is zero".into()));
    }
    let content = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    for c in p.iter_mut() {
        *c = &*c / &content;
    }
    if p[0].is_negative() {
        for c in p.iter_mut() {
            *c = -&*c;
        }
    }
    let disc = cubic_discriminant(&p);
    if !disc.is_negative() {
        return Err(BakerError::CertificationFailed(format!(
            "discriminant {disc} is not negative"
        )));
    }
    if has_rational_root(&p)? {
        return Err(BakerError::CertificationFailed("cubic is reducible".into()));
    }
    let work = prec + 32;
    let real_root = cubic_real_root(&p, work);
    // product of roots is -d/a, so |z|² = |d| / (a |r|)
    let sq = Ball::from_ratio(&p[3].abs(), &p[0], work)?.div(&real_root.abs())?;
    let pair_modulus = sq.sqrt()?;
    let undecided = || BakerError::Undecided("root modulus against 1".into());
    let lr = log_plus(&real_root.abs())?.ok_or_else(undecided)?;
    let lz = log_plus(&pair_modulus)?.ok_or_else(undecided)?;
    let a0 = Ball::ln_ratio(&p[0], &BigInt::one(), work)?;
    let height = a0
        .add(&lr)
        .add(&lz.mul_int(&BigInt::from(2)))
        .div_int(&BigInt::from(3))?;
    Ok(CubicHeight {
        poly: p,
        discriminant: disc,
        real_root: real_root.with_prec(prec),
        pair_modulus: pair_modulus.with_prec(prec),
        height: height.with_prec(prec),
    })
}

/// Minimal polynomial of `C_α`.
pub fn c_alpha_poly() -> [BigInt; 4] {
    [23, -23, 6, -1].map(BigInt::from)
}

/// Height of `C_α`, certified through its minimal polynomial.
pub fn height_c_alpha(prec: u32) -> Result<CubicHeight, BakerError> {
    cubic_log_height(&c_alpha_poly(), prec)
}

/// Minimal polynomial of `9C_α / a`: substitute `x = a y / 9` into the
/// polynomial of `C_α` and clear denominators.
pub fn nine_c_alpha_over_poly(a: u32) -> [BigInt; 4] {
    let a = BigInt::from(a);
    [
        BigInt::from(23) * &a * &a * &a,
        BigInt::from(-207) * &a * &a,
        BigInt::from(486) * &a,
        BigInt::from(-729),
    ]
}

/// Height of `9C_α / a`.
pub fn height_nine_c_alpha_over(a: u32, prec: u32) -> Result<CubicHeight, BakerError> {
    cubic_log_height(&nine_c_alpha_over_poly(a), prec)
}

/// Parameters of `η₁` for each linear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaParams {
    Round1 { a: u8 },
    Round2 { a: u8, b: u8, l: u64 },
    Round3 { a: u8, b: u8, c: u8, l: u64, m: u64 },
}

/// The constant part of the published height estimate for `η₁` and its
/// rounded value: `2ln9 + ln23/3 < 5.44`, `4ln9 + ln23/3 + 2ln2 < 11.23`,
/// `6ln9 + ln23/3 + 4ln2 < 17.1`.
pub fn eta1_height_constant(round: u8, prec: u32) -> Result<(Ball, &'static str), BakerError> {
    let (nines, twos, rounded) = match round {
        1 => (2, 0, "5.44"),
        2 => (4, 2, "11.23"),
        3 => (6, 4, "17.1"),
        _ => return Err(BakerError::InvalidInput(format!("round {round}"))),
    };
    let one = BigInt::one();
    let ln9 = Ball::ln_ratio(&BigInt::from(9), &one, prec)?;
    let ln2 = Ball::ln_ratio(&BigInt::from(2), &one, prec)?;
    let ln23_3 = Ball::ln_ratio(&BigInt::from(23), &one, prec)?.div_int(&BigInt::from(3))?;
    let v = ln9
        .mul_int(&BigInt::from(nines))
        .add(&ln23_3)
        .add(&ln2.mul_int(&BigInt::from(twos)));
    Ok((v, rounded))
}

/// The published upper bound for `h(η₁)`: `5.44`, `11.23 + l ln10` or
/// `17.1 + l ln10 + 2m ln10`. The digits do not enter the bound.
pub fn height_eta1(params: EtaParams, prec: u32) -> Result<Ball, BakerError> {
    let ln10 = crate::precision::ln10(prec);
    let lit = |s: &str| Ball::from_decimal(s, prec);
    Ok(match params {
        EtaParams::Round1 { .. } => lit("5.44")?,
        EtaParams::Round2 { l, .. } => lit("11.23")?.add(&ln10.mul_int(&BigInt::from(l))),
        EtaParams::Round3 { l, m, .. } => lit("17.1")?.add(&ln10.mul_int(&BigInt::from(l + 2 * m))),
    })
}

/// Sharper bound for `h(η₁)` from the exact height of `9C_α` and the
/// integer part: `h(9C_α / M) <= h(9C_α) + ln M`.
pub fn height_eta1_tight(params: EtaParams, prec: u32) -> Result<Ball, BakerError> {
    let ten = BigInt::from(10);
    let pow10 = |e: u64| num_traits::pow(ten.clone(), e as usize);
    match params {
        EtaParams::Round1 { a } => Ok(height_nine_c_alpha_over(a as u32, prec)?.height),
        EtaParams::Round2 { a, b, l } => {
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let m = &a * pow10(l) - (&a - &b);
            let h9 = height_nine_c_alpha_over(1, prec)?.height;
            Ok(h9.add(&Ball::ln_ratio(&m, &BigInt::one(), prec)?))
        }
        EtaParams::Round3 { a, b, c, l, m } => {
            let (a, b, c) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
            let n = &a * pow10(l + m) - (&a - &b) * pow10(m) - (&b - &c);
            let h9 = height_nine_c_alpha_over(1, prec)?.height;
            Ok(h9.add(&Ball::ln_ratio(&n, &BigInt::one(), prec)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_heights() {
        let h = rational_height(&BigInt::from(6), &BigInt::from(4), 128).unwrap();
        assert!((h.to_f64() - 3f64.ln()).abs() < 1e-15);
        assert!(rational_height(&BigInt::zero(), &BigInt::one(), 64).unwrap().is_exact());
        assert!(rational_height(&BigInt::one(), &BigInt::zero(), 64).is_err());
    }

    #[test]
    fn c_alpha_height() {
        let h = height_c_alpha(200).unwrap();
        assert!(h.discriminant.is_negative());
        assert!((h.height.to_f64() - 23f64.ln() / 3.0).abs() < 1e-15);
        assert!((h.real_root.to_f64() - 0.722_124_418_303_112_8).abs() < 1e-15);
        assert!((h.pair_modulus.to_f64() - 0.245374861026731).abs() < 1e-14);
    }

    #[test]
    fn reducible_rejected() {
        // (x - 1)(x² + x + 1) = x³ - 1 has negative discriminant
        let p = [1, 0, 0, -1].map(BigInt::from);
        assert!(cubic_log_height(&p, 64).is_err());
    }

    #[test]
    fn scaled_polynomial_is_primitive_for_a_three() {
        let h = height_nine_c_alpha_over(3, 128).unwrap();
        // 621y³ - 1863y² + 1458y - 729 has content 27
        assert_eq!(h.poly, [23, -69, 54, -27].map(BigInt::from));
        assert!((h.real_root.to_f64() - 3.0 * 0.722_124_418_303_112_8).abs() < 1e-14);
    }

    #[test]
    fn constants_below_rounded() {
        for r in 1..=3 {
            let (v, lit) = eta1_height_constant(r, 128).unwrap();
            let bound = Ball::from_decimal(lit, 128).unwrap();
            assert_eq!(v.certify_lt(&bound), Some(true), "round {r}");
        }
    }
}
