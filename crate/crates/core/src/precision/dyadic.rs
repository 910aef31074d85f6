//! Exact dyadic rationals `man · 2^exp` with directed rounding.
//!
//! Every midpoint and radius of a [`Ball`](super::Ball) is a `Dyadic`, so sums,
//! differences and products are exact and only explicit rounding loses
//! information.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction. `Down` and `Up` are toward −∞ and +∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { man, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n.into(), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: k,
        }
    }

    /// Exact conversion; every finite `f64` is dyadic.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Self::new(BigInt::from(m) * sign, e))
    }

    fn normalize(&mut self) {
        if self.man.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Position of the leading bit: `2^(msb-1) <= |x| < 2^msb`. Zero maps to `i64::MIN`.
    pub fn msb(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.man.bits() as i64 + self.exp
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Dyadic {
            man: &self.man * &other.man,
            exp: self.exp + other.exp,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::new(&self.man * k, self.exp)
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Round to at most `prec` significant bits.
    pub fn round(&self, prec: u32, mode: Round) -> Self {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        self.round_shift(shift, mode)
    }

    /// Round so that the result is an integer multiple of `2^min_exp`.
    pub fn round_to_exp(&self, min_exp: i64, mode: Round) -> Self {
        if self.exp >= min_exp || self.is_zero() {
            return self.clone();
        }
        let shift = (min_exp - self.exp) as u64;
        self.round_shift(shift, mode)
    }

    fn round_shift(&self, shift: u64, mode: Round) -> Self {
        let neg = self.man.is_negative();
        let mag = self.man.magnitude();
        let mut q: BigUint = mag >> shift;
        let inexact = mag.trailing_zeros().is_some_and(|tz| tz < shift);
        let bump = match mode {
            Round::Nearest => shift > 0 && mag.bit(shift - 1),
            Round::Up => inexact && !neg,
            Round::Down => inexact && neg,
        };
        if bump {
            q += 1u32;
        }
        let man = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, q);
        Self::new(man, self.exp + shift as i64)
    }

    /// `num / den` rounded to `prec` significant bits.
    ///
    /// Panics on a zero divisor.
    pub fn div(num: &Self, den: &Self, prec: u32, mode: Round) -> Self {
        assert!(!den.is_zero(), "dyadic division by zero");
        if num.is_zero() {
            return Self::zero();
        }
        // Shift so the integer quotient carries prec + 2 bits.
        let want = prec as i64 + 2;
        let k = (want + den.bits() as i64 - num.bits() as i64).max(0) as u64;
        let n = &num.man << k;
        let d = &den.man;
        let (q, r) = n.div_mod_floor(d);
        let exp = num.exp - den.exp - k as i64;
        let q = if r.is_zero() {
            q
        } else {
            match mode {
                Round::Down => q,
                Round::Up => q + 1,
                Round::Nearest => {
                    // floor quotient plus half-up on the remainder
                    let twice: BigInt = &r * 2;
                    if twice.abs() >= d.abs() {
                        q + 1
                    } else {
                        q
                    }
                }
            }
        };
        // The quotient is floor/ceil/nearest of the exact value at this scale,
        // so a second directed rounding in the same direction stays sound.
        Self::new(q, exp).round(prec, mode)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            self.man.div_floor(&(BigInt::one() << (-self.exp) as u64))
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    /// Nearest integer, ties away from zero.
    pub fn round_int(&self) -> BigInt {
        let half = Dyadic::pow2(-1);
        if self.is_negative() {
            -(self.neg().add(&half).floor())
        } else {
            self.add(&half).floor()
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits() as i64;
        let keep = bits.min(60);
        let shifted = &self.man >> (bits - keep) as u64;
        let m = shifted.to_f64().unwrap_or(f64::NAN);
        ldexp(m, self.exp + bits - keep)
    }

    /// Scientific-notation decimal string with `digits` significant digits.
    pub fn to_sci_string(&self, digits: u32, mode: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let neg = self.is_negative();
        let abs = self.abs();
        let abs_mode = match (mode, neg) {
            (Round::Nearest, _) => Round::Nearest,
            (Round::Up, false) | (Round::Down, true) => Round::Up,
            _ => Round::Down,
        };
        let est = ((abs.msb() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let mut e10 = est;
        let lower = BigInt::from(10u32).pow(digits - 1);
        let upper = BigInt::from(10u32).pow(digits);
        let mut m;
        loop {
            m = scale_pow10(&abs, digits as i64 - 1 - e10, abs_mode);
            if m >= upper {
                e10 += 1;
            } else if m < lower {
                e10 -= 1;
            } else {
                break;
            }
        }
        let s = m.to_string();
        let (head, tail) = s.split_at(1);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        if e10 != 0 {
            out.push('e');
            out.push_str(&e10.to_string());
        }
        out
    }

    /// Parse a decimal literal such as `-12.5e-3`, rounding to `prec` bits.
    pub fn parse_decimal(s: &str, prec: u32, mode: Round) -> Option<Self> {
        let (num, den) = parse_decimal_ratio(s)?;
        Some(Self::div(&Self::from_int(num), &Self::from_int(den), prec, mode))
    }
}

fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 512 {
        m *= 2f64.powi(512);
        e -= 512;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -512 {
        m *= 2f64.powi(-512);
        e += 512;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

/// `x · 10^k` rounded to an integer, for nonnegative `x`.
fn scale_pow10(x: &Dyadic, k: i64, mode: Round) -> BigInt {
    let ten = BigInt::from(10u32);
    let mut num = x.man.clone();
    let mut den = BigInt::one();
    if x.exp >= 0 {
        num <<= x.exp as u64;
    } else {
        den <<= (-x.exp) as u64;
    }
    if k >= 0 {
        num *= ten.pow(k as u32);
    } else {
        den *= ten.pow((-k) as u32);
    }
    let (q, r) = num.div_mod_floor(&den);
    if r.is_zero() {
        return q;
    }
    match mode {
        Round::Down => q,
        Round::Up => q + 1,
        Round::Nearest => {
            if r * 2 >= den {
                q + 1
            } else {
                q
            }
        }
    }
}

/// Exact rational value of a decimal literal.
pub fn parse_decimal_ratio(s: &str) -> Option<(BigInt, BigInt)> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().ok()?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    if scale >= 0 {
        Some((num * ten.pow(scale as u32), BigInt::one()))
    } else {
        Some((num, ten.pow((-scale) as u32)))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let (ma, mb) = (self.msb(), other.msb());
        if ma != mb {
            let by_mag = ma.cmp(&mb);
            return if sa > 0 { by_mag } else { by_mag.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(20, Round::Nearest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: f64) -> Dyadic {
        Dyadic::from_f64(x).unwrap()
    }

    #[test]
    fn normalizes_trailing_zeros() {
        let x = Dyadic::new(BigInt::from(12), 0);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), 2);
        assert_eq!(x, Dyadic::from_int(12));
    }

    #[test]
    fn directed_rounding_brackets_value() {
        let third = Dyadic::div(&Dyadic::one(), &Dyadic::from_int(3), 40, Round::Nearest);
        let lo = third.round(10, Round::Down);
        let hi = third.round(10, Round::Up);
        assert!(lo < third && third < hi);
        let neg = third.neg();
        assert!(neg.round(10, Round::Down) < neg);
        assert!(neg.round(10, Round::Up) > neg);
    }

    #[test]
    fn division_directions() {
        let one = Dyadic::one();
        let three = Dyadic::from_int(3);
        let lo = Dyadic::div(&one, &three, 64, Round::Down);
        let hi = Dyadic::div(&one, &three, 64, Round::Up);
        assert!(lo.mul(&three) < one);
        assert!(hi.mul(&three) > one);
        let m = Dyadic::div(&one.neg(), &three, 64, Round::Down);
        assert!(m.mul(&three) < one.neg());
    }

    #[test]
    fn floor_ceil_round() {
        assert_eq!(d(2.5).floor(), BigInt::from(2));
        assert_eq!(d(-2.5).floor(), BigInt::from(-3));
        assert_eq!(d(-2.5).ceil(), BigInt::from(-2));
        assert_eq!(d(2.4).round_int(), BigInt::from(2));
        assert_eq!(d(-3.6).round_int(), BigInt::from(-4));
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(d(1e-30) < d(1.0));
        assert!(d(-1e30) < d(-1.0));
        assert!(d(0.75) > d(0.5));
        assert_eq!(d(0.0).cmp(&Dyadic::zero()), Ordering::Equal);
    }

    #[test]
    fn scientific_strings() {
        assert_eq!(Dyadic::from_int(1234).to_sci_string(3, Round::Nearest), "1.23e3");
        assert_eq!(Dyadic::from_int(1234).to_sci_string(3, Round::Up), "1.24e3");
        assert_eq!(d(0.5).to_sci_string(4, Round::Nearest), "5.000e-1");
        assert_eq!(d(-0.5).to_sci_string(1, Round::Nearest), "-5e-1");
        assert_eq!(Dyadic::from_int(7).to_sci_string(1, Round::Nearest), "7");
    }

    #[test]
    fn parses_decimal_literals() {
        assert_eq!(
            parse_decimal_ratio("8.59e13").unwrap(),
            (BigInt::from(85_900_000_000_000i64), BigInt::one())
        );
        assert_eq!(
            parse_decimal_ratio("-1.25").unwrap(),
            (BigInt::from(-125), BigInt::from(100))
        );
        assert!(parse_decimal_ratio("1.2.3").is_none());
        assert!(parse_decimal_ratio("").is_none());
    }

    #[test]
    fn f64_roundtrip() {
        for x in [1.0, -0.1, 3.5e-300, 6.02e23] {
            assert_eq!(d(x).to_f64(), x);
        }
    }
}
