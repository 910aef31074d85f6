//! Fixed-point kernels for the elementary functions.
//!
//! Each kernel works on integers scaled by `2^w` and returns the value together
//! with an upper bound on its absolute error, counted in units of `2^-w`.
//! The bounds are deliberately loose; callers fold them into ball radii.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;

/// Value `man · 2^-w` with error at most `err · 2^-w`.
#[derive(Clone, Debug)]
pub(crate) struct Fixed {
    pub man: BigInt,
    pub err: u64,
    pub w: u64,
}

impl Fixed {
    pub fn mid(&self) -> Dyadic {
        Dyadic::new(self.man.clone(), -(self.w as i64))
    }

    pub fn err(&self) -> Dyadic {
        Dyadic::new(BigInt::from(self.err), -(self.w as i64))
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// `atanh(num/den)` for `|num/den| <= 1/2`.
pub(crate) fn atanh_ratio(num: &BigInt, den: &BigInt, w: u64) -> Fixed {
    assert!(!den.is_zero());
    debug_assert!(BigInt::from(2) * num.abs() <= den.abs());
    if num.is_zero() {
        return Fixed {
            man: BigInt::zero(),
            err: 0,
            w,
        };
    }
    let one = BigInt::one() << w;
    // p_0 = z, z2 = z^2, each truncated: error < 1 ulp.
    let mut p = floor_div(&(num << w), den);
    let z2 = floor_div(&((num * num) << w), &(den * den));
    let mut sum = p.clone();
    let mut terms: u64 = 1;
    let mut k: u64 = 1;
    // |p_k| error stays below 2 ulps because |z2| <= 1/4; each term adds
    // at most 3 ulps after the small division.
    loop {
        p = floor_div(&(&p * &z2), &one);
        if p.abs() <= BigInt::one() {
            break;
        }
        let t = floor_div(&p, &BigInt::from(2 * k + 1));
        sum += t;
        terms += 1;
        k += 1;
    }
    Fixed {
        man: sum,
        err: 3 * terms + 5,
        w,
    }
}

/// `ln 2 = 2·atanh(1/3)`.
pub(crate) fn ln2(w: u64) -> Fixed {
    let a = atanh_ratio(&BigInt::one(), &BigInt::from(3), w);
    Fixed {
        man: a.man * 2,
        err: a.err * 2,
        w,
    }
}

/// `ln(num/den)` for positive integers, accurate to about `w` fractional bits.
pub(crate) fn ln_ratio(num: &BigInt, den: &BigInt, w: u64) -> Fixed {
    assert!(num.is_positive() && den.is_positive(), "ln of non-positive ratio");
    // Bring num/den into [3/4, 3/2) by a power of two, then use
    // ln u = 2·atanh((u-1)/(u+1)) with |(u-1)/(u+1)| <= 1/5.
    let mut s = num.bits() as i64 - den.bits() as i64;
    let (mut n, mut d) = (num.clone(), den.clone());
    if s > 0 {
        d <<= s as u64;
    } else if s < 0 {
        n <<= (-s) as u64;
    }
    // now n/d in (1/2, 2)
    if BigInt::from(4) * &n < BigInt::from(3) * &d {
        n <<= 1;
        s -= 1;
    } else if BigInt::from(2) * &n >= BigInt::from(3) * &d {
        d <<= 1;
        s += 1;
    }
    let zn = &n - &d;
    let zd = &n + &d;
    // Extra bits when the ratio is close to one so the result keeps
    // relative accuracy as well.
    let tiny = if zn.is_zero() {
        0
    } else {
        (zd.bits() as i64 - zn.bits() as i64).max(0) as u64
    };
    let wa = w + tiny;
    let a = atanh_ratio(&zn, &zd, wa);
    let mut man = a.man * 2;
    let mut err = a.err * 2;
    if s != 0 {
        let l2 = ln2(wa);
        man += &l2.man * s;
        err += l2.err * s.unsigned_abs();
    }
    Fixed { man, err, w: wa }
}

/// `ln x` for a positive dyadic `x`.
pub(crate) fn ln_dyadic(x: &Dyadic, w: u64) -> Fixed {
    assert!(x.is_positive());
    let e = x.exponent();
    let m = x.mantissa();
    if e >= 0 {
        ln_ratio(&(m << e as u64), &BigInt::one(), w)
    } else {
        ln_ratio(m, &(BigInt::one() << (-e) as u64), w)
    }
}

const EXP_SQUARINGS: u64 = 8;

/// `exp x` for a dyadic `x` with `|x| < 2^20`.
///
/// Returns the value as `man · 2^(shift - w)` through the `(Fixed, shift)` pair.
pub(crate) fn exp_dyadic(x: &Dyadic, w: u64) -> (Fixed, i64) {
    let s = EXP_SQUARINGS;
    // k = round(x / ln 2)
    let k: i64 = (x.to_f64() / std::f64::consts::LN_2).round() as i64;
    let guard = 2 * s + 24 + 64 - (k.unsigned_abs().leading_zeros() as u64);
    let wr = w + guard;
    // r = x - k ln 2 at scale 2^-wr
    let l2 = ln2(wr);
    let xr = {
        let e = x.exponent() + wr as i64;
        if e >= 0 {
            x.mantissa() << e as u64
        } else {
            floor_div(x.mantissa(), &(BigInt::one() << (-e) as u64))
        }
    };
    let r = xr - &l2.man * k;
    // error of r in 2^-wr units: 1 (truncation of x) + |k|·err(ln 2)
    let r_err = 1 + k.unsigned_abs().saturating_mul(l2.err);
    // r' = r / 2^s, represented exactly at scale 2^-(wr+s)
    let ws = wr + s;
    let one = BigInt::one() << ws;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut j: u64 = 1;
    loop {
        term = floor_div(&(&term * &r), &(&one * BigInt::from(j)));
        if term.abs() <= BigInt::one() {
            break;
        }
        sum += &term;
        j += 1;
    }
    // Series error: 2 ulps per term plus tail; input error r_err·2^-wr equals
    // r_err·2^s·2^-ws in r', and exp(r') < 2 magnifies by at most 2.
    let mut err: u64 = (2 * j + 4).saturating_add(r_err.saturating_mul(2 << s));
    let mut y = sum;
    for _ in 0..s {
        y = floor_div(&(&y * &y), &one);
        err = err.saturating_mul(3).saturating_add(1);
    }
    // exp(r) = y·2^-ws; result = y·2^(k - ws)
    (Fixed { man: y, err, w: ws }, k)
}

/// Floor of the square root of `x · 2^(2w)` as a fixed-point value.
pub(crate) fn sqrt_dyadic(x: &Dyadic, w: u64) -> Fixed {
    assert!(!x.is_negative());
    if x.is_zero() {
        return Fixed {
            man: BigInt::zero(),
            err: 0,
            w,
        };
    }
    // x·2^(2w) = man·2^(e + 2w)
    let e = x.exponent() + 2 * w as i64;
    let scaled = if e >= 0 {
        x.mantissa() << e as u64
    } else {
        floor_div(x.mantissa(), &(BigInt::one() << (-e) as u64))
    };
    Fixed {
        man: scaled.sqrt(),
        err: 2,
        w,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(f: &Fixed) -> f64 {
        f.mid().to_f64()
    }

    #[test]
    fn ln2_kernel() {
        let f = ln2(200);
        assert!((approx(&f) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(f.err < 1000);
    }

    #[test]
    fn ln_ratio_kernel() {
        let f = ln_ratio(&BigInt::from(10), &BigInt::one(), 128);
        assert!((approx(&f) - std::f64::consts::LN_10).abs() < 1e-15);
        let g = ln_ratio(&BigInt::one(), &BigInt::from(7), 128);
        assert!((approx(&g) + 7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn exp_kernel() {
        let (f, k) = exp_dyadic(&Dyadic::from_int(3), 128);
        let v = f.mid().mul_pow2(k).to_f64();
        assert!((v - 3f64.exp()).abs() < 1e-12);
    }
}
