//! Concatenations of three repdigits and the brute-force scan over a
//! recurrence.
//!
//! A pattern `(a, l, b, m, c, k)` stands for the digit string
//! `a…a b…b c…c` with block lengths `l, m, k`, whose value is
//! `(a·10^(l+m+k) − (a−b)·10^(m+k) − (b−c)·10^k − c) / 9`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Pow;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sequence::RecurrenceDef;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("{0} has fewer than three digits")]
    TooShort(BigUint),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("closed form and digit string disagree for {0}")]
    InternalMismatch(String),
    #[error("invalid index range {0}..={1}")]
    InvalidRange(u64, u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConcatPattern {
    pub a: u8,
    pub l: u32,
    pub b: u8,
    pub m: u32,
    pub c: u8,
    pub k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// Adjacent blocks use different digits.
    AllDistinct,
    AEqB,
    BEqC,
    AllEqual,
}

impl ConcatPattern {
    pub fn new(a: u8, l: u32, b: u8, m: u32, c: u8, k: u32) -> Result<Self, SearchError> {
        let p = ConcatPattern { a, l, b, m, c, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if !(1..=9).contains(&self.a) || self.b > 9 || self.c > 9 {
            return Err(SearchError::InvalidPattern(format!("digits out of range in {self:?}")));
        }
        if self.l == 0 || self.m == 0 || self.k == 0 {
            return Err(SearchError::InvalidPattern(format!("empty block in {self:?}")));
        }
        Ok(())
    }

    /// Number of decimal digits, `l + m + k`.
    pub fn digit_len(&self) -> u64 {
        self.l as u64 + self.m as u64 + self.k as u64
    }

    pub fn case_tag(&self) -> CaseTag {
        match (self.a == self.b, self.b == self.c) {
            (true, true) => CaseTag::AllEqual,
            (true, false) => CaseTag::AEqB,
            (false, true) => CaseTag::BEqC,
            (false, false) => CaseTag::AllDistinct,
        }
    }

    pub fn digit_string(&self) -> String {
        let block = |d: u8, n: u32| char::from(b'0' + d).to_string().repeat(n as usize);
        let mut s = block(self.a, self.l);
        s.push_str(&block(self.b, self.m));
        s.push_str(&block(self.c, self.k));
        s
    }
}

impl std::fmt::Display for ConcatPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({},{}, {},{}, {},{})",
            self.a, self.l, self.b, self.m, self.c, self.k
        )
    }
}

fn pow10(e: u64) -> BigInt {
    BigInt::from(10u32).pow(e)
}

/// `d·(10^len − 1)/9`.
pub fn repdigit_value(d: u8, len: u32) -> Result<BigUint, SearchError> {
    if d > 9 || len == 0 {
        return Err(SearchError::InvalidPattern(format!("repdigit ({d}, {len})")));
    }
    let r = (BigUint::from(10u32).pow(len) - 1u32) / 9u32;
    Ok(r * d)
}

/// Value of the pattern from the closed form, checked against the digit string.
pub fn concat_value(p: &ConcatPattern) -> Result<BigUint, SearchError> {
    p.validate()?;
    let (a, b, c) = (BigInt::from(p.a), BigInt::from(p.b), BigInt::from(p.c));
    let k = p.k as u64;
    let mk = p.m as u64 + k;
    let total: BigInt = a.clone() * pow10(mk + p.l as u64) - (&a - &b) * pow10(mk) - (&b - &c) * pow10(k) - &c;
    let closed = (total / 9u32)
        .to_biguint()
        .ok_or_else(|| SearchError::InternalMismatch(p.to_string()))?;
    let from_string: BigUint = p
        .digit_string()
        .parse()
        .map_err(|_| SearchError::InternalMismatch(p.to_string()))?;
    if closed != from_string {
        return Err(SearchError::InternalMismatch(p.to_string()));
    }
    Ok(closed)
}

/// Every split of `n`'s decimal string into three constant blocks, sorted by `(l, m)`.
pub fn decompose(n: &BigUint) -> Result<Vec<ConcatPattern>, SearchError> {
    if n < &BigUint::from(100u32) {
        return Err(SearchError::TooShort(n.clone()));
    }
    let s = n.to_str_radix(10).into_bytes();
    let len = s.len();
    // run_end[i]: one past the last index of the run starting at i
    let mut run_end = vec![len; len];
    for i in (0..len - 1).rev() {
        run_end[i] = if s[i] == s[i + 1] { run_end[i + 1] } else { i + 1 };
    }
    let mut out = Vec::new();
    let max_l = run_end[0].min(len - 2);
    for l in 1..=max_l {
        let max_m = (run_end[l] - l).min(len - l - 1);
        for m in 1..=max_m {
            if run_end[l + m] == len {
                out.push(ConcatPattern {
                    a: s[0] - b'0',
                    l: l as u32,
                    b: s[l] - b'0',
                    m: m as u32,
                    c: s[l + m] - b'0',
                    k: (len - l - m) as u32,
                });
            }
        }
    }
    Ok(out)
}

/// A term of the recurrence that is a concatenation of three repdigits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    /// Smallest index with this value.
    pub n: u64,
    /// All indices in the scanned range with this value.
    pub indices: Vec<u64>,
    #[serde(with = "crate::serde_big::biguint")]
    pub value: BigUint,
    pub patterns: Vec<ConcatPattern>,
    /// Classification of the first pattern.
    pub case_tag: CaseTag,
}

/// Scan `n_min..=n_max` and collect every value with a three-block decomposition.
pub fn search(n_min: u64, n_max: u64, recurrence: &RecurrenceDef) -> Result<Vec<Solution>, SearchError> {
    if n_min < 1 || n_min > n_max {
        return Err(SearchError::InvalidRange(n_min, n_max));
    }
    let hundred = BigUint::from(100u32);
    let mut by_value: BTreeMap<BigUint, Solution> = BTreeMap::new();
    for (n, value) in recurrence
        .iter()
        .skip(n_min as usize)
        .take((n_max - n_min + 1) as usize)
    {
        if value < hundred {
            continue;
        }
        if let Some(sol) = by_value.get_mut(&value) {
            sol.indices.push(n);
            continue;
        }
        let patterns = decompose(&value)?;
        if patterns.is_empty() {
            continue;
        }
        for p in &patterns {
            if concat_value(p)? != value {
                return Err(SearchError::InternalMismatch(p.to_string()));
            }
        }
        let case_tag = patterns[0].case_tag();
        by_value.insert(
            value.clone(),
            Solution {
                n,
                indices: vec![n],
                value,
                patterns,
                case_tag,
            },
        );
    }
    let mut out: Vec<Solution> = by_value.into_values().collect();
    out.sort_by_key(|s| s.n);
    Ok(out)
}

/// Decimal values of the solutions, in index order.
pub fn solution_values(solutions: &[Solution]) -> Vec<String> {
    solutions.iter().map(|s| s.value.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn pat(a: u8, l: u32, b: u8, m: u32, c: u8, k: u32) -> ConcatPattern {
        ConcatPattern::new(a, l, b, m, c, k).unwrap()
    }

    #[test]
    fn repdigits() {
        assert_eq!(repdigit_value(3, 4).unwrap(), BigUint::from(3333u32));
        assert!(repdigit_value(0, 5).unwrap().is_zero());
        assert_eq!(repdigit_value(9, 2).unwrap(), BigUint::from(99u32));
        assert!(repdigit_value(10, 2).is_err());
        assert!(repdigit_value(1, 0).is_err());
    }

    #[test]
    fn concat_examples() {
        assert_eq!(concat_value(&pat(9, 1, 2, 2, 1, 3)).unwrap(), BigUint::from(922111u32));
        assert_eq!(concat_value(&pat(4, 2, 1, 1, 0, 1)).unwrap(), BigUint::from(4410u32));
        assert_eq!(concat_value(&pat(1, 1, 1, 1, 4, 1)).unwrap(), BigUint::from(114u32));
    }

    #[test]
    fn invalid_patterns() {
        assert!(ConcatPattern::new(0, 1, 1, 1, 1, 1).is_err());
        assert!(ConcatPattern::new(1, 0, 1, 1, 1, 1).is_err());
        assert!(ConcatPattern::new(1, 1, 10, 1, 1, 1).is_err());
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(
            decompose(&BigUint::from(922111u32)).unwrap(),
            vec![pat(9, 1, 2, 2, 1, 3)]
        );
        assert_eq!(decompose(&BigUint::from(114u32)).unwrap(), vec![pat(1, 1, 1, 1, 4, 1)]);
        assert!(decompose(&BigUint::from(2513u32)).unwrap().is_empty());
        assert!(matches!(
            decompose(&BigUint::from(99u32)),
            Err(SearchError::TooShort(_))
        ));
        // a single run of four digits splits three ways
        assert_eq!(
            decompose(&BigUint::from(7777u32)).unwrap(),
            vec![pat(7, 1, 7, 1, 7, 2), pat(7, 1, 7, 2, 7, 1), pat(7, 2, 7, 1, 7, 1)]
        );
    }

    #[test]
    fn case_tags() {
        assert_eq!(pat(1, 1, 1, 1, 4, 1).case_tag(), CaseTag::AEqB);
        assert_eq!(pat(2, 1, 0, 1, 0, 1).case_tag(), CaseTag::BEqC);
        assert_eq!(pat(1, 1, 5, 1, 1, 1).case_tag(), CaseTag::AllDistinct);
        assert_eq!(pat(3, 1, 3, 1, 3, 1).case_tag(), CaseTag::AllEqual);
    }

    #[test]
    fn small_searches() {
        let p = RecurrenceDef::padovan();
        assert!(search(1, 17, &p).unwrap().is_empty());
        let s = search(19, 19, &p).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].value, BigUint::from(151u32));
        assert_eq!(s[0].patterns, vec![pat(1, 1, 5, 1, 1, 1)]);
        assert!(search(0, 3, &p).is_err());
        assert!(search(5, 3, &p).is_err());
    }
}
