//! Exact rational enlargement factors.
//!
//! Greedy sets of size `⌈λm⌉` and the span constraint `(λ−1)s(A) + |A| ≤ |B|`
//! are evaluated in integer arithmetic so that no float ceiling can misround.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

/// A positive rational `num/den` kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lambda {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Lambda {
    pub const ONE: Lambda = Lambda { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(LabError::InvalidArgument(format!(
                "lambda numerator and denominator must be positive, got {num}/{den}"
            )));
        }
        let g = gcd(num, den);
        Ok(Lambda {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(n: u64) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// `λ ≥ 1`
    pub fn at_least_one(&self) -> bool {
        self.num >= self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌈λm⌉`
    pub fn ceil_mul(&self, m: usize) -> usize {
        let p = self.num as u128 * m as u128;
        let q = self.den as u128;
        p.div_ceil(q) as usize
    }

    /// Smallest `|B|` allowed by `(λ−1)s + a ≤ |B|`, i.e. `⌈(λ−1)s⌉ + a`.
    ///
    /// Requires `λ ≥ 1`.
    pub fn min_partner_size(&self, span: usize, size: usize) -> usize {
        debug_assert!(self.at_least_one());
        let excess = (self.num - self.den) as u128 * span as u128;
        excess.div_ceil(self.den as u128) as usize + size
    }

    /// `(λ−1)s + a ≤ b`, exactly.
    pub fn admits(&self, span: usize, size: usize, partner: usize) -> bool {
        partner >= self.min_partner_size(span, size)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Lambda {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim().parse::<u64>().map_err(|_| {
                LabError::InvalidArgument(format!("cannot parse lambda {s:?}; expected p/q"))
            })
        };
        match s.split_once('/') {
            Some((p, q)) => Lambda::new(parse(p)?, parse(q)?),
            None => Lambda::new(parse(s)?, 1),
        }
    }
}

impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        let l: Lambda = "6/4".parse().unwrap();
        assert_eq!((l.numerator(), l.denominator()), (3, 2));
        assert_eq!(l.to_string(), "3/2");
        assert_eq!("2".parse::<Lambda>().unwrap().to_string(), "2");
        assert!("0/3".parse::<Lambda>().is_err());
        assert!("1/0".parse::<Lambda>().is_err());
        assert!("x".parse::<Lambda>().is_err());
    }

    #[test]
    fn ceiling_is_exact() {
        let l = Lambda::new(3, 2).unwrap();
        assert_eq!(l.ceil_mul(0), 0);
        assert_eq!(l.ceil_mul(1), 2);
        assert_eq!(l.ceil_mul(2), 3);
        assert_eq!(l.ceil_mul(3), 5);
        // (7/3) * 27 = 63.00000000000001 in floats; exact ceiling is 63
        let l = Lambda::new(7, 3).unwrap();
        assert_eq!(l.ceil_mul(27), 63);
        assert_eq!((l.as_f64() * 27.0).ceil(), 64.0);
    }

    #[test]
    fn span_constraint() {
        let two = Lambda::integer(2).unwrap();
        // A = {10}, B = {1}: s(A) = 1, |A| = 1, needs |B| >= 2
        assert!(!two.admits(1, 1, 1));
        assert!(two.admits(1, 1, 2));
        let l = Lambda::new(3, 2).unwrap();
        // (1/2) * 3 + 1 = 2.5 -> 3
        assert_eq!(l.min_partner_size(3, 1), 3);
        assert_eq!(Lambda::ONE.min_partner_size(40, 4), 4);
    }
}
