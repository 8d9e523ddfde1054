//! Exact poisoning budgets.
//!
//! Budgets are kept as reduced fractions so that `⌊η·n⌋` and grid positions
//! that are integer multiples of η never pick up floating point error.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A poisoning budget η ∈ (0, 1), stored as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Budget {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Budget {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidBudget(format!("{num}/{den}: zero denominator")));
        }
        if num == 0 || num >= den {
            return Err(Error::InvalidBudget(format!("{num}/{den} is not in (0,1)")));
        }
        let g = gcd(num, den);
        Ok(Self { num: num / g, den: den / g })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `⌊factor · η · n⌋`, exact.
    pub fn max_changes(&self, factor: u64, n: usize) -> usize {
        let prod = u128::from(self.num) * u128::from(factor) * n as u128;
        (prod / u128::from(self.den)) as usize
    }

    /// `factor · η`, which must itself stay below one.
    pub fn scaled(&self, factor: u64) -> Result<Budget> {
        let num = self
            .num
            .checked_mul(factor)
            .ok_or_else(|| Error::InvalidBudget("overflow scaling budget".into()))?;
        Budget::new(num, self.den)
    }

    /// `η / divisor`.
    pub fn divided(&self, divisor: u64) -> Result<Budget> {
        let den = self
            .den
            .checked_mul(divisor)
            .ok_or_else(|| Error::InvalidBudget("overflow dividing budget".into()))?;
        Budget::new(self.num, den)
    }

    /// Exact comparison `self ≤ other`.
    pub fn le(&self, other: &Budget) -> bool {
        u128::from(self.num) * u128::from(other.den) <= u128::from(other.num) * u128::from(self.den)
    }

    /// Exact comparison `self < 1/k`.
    pub fn below_reciprocal(&self, k: u64) -> bool {
        u128::from(self.num) * u128::from(k) < u128::from(self.den)
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Budget {
    type Err = Error;

    /// Accepts `a/b` fractions and plain decimals such as `0.015625`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = a
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidBudget(format!("bad numerator in {s:?}")))?;
            let den = b
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidBudget(format!("bad denominator in {s:?}")))?;
            return Budget::new(num, den);
        }
        let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || frac_part.len() > 18
        {
            return Err(Error::InvalidBudget(format!("cannot parse {s:?} as a fraction")));
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let int: u64 = if int_part.is_empty() { 0 } else {
            int_part
                .parse()
                .map_err(|_| Error::InvalidBudget(format!("cannot parse {s:?}")))?
        };
        let frac: u64 = if frac_part.is_empty() { 0 } else {
            frac_part
                .parse()
                .map_err(|_| Error::InvalidBudget(format!("cannot parse {s:?}")))?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(|| Error::InvalidBudget(format!("{s:?} overflows")))?;
        Budget::new(num, den)
    }
}
