//! Exact positive scaling factors.
//!
//! Scaling-factor chains (products in multipliers, division by `k` or `m`,
//! multiplication by sub-sample rates) stay exact as rationals and are only
//! converted to `f64` when a value leaves the simulator.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational used for values and scales.
pub type Exact = Ratio<i128>;

/// A strictly positive rational scaling factor.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scale(Exact);

impl Scale {
    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::NonPositiveScale(format!("{num}/0")));
        }
        Self::from_ratio(Ratio::new(num, den))
    }

    pub fn from_ratio(r: Exact) -> Result<Self> {
        if r.is_positive() {
            Ok(Scale(r))
        } else {
            Err(Error::NonPositiveScale(r.to_string()))
        }
    }

    pub fn integer(n: u64) -> Result<Self> {
        Self::new(n as i128, 1)
    }

    pub fn one() -> Self {
        Scale(Exact::one())
    }

    /// `num / den` for positive integers; panics on zero.
    pub fn frac(num: u64, den: u64) -> Self {
        assert!(num > 0 && den > 0, "scale must be positive");
        Scale(Ratio::new(num as i128, den as i128))
    }

    pub fn ratio(&self) -> Exact {
        self.0
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn recip(&self) -> Self {
        Scale(self.0.recip())
    }

    /// `Some(n)` when the scale is a positive integer.
    pub fn as_integer(&self) -> Option<u64> {
        if self.0.is_integer() {
            self.0.to_integer().to_u64()
        } else {
            None
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scale({self})")
    }
}

impl PartialOrd for Scale {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scale {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Mul for Scale {
    type Output = Scale;
    fn mul(self, rhs: Scale) -> Scale {
        Scale(self.0 * rhs.0)
    }
}

impl Div for Scale {
    type Output = Scale;
    fn div(self, rhs: Scale) -> Scale {
        Scale(self.0 / rhs.0)
    }
}

impl Mul<u64> for Scale {
    type Output = Scale;
    fn mul(self, rhs: u64) -> Scale {
        Scale(self.0 * rhs as i128)
    }
}

impl Div<u64> for Scale {
    type Output = Scale;
    fn div(self, rhs: u64) -> Scale {
        Scale(self.0 / rhs as i128)
    }
}

/// Parses `p/q`, an integer, or a plain decimal such as `0.25` (exactly).
pub fn parse_exact(s: &str) -> Result<Exact> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() || s.len() > 64 {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
        || frac_part.len() > 30
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let den = 10i128
        .checked_pow(frac_part.len() as u32)
        .ok_or_else(bad)?;
    let r = Ratio::new(num, den);
    Ok(if neg { -r } else { r })
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let r = parse_exact(s)?;
        if r.is_zero() || r.is_negative() {
            return Err(Error::NonPositiveScale(s.trim().to_string()));
        }
        Ok(Scale(r))
    }
}

impl Serialize for Scale {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scale {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
