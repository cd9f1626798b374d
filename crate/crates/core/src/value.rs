//! Exact extended-real values: rationals plus the two infinities.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// Parses `p/q`, `p`, or `-p/q` into an exact rational. A zero denominator is an error.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i64 = num
        .parse()
        .map_err(|_| Error::parse(s, "malformed rational numerator"))?;
    let den: i64 = den
        .parse()
        .map_err(|_| Error::parse(s, "malformed rational denominator"))?;
    if den == 0 {
        return Err(Error::parse(s, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedValue {
    Finite(Rational),
    PosInf,
    NegInf,
}

impl ExtendedValue {
    pub const ZERO: ExtendedValue = ExtendedValue::Finite(Ratio::new_raw(0, 1));

    pub fn finite(r: Rational) -> Self {
        ExtendedValue::Finite(r)
    }

    pub fn from_int(n: i64) -> Self {
        ExtendedValue::Finite(Rational::from_integer(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedValue::Finite(_))
    }

    pub fn as_finite(&self) -> Option<Rational> {
        match self {
            ExtendedValue::Finite(r) => Some(*r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtendedValue::Finite(r) if r.is_zero())
    }

    pub fn abs(&self) -> Self {
        match self {
            ExtendedValue::Finite(r) => ExtendedValue::Finite(r.abs()),
            _ => ExtendedValue::PosInf,
        }
    }

    /// Exact sum; `∞ + (−∞)` is an error.
    pub fn checked_add(self, other: Self) -> Result<Self> {
        use ExtendedValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::InfConflict),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
        }
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        self.checked_add(-other)
    }

    /// Multiplication by a rational coefficient; `0 · ±∞ = 0`.
    pub fn scale(self, c: Rational) -> Self {
        use ExtendedValue::*;
        if c.is_zero() {
            return ExtendedValue::ZERO;
        }
        match self {
            Finite(a) => Finite(a * c),
            PosInf if c.is_positive() => PosInf,
            PosInf => NegInf,
            NegInf if c.is_positive() => NegInf,
            NegInf => PosInf,
        }
    }
}

impl From<Rational> for ExtendedValue {
    fn from(r: Rational) -> Self {
        ExtendedValue::Finite(r)
    }
}

impl Neg for ExtendedValue {
    type Output = ExtendedValue;
    fn neg(self) -> Self {
        match self {
            ExtendedValue::Finite(r) => ExtendedValue::Finite(-r),
            ExtendedValue::PosInf => ExtendedValue::NegInf,
            ExtendedValue::NegInf => ExtendedValue::PosInf,
        }
    }
}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (PosInf, PosInf) | (NegInf, NegInf) => Ordering::Equal,
            (PosInf, _) | (_, NegInf) => Ordering::Greater,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ExtendedValue::PosInf => f.write_str("inf"),
            ExtendedValue::NegInf => f.write_str("-inf"),
        }
    }
}

impl FromStr for ExtendedValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtendedValue::PosInf),
            "-inf" => Ok(ExtendedValue::NegInf),
            other => parse_rational(other).map(ExtendedValue::Finite),
        }
    }
}

impl Serialize for ExtendedValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtendedValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
