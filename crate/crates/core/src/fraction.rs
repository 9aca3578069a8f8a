//! Exact non-negative fractions for shares and thresholds.
//!
//! Shares are compared against thresholds such as `0.10` with strict
//! inequality, so they are kept as reduced rationals instead of floats.
//! On the wire and in CSV they travel as strings: a decimal when the value
//! has a terminating expansion, `n/d` otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::{Ratio, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Digits kept when a fraction has no terminating decimal expansion.
const MAX_DECIMALS: usize = 12;

/// A non-negative exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction(Ratio<u64>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid fraction {0:?}: expected a decimal like 0.10 or a ratio like 1/10")]
pub struct ParseFractionError(pub String);

impl Fraction {
    pub const ZERO: Fraction = Fraction(Ratio::new_raw(0, 1));
    pub const ONE: Fraction = Fraction(Ratio::new_raw(1, 1));

    /// Panics when `denom` is zero.
    pub fn new(numer: u64, denom: u64) -> Self {
        Fraction(Ratio::new(numer, denom))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True when the value lies in `[0, 1]`.
    pub fn is_unit_interval(&self) -> bool {
        self.numer() <= self.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Percentage with one decimal place, e.g. `68.2%`.
    pub fn percent(&self) -> String {
        // round half up on tenths of a percent, in integer arithmetic
        let scaled = self.numer() as u128 * 1000;
        let d = self.denom() as u128;
        let tenths = (scaled * 2 + d) / (2 * d);
        format!("{}.{}%", tenths / 10, tenths % 10)
    }

    /// Decimal rendering: exact when the expansion terminates, otherwise
    /// rounded to twelve places.
    pub fn to_decimal_string(&self) -> String {
        format_decimal(self.numer() as i128, self.denom() as i128)
    }
}

impl Default for Fraction {
    fn default() -> Self {
        Fraction::ZERO
    }
}

impl From<Fraction> for Rational64 {
    fn from(f: Fraction) -> Self {
        Rational64::new(f.numer() as i64, f.denom() as i64)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl FromStr for Fraction {
    type Err = ParseFractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFractionError(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| err())?;
            let d: u64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            return Ok(Fraction::new(n, d));
        }
        let r = parse_decimal(t).ok_or_else(err)?;
        if r < Rational64::zero() {
            return Err(err());
        }
        Ok(Fraction::new(*r.numer() as u64, *r.denom() as u64))
    }
}

impl Fraction {
    /// Exact text form: a decimal when the expansion terminates, `n/d`
    /// otherwise. [`FromStr`] reads both.
    pub fn to_exact_string(&self) -> String {
        if terminates(self.denom() as u128) {
            self.to_decimal_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_exact_string())
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Compares `a/b` against a fraction without building a ratio.
pub fn cmp_ratio(numer: u64, denom: u64, against: Fraction) -> Ordering {
    (numer as u128 * against.denom() as u128).cmp(&(against.numer() as u128 * denom as u128))
}

/// Parses a plain decimal (`-4.5`, `12`, `0.0999`) into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Rational64> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if frac_part.len() > 15 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let r = Rational64::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Decimal rendering of a signed rational.
pub fn rational_to_decimal(r: &Rational64) -> String {
    format_decimal(*r.numer() as i128, *r.denom() as i128)
}

/// Serde adapter writing a [`Rational64`] as its decimal string. Only for
/// values with terminating expansions, such as medians of integers.
pub mod decimal_serde {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&super::rational_to_decimal(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(deserializer)?;
        super::parse_decimal(&s).ok_or_else(|| serde::de::Error::custom(format!("not a decimal: {s:?}")))
    }
}

fn format_decimal(numer: i128, denom: i128) -> String {
    debug_assert!(denom > 0);
    let neg = numer < 0;
    let n = numer.unsigned_abs();
    let d = denom as u128;
    let int = n / d;
    let mut rem = n % d;
    let mut digits = String::new();
    if terminates(d) {
        while rem != 0 {
            rem *= 10;
            digits.push(char::from(b'0' + (rem / d) as u8));
            rem %= d;
        }
        let sign = if neg && (int != 0 || !digits.is_empty()) {
            "-"
        } else {
            ""
        };
        return if digits.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{digits}")
        };
    }
    // non-terminating: round half up at MAX_DECIMALS
    let scale = 10u128.pow(MAX_DECIMALS as u32);
    let scaled = (n * scale * 2 + d) / (2 * d);
    let int = scaled / scale;
    let frac = format!("{:0width$}", scaled % scale, width = MAX_DECIMALS);
    let frac = frac.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

fn terminates(mut d: u128) -> bool {
    while d.is_multiple_of(2) {
        d /= 2;
    }
    while d.is_multiple_of(5) {
        d /= 5;
    }
    d == 1
}
