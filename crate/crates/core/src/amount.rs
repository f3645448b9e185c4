//! Exact fixed-point money types.
//!
//! Prices carry eight fractional digits of USD per BTC. Multiplying a satoshi
//! amount by a price therefore yields an integer count of 1e-16 USD, which is
//! what [`Usd`] stores. Sums stay exact; rounding happens only when a report
//! is formatted.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const SAT_PER_BTC: u64 = 100_000_000;

const PRICE_DIGITS: u32 = 8;
const PRICE_SCALE: u64 = 10u64.pow(PRICE_DIGITS);
const USD_DIGITS: u32 = 16;
const USD_SCALE: i128 = 10i128.pow(USD_DIGITS);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmountError {
    #[error("empty decimal")]
    Empty,
    #[error("invalid decimal `{0}`")]
    Invalid(String),
    #[error("`{0}` has more than {1} fractional digits")]
    TooPrecise(String, u32),
    #[error("price must be positive, got `{0}`")]
    NonPositive(String),
}

/// Parses an unsigned or signed decimal into an integer scaled by
/// `10^digits`. Returns the scaled magnitude and the sign.
fn parse_scaled(s: &str, digits: u32) -> Result<(bool, u128), AmountError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(AmountError::Empty);
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(AmountError::Invalid(s.to_string()));
    }
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(AmountError::Invalid(s.to_string()));
    }
    let frac_trimmed = frac_part.trim_end_matches('0');
    if frac_trimmed.len() > digits as usize {
        return Err(AmountError::TooPrecise(s.to_string(), digits));
    }
    let overflow = || AmountError::Invalid(s.to_string());
    let mut value: u128 = 0;
    for b in int_part.bytes() {
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add(u128::from(b - b'0')))
            .ok_or_else(overflow)?;
    }
    let mut frac: u128 = 0;
    for b in frac_trimmed.bytes() {
        frac = frac * 10 + u128::from(b - b'0');
    }
    frac *= 10u128.pow(digits - frac_trimmed.len() as u32);
    let scaled = value
        .checked_mul(10u128.pow(digits))
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(overflow)?;
    Ok((negative, scaled))
}

fn fmt_scaled(
    f: &mut fmt::Formatter<'_>,
    negative: bool,
    magnitude: u128,
    digits: u32,
) -> fmt::Result {
    let scale = 10u128.pow(digits);
    let int = magnitude / scale;
    let frac = magnitude % scale;
    if negative && magnitude != 0 {
        f.write_str("-")?;
    }
    if frac == 0 {
        write!(f, "{int}")
    } else {
        let frac = format!("{:0width$}", frac, width = digits as usize);
        write!(f, "{int}.{}", frac.trim_end_matches('0'))
    }
}

/// USD per BTC with eight fractional digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Price(u64);

impl Price {
    pub fn from_units(units: u64) -> Result<Self, AmountError> {
        if units == 0 {
            return Err(AmountError::NonPositive("0".into()));
        }
        Ok(Price(units))
    }

    pub fn from_usd(usd: u64) -> Result<Self, AmountError> {
        usd.checked_mul(PRICE_SCALE)
            .ok_or_else(|| AmountError::Invalid(usd.to_string()))
            .and_then(Self::from_units)
    }

    /// Price in 1e-8 USD per BTC.
    pub fn units(self) -> u64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / PRICE_SCALE as f64
    }
}

impl FromStr for Price {
    type Err = AmountError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (negative, scaled) = parse_scaled(s, PRICE_DIGITS)?;
        if negative || scaled == 0 {
            return Err(AmountError::NonPositive(s.trim().to_string()));
        }
        let units = u64::try_from(scaled).map_err(|_| AmountError::Invalid(s.to_string()))?;
        Ok(Price(units))
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_scaled(f, false, u128::from(self.0), PRICE_DIGITS)
    }
}

/// Exact USD amount in units of 1e-16 USD.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Usd(i128);

impl Usd {
    pub const ZERO: Usd = Usd(0);

    /// Value of `sat` satoshi at `price`.
    pub fn from_sat_at(sat: u64, price: Price) -> Self {
        Usd(i128::from(sat) * i128::from(price.0))
    }

    pub fn from_units(units: i128) -> Self {
        Usd(units)
    }

    pub fn units(self) -> i128 {
        self.0
    }

    /// Rounded to whole cents, half away from zero.
    pub fn round_cents(self) -> i128 {
        let step = USD_SCALE / 100;
        let half = step / 2;
        if self.0 >= 0 {
            (self.0 + half) / step
        } else {
            -((-self.0 + half) / step)
        }
    }

    /// Two-decimal rendering used in emitted reports.
    pub fn to_cents_string(self) -> String {
        let cents = self.round_cents();
        let sign = if cents < 0 { "-" } else { "" };
        let cents = cents.abs();
        format!("{sign}{}.{:02}", cents / 100, cents % 100)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / USD_SCALE as f64
    }
}

impl Add for Usd {
    type Output = Usd;

    fn add(self, rhs: Usd) -> Usd {
        Usd(self.0 + rhs.0)
    }
}

impl AddAssign for Usd {
    fn add_assign(&mut self, rhs: Usd) {
        self.0 += rhs.0;
    }
}

impl Sum for Usd {
    fn sum<I: Iterator<Item = Usd>>(iter: I) -> Usd {
        iter.fold(Usd::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Usd> for Usd {
    fn sum<I: Iterator<Item = &'a Usd>>(iter: I) -> Usd {
        iter.copied().sum()
    }
}

impl fmt::Display for Usd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_scaled(f, self.0 < 0, self.0.unsigned_abs(), USD_DIGITS)
    }
}

impl FromStr for Usd {
    type Err = AmountError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (negative, scaled) = parse_scaled(s, USD_DIGITS)?;
        let units = i128::try_from(scaled).map_err(|_| AmountError::Invalid(s.to_string()))?;
        Ok(Usd(if negative { -units } else { units }))
    }
}

// Exact amounts travel through JSON as decimal strings.
impl Serialize for Usd {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Usd {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Price {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Price {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn price_parsing() {
        assert_eq!("7000".parse::<Price>().unwrap().units(), 7000 * PRICE_SCALE);
        assert_eq!("0.00000001".parse::<Price>().unwrap().units(), 1);
        assert_eq!("42.50".parse::<Price>().unwrap().to_string(), "42.5");
        assert!(matches!(
            "0".parse::<Price>(),
            Err(AmountError::NonPositive(_))
        ));
        assert!(matches!(
            "-3".parse::<Price>(),
            Err(AmountError::NonPositive(_))
        ));
        assert!(matches!(
            "1.000000001".parse::<Price>(),
            Err(AmountError::TooPrecise(..))
        ));
        assert!("abc".parse::<Price>().is_err());
        assert!(".".parse::<Price>().is_err());
    }

    #[test]
    fn two_btc_at_ten_thousand() {
        let usd = Usd::from_sat_at(2 * SAT_PER_BTC, Price::from_usd(10_000).unwrap());
        assert_eq!(usd.to_string(), "20000");
        assert_eq!(usd.to_cents_string(), "20000.00");
    }

    #[test]
    fn cent_rounding_is_half_away_from_zero() {
        // 1 sat at 0.5 USD/BTC = 5e-9 USD
        let tiny = Usd::from_sat_at(1, "0.5".parse().unwrap());
        assert_eq!(tiny.to_cents_string(), "0.00");
        let half_cent: Usd = "0.005".parse().unwrap();
        assert_eq!(half_cent.to_cents_string(), "0.01");
        let neg: Usd = "-0.005".parse().unwrap();
        assert_eq!(neg.to_cents_string(), "-0.01");
        let below: Usd = "0.0049999".parse().unwrap();
        assert_eq!(below.to_cents_string(), "0.00");
    }

    #[test]
    fn usd_string_round_trip() {
        for s in ["0", "1", "0.0000000000000001", "123456789.25", "-7.5"] {
            let usd: Usd = s.parse().unwrap();
            assert_eq!(usd.to_string(), s);
        }
    }
}
