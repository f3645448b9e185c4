//! UTC day arithmetic and half-open time windows.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SECS_PER_DAY: i64 = 86_400;

/// UTC calendar day containing `ts`.
pub fn day_of(ts: i64) -> NaiveDate {
    DateTime::from_timestamp(ts.div_euclid(SECS_PER_DAY) * SECS_PER_DAY, 0)
        .expect("timestamp within chrono range")
        .date_naive()
}

/// 00:00:00 UTC of `date` as a Unix timestamp.
pub fn midnight(date: NaiveDate) -> i64 {
    date.and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp()
}

/// Days since 1970-01-01 for `date`.
pub fn day_number(date: NaiveDate) -> i64 {
    midnight(date).div_euclid(SECS_PER_DAY)
}

pub fn date_from_day_number(day: i64) -> NaiveDate {
    day_of(day * SECS_PER_DAY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WindowLabel {
    PreSanction,
    Post7,
    Post30,
    UpToDate,
}

impl WindowLabel {
    pub const ALL: [WindowLabel; 4] = [
        WindowLabel::PreSanction,
        WindowLabel::Post7,
        WindowLabel::Post30,
        WindowLabel::UpToDate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WindowLabel::PreSanction => "PreSanction",
            WindowLabel::Post7 => "Post7",
            WindowLabel::Post30 => "Post30",
            WindowLabel::UpToDate => "UpToDate",
        }
    }
}

impl fmt::Display for WindowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown window label `{0}` (expected PreSanction, Post7, Post30 or UpToDate)")]
pub struct UnknownWindowLabel(pub String);

impl FromStr for WindowLabel {
    type Err = UnknownWindowLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match key.as_str() {
            "presanction" | "pre" => Ok(WindowLabel::PreSanction),
            "post7" => Ok(WindowLabel::Post7),
            "post30" => Ok(WindowLabel::Post30),
            "uptodate" => Ok(WindowLabel::UpToDate),
            _ => Err(UnknownWindowLabel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("empty or inverted window [{start}, {end})")]
pub struct InvalidWindow {
    pub start: i64,
    pub end: i64,
}

/// Half-open interval `[start, end)` of Unix timestamps, optionally tagged
/// with the analysis stage it represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeWindow {
    pub label: Option<WindowLabel>,
    pub start: i64,
    pub end: i64,
}

impl TimeWindow {
    pub fn new(start: i64, end: i64) -> Result<Self, InvalidWindow> {
        if start >= end {
            return Err(InvalidWindow { start, end });
        }
        Ok(TimeWindow {
            label: None,
            start,
            end,
        })
    }

    pub fn labeled(label: WindowLabel, start: i64, end: i64) -> Result<Self, InvalidWindow> {
        Ok(TimeWindow {
            label: Some(label),
            ..Self::new(start, end)?
        })
    }

    /// Every representable timestamp.
    pub fn unbounded() -> Self {
        TimeWindow {
            label: None,
            start: i64::MIN,
            end: i64::MAX,
        }
    }

    pub fn contains(&self, ts: i64) -> bool {
        self.start <= ts && ts < self.end
    }

    /// `self ⊆ other` as intervals.
    pub fn is_within(&self, other: &TimeWindow) -> bool {
        other.start <= self.start && self.end <= other.end
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn day_boundaries() {
        let d = NaiveDate::from_ymd_opt(2020, 1, 10).unwrap();
        let m = midnight(d);
        assert_eq!(m, 1_578_614_400);
        assert_eq!(day_of(m), d);
        assert_eq!(day_of(m + SECS_PER_DAY - 1), d);
        assert_eq!(day_of(m - 1), d.pred_opt().unwrap());
        assert_eq!(date_from_day_number(day_number(d)), d);
    }

    #[test]
    fn window_validation() {
        assert!(TimeWindow::new(5, 5).is_err());
        assert!(TimeWindow::new(6, 5).is_err());
        let w = TimeWindow::new(5, 10).unwrap();
        assert!(w.contains(5) && w.contains(9) && !w.contains(10));
    }

    #[test]
    fn label_parsing() {
        assert_eq!("post7".parse::<WindowLabel>().unwrap(), WindowLabel::Post7);
        assert_eq!(
            "Up-To-Date".parse::<WindowLabel>().unwrap(),
            WindowLabel::UpToDate
        );
        assert!("post14".parse::<WindowLabel>().is_err());
    }
}
