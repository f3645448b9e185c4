use std::io::Read;

use chrono::NaiveDate;
use serde::Deserialize;

use super::IngestError;
use crate::amount::Price;
use crate::time::{date_from_day_number, day_number, day_of};

/// Gap-free daily BTC/USD table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PriceTable {
    first_day: i64,
    prices: Vec<Price>,
    filled: Vec<NaiveDate>,
}

impl PriceTable {
    /// Builds a table from `(date, price)` pairs in any order, filling gaps
    /// with the previous day's price. Duplicate dates are rejected.
    pub fn from_days(mut days: Vec<(NaiveDate, Price)>) -> Result<Self, (NaiveDate, Price)> {
        days.sort_by_key(|(d, _)| *d);
        if let Some(w) = days.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(w[1]);
        }
        let Some(&(first, _)) = days.first() else {
            return Ok(PriceTable::default());
        };
        let first_day = day_number(first);
        let mut prices = Vec::new();
        let mut filled = Vec::new();
        for (date, price) in days {
            let day = day_number(date);
            while first_day + (prices.len() as i64) < day {
                let last = *prices.last().expect("first day is present");
                filled.push(date_from_day_number(first_day + prices.len() as i64));
                prices.push(last);
            }
            prices.push(price);
        }
        Ok(PriceTable {
            first_day,
            prices,
            filled,
        })
    }

    pub fn constant(first: NaiveDate, last: NaiveDate, price: Price) -> Self {
        let n = (day_number(last) - day_number(first) + 1).max(0) as usize;
        PriceTable {
            first_day: day_number(first),
            prices: vec![price; n],
            filled: Vec::new(),
        }
    }

    pub fn price_on(&self, date: NaiveDate) -> Option<Price> {
        let offset = day_number(date) - self.first_day;
        usize::try_from(offset)
            .ok()
            .and_then(|i| self.prices.get(i).copied())
    }

    /// Price of the UTC day containing `ts`.
    pub fn price_at(&self, ts: i64) -> Option<Price> {
        self.price_on(day_of(ts))
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        (!self.prices.is_empty()).then(|| date_from_day_number(self.first_day))
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        (!self.prices.is_empty())
            .then(|| date_from_day_number(self.first_day + self.prices.len() as i64 - 1))
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Days that were missing from the source and carried forward.
    pub fn filled_days(&self) -> &[NaiveDate] {
        &self.filled
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, Price)> + '_ {
        self.prices
            .iter()
            .enumerate()
            .map(|(i, p)| (date_from_day_number(self.first_day + i as i64), *p))
    }

    /// Distinct UTC days among `timestamps` that the table has no price for,
    /// sorted ascending.
    pub fn missing_days<I: IntoIterator<Item = i64>>(&self, timestamps: I) -> Vec<NaiveDate> {
        let mut missing: Vec<NaiveDate> = timestamps
            .into_iter()
            .map(day_of)
            .filter(|d| self.price_on(*d).is_none())
            .collect();
        missing.sort();
        missing.dedup();
        missing
    }
}

#[derive(Deserialize)]
struct PriceRow {
    date: String,
    usd_per_btc: String,
}

const FILE: &str = "prices";

pub fn parse_price_table<R: Read>(reader: R) -> Result<PriceTable, IngestError> {
    let mut days = Vec::new();
    let mut lines = std::collections::HashMap::new();
    for (line, row) in super::read_csv::<_, PriceRow>(reader, FILE)? {
        let date =
            NaiveDate::parse_from_str(&row.date, "%Y-%m-%d").map_err(|_| IngestError::BadDate {
                file: FILE,
                line,
                value: row.date.clone(),
            })?;
        let price: Price = row.usd_per_btc.parse().map_err(|_| IngestError::BadPrice {
            line,
            value: row.usd_per_btc.clone(),
        })?;
        if lines.insert(date, line).is_some() {
            return Err(IngestError::DuplicateDate {
                line,
                date: date.to_string(),
            });
        }
        days.push((date, price));
    }
    Ok(PriceTable::from_days(days).expect("duplicates rejected above"))
}
