//! Brute-force reference implementations.
//!
//! These work straight from the record list with linear scans and
//! exhaustive path enumeration. They share no traversal or accounting code
//! with the indexed implementations they are used to check.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;
use thiserror::Error;

use crate::amount::Usd;
use crate::flow::FlowMetrics;
use crate::graph::Direction;
use crate::ingest::{PriceTable, TxRecord};
use crate::time::TimeWindow;

/// Largest corpus the path-enumeration oracle accepts.
pub const ORACLE_MAX_TXS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("corpus of {0} transactions exceeds the oracle limit of {ORACLE_MAX_TXS}")]
    TooLarge(usize),
    #[error("no price for {0}")]
    MissingPrice(NaiveDate),
    #[error("address {0} has a negative balance")]
    NegativeBalance(String),
}

/// Σ outputs to `address` − Σ inputs from `address` over transactions
/// stamped before `t`.
pub fn oracle_balance(records: &[TxRecord], address: &str, t: i64) -> i128 {
    let mut balance: i128 = 0;
    for record in records.iter().filter(|r| r.timestamp < t) {
        for leg in &record.outputs {
            if leg.address == address {
                balance += i128::from(leg.value);
            }
        }
        for leg in &record.inputs {
            if leg.address == address {
                balance -= i128::from(leg.value);
            }
        }
    }
    balance
}

/// Minimum number of transactions on any qualifying path from a seed, per
/// reachable address. Seeds map to 0.
///
/// Paths are enumerated depth-first. A branch is abandoned only when the
/// same address was already explored with at least as much remaining budget,
/// since every continuation from it has then been enumerated.
pub fn oracle_reachable_depths(
    records: &[TxRecord],
    seeds: &BTreeSet<String>,
    steps: u32,
    window: &TimeWindow,
    direction: Direction,
) -> Result<BTreeMap<String, u32>, OracleError> {
    if records.len() > ORACLE_MAX_TXS {
        return Err(OracleError::TooLarge(records.len()));
    }
    let mut spends: HashMap<&str, Vec<usize>> = HashMap::new();
    let mut receipts: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, record) in records.iter().enumerate() {
        if !(window.start <= record.timestamp && record.timestamp < window.end) {
            continue;
        }
        for leg in &record.inputs {
            spends.entry(leg.address.as_str()).or_default().push(i);
        }
        for leg in &record.outputs {
            receipts.entry(leg.address.as_str()).or_default().push(i);
        }
    }

    struct Walk<'a> {
        records: &'a [TxRecord],
        spends: HashMap<&'a str, Vec<usize>>,
        receipts: HashMap<&'a str, Vec<usize>>,
        direction: Direction,
        best_remaining: HashMap<String, u32>,
    }

    impl<'a> Walk<'a> {
        fn visit(&mut self, address: &str, remaining: u32) {
            if let Some(&seen) = self.best_remaining.get(address) {
                if seen >= remaining {
                    return;
                }
            }
            self.best_remaining.insert(address.to_string(), remaining);
            if remaining == 0 {
                return;
            }
            let mut next: Vec<&'a str> = Vec::new();
            let forward = matches!(self.direction, Direction::Forward | Direction::Both);
            let backward = matches!(self.direction, Direction::Backward | Direction::Both);
            let undirected = self.direction == Direction::Both;
            if forward {
                for &i in self.spends.get(address).map(Vec::as_slice).unwrap_or(&[]) {
                    let r = &self.records[i];
                    next.extend(r.outputs.iter().map(|l| l.address.as_str()));
                    if undirected {
                        next.extend(r.inputs.iter().map(|l| l.address.as_str()));
                    }
                }
            }
            if backward {
                for &i in self.receipts.get(address).map(Vec::as_slice).unwrap_or(&[]) {
                    let r = &self.records[i];
                    next.extend(r.inputs.iter().map(|l| l.address.as_str()));
                    if undirected {
                        next.extend(r.outputs.iter().map(|l| l.address.as_str()));
                    }
                }
            }
            for target in next {
                self.visit(target, remaining - 1);
            }
        }
    }

    let mut walk = Walk {
        records,
        spends,
        receipts,
        direction,
        best_remaining: HashMap::new(),
    };
    for seed in seeds {
        walk.visit(seed, steps);
    }
    Ok(walk
        .best_remaining
        .into_iter()
        .map(|(a, r)| (a, steps - r))
        .collect())
}

/// Every address reachable within `steps` transactions, seeds included.
pub fn oracle_reachable(
    records: &[TxRecord],
    seeds: &BTreeSet<String>,
    steps: u32,
    window: &TimeWindow,
    direction: Direction,
) -> Result<BTreeSet<String>, OracleError> {
    oracle_reachable_depths(records, seeds, steps, window, direction)
        .map(|d| d.into_keys().collect())
}

/// Recomputes every flow metric for a set of subject addresses by scanning
/// all records.
pub fn oracle_flow(
    records: &[TxRecord],
    subjects: &BTreeSet<String>,
    window: &TimeWindow,
    prices: &PriceTable,
) -> Result<FlowMetrics, OracleError> {
    let mut m = FlowMetrics::default();
    for record in records {
        if !(window.start <= record.timestamp && record.timestamp < window.end) {
            continue;
        }
        let received: u64 = record
            .outputs
            .iter()
            .filter(|l| subjects.contains(&l.address))
            .map(|l| l.value)
            .sum();
        let sent: u64 = record
            .inputs
            .iter()
            .filter(|l| subjects.contains(&l.address))
            .map(|l| l.value)
            .sum();
        let touches_out = record.outputs.iter().any(|l| subjects.contains(&l.address));
        let touches_in = record.inputs.iter().any(|l| subjects.contains(&l.address));
        if !(touches_in || touches_out) {
            continue;
        }
        let day = crate::time::day_of(record.timestamp);
        let price = prices.price_on(day).ok_or(OracleError::MissingPrice(day))?;
        if touches_out {
            m.n_tx_in += 1;
            m.received_sat += received;
            m.received_usd += Usd::from_sat_at(received, price);
        }
        if touches_in {
            m.n_tx_out += 1;
            m.sent_sat += sent;
            m.sent_usd += Usd::from_sat_at(sent, price);
        }
    }
    for address in subjects {
        let balance = oracle_balance(records, address, window.end);
        m.balance_end_sat +=
            u64::try_from(balance).map_err(|_| OracleError::NegativeBalance(address.clone()))?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TxEdge;

    fn tx(c: char, ts: i64, ins: &[(&str, u64)], outs: &[(&str, u64)]) -> TxRecord {
        TxRecord {
            txid: c.to_string().repeat(64),
            timestamp: ts,
            inputs: ins.iter().map(|(a, v)| TxEdge::new(*a, *v)).collect(),
            outputs: outs.iter().map(|(a, v)| TxEdge::new(*a, *v)).collect(),
        }
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn no_edges_gives_seeds() {
        let r = oracle_reachable(
            &[],
            &set(&["A", "B"]),
            3,
            &TimeWindow::unbounded(),
            Direction::Both,
        )
        .unwrap();
        assert_eq!(r, set(&["A", "B"]));
    }

    #[test]
    fn one_step_fan_out() {
        let recs = vec![
            tx('0', 1, &[], &[("X1", 100)]),
            tx('1', 2, &[("X1", 100)], &[("X2", 60), ("X3", 39)]),
        ];
        let r = oracle_reachable(
            &recs,
            &set(&["X1"]),
            1,
            &TimeWindow::unbounded(),
            Direction::Forward,
        )
        .unwrap();
        assert_eq!(r, set(&["X1", "X2", "X3"]));
    }

    #[test]
    fn chain_depths() {
        let recs = vec![
            tx('1', 1, &[("A", 5)], &[("B", 5)]),
            tx('2', 2, &[("B", 5)], &[("C", 5)]),
            tx('3', 3, &[("C", 5)], &[("D", 5)]),
        ];
        let d = oracle_reachable_depths(
            &recs,
            &set(&["A"]),
            2,
            &TimeWindow::unbounded(),
            Direction::Forward,
        )
        .unwrap();
        assert_eq!(
            d,
            [
                ("A".to_string(), 0),
                ("B".to_string(), 1),
                ("C".to_string(), 2)
            ]
            .into()
        );
    }

    #[test]
    fn refuses_large_corpora() {
        let recs: Vec<TxRecord> = (0..=ORACLE_MAX_TXS)
            .map(|i| TxRecord {
                txid: format!("{i:064x}"),
                timestamp: 0,
                inputs: vec![],
                outputs: vec![TxEdge::new("A", 1)],
            })
            .collect();
        assert_eq!(
            oracle_reachable(
                &recs,
                &set(&["A"]),
                1,
                &TimeWindow::unbounded(),
                Direction::Forward
            )
            .unwrap_err(),
            OracleError::TooLarge(ORACLE_MAX_TXS + 1)
        );
    }

    #[test]
    fn balance_scan() {
        let recs = vec![
            tx('a', 10, &[], &[("A", 10)]),
            tx('b', 20, &[("A", 4)], &[("B", 3)]),
        ];
        assert_eq!(oracle_balance(&recs, "A", 21), 6);
        assert_eq!(oracle_balance(&recs, "A", 20), 10);
        assert_eq!(oracle_balance(&recs, "Z", 21), 0);
    }
}
