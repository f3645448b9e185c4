use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::TxRecord;
use crate::time::TimeWindow;

/// Dense identifier of an address inside one [`TxIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AddrId(pub u32);

/// Position of a transaction in the record list of one [`TxIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TxPos(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Input,
    Output,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Input => "Input",
            Role::Output => "Output",
        })
    }
}

/// One address's participation in one transaction. Repeated legs for the
/// same address and role within a transaction are merged and their values
/// summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub tx: TxPos,
    pub role: Role,
    pub value: u64,
}

/// A resolved view of a [`Posting`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexEntry<'a> {
    pub txid: &'a str,
    pub timestamp: i64,
    pub role: Role,
    pub value: u64,
}

/// Immutable transaction index.
///
/// Per-transaction legs and per-address postings are stored in flat
/// compressed-row arrays. Postings of each address are ordered by
/// `(timestamp, txid)` and, within a transaction, `Input` before `Output`.
#[derive(Debug, Default)]
pub struct TxIndex {
    records: Vec<TxRecord>,
    by_txid: HashMap<String, TxPos>,
    addresses: Vec<String>,
    addr_ids: HashMap<String, AddrId>,
    /// Transaction positions sorted by `(timestamp, txid)`.
    time_order: Vec<TxPos>,
    in_off: Vec<u32>,
    in_legs: Vec<(AddrId, u64)>,
    out_off: Vec<u32>,
    out_legs: Vec<(AddrId, u64)>,
    post_off: Vec<u32>,
    postings: Vec<Posting>,
}

fn merge_legs(
    legs: &[super::TxEdge],
    intern: &mut impl FnMut(&str) -> AddrId,
    out: &mut Vec<(AddrId, u64)>,
) {
    let start = out.len();
    for leg in legs {
        let id = intern(&leg.address);
        match out[start..].iter_mut().find(|(a, _)| *a == id) {
            Some(slot) => slot.1 += leg.value,
            None => out.push((id, leg.value)),
        }
    }
}

/// Indexes validated records. The result does not depend on record order
/// beyond the internal numbering of positions and address ids.
pub fn build_index(records: Vec<TxRecord>) -> TxIndex {
    let n = records.len();
    let mut by_txid = HashMap::with_capacity(n);
    let mut addresses: Vec<String> = Vec::new();
    let mut addr_ids: HashMap<String, AddrId> = HashMap::new();
    let mut in_off = Vec::with_capacity(n + 1);
    let mut out_off = Vec::with_capacity(n + 1);
    let mut in_legs = Vec::new();
    let mut out_legs = Vec::new();
    in_off.push(0);
    out_off.push(0);

    {
        let mut intern = |a: &str| -> AddrId {
            if let Some(&id) = addr_ids.get(a) {
                return id;
            }
            let id = AddrId(addresses.len() as u32);
            addresses.push(a.to_string());
            addr_ids.insert(a.to_string(), id);
            id
        };
        for (pos, record) in records.iter().enumerate() {
            by_txid.insert(record.txid.clone(), TxPos(pos as u32));
            merge_legs(&record.inputs, &mut intern, &mut in_legs);
            merge_legs(&record.outputs, &mut intern, &mut out_legs);
            in_off.push(in_legs.len() as u32);
            out_off.push(out_legs.len() as u32);
        }
    }

    let mut time_order: Vec<TxPos> = (0..n as u32).map(TxPos).collect();
    time_order.sort_unstable_by(|a, b| {
        let (ra, rb) = (&records[a.0 as usize], &records[b.0 as usize]);
        (ra.timestamp, &ra.txid).cmp(&(rb.timestamp, &rb.txid))
    });

    // Filling postings in time order leaves every address's list sorted.
    let mut counts = vec![0u32; addresses.len() + 1];
    for leg in in_legs.iter().chain(out_legs.iter()) {
        counts[leg.0 .0 as usize + 1] += 1;
    }
    for i in 1..counts.len() {
        counts[i] += counts[i - 1];
    }
    let post_off = counts.clone();
    let mut cursor = counts;
    let mut postings = vec![
        Posting {
            tx: TxPos(0),
            role: Role::Input,
            value: 0
        };
        in_legs.len() + out_legs.len()
    ];
    for &tx in &time_order {
        let t = tx.0 as usize;
        let ins = &in_legs[in_off[t] as usize..in_off[t + 1] as usize];
        let outs = &out_legs[out_off[t] as usize..out_off[t + 1] as usize];
        for (legs, role) in [(ins, Role::Input), (outs, Role::Output)] {
            for &(addr, value) in legs {
                let slot = &mut cursor[addr.0 as usize];
                postings[*slot as usize] = Posting { tx, role, value };
                *slot += 1;
            }
        }
    }

    TxIndex {
        records,
        by_txid,
        addresses,
        addr_ids,
        time_order,
        in_off,
        in_legs,
        out_off,
        out_legs,
        post_off,
        postings,
    }
}

impl TxIndex {
    pub fn records(&self) -> &[TxRecord] {
        &self.records
    }

    pub fn record(&self, txid: &str) -> Option<&TxRecord> {
        self.by_txid.get(txid).map(|p| &self.records[p.0 as usize])
    }

    pub fn tx_pos(&self, txid: &str) -> Option<TxPos> {
        self.by_txid.get(txid).copied()
    }

    pub fn tx_count(&self) -> usize {
        self.records.len()
    }

    pub fn address_count(&self) -> usize {
        self.addresses.len()
    }

    pub fn addr_id(&self, address: &str) -> Option<AddrId> {
        self.addr_ids.get(address).copied()
    }

    pub fn address(&self, id: AddrId) -> &str {
        &self.addresses[id.0 as usize]
    }

    pub fn txid(&self, tx: TxPos) -> &str {
        &self.records[tx.0 as usize].txid
    }

    pub fn timestamp(&self, tx: TxPos) -> i64 {
        self.records[tx.0 as usize].timestamp
    }

    /// Merged input legs of `tx`.
    pub fn inputs(&self, tx: TxPos) -> &[(AddrId, u64)] {
        let t = tx.0 as usize;
        &self.in_legs[self.in_off[t] as usize..self.in_off[t + 1] as usize]
    }

    /// Merged output legs of `tx`.
    pub fn outputs(&self, tx: TxPos) -> &[(AddrId, u64)] {
        let t = tx.0 as usize;
        &self.out_legs[self.out_off[t] as usize..self.out_off[t + 1] as usize]
    }

    pub fn postings(&self, id: AddrId) -> &[Posting] {
        let a = id.0 as usize;
        &self.postings[self.post_off[a] as usize..self.post_off[a + 1] as usize]
    }

    /// Postings of `id` whose transaction timestamp lies in `window`.
    pub fn postings_in(&self, id: AddrId, window: &TimeWindow) -> &[Posting] {
        let all = self.postings(id);
        let lo = all.partition_point(|p| self.timestamp(p.tx) < window.start);
        let hi = all.partition_point(|p| self.timestamp(p.tx) < window.end);
        &all[lo..hi.max(lo)]
    }

    /// Resolved postings of `address`; empty for unknown addresses.
    pub fn entries(&self, address: &str) -> Vec<IndexEntry<'_>> {
        let Some(id) = self.addr_id(address) else {
            return Vec::new();
        };
        self.postings(id)
            .iter()
            .map(|p| IndexEntry {
                txid: self.txid(p.tx),
                timestamp: self.timestamp(p.tx),
                role: p.role,
                value: p.value,
            })
            .collect()
    }

    /// All transactions ordered by `(timestamp, txid)`.
    pub fn time_order(&self) -> &[TxPos] {
        &self.time_order
    }

    /// Transactions with timestamp in `window`, ordered by `(timestamp, txid)`.
    pub fn txs_in(&self, window: &TimeWindow) -> &[TxPos] {
        let lo = self
            .time_order
            .partition_point(|&t| self.timestamp(t) < window.start);
        let hi = self
            .time_order
            .partition_point(|&t| self.timestamp(t) < window.end);
        &self.time_order[lo..hi.max(lo)]
    }

    /// `(min, max)` transaction timestamp.
    pub fn time_span(&self) -> Option<(i64, i64)> {
        let first = self.time_order.first()?;
        let last = self.time_order.last()?;
        Some((self.timestamp(*first), self.timestamp(*last)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TxEdge;

    fn tx(id: char, ts: i64, ins: &[(&str, u64)], outs: &[(&str, u64)]) -> TxRecord {
        TxRecord {
            txid: std::iter::repeat_n(id, 64).collect(),
            timestamp: ts,
            inputs: ins.iter().map(|(a, v)| TxEdge::new(*a, *v)).collect(),
            outputs: outs.iter().map(|(a, v)| TxEdge::new(*a, *v)).collect(),
        }
    }

    #[test]
    fn one_entry_per_payee() {
        let idx = build_index(vec![tx('a', 1, &[], &[("A", 5), ("B", 6)])]);
        assert_eq!(idx.entries("A").len(), 1);
        assert_eq!(idx.entries("B").len(), 1);
        assert_eq!(idx.entries("B")[0].role, Role::Output);
        assert!(idx.entries("C").is_empty());
    }

    #[test]
    fn repeated_outputs_merge() {
        let idx = build_index(vec![tx('a', 1, &[], &[("A", 3), ("B", 1), ("A", 7)])]);
        let e = idx.entries("A");
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].value, 10);
        let pos = idx.tx_pos(&"a".repeat(64)).unwrap();
        assert_eq!(idx.outputs(pos).len(), 2);
    }

    #[test]
    fn ordering_by_time_then_txid() {
        let idx = build_index(vec![
            tx('c', 5, &[], &[("A", 1)]),
            tx('b', 5, &[], &[("A", 1)]),
            tx('a', 9, &[("A", 1)], &[("A", 1)]),
            tx('d', 2, &[], &[("A", 1)]),
        ]);
        let order: Vec<(char, Role)> = idx
            .entries("A")
            .iter()
            .map(|e| (e.txid.chars().next().unwrap(), e.role))
            .collect();
        assert_eq!(
            order,
            vec![
                ('d', Role::Output),
                ('b', Role::Output),
                ('c', Role::Output),
                ('a', Role::Input),
                ('a', Role::Output)
            ]
        );
        assert_eq!(idx.time_span(), Some((2, 9)));
        let w = TimeWindow::new(5, 9).unwrap();
        assert_eq!(idx.txs_in(&w).len(), 2);
        assert_eq!(idx.postings_in(idx.addr_id("A").unwrap(), &w).len(), 2);
    }

    #[test]
    fn empty_index() {
        let idx = build_index(Vec::new());
        assert_eq!(idx.tx_count(), 0);
        assert_eq!(idx.time_span(), None);
        assert!(idx.txs_in(&TimeWindow::unbounded()).is_empty());
    }
}
