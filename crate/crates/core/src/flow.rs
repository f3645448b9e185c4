//! Pre- and post-sanction flow metrics.
//!
//! All windows are half-open. A transaction stamped exactly at the sanction
//! instant (midnight UTC of the SDN date) is post-sanction.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amount::{Usd, SAT_PER_BTC};
use crate::ingest::{AddrId, PriceTable, Role, SanctionedEntity, TxIndex, TxPos, ViolationCode};
use crate::time::{day_of, midnight, TimeWindow, WindowLabel, SECS_PER_DAY};

/// Start of the pre-sanction window. Predates every Bitcoin transaction.
pub const CORPUS_EPOCH: i64 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("sanction date {sanction_date} is not before dataset end {dataset_end}")]
    SanctionAfterEnd {
        sanction_date: NaiveDate,
        dataset_end: i64,
    },
    #[error(
        "corpus inconsistency: address {address} has negative balance {balance} sat before {at}"
    )]
    NegativeBalance {
        address: String,
        at: i64,
        balance: i128,
    },
    #[error("no BTC/USD price for {date} (tx {txid})")]
    MissingPrice { date: NaiveDate, txid: String },
    #[error("entity {entity_id}: {source}")]
    Entity {
        entity_id: String,
        #[source]
        source: Box<FlowError>,
    },
}

impl FlowError {
    fn for_entity(self, entity: &SanctionedEntity) -> FlowError {
        match self {
            e @ FlowError::Entity { .. } => e,
            other => FlowError::Entity {
                entity_id: entity.entity_id.clone(),
                source: Box::new(other),
            },
        }
    }

    /// The underlying error without entity context.
    pub fn root(&self) -> &FlowError {
        match self {
            FlowError::Entity { source, .. } => source.root(),
            other => other,
        }
    }
}

/// The four analysis windows for a sanction date, in `WindowLabel::ALL`
/// order. Post-sanction windows are clamped to `dataset_end` (exclusive).
pub fn window_bounds(
    sanction_date: NaiveDate,
    dataset_end: i64,
) -> Result<[TimeWindow; 4], FlowError> {
    let s = midnight(sanction_date);
    if s >= dataset_end || s <= CORPUS_EPOCH {
        return Err(FlowError::SanctionAfterEnd {
            sanction_date,
            dataset_end,
        });
    }
    let post = |label, days: i64| TimeWindow {
        label: Some(label),
        start: s,
        end: (s + days * SECS_PER_DAY).min(dataset_end),
    };
    Ok([
        TimeWindow {
            label: Some(WindowLabel::PreSanction),
            start: CORPUS_EPOCH,
            end: s,
        },
        post(WindowLabel::Post7, 7),
        post(WindowLabel::Post30, 30),
        TimeWindow {
            label: Some(WindowLabel::UpToDate),
            start: s,
            end: dataset_end,
        },
    ])
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowMetrics {
    pub n_tx_in: u64,
    pub n_tx_out: u64,
    pub received_sat: u64,
    pub sent_sat: u64,
    pub received_usd: Usd,
    pub sent_usd: Usd,
    pub balance_end_sat: u64,
}

impl FlowMetrics {
    pub fn volume_usd(&self) -> Usd {
        self.received_usd + self.sent_usd
    }
}

fn signed_balance(index: &TxIndex, id: AddrId, t: i64) -> i128 {
    let postings = index.postings(id);
    let upto = postings.partition_point(|p| index.timestamp(p.tx) < t);
    postings[..upto]
        .iter()
        .map(|p| match p.role {
            Role::Output => i128::from(p.value),
            Role::Input => -i128::from(p.value),
        })
        .sum()
}

fn checked_balance(index: &TxIndex, id: AddrId, t: i64) -> Result<u64, FlowError> {
    let balance = signed_balance(index, id, t);
    u64::try_from(balance).map_err(|_| FlowError::NegativeBalance {
        address: index.address(id).to_string(),
        at: t,
        balance,
    })
}

/// Satoshi held by `address` from transactions strictly before `t`.
pub fn balance_at(address: &str, t: i64, index: &TxIndex) -> Result<u64, FlowError> {
    match index.addr_id(address) {
        Some(id) => checked_balance(index, id, t),
        None => Ok(0),
    }
}

/// Metrics of a set of addresses plus the transactions behind the counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct SubjectFlow {
    pub metrics: FlowMetrics,
    /// Sorted, deduplicated.
    pub in_txs: Vec<TxPos>,
    pub out_txs: Vec<TxPos>,
}

impl SubjectFlow {
    /// Distinct transactions touching the subject in either role.
    pub fn all_txs(&self) -> Vec<TxPos> {
        let mut all: Vec<TxPos> = self
            .in_txs
            .iter()
            .chain(self.out_txs.iter())
            .copied()
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

pub(crate) fn subject_flow<'a, I>(
    addresses: I,
    window: &TimeWindow,
    index: &TxIndex,
    prices: &PriceTable,
) -> Result<SubjectFlow, FlowError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut flow = SubjectFlow::default();
    for address in addresses {
        let Some(id) = index.addr_id(address) else {
            continue;
        };
        for posting in index.postings_in(id, window) {
            let ts = index.timestamp(posting.tx);
            let price = prices.price_at(ts).ok_or_else(|| FlowError::MissingPrice {
                date: day_of(ts),
                txid: index.txid(posting.tx).to_string(),
            })?;
            let usd = Usd::from_sat_at(posting.value, price);
            let m = &mut flow.metrics;
            match posting.role {
                Role::Output => {
                    m.received_sat += posting.value;
                    m.received_usd += usd;
                    flow.in_txs.push(posting.tx);
                }
                Role::Input => {
                    m.sent_sat += posting.value;
                    m.sent_usd += usd;
                    flow.out_txs.push(posting.tx);
                }
            }
        }
        flow.metrics.balance_end_sat += checked_balance(index, id, window.end)?;
    }
    flow.in_txs.sort_unstable();
    flow.in_txs.dedup();
    flow.out_txs.sort_unstable();
    flow.out_txs.dedup();
    flow.metrics.n_tx_in = flow.in_txs.len() as u64;
    flow.metrics.n_tx_out = flow.out_txs.len() as u64;
    Ok(flow)
}

pub fn address_flow_metrics(
    address: &str,
    window: &TimeWindow,
    index: &TxIndex,
    prices: &PriceTable,
) -> Result<FlowMetrics, FlowError> {
    subject_flow([address], window, index, prices).map(|f| f.metrics)
}

/// Aggregate over the entity's addresses: counts are distinct transactions
/// per direction, sums add every address's legs, and the end balance is the
/// sum of address balances.
pub fn entity_flow_metrics(
    entity: &SanctionedEntity,
    window: &TimeWindow,
    index: &TxIndex,
    prices: &PriceTable,
) -> Result<FlowMetrics, FlowError> {
    subject_flow(
        entity.addresses.iter().map(String::as_str),
        window,
        index,
        prices,
    )
    .map(|f| f.metrics)
    .map_err(|e| e.for_entity(entity))
}

/// Per-entity, per-window metrics for a whole SDN list.
#[derive(Debug, Clone, Default)]
pub struct FlowTable {
    pub rows: Vec<EntityFlowRow>,
}

#[derive(Debug, Clone)]
pub struct EntityFlowRow {
    pub entity_id: String,
    pub violations: Vec<ViolationCode>,
    pub windows: [TimeWindow; 4],
    pub metrics: [FlowMetrics; 4],
    pub(crate) txs: [Vec<TxPos>; 4],
}

impl EntityFlowRow {
    pub fn get(&self, label: WindowLabel) -> &FlowMetrics {
        &self.metrics[label as usize]
    }
}

/// Computes every entity's four windows in parallel. Row order follows
/// `entities`.
pub fn flow_table(
    entities: &[SanctionedEntity],
    index: &TxIndex,
    prices: &PriceTable,
    dataset_end: i64,
) -> Result<FlowTable, FlowError> {
    let rows = entities
        .par_iter()
        .map(|entity| {
            let windows = window_bounds(entity.sanction_date, dataset_end)
                .map_err(|e| e.for_entity(entity))?;
            let mut metrics = [FlowMetrics::default(); 4];
            let mut txs: [Vec<TxPos>; 4] = Default::default();
            for (i, w) in windows.iter().enumerate() {
                let flow = subject_flow(
                    entity.addresses.iter().map(String::as_str),
                    w,
                    index,
                    prices,
                )
                .map_err(|e| e.for_entity(entity))?;
                txs[i] = flow.all_txs();
                metrics[i] = flow.metrics;
            }
            Ok(EntityFlowRow {
                entity_id: entity.entity_id.clone(),
                violations: entity.violations.iter().copied().collect(),
                windows,
                metrics,
                txs,
            })
        })
        .collect::<Result<Vec<_>, FlowError>>()?;
    Ok(FlowTable { rows })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityCount {
    pub receiving: usize,
    pub sending: usize,
}

impl FlowTable {
    pub fn activity_counts(&self) -> BTreeMap<WindowLabel, ActivityCount> {
        let mut out: BTreeMap<WindowLabel, ActivityCount> = WindowLabel::ALL
            .iter()
            .map(|&l| (l, ActivityCount::default()))
            .collect();
        for row in &self.rows {
            for label in WindowLabel::ALL {
                let m = row.get(label);
                let c = out.get_mut(&label).expect("all labels present");
                c.receiving += usize::from(m.n_tx_in > 0);
                c.sending += usize::from(m.n_tx_out > 0);
            }
        }
        out
    }

    pub fn balance_histogram(&self, stage: WindowLabel) -> BTreeMap<BalanceBucket, usize> {
        let mut hist = BalanceBucket::empty_histogram();
        for row in &self.rows {
            *hist
                .get_mut(&BalanceBucket::of(row.get(stage).balance_end_sat))
                .expect("all buckets") += 1;
        }
        hist
    }

    pub fn violation_aggregate(&self) -> ViolationAggregate {
        let mut rows: BTreeMap<ViolationCode, ViolationRow> = ViolationCode::ALL
            .iter()
            .map(|&c| (c, ViolationRow::default()))
            .collect();
        for code in ViolationCode::ALL {
            let carriers: Vec<&EntityFlowRow> = self
                .rows
                .iter()
                .filter(|r| r.violations.contains(&code))
                .collect();
            let distinct = |label: WindowLabel| {
                let mut all: Vec<TxPos> = carriers
                    .iter()
                    .flat_map(|r| r.txs[label as usize].iter().copied())
                    .collect();
                all.sort_unstable();
                all.dedup();
                all.len() as u64
            };
            let volume = |label: WindowLabel| {
                carriers
                    .iter()
                    .map(|r| r.get(label).volume_usd())
                    .sum::<Usd>()
            };
            let row = rows.get_mut(&code).expect("all codes present");
            row.entities = carriers.len();
            row.tx_count_pre = distinct(WindowLabel::PreSanction);
            row.tx_count_uptodate = distinct(WindowLabel::UpToDate);
            row.usd_volume_pre = volume(WindowLabel::PreSanction);
            row.usd_volume_uptodate = volume(WindowLabel::UpToDate);
        }
        ViolationAggregate { rows }
    }
}

/// Entities with at least one received / sent transaction, per window.
pub fn activity_counts(
    entities: &[SanctionedEntity],
    index: &TxIndex,
    prices: &PriceTable,
    dataset_end: i64,
) -> Result<BTreeMap<WindowLabel, ActivityCount>, FlowError> {
    Ok(flow_table(entities, index, prices, dataset_end)?.activity_counts())
}

/// Entity balance ranges in BTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BalanceBucket {
    /// exactly 0
    Zero,
    /// (0, 0.1]
    UpToTenth,
    /// (0.1, 1]
    UpToOne,
    /// (1, 10]
    UpToTen,
    /// (10, 50)
    BelowFifty,
    /// [50, ∞)
    FiftyPlus,
}

impl BalanceBucket {
    pub const ALL: [BalanceBucket; 6] = [
        BalanceBucket::Zero,
        BalanceBucket::UpToTenth,
        BalanceBucket::UpToOne,
        BalanceBucket::UpToTen,
        BalanceBucket::BelowFifty,
        BalanceBucket::FiftyPlus,
    ];

    pub fn of(sat: u64) -> Self {
        const TENTH: u64 = SAT_PER_BTC / 10;
        match sat {
            0 => BalanceBucket::Zero,
            s if s <= TENTH => BalanceBucket::UpToTenth,
            s if s <= SAT_PER_BTC => BalanceBucket::UpToOne,
            s if s <= 10 * SAT_PER_BTC => BalanceBucket::UpToTen,
            s if s < 50 * SAT_PER_BTC => BalanceBucket::BelowFifty,
            _ => BalanceBucket::FiftyPlus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BalanceBucket::Zero => "0",
            BalanceBucket::UpToTenth => "(0,0.1]",
            BalanceBucket::UpToOne => "(0.1,1]",
            BalanceBucket::UpToTen => "(1,10]",
            BalanceBucket::BelowFifty => "(10,50)",
            BalanceBucket::FiftyPlus => "[50,inf)",
        }
    }

    fn empty_histogram() -> BTreeMap<BalanceBucket, usize> {
        BalanceBucket::ALL.iter().map(|&b| (b, 0)).collect()
    }
}

impl fmt::Display for BalanceBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Entity count per balance bucket at the end of the `stage` window.
pub fn balance_histogram(
    entities: &[SanctionedEntity],
    stage: WindowLabel,
    index: &TxIndex,
    dataset_end: i64,
) -> Result<BTreeMap<BalanceBucket, usize>, FlowError> {
    let mut hist = BalanceBucket::empty_histogram();
    for entity in entities {
        let windows =
            window_bounds(entity.sanction_date, dataset_end).map_err(|e| e.for_entity(entity))?;
        let end = windows[stage as usize].end;
        let mut total = 0u64;
        for address in &entity.addresses {
            total += balance_at(address, end, index).map_err(|e| e.for_entity(entity))?;
        }
        *hist
            .get_mut(&BalanceBucket::of(total))
            .expect("all buckets") += 1;
    }
    Ok(hist)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRow {
    pub entities: usize,
    pub tx_count_pre: u64,
    pub tx_count_uptodate: u64,
    pub usd_volume_pre: Usd,
    pub usd_volume_uptodate: Usd,
}

/// Per violation code: distinct transactions and USD volume (received plus
/// sent) of every entity carrying the code.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationAggregate {
    pub rows: BTreeMap<ViolationCode, ViolationRow>,
}

pub fn violation_aggregate(
    entities: &[SanctionedEntity],
    index: &TxIndex,
    prices: &PriceTable,
    dataset_end: i64,
) -> Result<ViolationAggregate, FlowError> {
    Ok(flow_table(entities, index, prices, dataset_end)?.violation_aggregate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amount::Price;
    use crate::ingest::{build_index, EntityKind, TxEdge, TxRecord};
    use chrono::NaiveDate;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn tx(c: char, ts: i64, ins: &[(&str, u64)], outs: &[(&str, u64)]) -> TxRecord {
        TxRecord {
            txid: c.to_string().repeat(64),
            timestamp: ts,
            inputs: ins.iter().map(|(a, v)| TxEdge::new(*a, *v)).collect(),
            outputs: outs.iter().map(|(a, v)| TxEdge::new(*a, *v)).collect(),
        }
    }

    fn entity(
        id: &str,
        addrs: &[&str],
        sanction: NaiveDate,
        codes: &[ViolationCode],
    ) -> SanctionedEntity {
        SanctionedEntity {
            entity_id: id.into(),
            name: id.into(),
            kind: EntityKind::Company,
            country: "X".into(),
            sanction_date: sanction,
            violations: codes.iter().copied().collect(),
            addresses: addrs.iter().map(|a| a.to_string()).collect(),
        }
    }

    #[test]
    fn window_arithmetic() {
        let end = midnight(date(2020, 3, 1));
        let w = window_bounds(date(2020, 1, 10), end).unwrap();
        assert_eq!(w[1].end, midnight(date(2020, 1, 17)));
        assert_eq!(w[2].end, midnight(date(2020, 2, 9)));
        assert_eq!(w[3].end, end);
        assert_eq!(w[0].end, w[1].start);
        let late = window_bounds(date(2020, 2, 20), end).unwrap();
        assert_eq!(late[2].end, end);
        assert_eq!(late[1].end, midnight(date(2020, 2, 27)));
        assert!(matches!(
            window_bounds(date(2020, 3, 1), end),
            Err(FlowError::SanctionAfterEnd { .. })
        ));
    }

    #[test]
    fn balances() {
        let idx = build_index(vec![
            tx('a', 10, &[], &[("A", 10)]),
            tx('b', 20, &[("A", 4)], &[("B", 3)]),
        ]);
        assert_eq!(balance_at("nobody", 100, &idx).unwrap(), 0);
        assert_eq!(balance_at("A", 100, &idx).unwrap(), 6);
        assert_eq!(balance_at("A", 20, &idx).unwrap(), 10);
        assert_eq!(balance_at("A", 10, &idx).unwrap(), 0);
        assert_eq!(balance_at("B", 21, &idx).unwrap(), 3);

        let broken = build_index(vec![tx('c', 5, &[("Z", 5)], &[("Y", 5)])]);
        assert!(matches!(
            balance_at("Z", 6, &broken),
            Err(FlowError::NegativeBalance { .. })
        ));
    }

    #[test]
    fn usd_and_counts() {
        let day = date(2021, 1, 1);
        let ts = midnight(day) + 3600;
        let idx = build_index(vec![tx('a', ts, &[], &[("A", 2 * SAT_PER_BTC)])]);
        let prices = PriceTable::constant(day, day, Price::from_usd(10_000).unwrap());
        let m =
            address_flow_metrics("A", &TimeWindow::new(0, ts + 1).unwrap(), &idx, &prices).unwrap();
        assert_eq!(m.n_tx_in, 1);
        assert_eq!(m.received_usd.to_string(), "20000");
        assert_eq!(m.balance_end_sat, 2 * SAT_PER_BTC);

        let quiet = address_flow_metrics(
            "A",
            &TimeWindow::new(ts + 1, ts + 100).unwrap(),
            &idx,
            &prices,
        )
        .unwrap();
        assert_eq!(
            quiet,
            FlowMetrics {
                balance_end_sat: 2 * SAT_PER_BTC,
                ..Default::default()
            }
        );

        let no_prices = PriceTable::default();
        assert!(matches!(
            address_flow_metrics("A", &TimeWindow::unbounded(), &idx, &no_prices),
            Err(FlowError::MissingPrice { .. })
        ));
    }

    #[test]
    fn entity_dedup() {
        let day = date(2021, 1, 1);
        let t0 = midnight(day);
        let idx = build_index(vec![
            tx('a', t0 + 1, &[], &[("A", 50), ("B", 70)]),
            tx('b', t0 + 2, &[("A", 50), ("B", 70)], &[("C", 100)]),
        ]);
        let prices = PriceTable::constant(day, day, Price::from_usd(1).unwrap());
        let e = entity("E", &["A", "B"], date(2022, 1, 1), &[ViolationCode::Cyber2]);
        let m = entity_flow_metrics(&e, &TimeWindow::unbounded(), &idx, &prices).unwrap();
        assert_eq!(m.n_tx_out, 1);
        assert_eq!(m.sent_sat, 120);
        assert_eq!(m.n_tx_in, 1);
        assert_eq!(m.received_sat, 120);
        let single = entity("S", &["C"], date(2022, 1, 1), &[ViolationCode::Cyber2]);
        assert_eq!(
            entity_flow_metrics(&single, &TimeWindow::unbounded(), &idx, &prices).unwrap(),
            address_flow_metrics("C", &TimeWindow::unbounded(), &idx, &prices).unwrap()
        );
    }

    #[test]
    fn activity_in_days_8_to_30_only() {
        let s = date(2021, 3, 1);
        let day10 = midnight(s) + 10 * SECS_PER_DAY;
        let idx = build_index(vec![tx('a', day10, &[], &[("A", 5)])]);
        let prices = PriceTable::constant(
            date(2021, 1, 1),
            date(2021, 12, 31),
            Price::from_usd(1).unwrap(),
        );
        let e = entity("E", &["A"], s, &[ViolationCode::Cyber2]);
        let end = midnight(date(2021, 12, 31));
        let counts = activity_counts(&[e], &idx, &prices, end).unwrap();
        assert_eq!(counts[&WindowLabel::Post7], ActivityCount::default());
        assert_eq!(
            counts[&WindowLabel::Post30],
            ActivityCount {
                receiving: 1,
                sending: 0
            }
        );
        assert_eq!(
            counts[&WindowLabel::UpToDate],
            ActivityCount {
                receiving: 1,
                sending: 0
            }
        );
        assert_eq!(counts[&WindowLabel::PreSanction], ActivityCount::default());

        let none = activity_counts(&[], &idx, &prices, end).unwrap();
        assert!(none.values().all(|c| *c == ActivityCount::default()));
    }

    #[test]
    fn bucket_boundaries() {
        assert_eq!(BalanceBucket::of(0), BalanceBucket::Zero);
        assert_eq!(BalanceBucket::of(1), BalanceBucket::UpToTenth);
        assert_eq!(
            BalanceBucket::of(SAT_PER_BTC / 10),
            BalanceBucket::UpToTenth
        );
        assert_eq!(
            BalanceBucket::of(SAT_PER_BTC / 10 + 1),
            BalanceBucket::UpToOne
        );
        assert_eq!(BalanceBucket::of(SAT_PER_BTC), BalanceBucket::UpToOne);
        assert_eq!(BalanceBucket::of(10 * SAT_PER_BTC), BalanceBucket::UpToTen);
        assert_eq!(
            BalanceBucket::of(50 * SAT_PER_BTC - 1),
            BalanceBucket::BelowFifty
        );
        assert_eq!(
            BalanceBucket::of(50 * SAT_PER_BTC),
            BalanceBucket::FiftyPlus
        );
    }

    #[test]
    fn histogram_of_tenth_and_zero() {
        let s = date(2021, 3, 1);
        let idx = build_index(vec![tx(
            'a',
            midnight(s) - 5,
            &[],
            &[("A", SAT_PER_BTC / 10)],
        )]);
        let ents = vec![
            entity("E1", &["A"], s, &[ViolationCode::Cyber2]),
            entity("E2", &["Q"], s, &[ViolationCode::Cyber2]),
        ];
        let end = midnight(s) + SECS_PER_DAY;
        let h = balance_histogram(&ents, WindowLabel::PreSanction, &idx, end).unwrap();
        assert_eq!(h[&BalanceBucket::UpToTenth], 1);
        assert_eq!(h[&BalanceBucket::Zero], 1);
        assert_eq!(h.values().sum::<usize>(), 2);
    }

    #[test]
    fn multi_code_entity_fills_identical_rows() {
        let s = date(2021, 3, 1);
        let day = date(2021, 2, 1);
        let idx = build_index(vec![
            tx('a', midnight(day), &[], &[("A", 1000)]),
            tx('b', midnight(s) + 5, &[("A", 400)], &[("B", 300)]),
        ]);
        let prices = PriceTable::constant(day, s, Price::from_usd(3).unwrap());
        let e = entity("E", &["A"], s, &[ViolationCode::Ifsr, ViolationCode::Irgc]);
        let agg = violation_aggregate(&[e], &idx, &prices, midnight(s) + SECS_PER_DAY).unwrap();
        assert_eq!(
            agg.rows[&ViolationCode::Ifsr],
            agg.rows[&ViolationCode::Irgc]
        );
        let row = agg.rows[&ViolationCode::Ifsr];
        assert_eq!(row.tx_count_pre, 1);
        assert_eq!(row.tx_count_uptodate, 1);
        assert_eq!(
            row.usd_volume_pre,
            Usd::from_sat_at(1000, Price::from_usd(3).unwrap())
        );
        assert_eq!(agg.rows[&ViolationCode::Dprk4], ViolationRow::default());
    }
}
