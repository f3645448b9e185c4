//! Deterministic synthetic chains.
//!
//! A [`ScenarioConfig`] describes background traffic over a small address
//! universe plus scripted sanctioned entities whose receive and send events
//! land on exact days with exact amounts. [`generate_chain`] turns it into
//! the four input files. Identical configs always produce identical bytes.

mod oracle;
mod random;
mod scenarios;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use oracle::{
    oracle_balance, oracle_flow, oracle_reachable, oracle_reachable_depths, OracleError,
    ORACLE_MAX_TXS,
};
pub use random::{random_scenario, RANDOM_MAX_BACKGROUND};
pub use scenarios::{exchange_share_scenario, mixer_at_hop2_scenario};

use crate::amount::{Price, SAT_PER_BTC};
use crate::flow::FlowMetrics;
use crate::ingest::{
    write_transactions, BehaviourCategory, EntityKind, PriceTable, SanctionedEntity, TxEdge,
    TxRecord, ViolationCode,
};
use crate::time::{day_of, midnight, TimeWindow, WindowLabel, SECS_PER_DAY};

fn default_universe() -> usize {
    500
}

fn default_fee() -> u64 {
    1_000
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PriceModel {
    Constant {
        usd: Price,
    },
    /// Daily random walk: each day moves by a uniform amount in
    /// `[-step, step]`, never dropping below one dollar.
    Walk {
        start: Price,
        step: Price,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventDirection {
    Receive,
    Send,
}

/// One scripted transfer between an entity address and a counterparty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedEvent {
    /// Days relative to the sanction date; negative is pre-sanction.
    pub day: i64,
    pub direction: EventDirection,
    pub amount_sat: u64,
    pub counterparty: String,
    /// Entity address involved; defaults to the entity's first address.
    #[serde(default)]
    pub address: Option<String>,
    /// For sends: addresses the counterparty relays the funds through, one
    /// transaction per hop, on the same day.
    #[serde(default)]
    pub forward: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedEntity {
    pub entity_id: String,
    pub name: String,
    pub kind: EntityKind,
    pub country: String,
    pub sanction_date: NaiveDate,
    pub violations: Vec<ViolationCode>,
    pub addresses: Vec<String>,
    #[serde(default)]
    pub events: Vec<ScriptedEvent>,
}

impl ScriptedEntity {
    pub fn to_entity(&self) -> SanctionedEntity {
        SanctionedEntity {
            entity_id: self.entity_id.clone(),
            name: self.name.clone(),
            kind: self.kind,
            country: self.country.clone(),
            sanction_date: self.sanction_date,
            violations: self.violations.iter().copied().collect(),
            addresses: self.addresses.iter().cloned().collect(),
        }
    }
}

/// A labelled address written to the tagpack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledAddress {
    pub address: String,
    pub entity: String,
    pub category: BehaviourCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub rng_seed: u64,
    #[serde(default)]
    pub n_background_txs: usize,
    #[serde(default = "default_universe")]
    pub address_universe: usize,
    pub start_date: NaiveDate,
    /// Background traffic is spread over this many days from `start_date`.
    pub days: u32,
    #[serde(default)]
    pub entities: Vec<ScriptedEntity>,
    #[serde(default)]
    pub labels: Vec<LabelledAddress>,
    /// Extra random tagpack rows over the background universe. Repeated
    /// addresses always carry the same label.
    #[serde(default)]
    pub background_label_rows: usize,
    pub price_model: PriceModel,
    #[serde(default = "default_fee")]
    pub fee_sat: u64,
}

impl ScenarioConfig {
    pub fn minimal(rng_seed: u64, start_date: NaiveDate, days: u32) -> Self {
        ScenarioConfig {
            rng_seed,
            n_background_txs: 0,
            address_universe: default_universe(),
            start_date,
            days,
            entities: Vec::new(),
            labels: Vec::new(),
            background_label_rows: 0,
            price_model: PriceModel::Constant {
                usd: Price::from_usd(10_000).expect("positive"),
            },
            fee_sat: default_fee(),
        }
    }

    pub fn sanctioned_entities(&self) -> Vec<SanctionedEntity> {
        self.entities
            .iter()
            .map(ScriptedEntity::to_entity)
            .collect()
    }
}

/// Name of background address `i`.
pub fn universe_address(i: usize) -> String {
    format!("bg{i:06}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("entity {entity_id} event {event}: {reason}")]
    Infeasible {
        entity_id: String,
        event: usize,
        reason: String,
    },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// The generated input bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthBundle {
    pub records: Vec<TxRecord>,
    pub prices: PriceTable,
    pub transactions_ndjson: String,
    pub sdn_csv: String,
    pub prices_csv: String,
    pub labels_csv: String,
}

pub const TRANSACTIONS_FILE: &str = "transactions.ndjson";
pub const SDN_FILE: &str = "sdn.csv";
pub const PRICES_FILE: &str = "prices.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

impl SynthBundle {
    /// Writes the four input files into `dir` and returns their paths.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let files = [
            (TRANSACTIONS_FILE, &self.transactions_ndjson),
            (SDN_FILE, &self.sdn_csv),
            (PRICES_FILE, &self.prices_csv),
            (LABELS_FILE, &self.labels_csv),
        ];
        let mut paths = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            fs::write(&path, body)?;
            paths.push(path);
        }
        Ok(paths)
    }

    /// Exclusive dataset end used by default: one second after the last
    /// transaction.
    pub fn dataset_end(&self) -> i64 {
        self.records
            .iter()
            .map(|r| r.timestamp)
            .max()
            .map_or(0, |t| t + 1)
    }
}

struct Ledger {
    ids: HashMap<String, usize>,
    names: Vec<String>,
    balances: Vec<u64>,
}

impl Ledger {
    fn new(universe: usize) -> Self {
        let mut ledger = Ledger {
            ids: HashMap::new(),
            names: Vec::new(),
            balances: Vec::new(),
        };
        for i in 0..universe {
            ledger.id(&universe_address(i));
        }
        ledger
    }

    fn id(&mut self, address: &str) -> usize {
        if let Some(&id) = self.ids.get(address) {
            return id;
        }
        let id = self.names.len();
        self.ids.insert(address.to_string(), id);
        self.names.push(address.to_string());
        self.balances.push(0);
        id
    }
}

struct Emitter {
    seed: u64,
    counter: u64,
    records: Vec<TxRecord>,
}

impl Emitter {
    fn txid(&mut self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(self.counter.to_le_bytes());
        self.counter += 1;
        hex::encode(hasher.finalize())
    }

    fn emit(
        &mut self,
        ledger: &mut Ledger,
        timestamp: i64,
        inputs: Vec<(usize, u64)>,
        outputs: Vec<(usize, u64)>,
    ) {
        for &(a, v) in &inputs {
            ledger.balances[a] -= v;
        }
        for &(a, v) in &outputs {
            ledger.balances[a] += v;
        }
        let edge = |(a, v): (usize, u64)| TxEdge {
            address: ledger.names[a].clone(),
            value: v,
        };
        let record = TxRecord {
            txid: self.txid(),
            timestamp,
            inputs: inputs.into_iter().map(edge).collect(),
            outputs: outputs.into_iter().map(edge).collect(),
        };
        self.records.push(record);
    }
}

enum Slot {
    Background,
    Scripted { entity: usize, event: usize },
}

fn event_timestamp(sanction: NaiveDate, day: i64, event: usize) -> i64 {
    midnight(sanction) + day * SECS_PER_DAY + 12 * 3600 + (event as i64) * 16
}

fn background_tx(
    rng: &mut ChaCha8Rng,
    ledger: &mut Ledger,
    em: &mut Emitter,
    universe: usize,
    fee: u64,
    ts: i64,
) {
    let mut senders: Vec<usize> = Vec::new();
    let want = if rng.gen_bool(0.2) { 2 } else { 1 };
    if !rng.gen_bool(0.08) {
        for _ in 0..16 {
            let a = rng.gen_range(0..universe);
            if ledger.balances[a] > fee + 2 && !senders.contains(&a) {
                senders.push(a);
                if senders.len() == want {
                    break;
                }
            }
        }
    }
    if senders.is_empty() {
        let to = rng.gen_range(0..universe);
        let value = rng.gen_range(SAT_PER_BTC / 100..=50 * SAT_PER_BTC);
        em.emit(ledger, ts, Vec::new(), vec![(to, value)]);
        return;
    }
    let inputs: Vec<(usize, u64)> = senders
        .iter()
        .map(|&a| {
            let bal = ledger.balances[a];
            let v = if rng.gen_bool(0.5) {
                bal
            } else {
                rng.gen_range(fee + 2..=bal)
            };
            (a, v)
        })
        .collect();
    let total: u64 = inputs.iter().map(|(_, v)| v).sum();
    let mut spendable = total - fee;
    let mut outputs = Vec::new();
    if rng.gen_bool(0.25) && spendable >= 2 {
        let change = rng.gen_range(1..spendable);
        outputs.push((senders[0], change));
        spendable -= change;
    }
    let payees = rng.gen_range(1..=3u64).min(spendable);
    for i in 0..payees {
        let to = rng.gen_range(0..universe);
        let v = if i + 1 == payees {
            spendable
        } else {
            rng.gen_range(1..=spendable - (payees - 1 - i))
        };
        outputs.push((to, v));
        spendable -= v;
    }
    em.emit(ledger, ts, inputs, outputs);
}

fn walk_prices(
    model: &PriceModel,
    rng: &mut ChaCha8Rng,
    first: NaiveDate,
    last: NaiveDate,
) -> PriceTable {
    match model {
        PriceModel::Constant { usd } => PriceTable::constant(first, last, *usd),
        PriceModel::Walk { start, step } => {
            let floor = Price::from_usd(1).expect("positive").units();
            let mut current = start.units();
            let mut days = Vec::new();
            let mut date = first;
            while date <= last {
                days.push((date, Price::from_units(current).expect("kept positive")));
                let delta = rng.gen_range(0..=2 * step.units()) as i128 - step.units() as i128;
                current = (current as i128 + delta).max(floor as i128) as u64;
                date = date.succ_opt().expect("date in range");
            }
            PriceTable::from_days(days).expect("dates are unique")
        }
    }
}

fn validate(config: &ScenarioConfig) -> Result<(), SynthError> {
    if config.n_background_txs > 0 && config.address_universe == 0 {
        return Err(SynthError::Invalid(
            "background traffic needs a non-empty address universe".into(),
        ));
    }
    if config.days == 0 {
        return Err(SynthError::Invalid("days must be positive".into()));
    }
    let mut owners: HashMap<&str, &str> = HashMap::new();
    for e in &config.entities {
        if e.addresses.is_empty() || e.violations.is_empty() {
            return Err(SynthError::Invalid(format!(
                "entity {} needs addresses and violations",
                e.entity_id
            )));
        }
        for a in &e.addresses {
            if let Some(prev) = owners.insert(a.as_str(), e.entity_id.as_str()) {
                return Err(SynthError::Invalid(format!(
                    "address {a} belongs to {prev} and {}",
                    e.entity_id
                )));
            }
        }
    }
    let mut labels: HashMap<&str, (&str, BehaviourCategory)> = HashMap::new();
    for l in &config.labels {
        if let Some(prev) = labels.insert(&l.address, (&l.entity, l.category)) {
            if prev != (l.entity.as_str(), l.category) {
                return Err(SynthError::Invalid(format!(
                    "address {} labelled twice",
                    l.address
                )));
            }
        }
    }
    Ok(())
}

const BACKGROUND_LABELS: [(&str, BehaviourCategory); 6] = [
    ("exchange", BehaviourCategory::Exchange),
    ("gambling", BehaviourCategory::Gambling),
    ("pool", BehaviourCategory::MiningPool),
    ("service", BehaviourCategory::Service),
    ("market", BehaviourCategory::Marketplace),
    ("mixer", BehaviourCategory::Mixer),
];

/// Label used for background address `i` when it lands in the tagpack.
pub fn background_label(i: usize) -> (String, BehaviourCategory) {
    let (stem, category) = BACKGROUND_LABELS[i % BACKGROUND_LABELS.len()];
    (
        format!("{stem}-{}", (i / BACKGROUND_LABELS.len()) % 7),
        category,
    )
}

pub fn generate_chain(config: &ScenarioConfig) -> Result<SynthBundle, SynthError> {
    validate(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let span_start = midnight(config.start_date);
    let span_len = i64::from(config.days) * SECS_PER_DAY;

    let mut slots: Vec<(i64, u8, usize, Slot)> = Vec::with_capacity(config.n_background_txs);
    let mut bg_times: Vec<i64> = (0..config.n_background_txs)
        .map(|_| span_start + rng.gen_range(0..span_len))
        .collect();
    bg_times.sort_unstable();
    for (i, ts) in bg_times.into_iter().enumerate() {
        slots.push((ts, 1, i, Slot::Background));
    }
    for (ei, entity) in config.entities.iter().enumerate() {
        for (vi, event) in entity.events.iter().enumerate() {
            let ts = event_timestamp(entity.sanction_date, event.day, vi);
            slots.push((
                ts,
                0,
                ei * 1_000_000 + vi,
                Slot::Scripted {
                    entity: ei,
                    event: vi,
                },
            ));
        }
    }
    slots.sort_by_key(|(ts, kind, order, _)| (*ts, *kind, *order));

    let mut ledger = Ledger::new(config.address_universe);
    let mut em = Emitter {
        seed: config.rng_seed,
        counter: 0,
        records: Vec::new(),
    };
    let fee = config.fee_sat;

    for (ts, _, _, slot) in slots {
        match slot {
            Slot::Background => background_tx(
                &mut rng,
                &mut ledger,
                &mut em,
                config.address_universe,
                fee,
                ts,
            ),
            Slot::Scripted { entity, event } => {
                let owner = &config.entities[entity];
                let ev = &owner.events[event];
                let infeasible = |reason: String| SynthError::Infeasible {
                    entity_id: owner.entity_id.clone(),
                    event,
                    reason,
                };
                let own_address = ev
                    .address
                    .clone()
                    .unwrap_or_else(|| owner.addresses[0].clone());
                if !owner.addresses.contains(&own_address) {
                    return Err(infeasible(format!(
                        "{own_address} is not an address of the entity"
                    )));
                }
                if ev.amount_sat == 0 {
                    return Err(infeasible("amount must be positive".into()));
                }
                let own = ledger.id(&own_address);
                let cp = ledger.id(&ev.counterparty);
                match ev.direction {
                    EventDirection::Receive => {
                        let need = ev.amount_sat + fee;
                        if ledger.balances[cp] < need {
                            let mint = need - ledger.balances[cp];
                            em.emit(&mut ledger, ts - 1, Vec::new(), vec![(cp, mint)]);
                        }
                        em.emit(
                            &mut ledger,
                            ts,
                            vec![(cp, need)],
                            vec![(own, ev.amount_sat)],
                        );
                    }
                    EventDirection::Send => {
                        let need = ev.amount_sat + fee;
                        if ledger.balances[own] < need {
                            return Err(infeasible(format!(
                                "spend of {} sat plus {fee} fee exceeds balance {} of {own_address}",
                                ev.amount_sat, ledger.balances[own]
                            )));
                        }
                        em.emit(
                            &mut ledger,
                            ts,
                            vec![(own, need)],
                            vec![(cp, ev.amount_sat)],
                        );
                        let mut from = cp;
                        let mut amount = ev.amount_sat;
                        for (hop, next) in ev.forward.iter().enumerate() {
                            if amount <= fee {
                                return Err(infeasible(format!(
                                    "forward hop {hop} has nothing left after fees"
                                )));
                            }
                            let to = ledger.id(next);
                            em.emit(
                                &mut ledger,
                                ts + 1 + hop as i64,
                                vec![(from, amount)],
                                vec![(to, amount - fee)],
                            );
                            from = to;
                            amount -= fee;
                        }
                    }
                }
            }
        }
    }

    let records = em.records;
    let mut transactions_ndjson = Vec::new();
    write_transactions(&records, &mut transactions_ndjson).expect("writing to memory");
    let transactions_ndjson = String::from_utf8(transactions_ndjson).expect("json is utf-8");

    let first_day = records
        .iter()
        .map(|r| day_of(r.timestamp))
        .min()
        .unwrap_or(config.start_date)
        .min(config.start_date);
    let last_span_day = config
        .start_date
        .checked_add_days(Days::new(u64::from(config.days) - 1))
        .expect("date in range");
    let last_day = records
        .iter()
        .map(|r| day_of(r.timestamp))
        .max()
        .unwrap_or(last_span_day)
        .max(last_span_day);
    let prices = walk_prices(&config.price_model, &mut rng, first_day, last_day);
    let mut prices_csv = String::from("date,usd_per_btc\n");
    for (date, price) in prices.iter() {
        writeln!(prices_csv, "{date},{price}").expect("writing to string");
    }

    let mut sdn = csv::Writer::from_writer(Vec::new());
    sdn.write_record([
        "entity_id",
        "name",
        "kind",
        "country",
        "sanction_date",
        "violation",
        "currency",
        "address",
    ])
    .expect("in-memory csv");
    for e in &config.entities {
        for address in &e.addresses {
            for code in e.violations.iter().collect::<BTreeSet<_>>() {
                sdn.write_record([
                    e.entity_id.as_str(),
                    e.name.as_str(),
                    e.kind.as_str(),
                    e.country.as_str(),
                    &e.sanction_date.to_string(),
                    code.as_str(),
                    "XBT",
                    address.as_str(),
                ])
                .expect("in-memory csv");
            }
        }
    }
    let sdn_csv = String::from_utf8(sdn.into_inner().expect("flush")).expect("utf-8");

    let mut labels = csv::Writer::from_writer(Vec::new());
    labels
        .write_record(["address", "entity", "category"])
        .expect("in-memory csv");
    for l in &config.labels {
        labels
            .write_record([l.address.as_str(), l.entity.as_str(), l.category.as_str()])
            .expect("in-memory csv");
    }
    if config.address_universe > 0 {
        for _ in 0..config.background_label_rows {
            let i = rng.gen_range(0..config.address_universe);
            let (entity, category) = background_label(i);
            labels
                .write_record([
                    universe_address(i).as_str(),
                    entity.as_str(),
                    category.as_str(),
                ])
                .expect("in-memory csv");
        }
    }
    let labels_csv = String::from_utf8(labels.into_inner().expect("flush")).expect("utf-8");

    Ok(SynthBundle {
        records,
        prices,
        transactions_ndjson,
        sdn_csv,
        prices_csv,
        labels_csv,
    })
}

/// Expected per-entity metrics for a generated bundle, computed with the
/// brute-force oracles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub dataset_end: i64,
    pub entities: Vec<EntityTruth>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityTruth {
    pub entity_id: String,
    pub windows: BTreeMap<WindowLabel, FlowMetrics>,
}

/// The four analysis windows, recomputed from their definitions.
pub fn oracle_windows(sanction: NaiveDate, dataset_end: i64) -> Vec<(WindowLabel, TimeWindow)> {
    let s = midnight(sanction);
    let post = |days: i64| (s + days * SECS_PER_DAY).min(dataset_end);
    vec![
        (
            WindowLabel::PreSanction,
            TimeWindow {
                label: Some(WindowLabel::PreSanction),
                start: 0,
                end: s,
            },
        ),
        (
            WindowLabel::Post7,
            TimeWindow {
                label: Some(WindowLabel::Post7),
                start: s,
                end: post(7),
            },
        ),
        (
            WindowLabel::Post30,
            TimeWindow {
                label: Some(WindowLabel::Post30),
                start: s,
                end: post(30),
            },
        ),
        (
            WindowLabel::UpToDate,
            TimeWindow {
                label: Some(WindowLabel::UpToDate),
                start: s,
                end: dataset_end,
            },
        ),
    ]
}

pub fn ground_truth(
    config: &ScenarioConfig,
    bundle: &SynthBundle,
    dataset_end: i64,
) -> Result<GroundTruth, OracleError> {
    let mut entities = Vec::new();
    for e in &config.entities {
        let subjects: BTreeSet<String> = e.addresses.iter().cloned().collect();
        let mut windows = BTreeMap::new();
        for (label, window) in oracle_windows(e.sanction_date, dataset_end) {
            windows.insert(
                label,
                oracle_flow(&bundle.records, &subjects, &window, &bundle.prices)?,
            );
        }
        entities.push(EntityTruth {
            entity_id: e.entity_id.clone(),
            windows,
        });
    }
    Ok(GroundTruth {
        dataset_end,
        entities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_price_table, parse_sdn_list, parse_transactions_str};

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn one_entity(events: Vec<ScriptedEvent>) -> ScenarioConfig {
        let mut c = ScenarioConfig::minimal(7, date(2022, 1, 1), 60);
        c.entities.push(ScriptedEntity {
            entity_id: "E1".into(),
            name: "Entity One".into(),
            kind: EntityKind::Company,
            country: "Russia".into(),
            sanction_date: date(2022, 1, 20),
            violations: vec![ViolationCode::Cyber2],
            addresses: vec!["sanc-1".into()],
            events,
        });
        c
    }

    fn receive(day: i64, amount: u64) -> ScriptedEvent {
        ScriptedEvent {
            day,
            direction: EventDirection::Receive,
            amount_sat: amount,
            counterparty: "payer".into(),
            address: None,
            forward: vec![],
        }
    }

    #[test]
    fn minimal_scenario_is_two_lines() {
        let bundle = generate_chain(&one_entity(vec![receive(2, 5_000)])).unwrap();
        assert_eq!(bundle.transactions_ndjson.lines().count(), 2);
        assert!(bundle.records[0].is_coinbase());
        assert_eq!(
            bundle.records[1].outputs,
            vec![TxEdge::new("sanc-1", 5_000)]
        );
        assert_eq!(day_of(bundle.records[1].timestamp), date(2022, 1, 22));
    }

    #[test]
    fn deterministic_bytes() {
        let mut c = one_entity(vec![receive(-3, 9_000), receive(4, 1)]);
        c.n_background_txs = 300;
        c.background_label_rows = 50;
        c.price_model = PriceModel::Walk {
            start: Price::from_usd(30_000).unwrap(),
            step: Price::from_usd(500).unwrap(),
        };
        let a = generate_chain(&c).unwrap();
        let b = generate_chain(&c).unwrap();
        assert_eq!(a, b);
        c.rng_seed += 1;
        assert_ne!(
            generate_chain(&c).unwrap().transactions_ndjson,
            a.transactions_ndjson
        );
    }

    #[test]
    fn overspend_is_rejected() {
        let send = ScriptedEvent {
            day: 1,
            direction: EventDirection::Send,
            amount_sat: 10_000,
            counterparty: "x".into(),
            address: None,
            forward: vec![],
        };
        let err = generate_chain(&one_entity(vec![receive(0, 5_000), send])).unwrap_err();
        assert!(matches!(err, SynthError::Infeasible { event: 1, .. }));
    }

    #[test]
    fn files_parse_back() {
        let mut c = one_entity(vec![receive(-1, 50_000)]);
        c.n_background_txs = 200;
        c.price_model = PriceModel::Walk {
            start: Price::from_usd(100).unwrap(),
            step: Price::from_usd(200).unwrap(),
        };
        let bundle = generate_chain(&c).unwrap();
        assert_eq!(
            parse_transactions_str(&bundle.transactions_ndjson).unwrap(),
            bundle.records
        );
        let sdn = parse_sdn_list(bundle.sdn_csv.as_bytes()).unwrap();
        assert_eq!(sdn, c.sanctioned_entities());
        let prices = parse_price_table(bundle.prices_csv.as_bytes()).unwrap();
        assert_eq!(prices, bundle.prices);
        for r in &bundle.records {
            assert!(prices.price_at(r.timestamp).is_some());
        }
    }
}
