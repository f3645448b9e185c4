//! Descriptive dataset statistics and deterministic emission of every
//! analysis table.
//!
//! Row order is fixed per table: flow metrics by `(entity_id, window)`,
//! violation and behaviour tables in enum order, statistics by key. Each
//! emitted file is listed in `manifest.json` with its data-row count and
//! SHA-256 checksum.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::amount::Usd;
use crate::behaviour::BehaviourAnalysis;
use crate::flow::{ActivityCount, BalanceBucket, FlowMetrics, FlowTable, ViolationAggregate};
use crate::graph::Subgraph;
use crate::ingest::{BehaviourCategory, EntityKind, SanctionedEntity, ViolationCode};
use crate::time::WindowLabel;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCount {
    pub entities: usize,
    pub addresses: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelinePoint {
    pub date: NaiveDate,
    pub violation: ViolationCode,
    pub entities: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub entities_per_country: BTreeMap<String, usize>,
    pub entities_per_violation: BTreeMap<ViolationCode, usize>,
    /// Sorted by `(date, violation)`.
    pub sanction_timeline: Vec<TimelinePoint>,
    pub addresses_per_entity_kind: BTreeMap<EntityKind, KindCount>,
}

impl DatasetStats {
    pub fn total_entities(&self) -> usize {
        self.entities_per_country.values().sum()
    }
}

pub fn dataset_stats(entities: &[SanctionedEntity]) -> DatasetStats {
    let mut stats = DatasetStats::default();
    let mut timeline: BTreeMap<(NaiveDate, ViolationCode), usize> = BTreeMap::new();
    for e in entities {
        *stats
            .entities_per_country
            .entry(e.country.clone())
            .or_default() += 1;
        for &code in &e.violations {
            *stats.entities_per_violation.entry(code).or_default() += 1;
            *timeline.entry((e.sanction_date, code)).or_default() += 1;
        }
        let kind = stats
            .addresses_per_entity_kind
            .entry(e.kind)
            .or_insert(KindCount {
                entities: 0,
                addresses: 0,
            });
        kind.entities += 1;
        kind.addresses += e.addresses.len();
    }
    stats.sanction_timeline = timeline
        .into_iter()
        .map(|((date, violation), entities)| TimelinePoint {
            date,
            violation,
            entities,
        })
        .collect();
    stats
}

/// A table cell. Money renders with two decimals.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i128),
    Money(Usd),
    Float(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Money(u) => u.to_cents_string(),
            Cell::Float(f) => format!("{f:.6}"),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => i64::try_from(*i)
                .map(Value::from)
                .unwrap_or_else(|_| Value::String(i.to_string())),
            Cell::Money(u) => Value::String(u.to_cents_string()),
            Cell::Float(f) => json!(f),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(u32, u64, usize, i64);

impl From<Usd> for Cell {
    fn from(u: Usd) -> Self {
        Cell::Money(u)
    }
}

/// A named table emitted as `<name>.csv` and/or `<name>.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Replaces the default array-of-objects JSON rendering.
    pub json: Option<Value>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            json: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| ReportError::Io {
            path: PathBuf::from(&self.name),
            source: e.into_error(),
        })
    }

    pub fn to_json(&self) -> Result<Vec<u8>, ReportError> {
        let value = match &self.json {
            Some(v) => v.clone(),
            None => Value::Array(
                self.rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            self.header
                                .iter()
                                .cloned()
                                .zip(row.iter().map(Cell::to_json))
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        };
        let mut bytes = serde_json::to_vec_pretty(&value)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

pub fn stats_table(stats: &DatasetStats) -> Result<Table, ReportError> {
    let mut t = Table::new("dataset_stats", &["stat", "key", "detail", "value"]);
    for (country, n) in &stats.entities_per_country {
        t.push(vec![
            "entities_per_country".into(),
            country.clone().into(),
            "".into(),
            (*n).into(),
        ]);
    }
    for (code, n) in &stats.entities_per_violation {
        t.push(vec![
            "entities_per_violation".into(),
            code.as_str().into(),
            "".into(),
            (*n).into(),
        ]);
    }
    for p in &stats.sanction_timeline {
        t.push(vec![
            "sanction_timeline".into(),
            p.date.to_string().into(),
            p.violation.as_str().into(),
            p.entities.into(),
        ]);
    }
    for (kind, c) in &stats.addresses_per_entity_kind {
        t.push(vec![
            "entities_per_kind".into(),
            kind.as_str().into(),
            "".into(),
            c.entities.into(),
        ]);
        t.push(vec![
            "addresses_per_kind".into(),
            kind.as_str().into(),
            "".into(),
            c.addresses.into(),
        ]);
    }
    t.json = Some(serde_json::to_value(stats)?);
    Ok(t)
}

/// One `(entity, window)` row of the flow report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowRow {
    pub entity_id: String,
    pub window: WindowLabel,
    pub start: i64,
    pub end: i64,
    pub metrics: FlowMetrics,
}

/// Flow analysis outputs, restricted to the requested windows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowReport {
    pub windows: Vec<WindowLabel>,
    pub metrics: Vec<FlowRow>,
    pub violations: ViolationAggregate,
    pub histograms: BTreeMap<WindowLabel, BTreeMap<BalanceBucket, usize>>,
    pub activity: BTreeMap<WindowLabel, ActivityCount>,
}

impl FlowReport {
    pub fn from_table(table: &FlowTable, windows: &[WindowLabel]) -> Self {
        let windows: Vec<WindowLabel> = windows
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut metrics = Vec::new();
        for row in &table.rows {
            for &label in &windows {
                let w = row.windows[label as usize];
                metrics.push(FlowRow {
                    entity_id: row.entity_id.clone(),
                    window: label,
                    start: w.start,
                    end: w.end,
                    metrics: *row.get(label),
                });
            }
        }
        metrics.sort_by(|a, b| (&a.entity_id, a.window).cmp(&(&b.entity_id, b.window)));
        let activity = table
            .activity_counts()
            .into_iter()
            .filter(|(l, _)| windows.contains(l))
            .collect();
        let histograms = windows
            .iter()
            .map(|&l| (l, table.balance_histogram(l)))
            .collect();
        FlowReport {
            windows,
            metrics,
            violations: table.violation_aggregate(),
            histograms,
            activity,
        }
    }

    pub fn empty() -> Self {
        Self::from_table(&FlowTable::default(), &WindowLabel::ALL)
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut metrics = Table::new(
            "flow_metrics",
            &[
                "entity_id",
                "window",
                "window_start",
                "window_end",
                "n_tx_in",
                "n_tx_out",
                "received_sat",
                "sent_sat",
                "received_usd",
                "sent_usd",
                "balance_end_sat",
            ],
        );
        for r in &self.metrics {
            let m = &r.metrics;
            metrics.push(vec![
                r.entity_id.clone().into(),
                r.window.as_str().into(),
                r.start.into(),
                r.end.into(),
                m.n_tx_in.into(),
                m.n_tx_out.into(),
                m.received_sat.into(),
                m.sent_sat.into(),
                m.received_usd.into(),
                m.sent_usd.into(),
                m.balance_end_sat.into(),
            ]);
        }

        let mut violations = Table::new(
            "violation_table",
            &[
                "index",
                "violation",
                "entities",
                "tx_count_pre",
                "tx_count_uptodate",
                "usd_volume_pre",
                "usd_volume_uptodate",
            ],
        );
        for (i, (code, row)) in self.violations.rows.iter().enumerate() {
            violations.push(vec![
                (i + 1).into(),
                code.as_str().into(),
                row.entities.into(),
                row.tx_count_pre.into(),
                row.tx_count_uptodate.into(),
                row.usd_volume_pre.into(),
                row.usd_volume_uptodate.into(),
            ]);
        }

        let mut header = vec!["bucket"];
        header.extend(self.windows.iter().map(|w| w.as_str()));
        let mut histogram = Table::new("balance_histogram", &header);
        for bucket in BalanceBucket::ALL {
            let mut row: Vec<Cell> = vec![bucket.as_str().into()];
            row.extend(
                self.windows
                    .iter()
                    .map(|w| Cell::from(self.histograms[w][&bucket])),
            );
            histogram.push(row);
        }

        let mut activity = Table::new(
            "activity_counts",
            &["window", "entities_receiving", "entities_sending"],
        );
        for (label, c) in &self.activity {
            activity.push(vec![
                label.as_str().into(),
                c.receiving.into(),
                c.sending.into(),
            ]);
        }
        vec![metrics, violations, histogram, activity]
    }
}

/// Behaviour outputs for one or more step counts, shown side by side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BehaviourSection {
    pub analyses: Vec<BehaviourAnalysis>,
}

impl BehaviourSection {
    pub fn tables(&self) -> Vec<Table> {
        let mut header: Vec<String> = vec!["index".into(), "category".into()];
        for a in &self.analyses {
            header.push(format!("step{}_distinct_entities", a.report.steps));
            header.push(format!("step{}_distinct_addresses", a.report.steps));
        }
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut report = Table::new("behaviour_report", &header_refs);
        for (i, category) in BehaviourCategory::ALL.iter().enumerate() {
            let mut row: Vec<Cell> = vec![(i + 1).into(), category.as_str().into()];
            for a in &self.analyses {
                let c = a.report.categories[category];
                row.push(c.distinct_entities.into());
                row.push(c.distinct_addresses.into());
            }
            report.push(row);
        }
        let mut labelled: Vec<Cell> = vec!["".into(), "Labelled".into()];
        let mut unlabelled: Vec<Cell> = vec!["".into(), "Unlabelled".into()];
        for a in &self.analyses {
            labelled.push(a.report.distinct_entities_total().into());
            labelled.push(a.report.labelled_total.into());
            unlabelled.push("".into());
            unlabelled.push(a.report.unlabelled_total.into());
        }
        report.push(labelled);
        report.push(unlabelled);
        report.json = Some(json!(self
            .analyses
            .iter()
            .map(|a| &a.report)
            .collect::<Vec<_>>()));

        let mut per_entity = Table::new(
            "behaviour_per_entity",
            &["entity_id", "steps", "reached", "labelled"],
        );
        let mut rows: Vec<(String, u32, usize, usize)> = self
            .analyses
            .iter()
            .flat_map(|a| {
                a.per_entity
                    .iter()
                    .map(move |e| (e.entity_id.clone(), a.report.steps, e.reached, e.labelled))
            })
            .collect();
        rows.sort();
        for (id, steps, reached, labelled) in rows {
            per_entity.push(vec![
                id.into(),
                steps.into(),
                reached.into(),
                labelled.into(),
            ]);
        }
        vec![report, per_entity]
    }
}

/// Everything one run produced.
#[derive(Debug, Clone, Default)]
pub struct ReportBundle {
    pub dataset_stats: Option<DatasetStats>,
    pub flow: Option<FlowReport>,
    pub behaviour: Option<BehaviourSection>,
    /// `(name, subgraph)`; written as `subgraph_<name>.csv` edge lists.
    pub subgraphs: Vec<(String, Subgraph)>,
    pub extra: Vec<Table>,
}

impl ReportBundle {
    /// Every section present but empty.
    pub fn empty() -> Self {
        ReportBundle {
            dataset_stats: Some(DatasetStats::default()),
            flow: Some(FlowReport::empty()),
            behaviour: Some(BehaviourSection::default()),
            subgraphs: Vec::new(),
            extra: Vec::new(),
        }
    }

    pub fn tables(&self) -> Result<Vec<Table>, ReportError> {
        let mut tables = Vec::new();
        if let Some(stats) = &self.dataset_stats {
            tables.push(stats_table(stats)?);
        }
        if let Some(flow) = &self.flow {
            tables.extend(flow.tables());
        }
        if let Some(b) = &self.behaviour {
            tables.extend(b.tables());
        }
        tables.extend(self.extra.iter().cloned());
        Ok(tables)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    /// Sorted by file name.
    pub files: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl Manifest {
    pub fn entry(&self, file: &str) -> Option<&ManifestEntry> {
        self.files.iter().find(|e| e.file == file)
    }

    pub fn load(dir: &Path) -> io::Result<Manifest> {
        let bytes = fs::read(dir.join(MANIFEST_FILE))?;
        serde_json::from_slice(&bytes).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

fn write_file(
    dir: &Path,
    name: &str,
    bytes: &[u8],
    rows: usize,
    manifest: &mut Manifest,
) -> Result<(), ReportError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| ReportError::Io { path, source })?;
    manifest.files.push(ManifestEntry {
        file: name.to_string(),
        rows,
        sha256: hex::encode(Sha256::digest(bytes)),
    });
    Ok(())
}

/// Keeps `[A-Za-z0-9_-]`, replacing everything else with `_`.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes raw files (already rendered elsewhere) next to the tables and
/// records them in the manifest.
pub fn emit_files(
    dir: &Path,
    files: &[(String, Vec<u8>, usize)],
    manifest: &mut Manifest,
) -> Result<(), ReportError> {
    for (name, bytes, rows) in files {
        write_file(dir, name, bytes, *rows, manifest)?;
    }
    Ok(())
}

/// Writes every table of `bundle` in each requested format plus subgraph
/// edge lists, then `manifest.json`.
pub fn emit_all(
    dir: &Path,
    formats: &[Format],
    bundle: &ReportBundle,
) -> Result<Manifest, ReportError> {
    emit_with(dir, formats, bundle, &[])
}

/// As [`emit_all`], also writing pre-rendered `(name, bytes, rows)` files.
pub fn emit_with(
    dir: &Path,
    formats: &[Format],
    bundle: &ReportBundle,
    raw: &[(String, Vec<u8>, usize)],
) -> Result<Manifest, ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let formats: BTreeSet<Format> = formats.iter().copied().collect();
    let mut manifest = Manifest::default();
    for table in bundle.tables()? {
        if formats.contains(&Format::Csv) {
            write_file(
                dir,
                &format!("{}.csv", table.name),
                &table.to_csv()?,
                table.rows.len(),
                &mut manifest,
            )?;
        }
        if formats.contains(&Format::Json) {
            write_file(
                dir,
                &format!("{}.json", table.name),
                &table.to_json()?,
                table.rows.len(),
                &mut manifest,
            )?;
        }
    }
    for (name, sub) in &bundle.subgraphs {
        let mut bytes = Vec::new();
        sub.write_edge_list(&mut bytes)?;
        write_file(
            dir,
            &format!("subgraph_{}.csv", file_stem(name)),
            &bytes,
            sub.graph.edges.len(),
            &mut manifest,
        )?;
    }
    emit_files(dir, raw, &mut manifest)?;
    manifest.files.sort_by(|a, b| a.file.cmp(&b.file));
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, bytes).map_err(|source| ReportError::Io { path, source })?;
    Ok(manifest)
}
