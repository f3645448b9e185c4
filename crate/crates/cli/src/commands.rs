use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

use anyhow::{anyhow, Context};
use sanctrace_core::behaviour::{behaviour_analysis, BehaviourAnalysis, BehaviourError};
use sanctrace_core::ingest::LabelLoadReport;
use sanctrace_core::report::{
    dataset_stats, emit_with, BehaviourSection, FlowReport, Format, Manifest, ReportBundle, Table,
};
use sanctrace_core::synth::{generate_chain, ground_truth, GroundTruth, ScenarioConfig};
use sanctrace_core::{
    build_index, expand_n_step, flow_table, parse_labels, parse_price_table, parse_sdn_list,
    parse_transactions, window_bounds, ExpansionSpec, FlowError, FlowTable, LabelSet, PriceTable,
    SanctionedEntity, Subgraph, TimeWindow, TxIndex, WindowLabel,
};

use crate::args::{
    BehaviourArgs, ExpansionArgs, FlowArgs, InputArgs, OutputArgs, ReportArgs, SynthArgs,
    ValidateArgs,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed inputs, unwritable outputs.
    Input(anyhow::Error),
    /// Results that contradict themselves or an expected sidecar.
    Invariant(anyhow::Error),
}

impl CliError {
    pub fn error(&self) -> &anyhow::Error {
        match self {
            CliError::Input(e) | CliError::Invariant(e) => e,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Input(e)
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e.root() {
            FlowError::NegativeBalance { .. } => CliError::Invariant(e.into()),
            _ => CliError::Input(e.into()),
        }
    }
}

impl From<BehaviourError> for CliError {
    fn from(e: BehaviourError) -> Self {
        match e {
            BehaviourError::Flow(f) => f.into(),
            other => CliError::Input(other.into()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Warning {
    code: &'static str,
    message: String,
}

struct Inputs {
    index: TxIndex,
    entities: Vec<SanctionedEntity>,
    prices: Option<PriceTable>,
    labels: LabelSet,
    label_report: Option<LabelLoadReport>,
    dataset_end: i64,
    warnings: Vec<Warning>,
}

impl Inputs {
    fn prices(&self) -> &PriceTable {
        self.prices
            .as_ref()
            .expect("prices are loaded for commands that need them")
    }

    fn sdn_addresses(&self) -> usize {
        self.entities.iter().map(|e| e.addresses.len()).sum()
    }
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .with_context(|| format!("cannot open {}", path.display()))
}

/// Parses every input before any analysis runs.
fn load(args: &InputArgs, need_prices: bool, dataset_end: Option<i64>) -> Result<Inputs> {
    let records = parse_transactions(open(&args.txs)?)
        .with_context(|| format!("in {}", args.txs.display()))?;
    let entities =
        parse_sdn_list(open(&args.sdn)?).with_context(|| format!("in {}", args.sdn.display()))?;
    let prices = match &args.prices {
        Some(path) => {
            Some(parse_price_table(open(path)?).with_context(|| format!("in {}", path.display()))?)
        }
        None if need_prices => return Err(anyhow!("--prices is required for this command").into()),
        None => None,
    };
    let (labels, label_report) = match &args.labels {
        Some(path) => {
            let (set, report) = parse_labels(open(path)?, &entities)
                .with_context(|| format!("in {}", path.display()))?;
            (set, Some(report))
        }
        None => (LabelSet::new(), None),
    };

    let last_ts = records.iter().map(|r| r.timestamp).max();
    let dataset_end = dataset_end
        .or(args.dataset_end)
        .unwrap_or_else(|| last_ts.map_or(0, |t| t + 1));
    let index = build_index(records);

    let mut warnings = Vec::new();
    if let Some(prices) = &prices {
        for day in prices.filled_days() {
            warnings.push(Warning {
                code: "price_gap",
                message: format!("price for {day} carried forward"),
            });
        }
        let missing = prices.missing_days(index.records().iter().map(|r| r.timestamp));
        for day in missing {
            warnings.push(Warning {
                code: "price_missing",
                message: format!("no price covers {day}"),
            });
        }
    }
    if let Some(report) = &label_report {
        for address in &report.sdn_overlaps {
            warnings.push(Warning {
                code: "label_overridden",
                message: format!(
                    "tagpack label of SDN address {address} replaced by its SDN entity"
                ),
            });
        }
    }
    for e in &entities {
        if window_bounds(e.sanction_date, dataset_end).is_err() {
            warnings.push(Warning {
                code: "sanction_after_end",
                message: format!(
                    "entity {} sanctioned on {} at or after the dataset end",
                    e.entity_id, e.sanction_date
                ),
            });
        }
    }
    let unseen = entities
        .iter()
        .flat_map(|e| &e.addresses)
        .filter(|a| index.addr_id(a).is_none())
        .count();
    if unseen > 0 {
        warnings.push(Warning {
            code: "unseen_sdn_addresses",
            message: format!("{unseen} SDN addresses never appear in the transactions"),
        });
    }

    let inputs = Inputs {
        index,
        entities,
        prices,
        labels,
        label_report,
        dataset_end,
        warnings,
    };
    print_warnings(&inputs.warnings);
    if args.strict && !inputs.warnings.is_empty() {
        return Err(anyhow!(
            "{} validation warnings with --strict",
            inputs.warnings.len()
        )
        .into());
    }
    Ok(inputs)
}

fn print_warnings(warnings: &[Warning]) {
    const SHOWN: usize = 20;
    for w in warnings.iter().take(SHOWN) {
        eprintln!("warning[{}]: {}", w.code, w.message);
    }
    if warnings.len() > SHOWN {
        eprintln!("... and {} more warnings", warnings.len() - SHOWN);
    }
}

fn emit(
    output: &OutputArgs,
    bundle: &ReportBundle,
    raw: &[(String, Vec<u8>, usize)],
) -> Result<Manifest> {
    emit_to(&output.out, &output.formats, bundle, raw)
}

fn emit_to(
    out: &Path,
    formats: &[Format],
    bundle: &ReportBundle,
    raw: &[(String, Vec<u8>, usize)],
) -> Result<Manifest> {
    let manifest = emit_with(out, formats, bundle, raw)
        .with_context(|| format!("writing {}", out.display()))?;
    println!(
        "wrote {} files and manifest.json to {}",
        manifest.files.len(),
        out.display()
    );
    Ok(manifest)
}

pub fn validate(args: ValidateArgs) -> Result<()> {
    let inputs = load(&args.input, true, None)?;
    let counts: [(&str, i64); 8] = [
        ("entities", inputs.entities.len() as i64),
        ("sdn_addresses", inputs.sdn_addresses() as i64),
        ("transactions", inputs.index.tx_count() as i64),
        ("addresses", inputs.index.address_count() as i64),
        ("price_days", inputs.prices().len() as i64),
        ("labels", inputs.labels.len() as i64),
        (
            "label_rows",
            inputs.label_report.as_ref().map_or(0, |r| r.rows as i64),
        ),
        ("dataset_end", inputs.dataset_end),
    ];
    let mut table = Table::new("validation", &["kind", "name", "value"]);
    for (name, n) in counts {
        println!("{name}: {n}");
        table.push(vec!["count".into(), name.into(), n.into()]);
    }
    println!("warnings: {}", inputs.warnings.len());
    for w in &inputs.warnings {
        table.push(vec![
            "warning".into(),
            w.code.into(),
            w.message.clone().into(),
        ]);
    }
    if let Some(out) = &args.out {
        let bundle = ReportBundle {
            extra: vec![table],
            ..ReportBundle::default()
        };
        emit_to(out, &args.formats, &bundle, &[])?;
    }
    Ok(())
}

fn compare(table: &FlowTable, truth: &GroundTruth) -> (Table, usize) {
    let mut out = Table::new(
        "expect_comparison",
        &["entity_id", "window", "field", "expected", "actual"],
    );
    let mut mismatches = 0;
    let mut seen = BTreeSet::new();
    for expected in &truth.entities {
        seen.insert(expected.entity_id.as_str());
        let Some(row) = table
            .rows
            .iter()
            .find(|r| r.entity_id == expected.entity_id)
        else {
            out.push(vec![
                expected.entity_id.clone().into(),
                "".into(),
                "entity".into(),
                "present".into(),
                "missing".into(),
            ]);
            mismatches += 1;
            continue;
        };
        for (label, want) in &expected.windows {
            let got = row.get(*label);
            let fields: [(&str, String, String); 7] = [
                ("n_tx_in", want.n_tx_in.to_string(), got.n_tx_in.to_string()),
                (
                    "n_tx_out",
                    want.n_tx_out.to_string(),
                    got.n_tx_out.to_string(),
                ),
                (
                    "received_sat",
                    want.received_sat.to_string(),
                    got.received_sat.to_string(),
                ),
                (
                    "sent_sat",
                    want.sent_sat.to_string(),
                    got.sent_sat.to_string(),
                ),
                (
                    "received_usd",
                    want.received_usd.to_string(),
                    got.received_usd.to_string(),
                ),
                (
                    "sent_usd",
                    want.sent_usd.to_string(),
                    got.sent_usd.to_string(),
                ),
                (
                    "balance_end_sat",
                    want.balance_end_sat.to_string(),
                    got.balance_end_sat.to_string(),
                ),
            ];
            for (field, w, g) in fields {
                if w != g {
                    mismatches += 1;
                    out.push(vec![
                        expected.entity_id.clone().into(),
                        label.as_str().into(),
                        field.into(),
                        w.into(),
                        g.into(),
                    ]);
                }
            }
        }
    }
    for row in &table.rows {
        if !seen.contains(row.entity_id.as_str()) {
            out.push(vec![
                row.entity_id.clone().into(),
                "".into(),
                "entity".into(),
                "missing".into(),
                "present".into(),
            ]);
            mismatches += 1;
        }
    }
    (out, mismatches)
}

pub fn flow(args: FlowArgs) -> Result<()> {
    let truth: Option<GroundTruth> = match &args.expect {
        Some(path) => {
            let bytes =
                fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
            Some(serde_json::from_slice(&bytes).with_context(|| format!("in {}", path.display()))?)
        }
        None => None,
    };
    let end_override = args
        .input
        .dataset_end
        .or(truth.as_ref().map(|t| t.dataset_end));
    let inputs = load(&args.input, true, end_override)?;
    let table = flow_table(
        &inputs.entities,
        &inputs.index,
        inputs.prices(),
        inputs.dataset_end,
    )?;
    let windows = if args.window.is_empty() {
        WindowLabel::ALL.to_vec()
    } else {
        args.window.clone()
    };
    let mut bundle = ReportBundle {
        flow: Some(FlowReport::from_table(&table, &windows)),
        ..ReportBundle::default()
    };

    let mut mismatches = 0;
    if let Some(truth) = &truth {
        let (comparison, n) = compare(&table, truth);
        mismatches = n;
        bundle.extra.push(comparison);
    }
    emit(&args.output, &bundle, &[])?;
    println!(
        "flow: {} entities, dataset end {}",
        inputs.entities.len(),
        inputs.dataset_end
    );
    if truth.is_some() {
        if mismatches > 0 {
            return Err(CliError::Invariant(anyhow!(
                "{mismatches} metrics differ from the expected sidecar"
            )));
        }
        println!("all metrics match the expected sidecar");
    }
    Ok(())
}

fn analyses(inputs: &Inputs, expansion: &ExpansionArgs) -> Result<Vec<BehaviourAnalysis>> {
    let steps: BTreeSet<u32> = expansion.steps.iter().copied().collect();
    steps
        .into_iter()
        .map(|s| {
            behaviour_analysis(
                &inputs.entities,
                s,
                &inputs.labels,
                &inputs.index,
                inputs.dataset_end,
                expansion.direction,
            )
            .map_err(CliError::from)
        })
        .collect()
}

fn subgraphs(inputs: &Inputs, expansion: &ExpansionArgs) -> Result<Vec<(String, Subgraph)>> {
    let mut out = Vec::new();
    if !expansion.subgraphs {
        return Ok(out);
    }
    let steps: BTreeSet<u32> = expansion.steps.iter().copied().collect();
    for entity in &inputs.entities {
        let windows = window_bounds(entity.sanction_date, inputs.dataset_end)?;
        let up = windows[WindowLabel::UpToDate as usize];
        let window = TimeWindow::new(up.start, up.end).map_err(|e| anyhow!("{e}"))?;
        for &s in &steps {
            let spec = ExpansionSpec::new(
                entity.addresses.iter().cloned(),
                s,
                window,
                expansion.direction,
            )
            .map_err(|e| anyhow!("entity {}: {e}", entity.entity_id))?;
            out.push((
                format!("{}_{s}step", entity.entity_id),
                expand_n_step(&inputs.index, &spec),
            ));
        }
    }
    Ok(out)
}

pub fn behaviour(args: BehaviourArgs) -> Result<()> {
    let inputs = load(&args.input, false, None)?;
    let analyses = analyses(&inputs, &args.expansion)?;
    let bundle = ReportBundle {
        behaviour: Some(BehaviourSection { analyses }),
        subgraphs: subgraphs(&inputs, &args.expansion)?,
        ..ReportBundle::default()
    };
    emit(&args.output, &bundle, &[])?;
    Ok(())
}

pub fn report(args: ReportArgs) -> Result<()> {
    let inputs = load(&args.input, true, None)?;
    let table = flow_table(
        &inputs.entities,
        &inputs.index,
        inputs.prices(),
        inputs.dataset_end,
    )?;
    let bundle = ReportBundle {
        dataset_stats: Some(dataset_stats(&inputs.entities)),
        flow: Some(FlowReport::from_table(&table, &WindowLabel::ALL)),
        behaviour: Some(BehaviourSection {
            analyses: analyses(&inputs, &args.expansion)?,
        }),
        subgraphs: subgraphs(&inputs, &args.expansion)?,
        extra: Vec::new(),
    };
    emit(&args.output, &bundle, &[])?;
    Ok(())
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let bytes =
        fs::read(&args.config).with_context(|| format!("cannot read {}", args.config.display()))?;
    let config: ScenarioConfig =
        serde_json::from_slice(&bytes).with_context(|| format!("in {}", args.config.display()))?;
    let bundle = generate_chain(&config).map_err(|e| anyhow!("{e}"))?;
    let dataset_end = bundle.dataset_end();
    let truth = ground_truth(&config, &bundle, dataset_end)
        .map_err(|e| CliError::Invariant(anyhow!("{e}")))?;
    let mut truth_json = serde_json::to_vec_pretty(&truth).map_err(anyhow::Error::from)?;
    truth_json.push(b'\n');
    let csv_rows = |s: &str| s.lines().count().saturating_sub(1);
    let raw = vec![
        (
            "transactions.ndjson".to_string(),
            bundle.transactions_ndjson.clone().into_bytes(),
            bundle.records.len(),
        ),
        (
            "sdn.csv".to_string(),
            bundle.sdn_csv.clone().into_bytes(),
            csv_rows(&bundle.sdn_csv),
        ),
        (
            "prices.csv".to_string(),
            bundle.prices_csv.clone().into_bytes(),
            csv_rows(&bundle.prices_csv),
        ),
        (
            "labels.csv".to_string(),
            bundle.labels_csv.clone().into_bytes(),
            csv_rows(&bundle.labels_csv),
        ),
        (
            "ground_truth.json".to_string(),
            truth_json,
            truth.entities.len(),
        ),
    ];
    emit(&args.output, &ReportBundle::default(), &raw)?;
    println!(
        "synth: {} transactions, {} entities, dataset end {dataset_end}",
        bundle.records.len(),
        config.entities.len()
    );
    Ok(())
}
