//! Address-transaction graph analytics for measuring how sanctioned entities
//! keep using their Bitcoin addresses.
//!
//! The crate is organised around the pipeline it implements:
//!
//! * [`ingest`] parses transactions, the SDN list, daily prices and label
//!   tagpacks, and builds the address-ordered [`TxIndex`].
//! * [`graph`] materialises bipartite address-transaction graphs and performs
//!   windowed n-step expansion from seed addresses.
//! * [`flow`] computes pre/post-sanction flow metrics per address, entity and
//!   violation code.
//! * [`behaviour`] attributes addresses reached by 1-step and 2-step
//!   expansion to labelled categories.
//! * [`synth`] generates deterministic synthetic chains and holds the
//!   brute-force oracles used to verify everything else.
//! * [`report`] computes descriptive dataset statistics and writes every
//!   table to disk with a checksummed manifest.

pub mod amount;
pub mod behaviour;
pub mod flow;
pub mod graph;
pub mod ingest;
pub mod report;
pub mod synth;
pub mod time;

pub use amount::{Price, Usd, SAT_PER_BTC};
pub use behaviour::{
    behaviour_analysis, behavioural_report, category_share, BehaviourAnalysis, BehaviourError,
    BehaviourReport,
};
pub use flow::{
    activity_counts, address_flow_metrics, balance_at, balance_histogram, entity_flow_metrics,
    flow_table, violation_aggregate, window_bounds, BalanceBucket, FlowError, FlowMetrics,
    FlowTable, ViolationAggregate,
};
pub use graph::{
    build_graph, expand_n_step, reached_addresses, AddressTxGraph, Direction, ExpansionSpec,
    Subgraph,
};
pub use ingest::{
    build_index, parse_labels, parse_price_table, parse_sdn_list, parse_transactions,
    BehaviourCategory, EntityKind, IngestError, LabelSet, PriceTable, Role, SanctionedEntity,
    TxIndex, TxRecord, ViolationCode,
};
pub use report::{dataset_stats, emit_all, DatasetStats, Format, Manifest, ReportBundle};
pub use time::{TimeWindow, WindowLabel};
