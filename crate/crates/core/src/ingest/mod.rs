//! Parsing and validation of the four external inputs, plus the
//! address-ordered transaction index everything else reads from.

mod index;
mod labels;
mod price;
mod sdn;
mod tx;

use std::io;

use thiserror::Error;

pub use index::{build_index, AddrId, IndexEntry, Posting, Role, TxIndex, TxPos};
pub use labels::{parse_labels, BehaviourCategory, Label, LabelLoadReport, LabelSet};
pub use price::{parse_price_table, PriceTable};
pub use sdn::{parse_sdn_list, EntityKind, SanctionedEntity, ViolationCode};
pub use tx::{parse_transactions, parse_transactions_str, write_transactions, TxEdge, TxRecord};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: invalid txid `{txid}` (expected 64 hex characters)")]
    InvalidTxid { line: usize, txid: String },
    #[error("line {line}: duplicate txid {txid} (first seen on line {first_line})")]
    DuplicateTxid {
        line: usize,
        txid: String,
        first_line: usize,
    },
    #[error("line {line}: negative value in tx {txid}")]
    NegativeValue { line: usize, txid: String },
    #[error("line {line}: negative timestamp in tx {txid}")]
    NegativeTimestamp { line: usize, txid: String },
    #[error("line {line}: tx {txid} has no outputs")]
    NoOutputs { line: usize, txid: String },
    #[error("line {line}: negative fee in tx {txid} (inputs {inputs} < outputs {outputs})")]
    NegativeFee {
        line: usize,
        txid: String,
        inputs: u128,
        outputs: u128,
    },
    #[error("{file} line {line}: {message}")]
    Csv {
        file: &'static str,
        line: u64,
        message: String,
    },
    #[error("{file} line {line}: unknown violation code `{code}`")]
    UnknownViolation {
        file: &'static str,
        line: u64,
        code: String,
    },
    #[error("{file} line {line}: unparseable date `{value}`")]
    BadDate {
        file: &'static str,
        line: u64,
        value: String,
    },
    #[error(
        "sdn line {line}: address {address} assigned to both {first_entity} and {second_entity}"
    )]
    AddressConflict {
        line: u64,
        address: String,
        first_entity: String,
        second_entity: String,
    },
    #[error(
        "sdn line {line}: entity {entity_id} has conflicting {field}: `{first}` vs `{second}`"
    )]
    EntityConflict {
        line: u64,
        entity_id: String,
        field: &'static str,
        first: String,
        second: String,
    },
    #[error("prices line {line}: non-positive or invalid price `{value}`")]
    BadPrice { line: u64, value: String },
    #[error("prices line {line}: duplicate date {date}")]
    DuplicateDate { line: u64, date: String },
    #[error("labels line {line}: unknown category `{category}`")]
    UnknownCategory { line: u64, category: String },
    #[error("labels line {line}: conflicting labels for {address}: {first} vs {second}")]
    LabelConflict {
        line: u64,
        address: String,
        first: String,
        second: String,
    },
}

impl IngestError {
    pub(crate) fn csv(file: &'static str, err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        IngestError::Csv {
            file,
            line,
            message: err.to_string(),
        }
    }
}

/// Reads a headed CSV, yielding each row with the 1-based line it starts on.
pub(crate) fn read_csv<R, T>(reader: R, file: &'static str) -> Result<Vec<(u64, T)>, IngestError>
where
    R: io::Read,
    T: serde::de::DeserializeOwned,
{
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::csv(file, e))?
        .clone();
    let mut rows = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| IngestError::csv(file, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row = record
            .deserialize(Some(&headers))
            .map_err(|e| IngestError::Csv {
                file,
                line,
                message: e.to_string(),
            })?;
        rows.push((line, row));
    }
    Ok(rows)
}
