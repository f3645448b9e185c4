use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::IngestError;

/// One `(address, value)` leg of a transaction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TxEdge {
    pub address: String,
    pub value: u64,
}

impl TxEdge {
    pub fn new(address: impl Into<String>, value: u64) -> Self {
        TxEdge {
            address: address.into(),
            value,
        }
    }
}

/// A confirmed transaction with resolved input addresses and values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TxRecord {
    pub txid: String,
    pub timestamp: i64,
    pub inputs: Vec<TxEdge>,
    pub outputs: Vec<TxEdge>,
}

impl TxRecord {
    pub fn is_coinbase(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_total(&self) -> u128 {
        self.inputs.iter().map(|e| u128::from(e.value)).sum()
    }

    pub fn output_total(&self) -> u128 {
        self.outputs.iter().map(|e| u128::from(e.value)).sum()
    }

    /// `None` for coinbase transactions.
    pub fn fee(&self) -> Option<u128> {
        if self.is_coinbase() {
            None
        } else {
            self.input_total().checked_sub(self.output_total())
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    address: String,
    value: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTx {
    txid: String,
    timestamp: i64,
    inputs: Vec<RawEdge>,
    outputs: Vec<RawEdge>,
}

fn is_txid(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| b.is_ascii_hexdigit())
}

fn parse_line(line_no: usize, line: &str) -> Result<TxRecord, IngestError> {
    let raw: RawTx = serde_json::from_str(line).map_err(|e| IngestError::Malformed {
        line: line_no,
        message: e.to_string(),
    })?;
    if !is_txid(&raw.txid) {
        return Err(IngestError::InvalidTxid {
            line: line_no,
            txid: raw.txid,
        });
    }
    if raw.timestamp < 0 {
        return Err(IngestError::NegativeTimestamp {
            line: line_no,
            txid: raw.txid,
        });
    }
    let convert = |edges: Vec<RawEdge>, txid: &str| -> Result<Vec<TxEdge>, IngestError> {
        edges
            .into_iter()
            .map(|e| {
                u64::try_from(e.value)
                    .map(|value| TxEdge {
                        address: e.address,
                        value,
                    })
                    .map_err(|_| IngestError::NegativeValue {
                        line: line_no,
                        txid: txid.to_string(),
                    })
            })
            .collect()
    };
    let inputs = convert(raw.inputs, &raw.txid)?;
    let outputs = convert(raw.outputs, &raw.txid)?;
    let record = TxRecord {
        txid: raw.txid,
        timestamp: raw.timestamp,
        inputs,
        outputs,
    };
    if record.outputs.is_empty() {
        return Err(IngestError::NoOutputs {
            line: line_no,
            txid: record.txid,
        });
    }
    if !record.is_coinbase() && record.input_total() < record.output_total() {
        return Err(IngestError::NegativeFee {
            line: line_no,
            inputs: record.input_total(),
            outputs: record.output_total(),
            txid: record.txid,
        });
    }
    Ok(record)
}

/// Parses line-delimited JSON transactions. Blank lines are skipped but still
/// counted for error line numbers. Lines are decoded in parallel; the result
/// and the reported error are the same as a sequential scan would give.
pub fn parse_transactions<R: BufRead>(mut reader: R) -> Result<Vec<TxRecord>, IngestError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_transactions_str(&text)
}

pub fn parse_transactions_str(text: &str) -> Result<Vec<TxRecord>, IngestError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let parsed: Vec<Result<TxRecord, IngestError>> =
        lines.par_iter().map(|&(n, l)| parse_line(n, l)).collect();

    let mut records = Vec::with_capacity(parsed.len());
    let mut seen: HashMap<String, usize> = HashMap::with_capacity(parsed.len());
    for ((line_no, _), result) in lines.iter().zip(parsed) {
        let record = result?;
        if let Some(&first_line) = seen.get(&record.txid) {
            return Err(IngestError::DuplicateTxid {
                line: *line_no,
                txid: record.txid,
                first_line,
            });
        }
        seen.insert(record.txid.clone(), *line_no);
        records.push(record);
    }
    Ok(records)
}

/// Writes records in the same line-delimited JSON format `parse_transactions`
/// reads.
pub fn write_transactions<W: Write>(records: &[TxRecord], mut writer: W) -> io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
