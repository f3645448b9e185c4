//! Bipartite address-transaction graphs and windowed n-step expansion.
//!
//! Address nodes connect to transaction nodes through spend edges
//! (`address → tx`, one per merged input leg) and pay edges
//! (`tx → address`, one per merged output leg). Expansion alternates
//! address and transaction layers breadth-first, so the depth recorded for a
//! node is the minimum number of transaction nodes on any qualifying path
//! from a seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AddrId, Role, TxIndex, TxPos};
use crate::time::TimeWindow;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("expansion needs at least one seed address")]
    NoSeeds,
    #[error("step count must be at least 1")]
    ZeroSteps,
}

/// Which edges a traversal may follow.
///
/// `Forward` follows the money: from an address to the transactions it
/// spends in, then to their payees. `Backward` goes from an address to the
/// transactions paying it, then to their spenders. `Both` ignores edge
/// orientation entirely.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
    Both,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Forward, Direction::Backward, Direction::Both];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
            Direction::Both => "both",
        }
    }

    /// Whether an address holding `role` in a transaction may step into it.
    fn enters_via(self, role: Role) -> bool {
        match self {
            Direction::Forward => role == Role::Input,
            Direction::Backward => role == Role::Output,
            Direction::Both => true,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            "both" => Ok(Direction::Both),
            _ => Err(format!(
                "unknown direction `{s}` (expected forward, backward or both)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// `address → tx`
    Spend,
    /// `tx → address`
    Pay,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Spend => "spend",
            EdgeKind::Pay => "pay",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GraphEdge {
    pub txid: String,
    pub kind: EdgeKind,
    pub address: String,
    pub value: u64,
    pub timestamp: i64,
}

impl GraphEdge {
    pub fn src(&self) -> &str {
        match self.kind {
            EdgeKind::Spend => &self.address,
            EdgeKind::Pay => &self.txid,
        }
    }

    pub fn dst(&self) -> &str {
        match self.kind {
            EdgeKind::Spend => &self.txid,
            EdgeKind::Pay => &self.address,
        }
    }
}

/// Bipartite graph of addresses and transactions. Edges are kept sorted by
/// `(txid, kind, address)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddressTxGraph {
    pub addresses: BTreeSet<String>,
    /// txid → timestamp
    pub txs: BTreeMap<String, i64>,
    pub edges: Vec<GraphEdge>,
}

impl AddressTxGraph {
    pub fn is_empty(&self) -> bool {
        self.addresses.is_empty() && self.txs.is_empty()
    }

    fn edge(index: &TxIndex, tx: TxPos, kind: EdgeKind, addr: AddrId, value: u64) -> GraphEdge {
        GraphEdge {
            txid: index.txid(tx).to_string(),
            kind,
            address: index.address(addr).to_string(),
            value,
            timestamp: index.timestamp(tx),
        }
    }
}

/// Every transaction in `window` with its incident addresses and edges.
pub fn build_graph(index: &TxIndex, window: &TimeWindow) -> AddressTxGraph {
    let mut graph = AddressTxGraph::default();
    for &tx in index.txs_in(window) {
        graph
            .txs
            .insert(index.txid(tx).to_string(), index.timestamp(tx));
        for &(addr, value) in index.inputs(tx) {
            graph.addresses.insert(index.address(addr).to_string());
            graph.edges.push(AddressTxGraph::edge(
                index,
                tx,
                EdgeKind::Spend,
                addr,
                value,
            ));
        }
        for &(addr, value) in index.outputs(tx) {
            graph.addresses.insert(index.address(addr).to_string());
            graph
                .edges
                .push(AddressTxGraph::edge(index, tx, EdgeKind::Pay, addr, value));
        }
    }
    graph.edges.sort();
    graph
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionSpec {
    pub seeds: BTreeSet<String>,
    pub steps: u32,
    pub window: TimeWindow,
    pub direction: Direction,
}

impl ExpansionSpec {
    pub fn new<I, S>(
        seeds: I,
        steps: u32,
        window: TimeWindow,
        direction: Direction,
    ) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let seeds: BTreeSet<String> = seeds.into_iter().map(Into::into).collect();
        if seeds.is_empty() {
            return Err(GraphError::NoSeeds);
        }
        if steps == 0 {
            return Err(GraphError::ZeroSteps);
        }
        Ok(ExpansionSpec {
            seeds,
            steps,
            window,
            direction,
        })
    }
}

/// Node depths from one expansion, in index ids. Lists are sorted by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Reach {
    pub addresses: Vec<(AddrId, u32)>,
    pub txs: Vec<(TxPos, u32)>,
}

/// Layered breadth-first expansion over index ids. Seeds must already be
/// resolved; seeds unknown to the index simply contribute nothing.
pub fn expand_ids(
    index: &TxIndex,
    seeds: &[AddrId],
    steps: u32,
    window: &TimeWindow,
    direction: Direction,
) -> Reach {
    let mut addr_depth: std::collections::HashMap<AddrId, u32> = std::collections::HashMap::new();
    let mut tx_depth: std::collections::HashMap<TxPos, u32> = std::collections::HashMap::new();
    let mut frontier: Vec<AddrId> = Vec::new();
    for &s in seeds {
        if addr_depth.insert(s, 0).is_none() {
            frontier.push(s);
        }
    }

    for layer in 1..=steps {
        let mut layer_txs = Vec::new();
        for &addr in &frontier {
            for posting in index.postings_in(addr, window) {
                if direction.enters_via(posting.role) && !tx_depth.contains_key(&posting.tx) {
                    tx_depth.insert(posting.tx, layer);
                    layer_txs.push(posting.tx);
                }
            }
        }
        let mut next = Vec::new();
        for &tx in &layer_txs {
            let outs = index.outputs(tx).iter();
            let ins = index.inputs(tx).iter();
            let targets: Box<dyn Iterator<Item = &(AddrId, u64)>> = match direction {
                Direction::Forward => Box::new(outs),
                Direction::Backward => Box::new(ins),
                Direction::Both => Box::new(ins.chain(outs)),
            };
            for &(addr, _) in targets {
                if let std::collections::hash_map::Entry::Vacant(slot) = addr_depth.entry(addr) {
                    slot.insert(layer);
                    next.push(addr);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    let mut addresses: Vec<(AddrId, u32)> = addr_depth.into_iter().collect();
    addresses.sort_unstable();
    let mut txs: Vec<(TxPos, u32)> = tx_depth.into_iter().collect();
    txs.sort_unstable();
    Reach { addresses, txs }
}

/// The n-step graph around a seed set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub graph: AddressTxGraph,
    pub address_depth: BTreeMap<String, u32>,
    pub tx_depth: BTreeMap<String, u32>,
    pub seeds: BTreeSet<String>,
    pub steps: u32,
    pub direction: Direction,
}

/// Expands `spec.steps` transaction layers from the seeds inside
/// `spec.window`.
///
/// The edge set is the layered one: an edge joins a transaction at depth `k`
/// to an address at depth `k - 1` it was entered from, or to an address at
/// depth `k` it led to, following the expansion direction. Every path along
/// these edges therefore crosses at most `steps` transactions.
pub fn expand_n_step(index: &TxIndex, spec: &ExpansionSpec) -> Subgraph {
    let seed_ids: Vec<AddrId> = spec.seeds.iter().filter_map(|s| index.addr_id(s)).collect();
    let reach = expand_ids(index, &seed_ids, spec.steps, &spec.window, spec.direction);
    let depth_of: std::collections::HashMap<AddrId, u32> =
        reach.addresses.iter().copied().collect();

    let mut address_depth: BTreeMap<String, u32> =
        spec.seeds.iter().map(|s| (s.clone(), 0)).collect();
    for &(addr, depth) in &reach.addresses {
        address_depth.insert(index.address(addr).to_string(), depth);
    }

    let mut graph = AddressTxGraph {
        addresses: address_depth.keys().cloned().collect(),
        ..Default::default()
    };
    let mut tx_depth = BTreeMap::new();
    for &(tx, k) in &reach.txs {
        tx_depth.insert(index.txid(tx).to_string(), k);
        graph
            .txs
            .insert(index.txid(tx).to_string(), index.timestamp(tx));
        let depth = |a: &AddrId| depth_of.get(a).copied();
        for &(addr, value) in index.inputs(tx) {
            let keep = match (spec.direction, depth(&addr)) {
                (_, None) => false,
                (Direction::Forward, Some(d)) => d + 1 == k,
                (Direction::Backward, Some(d)) => d == k,
                (Direction::Both, Some(_)) => true,
            };
            if keep {
                graph.edges.push(AddressTxGraph::edge(
                    index,
                    tx,
                    EdgeKind::Spend,
                    addr,
                    value,
                ));
            }
        }
        for &(addr, value) in index.outputs(tx) {
            let keep = match (spec.direction, depth(&addr)) {
                (_, None) => false,
                (Direction::Forward, Some(d)) => d == k,
                (Direction::Backward, Some(d)) => d + 1 == k,
                (Direction::Both, Some(_)) => true,
            };
            if keep {
                graph
                    .edges
                    .push(AddressTxGraph::edge(index, tx, EdgeKind::Pay, addr, value));
            }
        }
    }
    graph.edges.sort();

    Subgraph {
        graph,
        address_depth,
        tx_depth,
        seeds: spec.seeds.clone(),
        steps: spec.steps,
        direction: spec.direction,
    }
}

/// Address nodes of `sub`, optionally without its seeds.
pub fn reached_addresses(sub: &Subgraph, exclude_seeds: bool) -> BTreeSet<String> {
    sub.graph
        .addresses
        .iter()
        .filter(|a| !(exclude_seeds && sub.seeds.contains(*a)))
        .cloned()
        .collect()
}

/// One row of an exported edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub src: String,
    pub dst: String,
    pub kind: EdgeKind,
    pub value: u64,
    pub timestamp: i64,
    /// Depth of the transaction endpoint.
    pub depth: u32,
}

impl Subgraph {
    pub fn edge_rows(&self) -> Vec<EdgeRow> {
        self.graph
            .edges
            .iter()
            .map(|e| EdgeRow {
                src: e.src().to_string(),
                dst: e.dst().to_string(),
                kind: e.kind,
                value: e.value,
                timestamp: e.timestamp,
                depth: self.tx_depth[&e.txid],
            })
            .collect()
    }

    /// Writes `src,dst,kind,value,timestamp,depth` CSV.
    pub fn write_edge_list<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["src", "dst", "kind", "value", "timestamp", "depth"])?;
        for row in self.edge_rows() {
            w.write_record([
                row.src,
                row.dst,
                row.kind.as_str().to_string(),
                row.value.to_string(),
                row.timestamp.to_string(),
                row.depth.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
