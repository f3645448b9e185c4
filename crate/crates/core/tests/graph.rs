mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{random_world, World};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sanctrace_core::graph::EdgeKind;
use sanctrace_core::synth::{oracle_reachable, oracle_reachable_depths};
use sanctrace_core::{
    build_graph, expand_n_step, reached_addresses, Direction, ExpansionSpec, TimeWindow,
};

const DIRECTIONS: [Direction; 3] = [Direction::Forward, Direction::Backward, Direction::Both];

fn random_window(w: &World, rng: &mut ChaCha8Rng) -> TimeWindow {
    let (lo, hi) = w.index.time_span().unwrap_or((0, 1));
    if rng.gen_bool(0.3) {
        return TimeWindow::unbounded();
    }
    let a = rng.gen_range(lo - 10..=hi + 10);
    let b = rng.gen_range(lo - 10..=hi + 10);
    TimeWindow::new(a.min(b), a.max(b) + 1).unwrap()
}

fn random_seeds(w: &World, rng: &mut ChaCha8Rng) -> BTreeSet<String> {
    let all = w.addresses();
    let n = rng.gen_range(1..=4);
    let mut seeds: BTreeSet<String> = all.choose_multiple(rng, n).cloned().collect();
    if rng.gen_bool(0.1) {
        seeds.insert("never-seen".into());
    }
    seeds
}

#[test]
fn build_graph_equals_record_filter() {
    for seed in 0..20 {
        let w = random_world(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let window = random_window(&w, &mut rng);
        let g = build_graph(&w.index, &window);
        let mut addresses = BTreeSet::new();
        let mut txs = BTreeMap::new();
        let mut edges = Vec::new();
        for r in w
            .bundle
            .records
            .iter()
            .filter(|r| window.contains(r.timestamp))
        {
            txs.insert(r.txid.clone(), r.timestamp);
            let mut merged: BTreeMap<(u8, &str), u64> = BTreeMap::new();
            for l in &r.inputs {
                *merged.entry((0, &l.address)).or_default() += l.value;
            }
            for l in &r.outputs {
                *merged.entry((1, &l.address)).or_default() += l.value;
            }
            for ((kind, a), v) in merged {
                addresses.insert(a.to_string());
                edges.push((r.txid.clone(), kind, a.to_string(), v));
            }
        }
        edges.sort();
        let got: Vec<(String, u8, String, u64)> = g
            .edges
            .iter()
            .map(|e| {
                (
                    e.txid.clone(),
                    u8::from(e.kind == EdgeKind::Pay),
                    e.address.clone(),
                    e.value,
                )
            })
            .collect();
        assert_eq!(g.addresses, addresses);
        assert_eq!(g.txs, txs);
        assert_eq!(got, edges);
    }
}

fn check_expansion(seed: u64) {
    let w = random_world(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31));
    for direction in DIRECTIONS {
        let seeds = random_seeds(&w, &mut rng);
        let window = random_window(&w, &mut rng);
        let mut previous: Option<BTreeSet<String>> = None;
        for steps in 1..=3 {
            let spec = ExpansionSpec::new(seeds.clone(), steps, window, direction).unwrap();
            let sub = expand_n_step(&w.index, &spec);
            let expected =
                oracle_reachable_depths(&w.bundle.records, &seeds, steps, &window, direction)
                    .unwrap();
            assert_eq!(
                sub.address_depth, expected,
                "seed {seed} {direction:?} n={steps}"
            );
            let reached: BTreeSet<String> = sub.address_depth.keys().cloned().collect();
            assert_eq!(
                reached,
                oracle_reachable(&w.bundle.records, &seeds, steps, &window, direction).unwrap()
            );
            for e in &sub.graph.edges {
                assert!(window.contains(e.timestamp));
                assert!(sub.tx_depth[&e.txid] <= steps);
                assert!(sub.address_depth.contains_key(&e.address));
            }
            if let Some(prev) = previous {
                assert!(prev.is_subset(&reached));
            }
            previous = Some(reached);
        }
    }
}

#[test]
fn expansion_equals_path_enumeration_on_fixed_seeds() {
    for seed in 100..112 {
        check_expansion(seed);
    }
}

#[test]
fn one_step_fan_out() {
    use sanctrace_core::ingest::{build_index, TxEdge, TxRecord};
    let t1 = TxRecord {
        txid: "1".repeat(64),
        timestamp: 10,
        inputs: vec![TxEdge::new("X1", 10)],
        outputs: vec![TxEdge::new("X2", 4), TxEdge::new("X3", 5)],
    };
    let t2 = TxRecord {
        txid: "2".repeat(64),
        timestamp: 20,
        inputs: vec![TxEdge::new("X2", 4)],
        outputs: vec![TxEdge::new("X4", 3)],
    };
    let index = build_index(vec![t1, t2]);
    let spec = ExpansionSpec::new(["X1"], 1, TimeWindow::unbounded(), Direction::Forward).unwrap();
    let sub = expand_n_step(&index, &spec);
    let all: BTreeSet<&str> = sub.address_depth.keys().map(String::as_str).collect();
    assert_eq!(all, BTreeSet::from(["X1", "X2", "X3"]));
    assert_eq!(sub.tx_depth.len(), 1);
    let without: BTreeSet<&str> = ["X2", "X3"].into();
    assert_eq!(
        reached_addresses(&sub, true)
            .iter()
            .map(String::as_str)
            .collect::<BTreeSet<_>>(),
        without
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn expansion_equals_path_enumeration(seed in any::<u64>()) {
        check_expansion(seed);
    }
}
