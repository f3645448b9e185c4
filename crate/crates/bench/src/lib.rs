//! Corpus builders shared by the benchmarks.

use chrono::NaiveDate;
use sanctrace_core::synth::{generate_chain, ScenarioConfig, SynthBundle};

pub fn background_corpus(n_txs: usize, universe: usize, seed: u64) -> SynthBundle {
    let mut config =
        ScenarioConfig::minimal(seed, NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), 365);
    config.n_background_txs = n_txs;
    config.address_universe = universe;
    generate_chain(&config).expect("background-only scenarios are always feasible")
}
