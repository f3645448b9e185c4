#![allow(dead_code)]

use std::collections::BTreeSet;

use chrono::NaiveDate;
use sanctrace_core::ingest::{build_index, TxIndex};
use sanctrace_core::synth::{generate_chain, random_scenario, ScenarioConfig, SynthBundle};
use sanctrace_core::time::{midnight, SECS_PER_DAY};
use sanctrace_core::{PriceTable, SanctionedEntity};

pub struct World {
    pub config: ScenarioConfig,
    pub bundle: SynthBundle,
    pub index: TxIndex,
    pub entities: Vec<SanctionedEntity>,
    pub dataset_end: i64,
}

impl World {
    pub fn prices(&self) -> &PriceTable {
        &self.bundle.prices
    }

    /// Every address that appears in the corpus.
    pub fn addresses(&self) -> Vec<String> {
        let mut all = BTreeSet::new();
        for r in &self.bundle.records {
            for l in r.inputs.iter().chain(&r.outputs) {
                all.insert(l.address.clone());
            }
        }
        all.into_iter().collect()
    }
}

pub fn world(config: ScenarioConfig) -> World {
    let bundle = generate_chain(&config).expect("feasible scenario");
    let entities = config.sanctioned_entities();
    // Past the corpus and at least one day past every sanction date.
    let last_sanction = entities
        .iter()
        .map(|e| midnight(e.sanction_date) + SECS_PER_DAY)
        .max()
        .unwrap_or(0);
    let dataset_end = bundle.dataset_end().max(last_sanction);
    let index = build_index(bundle.records.clone());
    World {
        config,
        bundle,
        index,
        entities,
        dataset_end,
    }
}

pub fn random_world(seed: u64) -> World {
    world(random_scenario(seed))
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}
