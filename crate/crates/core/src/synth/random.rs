use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    universe_address, EventDirection, PriceModel, ScenarioConfig, ScriptedEntity, ScriptedEvent,
};
use crate::amount::{Price, SAT_PER_BTC};
use crate::ingest::{EntityKind, ViolationCode};

/// Upper bound on background transactions in a [`random_scenario`]; scripted
/// events add at most a few hundred more.
pub const RANDOM_MAX_BACKGROUND: usize = 4_000;

/// A feasible scenario drawn from `seed`: a small address universe with
/// background traffic, one to four sanctioned entities whose scripted
/// events straddle their sanction dates, and a partial tagpack.
///
/// Every other entity mixes universe addresses into its own set so that
/// background traffic and scripted traffic collide.
pub fn random_scenario(seed: u64) -> ScenarioConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed_5eed_5eed);
    let universe = rng.gen_range(12..=200);
    let days = rng.gen_range(20..=90u32);
    let start_date =
        NaiveDate::from_ymd_opt(2021, 1, 1).expect("valid") + Days::new(rng.gen_range(0..900));
    let fee = rng.gen_range(0..=2_000);
    let mut config = ScenarioConfig::minimal(seed, start_date, days);
    config.address_universe = universe;
    config.n_background_txs = rng.gen_range(0..=RANDOM_MAX_BACKGROUND);
    config.fee_sat = fee;
    config.background_label_rows = rng.gen_range(0..=universe);
    config.price_model = if rng.gen_bool(0.3) {
        PriceModel::Constant {
            usd: Price::from_units(rng.gen_range(1..=80_000 * 100_000_000)).expect("positive"),
        }
    } else {
        PriceModel::Walk {
            start: Price::from_units(
                rng.gen_range(1_000..=60_000u64) * 100_000_000 + rng.gen_range(0..100_000_000),
            )
            .expect("positive"),
            step: Price::from_units(rng.gen_range(1..=500u64) * 100_000_000).expect("positive"),
        }
    };

    let n_entities = rng.gen_range(1..=4);
    for e in 0..n_entities {
        let sanction_offset = rng.gen_range(0..i64::from(days));
        let sanction_date = start_date + Days::new(sanction_offset as u64);
        let n_addr = rng.gen_range(1..=3);
        let mut addresses: Vec<String> = (0..n_addr).map(|k| format!("ent{e}-{k}")).collect();
        let collide = e % 2 == 1;
        if collide {
            let bg = universe_address(rng.gen_range(0..universe));
            if !config
                .entities
                .iter()
                .any(|x: &ScriptedEntity| x.addresses.contains(&bg))
            {
                addresses.push(bg);
            }
        }
        let mut violations = vec![*ViolationCode::ALL.choose(&mut rng).expect("non-empty")];
        if rng.gen_bool(0.3) {
            let extra = *ViolationCode::ALL.choose(&mut rng).expect("non-empty");
            if !violations.contains(&extra) {
                violations.push(extra);
            }
        }

        // Only dedicated addresses send, so their balances are known here.
        let dedicated = n_addr;
        let mut balances = vec![0u64; dedicated];
        let mut days_offsets: Vec<i64> = (0..rng.gen_range(1..=12))
            .map(|_| rng.gen_range(-sanction_offset..i64::from(days) - sanction_offset + 5))
            .collect();
        days_offsets.sort_unstable();
        let mut events = Vec::new();
        for day in days_offsets {
            let k = rng.gen_range(0..addresses.len());
            let counterparty = universe_address(rng.gen_range(0..universe));
            let send_budget = if k < dedicated { balances[k] } else { 0 };
            let hops = rng.gen_range(0..=2usize);
            let min_send = fee * (hops as u64 + 1) + 1;
            if send_budget > min_send + fee && rng.gen_bool(0.45) {
                let amount = rng.gen_range(min_send..=send_budget - fee);
                balances[k] -= amount + fee;
                let forward = (0..hops)
                    .map(|_| universe_address(rng.gen_range(0..universe)))
                    .collect();
                events.push(ScriptedEvent {
                    day,
                    direction: EventDirection::Send,
                    amount_sat: amount,
                    counterparty,
                    address: Some(addresses[k].clone()),
                    forward,
                });
            } else {
                let amount = rng.gen_range(1..=20 * SAT_PER_BTC);
                if k < dedicated {
                    balances[k] += amount;
                }
                events.push(ScriptedEvent {
                    day,
                    direction: EventDirection::Receive,
                    amount_sat: amount,
                    counterparty,
                    address: Some(addresses[k].clone()),
                    forward: Vec::new(),
                });
            }
        }
        config.entities.push(ScriptedEntity {
            entity_id: format!("E{e}"),
            name: format!("Entity {e}"),
            kind: if rng.gen_bool(0.5) {
                EntityKind::Individual
            } else {
                EntityKind::Company
            },
            country: ["China", "Russia", "Iran", "Gaza"]
                .choose(&mut rng)
                .expect("non-empty")
                .to_string(),
            sanction_date,
            violations,
            addresses,
            events,
        });
    }

    config
}
