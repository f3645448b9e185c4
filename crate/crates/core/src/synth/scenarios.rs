use chrono::NaiveDate;

use super::{EventDirection, LabelledAddress, ScenarioConfig, ScriptedEntity, ScriptedEvent};
use crate::amount::SAT_PER_BTC;
use crate::ingest::{BehaviourCategory, EntityKind, ViolationCode};

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}

fn event(
    day: i64,
    direction: EventDirection,
    amount_sat: u64,
    counterparty: &str,
) -> ScriptedEvent {
    ScriptedEvent {
        day,
        direction,
        amount_sat,
        counterparty: counterparty.into(),
        address: None,
        forward: Vec::new(),
    }
}

fn entity(id: &str, sanction_date: NaiveDate, events: Vec<ScriptedEvent>) -> ScriptedEntity {
    ScriptedEntity {
        entity_id: id.into(),
        name: format!("Entity {id}"),
        kind: EntityKind::Company,
        country: "Russia".into(),
        sanction_date,
        violations: vec![ViolationCode::Cyber2],
        addresses: vec![format!("{id}-addr")],
        events,
    }
}

/// One entity, funded before its sanction, that pays `relay` after it; the
/// relay forwards to `mixer` the same day. Only `mixer` is labelled, so the
/// Mixer category shows up in 2-step reach and not in 1-step reach.
pub fn mixer_at_hop2_scenario() -> ScenarioConfig {
    let mut config = ScenarioConfig::minimal(2, date(2022, 3, 1), 60);
    let mut send = event(5, EventDirection::Send, 2 * SAT_PER_BTC, "relay");
    send.forward = vec!["mixer".into()];
    config.entities.push(entity(
        "MX",
        date(2022, 3, 20),
        vec![
            event(-10, EventDirection::Receive, 5 * SAT_PER_BTC, "funder"),
            send,
        ],
    ));
    config.labels.push(LabelledAddress {
        address: "mixer".into(),
        entity: "TumbleCo".into(),
        category: BehaviourCategory::Mixer,
    });
    config
}

/// Fifteen exchange operators share 331 addresses; nine more labelled
/// addresses spread over other categories, and 60 unlabelled payees. Every
/// payee receives one post-sanction payment, so 1-step reach holds exactly
/// 340 labelled addresses of which 331 are exchanges.
pub fn exchange_share_scenario() -> ScenarioConfig {
    let mut config = ScenarioConfig::minimal(3, date(2023, 1, 1), 90);
    let mut payees: Vec<(String, Option<(String, BehaviourCategory)>)> = Vec::new();
    for i in 0..331 {
        payees.push((
            format!("ex{i:03}"),
            Some((
                format!("Exchange {:02}", i % 15),
                BehaviourCategory::Exchange,
            )),
        ));
    }
    let others = [
        (BehaviourCategory::Gambling, 3),
        (BehaviourCategory::Service, 3),
        (BehaviourCategory::Marketplace, 2),
        (BehaviourCategory::Mixer, 1),
    ];
    for (category, n) in others {
        for i in 0..n {
            payees.push((
                format!("{}-{i}", category.as_str().to_lowercase()),
                Some((format!("{} op", category.as_str()), category)),
            ));
        }
    }
    for i in 0..60 {
        payees.push((format!("anon{i:02}"), None));
    }
    let mut events = vec![event(
        -30,
        EventDirection::Receive,
        1_000 * SAT_PER_BTC,
        "funder",
    )];
    for (i, (address, label)) in payees.into_iter().enumerate() {
        events.push(event(
            1 + (i as i64 % 40),
            EventDirection::Send,
            SAT_PER_BTC / 10,
            &address,
        ));
        if let Some((entity, category)) = label {
            config.labels.push(LabelledAddress {
                address,
                entity,
                category,
            });
        }
    }
    events.sort_by_key(|e| e.day);
    config.entities.push(entity("EX", date(2023, 2, 1), events));
    config
}
