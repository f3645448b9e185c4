//! Label-enriched attribution of the addresses reached from sanctioned
//! entities after their sanction date.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{window_bounds, FlowError};
use crate::graph::{expand_ids, Direction};
use crate::ingest::{AddrId, BehaviourCategory, Label, LabelSet, SanctionedEntity, TxIndex};
use crate::time::{TimeWindow, WindowLabel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BehaviourError {
    #[error("behavioural analysis supports 1 or 2 steps, got {0}")]
    InvalidSteps(u32),
    #[error("no labelled addresses to compute shares from")]
    NoLabelledAddresses,
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub distinct_entities: usize,
    pub distinct_addresses: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviourReport {
    pub steps: u32,
    pub direction: Direction,
    /// Every category, including empty ones.
    pub categories: BTreeMap<BehaviourCategory, CategoryCount>,
    pub labelled_total: usize,
    pub unlabelled_total: usize,
}

impl BehaviourReport {
    pub fn reached_total(&self) -> usize {
        self.labelled_total + self.unlabelled_total
    }

    pub fn distinct_entities_total(&self) -> usize {
        self.categories.values().map(|c| c.distinct_entities).sum()
    }
}

/// Reach of a single entity, reported next to the global table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityReach {
    pub entity_id: String,
    pub reached: usize,
    pub labelled: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviourAnalysis {
    pub report: BehaviourReport,
    pub per_entity: Vec<EntityReach>,
    /// Union of every entity's reached addresses minus its own seeds.
    pub reached: BTreeSet<String>,
}

/// Attribution of one address: SDN membership wins over the tagpack.
struct Attributor<'a> {
    sdn: HashMap<&'a str, &'a str>,
    labels: &'a LabelSet,
}

impl<'a> Attributor<'a> {
    fn new(entities: &'a [SanctionedEntity], labels: &'a LabelSet) -> Self {
        let sdn = entities
            .iter()
            .flat_map(|e| {
                e.addresses
                    .iter()
                    .map(move |a| (a.as_str(), e.name.as_str()))
            })
            .collect();
        Attributor { sdn, labels }
    }

    fn label(&self, address: &str) -> Option<Label> {
        if let Some(name) = self.sdn.get(address) {
            return Some(Label {
                entity: name.to_string(),
                category: BehaviourCategory::OfacSanctioned,
            });
        }
        self.labels.get(address).cloned()
    }
}

/// Expands `steps` layers from every entity's addresses over
/// `[sanction, dataset_end)` and attributes the union of reached addresses.
/// Each entity's own addresses are excluded from its reach; another
/// entity's sanctioned addresses count as `OfacSanctioned`.
pub fn behaviour_analysis(
    entities: &[SanctionedEntity],
    steps: u32,
    labels: &LabelSet,
    index: &TxIndex,
    dataset_end: i64,
    direction: Direction,
) -> Result<BehaviourAnalysis, BehaviourError> {
    if !(1..=2).contains(&steps) {
        return Err(BehaviourError::InvalidSteps(steps));
    }
    let attributor = Attributor::new(entities, labels);

    let per_entity_reach: Vec<(String, Vec<AddrId>)> = entities
        .par_iter()
        .map(|entity| {
            let windows = window_bounds(entity.sanction_date, dataset_end)?;
            let up_to_date = windows[WindowLabel::UpToDate as usize];
            let window =
                TimeWindow::new(up_to_date.start, up_to_date.end).expect("non-empty window");
            let seeds: Vec<AddrId> = entity
                .addresses
                .iter()
                .filter_map(|a| index.addr_id(a))
                .collect();
            let reach = expand_ids(index, &seeds, steps, &window, direction);
            let reached: Vec<AddrId> = reach
                .addresses
                .into_iter()
                .map(|(id, _)| id)
                .filter(|id| !entity.addresses.contains(index.address(*id)))
                .collect();
            Ok((entity.entity_id.clone(), reached))
        })
        .collect::<Result<_, FlowError>>()?;

    let mut union: BTreeSet<&str> = BTreeSet::new();
    let mut per_entity = Vec::with_capacity(entities.len());
    for (entity_id, reached) in &per_entity_reach {
        let mut labelled = 0;
        for &id in reached {
            let address = index.address(id);
            labelled += usize::from(attributor.label(address).is_some());
            union.insert(address);
        }
        per_entity.push(EntityReach {
            entity_id: entity_id.clone(),
            reached: reached.len(),
            labelled,
        });
    }

    let mut category_entities: BTreeMap<BehaviourCategory, BTreeSet<String>> = BTreeMap::new();
    let mut categories: BTreeMap<BehaviourCategory, CategoryCount> = BehaviourCategory::ALL
        .iter()
        .map(|&c| (c, CategoryCount::default()))
        .collect();
    let mut labelled_total = 0;
    let mut unlabelled_total = 0;
    for address in &union {
        match attributor.label(address) {
            Some(label) => {
                labelled_total += 1;
                categories
                    .get_mut(&label.category)
                    .expect("all categories")
                    .distinct_addresses += 1;
                category_entities
                    .entry(label.category)
                    .or_default()
                    .insert(label.entity);
            }
            None => unlabelled_total += 1,
        }
    }
    for (category, names) in category_entities {
        categories
            .get_mut(&category)
            .expect("all categories")
            .distinct_entities = names.len();
    }

    Ok(BehaviourAnalysis {
        report: BehaviourReport {
            steps,
            direction,
            categories,
            labelled_total,
            unlabelled_total,
        },
        per_entity,
        reached: union.into_iter().map(str::to_string).collect(),
    })
}

pub fn behavioural_report(
    entities: &[SanctionedEntity],
    steps: u32,
    labels: &LabelSet,
    index: &TxIndex,
    dataset_end: i64,
    direction: Direction,
) -> Result<BehaviourReport, BehaviourError> {
    behaviour_analysis(entities, steps, labels, index, dataset_end, direction).map(|a| a.report)
}

/// Fraction of labelled addresses in each category.
pub fn category_share(
    report: &BehaviourReport,
) -> Result<BTreeMap<BehaviourCategory, f64>, BehaviourError> {
    if report.labelled_total == 0 {
        return Err(BehaviourError::NoLabelledAddresses);
    }
    let total = report.labelled_total as f64;
    Ok(report
        .categories
        .iter()
        .map(|(&c, count)| (c, count.distinct_addresses as f64 / total))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_index, EntityKind, TxEdge, TxRecord, ViolationCode};
    use crate::time::{midnight, SECS_PER_DAY};
    use chrono::NaiveDate;

    fn tx(c: char, ts: i64, ins: &[(&str, u64)], outs: &[(&str, u64)]) -> TxRecord {
        TxRecord {
            txid: c.to_string().repeat(64),
            timestamp: ts,
            inputs: ins.iter().map(|(a, v)| TxEdge::new(*a, *v)).collect(),
            outputs: outs.iter().map(|(a, v)| TxEdge::new(*a, *v)).collect(),
        }
    }

    fn sanction() -> NaiveDate {
        NaiveDate::from_ymd_opt(2022, 6, 1).unwrap()
    }

    fn entity(id: &str, addrs: &[&str]) -> SanctionedEntity {
        SanctionedEntity {
            entity_id: id.into(),
            name: format!("{id}-name"),
            kind: EntityKind::Individual,
            country: "X".into(),
            sanction_date: sanction(),
            violations: [ViolationCode::Cyber2].into_iter().collect(),
            addresses: addrs.iter().map(|a| a.to_string()).collect(),
        }
    }

    fn labels(rows: &[(&str, &str, BehaviourCategory)]) -> LabelSet {
        let mut set = LabelSet::new();
        for (a, e, c) in rows {
            set.insert(
                *a,
                Label {
                    entity: e.to_string(),
                    category: *c,
                },
            );
        }
        set
    }

    #[test]
    fn single_edge_attribution() {
        let s = midnight(sanction());
        let idx = build_index(vec![
            tx('a', s - 100, &[], &[("S", 10)]),
            tx('b', s + 100, &[("S", 10)], &[("X", 9)]),
        ]);
        let set = labels(&[("X", "Ex1", BehaviourCategory::Exchange)]);
        let r = behavioural_report(
            &[entity("E", &["S"])],
            1,
            &set,
            &idx,
            s + SECS_PER_DAY,
            Direction::Forward,
        )
        .unwrap();
        assert_eq!(
            r.categories[&BehaviourCategory::Exchange],
            CategoryCount {
                distinct_entities: 1,
                distinct_addresses: 1
            }
        );
        assert_eq!(r.labelled_total, 1);
        assert_eq!(r.unlabelled_total, 0);
        let share = category_share(&r).unwrap();
        assert_eq!(share[&BehaviourCategory::Exchange], 1.0);
    }

    #[test]
    fn quiet_entities_give_zero_report() {
        let s = midnight(sanction());
        let idx = build_index(vec![tx('a', s - 100, &[], &[("S", 10)])]);
        let r = behavioural_report(
            &[entity("E", &["S"])],
            2,
            &LabelSet::new(),
            &idx,
            s + 10,
            Direction::Forward,
        )
        .unwrap();
        assert_eq!(r.reached_total(), 0);
        assert!(r
            .categories
            .values()
            .all(|c| *c == CategoryCount::default()));
        assert_eq!(
            category_share(&r).unwrap_err(),
            BehaviourError::NoLabelledAddresses
        );
    }

    #[test]
    fn other_entities_count_as_sanctioned() {
        let s = midnight(sanction());
        let idx = build_index(vec![
            tx('a', s - 100, &[], &[("S1", 10)]),
            tx('b', s + 100, &[("S1", 10)], &[("S2", 9)]),
        ]);
        let ents = [entity("E1", &["S1"]), entity("E2", &["S2"])];
        let a = behaviour_analysis(
            &ents,
            1,
            &LabelSet::new(),
            &idx,
            s + 1000,
            Direction::Forward,
        )
        .unwrap();
        assert_eq!(
            a.report.categories[&BehaviourCategory::OfacSanctioned],
            CategoryCount {
                distinct_entities: 1,
                distinct_addresses: 1
            }
        );
        assert_eq!(
            a.per_entity[0],
            EntityReach {
                entity_id: "E1".into(),
                reached: 1,
                labelled: 1
            }
        );
        assert_eq!(
            a.per_entity[1],
            EntityReach {
                entity_id: "E2".into(),
                reached: 0,
                labelled: 0
            }
        );
    }

    #[test]
    fn pre_sanction_activity_is_ignored() {
        let s = midnight(sanction());
        let idx = build_index(vec![
            tx('a', s - 100, &[], &[("S", 10)]),
            tx('b', s - 50, &[("S", 10)], &[("X", 9)]),
        ]);
        let set = labels(&[("X", "Ex1", BehaviourCategory::Exchange)]);
        let r = behavioural_report(
            &[entity("E", &["S"])],
            2,
            &set,
            &idx,
            s + 10,
            Direction::Forward,
        )
        .unwrap();
        assert_eq!(r.labelled_total, 0);
    }

    #[test]
    fn rejects_three_steps() {
        let idx = build_index(Vec::new());
        assert_eq!(
            behavioural_report(&[], 3, &LabelSet::new(), &idx, 10, Direction::Forward).unwrap_err(),
            BehaviourError::InvalidSteps(3)
        );
    }

    #[test]
    fn exchange_share_of_labelled() {
        let mut categories: BTreeMap<BehaviourCategory, CategoryCount> = BehaviourCategory::ALL
            .iter()
            .map(|&c| (c, CategoryCount::default()))
            .collect();
        categories.insert(
            BehaviourCategory::Service,
            CategoryCount {
                distinct_entities: 3,
                distinct_addresses: 5,
            },
        );
        categories.insert(
            BehaviourCategory::Mixer,
            CategoryCount {
                distinct_entities: 1,
                distinct_addresses: 1,
            },
        );
        categories.insert(
            BehaviourCategory::Exchange,
            CategoryCount {
                distinct_entities: 9,
                distinct_addresses: 331,
            },
        );
        categories.insert(
            BehaviourCategory::OfacSanctioned,
            CategoryCount {
                distinct_entities: 2,
                distinct_addresses: 3,
            },
        );
        let r = BehaviourReport {
            steps: 1,
            direction: Direction::Forward,
            categories,
            labelled_total: 340,
            unlabelled_total: 3668,
        };
        let share = category_share(&r).unwrap();
        assert!((share[&BehaviourCategory::Exchange] * 100.0 - 97.35).abs() <= 0.01);
        assert!((share.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(r.distinct_entities_total(), 15);
    }
}
