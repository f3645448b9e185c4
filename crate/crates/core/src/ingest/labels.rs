use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{IngestError, SanctionedEntity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BehaviourCategory {
    Exchange,
    Gambling,
    Marketplace,
    MiningPool,
    Mixer,
    Service,
    Trading,
    EWallet,
    Ransomware,
    Sextortion,
    Extremism,
    OfacSanctioned,
}

impl BehaviourCategory {
    pub const ALL: [BehaviourCategory; 12] = [
        BehaviourCategory::Exchange,
        BehaviourCategory::Gambling,
        BehaviourCategory::Marketplace,
        BehaviourCategory::MiningPool,
        BehaviourCategory::Mixer,
        BehaviourCategory::Service,
        BehaviourCategory::Trading,
        BehaviourCategory::EWallet,
        BehaviourCategory::Ransomware,
        BehaviourCategory::Sextortion,
        BehaviourCategory::Extremism,
        BehaviourCategory::OfacSanctioned,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BehaviourCategory::Exchange => "Exchange",
            BehaviourCategory::Gambling => "Gambling",
            BehaviourCategory::Marketplace => "Marketplace",
            BehaviourCategory::MiningPool => "MiningPool",
            BehaviourCategory::Mixer => "Mixer",
            BehaviourCategory::Service => "Service",
            BehaviourCategory::Trading => "Trading",
            BehaviourCategory::EWallet => "EWallet",
            BehaviourCategory::Ransomware => "Ransomware",
            BehaviourCategory::Sextortion => "Sextortion",
            BehaviourCategory::Extremism => "Extremism",
            BehaviourCategory::OfacSanctioned => "OfacSanctioned",
        }
    }
}

impl fmt::Display for BehaviourCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BehaviourCategory {
    type Err = String;

    /// Case-insensitive; spaces, dashes and underscores are ignored, so
    /// "Mining Pool", "mining_pool" and "MiningPool" all parse.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let category = match key.as_str() {
            "exchange" | "exchanges" => BehaviourCategory::Exchange,
            "gambling" => BehaviourCategory::Gambling,
            "marketplace" | "marketplaces" => BehaviourCategory::Marketplace,
            "miningpool" | "miningpools" => BehaviourCategory::MiningPool,
            "mixer" | "mixers" => BehaviourCategory::Mixer,
            "service" | "services" => BehaviourCategory::Service,
            "trading" | "tradingplatform" => BehaviourCategory::Trading,
            "ewallet" => BehaviourCategory::EWallet,
            "ransomware" => BehaviourCategory::Ransomware,
            "sextortion" => BehaviourCategory::Sextortion,
            "extremism" | "extremist" => BehaviourCategory::Extremism,
            "ofacsanctioned" => BehaviourCategory::OfacSanctioned,
            _ => return Err(s.to_string()),
        };
        Ok(category)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Label {
    pub entity: String,
    pub category: BehaviourCategory,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.entity, self.category)
    }
}

/// Address → label attribution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelSet {
    labels: HashMap<String, Label>,
}

impl LabelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, address: &str) -> Option<&Label> {
        self.labels.get(address)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn insert(&mut self, address: impl Into<String>, label: Label) -> Option<Label> {
        self.labels.insert(address.into(), label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Label)> {
        self.labels.iter().map(|(a, l)| (a.as_str(), l))
    }
}

/// Side information produced while loading a tagpack.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelLoadReport {
    pub rows: usize,
    /// Tagpack addresses that are also SDN addresses, sorted. They are kept
    /// under `OfacSanctioned`.
    pub sdn_overlaps: Vec<String>,
}

#[derive(Deserialize)]
struct LabelRow {
    address: String,
    entity: String,
    category: String,
}

/// Parses an `address,entity,category` tagpack. Repeated identical rows are
/// accepted; an address given two different labels is an error. Addresses
/// that also appear in `sdn` are relabelled `OfacSanctioned` under the SDN
/// entity name.
pub fn parse_labels<R: Read>(
    reader: R,
    sdn: &[SanctionedEntity],
) -> Result<(LabelSet, LabelLoadReport), IngestError> {
    let mut set = LabelSet::new();
    let mut report = LabelLoadReport::default();
    for (line, row) in super::read_csv::<_, LabelRow>(reader, "labels")? {
        report.rows += 1;
        let category: BehaviourCategory = row
            .category
            .parse()
            .map_err(|category| IngestError::UnknownCategory { line, category })?;
        let label = Label {
            entity: row.entity,
            category,
        };
        match set.labels.get(&row.address) {
            Some(existing) if *existing != label => {
                return Err(IngestError::LabelConflict {
                    line,
                    address: row.address,
                    first: existing.to_string(),
                    second: label.to_string(),
                });
            }
            Some(_) => {}
            None => {
                set.labels.insert(row.address, label);
            }
        }
    }

    let mut seen = HashSet::new();
    for entity in sdn {
        for address in &entity.addresses {
            if let Some(label) = set.labels.get_mut(address) {
                if seen.insert(address.clone()) {
                    report.sdn_overlaps.push(address.clone());
                }
                *label = Label {
                    entity: entity.name.clone(),
                    category: BehaviourCategory::OfacSanctioned,
                };
            }
        }
    }
    report.sdn_overlaps.sort();
    Ok((set, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{EntityKind, ViolationCode};
    use chrono::NaiveDate;

    const HEADER: &str = "address,entity,category\n";

    #[test]
    fn single_row() {
        let (set, report) =
            parse_labels(format!("{HEADER}X,BigExchange,Exchange\n").as_bytes(), &[]).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(
            set.get("X"),
            Some(&Label {
                entity: "BigExchange".into(),
                category: BehaviourCategory::Exchange
            })
        );
        assert_eq!(report.rows, 1);
    }

    #[test]
    fn conflicting_categories() {
        let err =
            parse_labels(format!("{HEADER}X,E,Exchange\nX,E,Mixer\n").as_bytes(), &[]).unwrap_err();
        match err {
            IngestError::LabelConflict { line, address, .. } => {
                assert_eq!(line, 3);
                assert_eq!(address, "X");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn repeated_rows_are_fine() {
        let (set, report) = parse_labels(
            format!("{HEADER}X,E,Exchange\nX,E,exchange\nY,M,Mining Pool\n").as_bytes(),
            &[],
        )
        .unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(report.rows, 3);
        assert_eq!(
            set.get("Y").unwrap().category,
            BehaviourCategory::MiningPool
        );
    }

    #[test]
    fn sdn_overlap_takes_precedence() {
        let sdn = vec![SanctionedEntity {
            entity_id: "1".into(),
            name: "Garantex".into(),
            kind: EntityKind::Company,
            country: "Russia".into(),
            sanction_date: NaiveDate::from_ymd_opt(2022, 4, 5).unwrap(),
            violations: [ViolationCode::Cyber2].into_iter().collect(),
            addresses: ["X".to_string()].into_iter().collect(),
        }];
        let (set, report) = parse_labels(
            format!("{HEADER}X,SomeExchange,Exchange\nZ,Other,Service\n").as_bytes(),
            &sdn,
        )
        .unwrap();
        assert_eq!(report.sdn_overlaps, vec!["X".to_string()]);
        assert_eq!(
            set.get("X").unwrap().category,
            BehaviourCategory::OfacSanctioned
        );
        assert_eq!(set.get("X").unwrap().entity, "Garantex");
        assert_eq!(set.get("Z").unwrap().category, BehaviourCategory::Service);
    }

    #[test]
    fn unknown_category() {
        assert!(matches!(
            parse_labels(format!("{HEADER}X,E,Bank\n").as_bytes(), &[]).unwrap_err(),
            IngestError::UnknownCategory { .. }
        ));
    }
}
