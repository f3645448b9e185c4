use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::IngestError;

/// OFAC program tags carried by BTC-holding SDN entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    #[serde(rename = "CYBER2")]
    Cyber2,
    #[serde(rename = "DPRK3")]
    Dprk3,
    #[serde(rename = "DPRK4")]
    Dprk4,
    #[serde(rename = "ELECTION")]
    Election,
    #[serde(rename = "IFSR")]
    Ifsr,
    #[serde(rename = "ILLICIT-DRUGS")]
    IllicitDrugs,
    #[serde(rename = "IRGC")]
    Irgc,
    #[serde(rename = "NPWMD")]
    Npwmd,
    #[serde(rename = "RUSSIA")]
    Russia,
    #[serde(rename = "SDGT")]
    Sdgt,
    #[serde(rename = "SDNTK")]
    Sdntk,
}

impl ViolationCode {
    pub const ALL: [ViolationCode; 11] = [
        ViolationCode::Cyber2,
        ViolationCode::Dprk3,
        ViolationCode::Dprk4,
        ViolationCode::Election,
        ViolationCode::Ifsr,
        ViolationCode::IllicitDrugs,
        ViolationCode::Irgc,
        ViolationCode::Npwmd,
        ViolationCode::Russia,
        ViolationCode::Sdgt,
        ViolationCode::Sdntk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::Cyber2 => "CYBER2",
            ViolationCode::Dprk3 => "DPRK3",
            ViolationCode::Dprk4 => "DPRK4",
            ViolationCode::Election => "ELECTION",
            ViolationCode::Ifsr => "IFSR",
            ViolationCode::IllicitDrugs => "ILLICIT-DRUGS",
            ViolationCode::Irgc => "IRGC",
            ViolationCode::Npwmd => "NPWMD",
            ViolationCode::Russia => "RUSSIA",
            ViolationCode::Sdgt => "SDGT",
            ViolationCode::Sdntk => "SDNTK",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ViolationCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.trim().to_ascii_uppercase().replace('_', "-");
        ViolationCode::ALL
            .into_iter()
            .find(|c| c.as_str() == normalized)
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Individual,
    Company,
}

impl EntityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Individual => "Individual",
            EntityKind::Company => "Company",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "individual" => Ok(EntityKind::Individual),
            // OFAC's own export calls non-individual entries "Entity".
            "company" | "entity" => Ok(EntityKind::Company),
            _ => Err(s.to_string()),
        }
    }
}

/// An SDN entry restricted to its BTC addresses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SanctionedEntity {
    pub entity_id: String,
    pub name: String,
    pub kind: EntityKind,
    pub country: String,
    pub sanction_date: NaiveDate,
    pub violations: BTreeSet<ViolationCode>,
    pub addresses: BTreeSet<String>,
}

#[derive(Debug, Deserialize)]
struct SdnRow {
    entity_id: String,
    name: String,
    kind: String,
    country: String,
    sanction_date: String,
    violation: String,
    currency: String,
    address: String,
}

const FILE: &str = "sdn";

/// Parses the SDN CSV, keeping only `XBT` rows and grouping them by
/// `entity_id` in order of first appearance. When an entity's rows disagree
/// on the sanction date the earliest one is kept.
pub fn parse_sdn_list<R: Read>(reader: R) -> Result<Vec<SanctionedEntity>, IngestError> {
    let mut entities: Vec<SanctionedEntity> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    let mut owner: HashMap<String, usize> = HashMap::new();

    for (line, row) in super::read_csv::<_, SdnRow>(reader, FILE)? {
        if !row.currency.eq_ignore_ascii_case("XBT") {
            continue;
        }
        let violation: ViolationCode =
            row.violation
                .parse()
                .map_err(|code| IngestError::UnknownViolation {
                    file: FILE,
                    line,
                    code,
                })?;
        let sanction_date =
            NaiveDate::parse_from_str(&row.sanction_date, "%Y-%m-%d").map_err(|_| {
                IngestError::BadDate {
                    file: FILE,
                    line,
                    value: row.sanction_date.clone(),
                }
            })?;
        let kind: EntityKind = row.kind.parse().map_err(|k| IngestError::Csv {
            file: FILE,
            line,
            message: format!("unknown entity kind `{k}`"),
        })?;
        if row.address.is_empty() {
            return Err(IngestError::Csv {
                file: FILE,
                line,
                message: "empty address".into(),
            });
        }

        let idx = match by_id.get(&row.entity_id) {
            Some(&idx) => {
                let entity = &mut entities[idx];
                let conflict =
                    |field: &'static str, first: &str, second: &str| IngestError::EntityConflict {
                        line,
                        entity_id: row.entity_id.clone(),
                        field,
                        first: first.to_string(),
                        second: second.to_string(),
                    };
                if entity.name != row.name {
                    return Err(conflict("name", &entity.name, &row.name));
                }
                if entity.kind != kind {
                    return Err(conflict("kind", entity.kind.as_str(), kind.as_str()));
                }
                if entity.country != row.country {
                    return Err(conflict("country", &entity.country, &row.country));
                }
                entity.sanction_date = entity.sanction_date.min(sanction_date);
                idx
            }
            None => {
                entities.push(SanctionedEntity {
                    entity_id: row.entity_id.clone(),
                    name: row.name.clone(),
                    kind,
                    country: row.country.clone(),
                    sanction_date,
                    violations: BTreeSet::new(),
                    addresses: BTreeSet::new(),
                });
                by_id.insert(row.entity_id.clone(), entities.len() - 1);
                entities.len() - 1
            }
        };

        match owner.get(&row.address) {
            Some(&other) if other != idx => {
                return Err(IngestError::AddressConflict {
                    line,
                    address: row.address,
                    first_entity: entities[other].entity_id.clone(),
                    second_entity: row.entity_id,
                });
            }
            Some(_) => {}
            None => {
                owner.insert(row.address.clone(), idx);
            }
        }
        let entity = &mut entities[idx];
        entity.violations.insert(violation);
        entity.addresses.insert(row.address);
    }
    Ok(entities)
}
