use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::render::SentenceEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Draft,
    Published,
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "draft" => Ok(Status::Draft),
            "published" => Ok(Status::Published),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

/// Danger description for one region: catalogue sentences and jokers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DangerDescription {
    pub id: String,
    #[serde(default)]
    pub region: String,
    #[serde(default)]
    pub sentences: Vec<SentenceEntry>,
}

impl DangerDescription {
    pub fn joker_count(&self) -> usize {
        self.sentences.iter().filter(|s| s.is_joker()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bulletin {
    pub id: String,
    pub edition: DateTime<Utc>,
    pub status: Status,
    /// Content hash of the catalogue snapshot the bulletin was written (or
    /// published) against.
    pub catalogue_hash: String,
    #[serde(default)]
    pub descriptions: Vec<DangerDescription>,
}

impl Bulletin {
    pub fn draft(id: impl Into<String>, edition: DateTime<Utc>, catalogue_hash: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            edition,
            status: Status::Draft,
            catalogue_hash: catalogue_hash.into(),
            descriptions: Vec::new(),
        }
    }

    pub fn description(&self, id: &str) -> Option<&DangerDescription> {
        self.descriptions.iter().find(|d| d.id == id)
    }

    pub fn joker_count(&self) -> usize {
        self.descriptions.iter().map(DangerDescription::joker_count).sum()
    }

    pub fn summary(&self, revision: u64) -> BulletinSummary {
        BulletinSummary {
            id: self.id.clone(),
            edition: self.edition,
            status: self.status,
            catalogue_hash: self.catalogue_hash.clone(),
            descriptions: self.descriptions.len(),
            revision,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BulletinSummary {
    pub id: String,
    pub edition: DateTime<Utc>,
    pub status: Status,
    pub catalogue_hash: String,
    pub descriptions: usize,
    pub revision: u64,
}
