//! Directory-per-bulletin file store.
//!
//! ```text
//! <root>/bulletins/<id>/bulletin.json
//! <root>/bulletins/<id>/revision
//! <root>/catalogues/<sha256>.json
//! ```
//!
//! Every file is replaced atomically (temp file + rename). Writes go through a
//! single lock; reads are lock-free. The revision counter backs optimistic
//! concurrency for the HTTP API and is kept outside the bulletin document.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use thiserror::Error;

use super::bulletin::{Bulletin, BulletinSummary, DangerDescription, Status};
use crate::catalogue::{parse_catalogue, serialize_catalogue, CatalogueError};
use crate::render::{validate_selection, SentenceEntry};
use crate::report::{Code, ValidationReport};
use crate::Catalogue;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{0} not found")]
    NotFound(String),
    #[error("bulletin {0} is published and cannot be changed")]
    ImmutableEdition(String),
    #[error("revision conflict: expected {expected}, found {actual}")]
    RevisionConflict { expected: u64, actual: u64 },
    #[error("invalid bulletin id {0:?}")]
    InvalidId(String),
    #[error("corrupt store file {path}: {source}")]
    Corrupt {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("stored catalogue {hash}: {source}")]
    Catalogue {
        hash: String,
        #[source]
        source: CatalogueError,
    },
    #[error("store I/O: {0}")]
    Io(#[from] io::Error),
}

impl StoreError {
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::NotFound(_) => "NOT_FOUND",
            StoreError::ImmutableEdition(_) => "IMMUTABLE_EDITION",
            StoreError::RevisionConflict { .. } => "REVISION_CONFLICT",
            StoreError::InvalidId(_) => "INVALID_ID",
            StoreError::Corrupt { .. } | StoreError::Catalogue { .. } => "CORRUPT_STORE",
            StoreError::Io(_) => "IO_FAILURE",
        }
    }
}

pub struct Store {
    root: PathBuf,
    writer: Mutex<()>,
}

/// Ids become directory names: ASCII alphanumerics, `-`, `_` and `.`, not
/// starting with a dot.
pub fn valid_bulletin_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || b"-_.".contains(&b))
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("bulletins"))?;
        fs::create_dir_all(root.join("catalogues"))?;
        Ok(Self {
            root,
            writer: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn bulletin_dir(&self, id: &str) -> Result<PathBuf, StoreError> {
        if !valid_bulletin_id(id) {
            return Err(StoreError::InvalidId(id.to_owned()));
        }
        Ok(self.root.join("bulletins").join(id))
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, ()> {
        self.writer.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    /// Load a bulletin and its current revision.
    pub fn load(&self, id: &str) -> Result<(Bulletin, u64), StoreError> {
        let dir = self.bulletin_dir(id)?;
        let path = dir.join("bulletin.json");
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotFound(format!("bulletin {id}")))
            }
            Err(e) => return Err(e.into()),
        };
        let bulletin = serde_json::from_slice(&bytes).map_err(|source| StoreError::Corrupt { path, source })?;
        let revision = fs::read_to_string(dir.join("revision"))
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(1);
        Ok((bulletin, revision))
    }

    pub fn load_bulletin(&self, id: &str) -> Result<Bulletin, StoreError> {
        self.load(id).map(|(b, _)| b)
    }

    /// Create or replace a bulletin; returns the new revision. With
    /// `expected`, the write only succeeds if the stored revision matches
    /// (0 meaning "does not exist yet"). Published bulletins are immutable.
    pub fn store_bulletin(&self, bulletin: &Bulletin, expected: Option<u64>) -> Result<u64, StoreError> {
        let _guard = self.lock();
        self.store_locked(bulletin, expected, false)
    }

    fn store_locked(&self, bulletin: &Bulletin, expected: Option<u64>, publishing: bool) -> Result<u64, StoreError> {
        let dir = self.bulletin_dir(&bulletin.id)?;
        let current = match self.load(&bulletin.id) {
            Ok((existing, revision)) => {
                if existing.status == Status::Published && !publishing {
                    return Err(StoreError::ImmutableEdition(bulletin.id.clone()));
                }
                revision
            }
            Err(StoreError::NotFound(_)) => 0,
            Err(e) => return Err(e),
        };
        if let Some(expected) = expected {
            if expected != current {
                return Err(StoreError::RevisionConflict {
                    expected,
                    actual: current,
                });
            }
        }
        fs::create_dir_all(&dir)?;
        let mut bytes = serde_json::to_vec_pretty(bulletin).expect("bulletins serialize");
        bytes.push(b'\n');
        write_atomic(&dir.join("bulletin.json"), &bytes)?;
        let revision = current + 1;
        write_atomic(&dir.join("revision"), format!("{revision}\n").as_bytes())?;
        Ok(revision)
    }

    /// Flip a draft to published at revision `expected`.
    pub(crate) fn mark_published(&self, bulletin: &Bulletin, expected: u64) -> Result<u64, StoreError> {
        let _guard = self.lock();
        let mut published = bulletin.clone();
        published.status = Status::Published;
        let (current, _) = self.load(&bulletin.id)?;
        if current.status == Status::Published {
            return Err(StoreError::ImmutableEdition(bulletin.id.clone()));
        }
        self.store_locked(&published, Some(expected), true)
    }

    /// Delete a draft.
    pub fn delete_bulletin(&self, id: &str, expected: Option<u64>) -> Result<(), StoreError> {
        let _guard = self.lock();
        let (bulletin, revision) = self.load(id)?;
        if bulletin.status == Status::Published {
            return Err(StoreError::ImmutableEdition(id.to_owned()));
        }
        if let Some(expected) = expected.filter(|e| *e != revision) {
            return Err(StoreError::RevisionConflict {
                expected,
                actual: revision,
            });
        }
        fs::remove_dir_all(self.bulletin_dir(id)?)?;
        Ok(())
    }

    /// Summaries sorted by edition, then id; optionally only one status.
    pub fn list_bulletins(&self, status: Option<Status>) -> Result<Vec<BulletinSummary>, StoreError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join("bulletins"))? {
            let entry = entry?;
            let Some(id) = entry.file_name().to_str().map(str::to_owned) else {
                continue;
            };
            if !valid_bulletin_id(&id) {
                continue;
            }
            match self.load(&id) {
                Ok((b, revision)) if status.is_none_or(|s| s == b.status) => out.push(b.summary(revision)),
                Ok(_) | Err(StoreError::NotFound(_)) => {}
                Err(e) => return Err(e),
            }
        }
        out.sort_by(|a, b| a.edition.cmp(&b.edition).then_with(|| a.id.cmp(&b.id)));
        Ok(out)
    }

    /// Keep a catalogue snapshot under its content hash; returns the hash.
    pub fn put_catalogue(&self, cat: &Catalogue) -> Result<String, StoreError> {
        let bytes = serialize_catalogue(cat);
        let hash = cat.content_hash();
        let path = self.root.join("catalogues").join(format!("{hash}.json"));
        if !path.exists() {
            let _guard = self.lock();
            write_atomic(&path, &bytes)?;
        }
        Ok(hash)
    }

    pub fn load_catalogue(&self, hash: &str) -> Result<Catalogue, StoreError> {
        if hash.len() != 64 || !hash.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(StoreError::NotFound(format!("catalogue {hash}")));
        }
        let path = self.root.join("catalogues").join(format!("{hash}.json"));
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotFound(format!("catalogue {hash}")))
            }
            Err(e) => return Err(e.into()),
        };
        parse_catalogue(&bytes).map_err(|source| StoreError::Catalogue {
            hash: hash.to_owned(),
            source,
        })
    }
}

/// Copy a description from any bulletin into a draft, revalidating every
/// selection against `cat`. Stale options and pronoun hints are reported, not
/// dropped. The copy gets a fresh id if its id is taken in the draft.
pub fn copy_description(
    store: &Store,
    cat: &Catalogue,
    from_bulletin: &str,
    description_id: &str,
    into_draft: &str,
) -> Result<(DangerDescription, ValidationReport), StoreError> {
    let source = store.load_bulletin(from_bulletin)?;
    let mut copy = source
        .description(description_id)
        .cloned()
        .ok_or_else(|| StoreError::NotFound(format!("description {description_id} in {from_bulletin}")))?;
    let _guard = store.lock();
    let (mut draft, revision) = store.load(into_draft)?;
    if draft.status == Status::Published {
        return Err(StoreError::ImmutableEdition(into_draft.to_owned()));
    }
    if draft.description(&copy.id).is_some() {
        let base = copy.id.clone();
        copy.id = (1..)
            .map(|n| format!("{base}-copy{}", if n == 1 { String::new() } else { n.to_string() }))
            .find(|id| draft.description(id).is_none())
            .expect("unbounded candidates");
    }
    let report = check_description(cat, &copy);
    draft.descriptions.push(copy.clone());
    store.store_locked(&draft, Some(revision), false)?;
    Ok((copy, report))
}

/// Validate every sentence of `description` against `cat`. Paths are
/// `sentences/<i>/<slot path>`.
pub fn check_description(cat: &Catalogue, description: &DangerDescription) -> ValidationReport {
    let mut report = ValidationReport::new();
    for (i, sentence) in description.sentences.iter().enumerate() {
        let prefix = format!("sentences/{i}");
        match sentence {
            SentenceEntry::Selection(sel) => report.merge_prefixed(&prefix, validate_selection(cat, sel)),
            SentenceEntry::Joker(joker) => {
                for lang in &cat.languages {
                    if joker.texts.get(lang).is_none_or(|t| t.trim().is_empty()) {
                        report.error(
                            Code::MissingJokerText,
                            format!("{prefix}/{lang}"),
                            "joker sentence needs a text in every language",
                        );
                    }
                }
            }
        }
    }
    report
}
