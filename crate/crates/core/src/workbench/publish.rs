//! Publish: validate, render every description in every language, check the
//! output and write the artifact set atomically.
//!
//! ```text
//! <out>/<bulletin id>/<lang>.txt
//! <out>/<bulletin id>/<lang>.json
//! <out>/<bulletin id>/manifest.json
//! ```
//!
//! Files are written into `<out>/.staging-<bulletin id>` and the directory is
//! renamed into place, so a failure leaves either the full set or nothing.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::bulletin::{Bulletin, Status};
use super::store::{check_description, Store, StoreError};
use crate::qa::{check_surface_invariants, check_whitespace};
use crate::render::{render_entry, SentenceEntry};
use crate::report::{Code, ValidationReport};
use crate::Catalogue;

/// File operations used by [`publish_with`]; lets tests inject failures.
pub trait ArtifactFs {
    fn create_dir_all(&self, path: &Path) -> io::Result<()>;
    fn write(&self, path: &Path, bytes: &[u8]) -> io::Result<()>;
    fn rename(&self, from: &Path, to: &Path) -> io::Result<()>;
    fn remove_dir_all(&self, path: &Path) -> io::Result<()>;
}

/// The real file system.
pub struct StdFs;

impl ArtifactFs for StdFs {
    fn create_dir_all(&self, path: &Path) -> io::Result<()> {
        fs::create_dir_all(path)
    }

    fn write(&self, path: &Path, bytes: &[u8]) -> io::Result<()> {
        let mut file = fs::File::create(path)?;
        io::Write::write_all(&mut file, bytes)?;
        file.sync_all()
    }

    fn rename(&self, from: &Path, to: &Path) -> io::Result<()> {
        fs::rename(from, to)
    }

    fn remove_dir_all(&self, path: &Path) -> io::Result<()> {
        fs::remove_dir_all(path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub bulletin_id: String,
    pub edition: DateTime<Utc>,
    pub catalogue_hash: String,
    pub joker_count: usize,
    pub files: Vec<ManifestFile>,
}

#[derive(Debug, Error)]
pub enum PublishError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("bulletin does not validate:\n{0}")]
    ValidationFailed(ValidationReport),
    #[error("artifacts for {0} already exist")]
    TargetExists(PathBuf),
    #[error("writing artifacts failed: {0}")]
    Io(#[from] io::Error),
}

impl PublishError {
    pub fn code(&self) -> &'static str {
        match self {
            PublishError::Store(e) => e.code(),
            PublishError::ValidationFailed(_) => "VALIDATION_FAILED",
            PublishError::TargetExists(_) => "TARGET_EXISTS",
            PublishError::Io(_) => "IO_FAILURE",
        }
    }
}

#[derive(Debug, Serialize)]
struct StructuredDescription<'a> {
    id: &'a str,
    region: &'a str,
    text: String,
    sentences: Vec<String>,
}

#[derive(Debug, Serialize)]
struct StructuredDocument<'a> {
    bulletin_id: &'a str,
    edition: DateTime<Utc>,
    language: &'a str,
    catalogue_hash: &'a str,
    descriptions: Vec<StructuredDescription<'a>>,
}

/// Publish `bulletin_id` into `out_dir` using the real file system.
pub fn publish(store: &Store, cat: &Catalogue, bulletin_id: &str, out_dir: &Path) -> Result<Manifest, PublishError> {
    publish_with(store, cat, bulletin_id, out_dir, &StdFs)
}

pub fn publish_with(
    store: &Store,
    cat: &Catalogue,
    bulletin_id: &str,
    out_dir: &Path,
    fs: &dyn ArtifactFs,
) -> Result<Manifest, PublishError> {
    let (mut bulletin, revision) = store.load(bulletin_id)?;
    if bulletin.status == Status::Published {
        return Err(StoreError::ImmutableEdition(bulletin_id.to_owned()).into());
    }
    let catalogue_hash = cat.content_hash();
    bulletin.catalogue_hash = catalogue_hash.clone();

    let files = render_artifacts(cat, &bulletin)?;

    let final_dir = out_dir.join(&bulletin.id);
    if final_dir.exists() {
        return Err(PublishError::TargetExists(final_dir));
    }
    let manifest = Manifest {
        bulletin_id: bulletin.id.clone(),
        edition: bulletin.edition,
        catalogue_hash,
        joker_count: bulletin.joker_count(),
        files: files
            .iter()
            .map(|(name, bytes)| ManifestFile {
                name: name.clone(),
                sha256: hex::encode(Sha256::digest(bytes)),
                bytes: bytes.len() as u64,
            })
            .collect(),
    };
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    manifest_bytes.push(b'\n');

    // snapshot retained so the published text stays reproducible
    store.put_catalogue(cat)?;

    let staging = out_dir.join(format!(".staging-{}", bulletin.id));
    let written = (|| -> io::Result<()> {
        if staging.exists() {
            fs.remove_dir_all(&staging)?;
        }
        fs.create_dir_all(&staging)?;
        for (name, bytes) in &files {
            fs.write(&staging.join(name), bytes)?;
        }
        fs.write(&staging.join("manifest.json"), &manifest_bytes)?;
        fs.rename(&staging, &final_dir)
    })();
    if let Err(e) = written {
        let _ = fs.remove_dir_all(&staging);
        return Err(e.into());
    }
    if let Err(e) = store.mark_published(&bulletin, revision) {
        let _ = fs.remove_dir_all(&final_dir);
        return Err(e.into());
    }

    if manifest.joker_count > 0 {
        log::warn!(
            "published {} with {} joker sentence(s)",
            bulletin.id,
            manifest.joker_count
        );
    } else {
        log::info!("published {} with 0 joker sentences", bulletin.id);
    }
    Ok(manifest)
}

/// Validate and render; returns `(file name, bytes)` in write order.
fn render_artifacts(cat: &Catalogue, bulletin: &Bulletin) -> Result<Vec<(String, Vec<u8>)>, PublishError> {
    let mut report = ValidationReport::new();
    if bulletin.descriptions.is_empty() {
        report.error(
            Code::EmptyBulletin,
            "descriptions",
            "a bulletin needs at least one description to be published",
        );
    }
    for description in &bulletin.descriptions {
        report.merge_prefixed(
            &format!("descriptions/{}", description.id),
            check_description(cat, description),
        );
    }
    if !report.is_ok() {
        return Err(PublishError::ValidationFailed(report));
    }

    let mut files = Vec::new();
    for lang in &cat.languages {
        let mut structured = Vec::new();
        for description in &bulletin.descriptions {
            let mut sentences = Vec::new();
            for (i, entry) in description.sentences.iter().enumerate() {
                let path = format!("descriptions/{}/sentences/{i}", description.id);
                let text = match render_entry(cat, entry, lang.as_str()) {
                    Ok(text) => text,
                    Err(e) => {
                        report.error(Code::RenderFailed, format!("{path}/{lang}"), e.to_string());
                        continue;
                    }
                };
                let findings = match entry {
                    SentenceEntry::Selection(_) => check_surface_invariants(&text, lang.as_str()),
                    SentenceEntry::Joker(_) => check_whitespace(&text, lang.as_str()),
                };
                for f in findings {
                    report.error(f.code, format!("{path}/{lang}"), format!("{}: {text:?}", f.message));
                }
                sentences.push(text);
            }
            structured.push(StructuredDescription {
                id: &description.id,
                region: &description.region,
                text: sentences.join(" "),
                sentences,
            });
        }
        let mut txt = String::new();
        for d in &structured {
            if !txt.is_empty() {
                txt.push('\n');
            }
            if !d.region.is_empty() {
                txt.push_str(d.region);
                txt.push('\n');
            }
            txt.push_str(&d.text);
            txt.push('\n');
        }
        let doc = StructuredDocument {
            bulletin_id: &bulletin.id,
            edition: bulletin.edition,
            language: lang.as_str(),
            catalogue_hash: &bulletin.catalogue_hash,
            descriptions: structured,
        };
        let mut json = serde_json::to_vec_pretty(&doc).expect("documents serialize");
        json.push(b'\n');
        files.push((format!("{lang}.txt"), txt.into_bytes()));
        files.push((format!("{lang}.json"), json));
    }
    if !report.is_ok() {
        return Err(PublishError::ValidationFailed(report));
    }
    Ok(files)
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("reading artifacts: {0}")]
    Io(#[from] io::Error),
    #[error("manifest is not valid JSON: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("{name}: {problem}")]
    Mismatch { name: String, problem: String },
}

/// Check that `dir` holds exactly the files listed in its manifest, with
/// matching sizes and SHA-256 sums.
pub fn verify_artifacts(dir: &Path) -> Result<Manifest, VerifyError> {
    let manifest: Manifest = serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?;
    let mismatch = |name: &str, problem: String| VerifyError::Mismatch {
        name: name.to_owned(),
        problem,
    };
    let mut listed = BTreeSet::new();
    for file in &manifest.files {
        if file.name.contains('/') || file.name.contains('\\') || file.name == "manifest.json" {
            return Err(mismatch(&file.name, "invalid file name".into()));
        }
        let bytes = fs::read(dir.join(&file.name))?;
        if bytes.len() as u64 != file.bytes {
            return Err(mismatch(
                &file.name,
                format!("{} bytes, manifest says {}", bytes.len(), file.bytes),
            ));
        }
        let sum = hex::encode(Sha256::digest(&bytes));
        if sum != file.sha256 {
            return Err(mismatch(
                &file.name,
                format!("sha256 {sum}, manifest says {}", file.sha256),
            ));
        }
        listed.insert(file.name.clone());
    }
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if name != "manifest.json" && !listed.contains(&name) {
            return Err(mismatch(&name, "not listed in the manifest".into()));
        }
    }
    Ok(manifest)
}
