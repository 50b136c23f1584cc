//! Phrase-catalogue translation engine.
//!
//! Sentences are composed by choosing predefined options from shared option
//! lists. Every option carries a parallel text in each catalogue language, so
//! a single language-independent [`Selection`](render::Selection) renders to
//! all languages without post-editing. The crate is organised as:
//!
//! - [`catalogue`]: data model, document format, structural validation and the
//!   agreement lint.
//! - [`render`]: selections, slot resolution and sentence assembly.
//! - [`qa`]: random sentence generation, exhaustive counting and enumeration,
//!   review sheets and surface checks.
//! - [`search`]: the TF-IDF phrase finder.
//! - [`workbench`]: bulletin store, publish pipeline and the HTTP service.

pub mod catalogue;
pub mod ids;
pub mod qa;
pub mod render;
pub mod report;
pub mod search;
pub mod workbench;

pub use catalogue::{parse_catalogue, serialize_catalogue, validate_catalogue, Catalogue};
pub use ids::{LanguageTag, ListId, OptionId, PhraseId};
pub use render::{render_description, render_sentence, Selection};
pub use report::{Code, Finding, Severity, ValidationReport};
