//! Quality checks over a catalogue: seeded random sentences, exact counting
//! and exhaustive enumeration, the option-walk review sheet and surface checks
//! on rendered text.

mod enumerate;
mod generate;
mod surface;
mod walk;

use thiserror::Error;

pub use enumerate::{enumerate_all, enumerate_count};
pub use generate::{generate_random, GenerationSpec};
pub use surface::{check_surface_invariants, check_whitespace};
pub use walk::{option_walk, ReviewRow, ReviewSheet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QaError {
    #[error("unknown phrase {0:?}")]
    UnknownPhrase(String),
    #[error("{count} selections exceed the limit of {limit}")]
    LimitExceeded { count: String, limit: u64 },
    #[error("catalogue is not usable: {0}")]
    Catalogue(String),
}

impl QaError {
    pub fn code(&self) -> &'static str {
        match self {
            QaError::UnknownPhrase(_) => "UNKNOWN_PHRASE",
            QaError::LimitExceeded { .. } => "LIMIT_EXCEEDED",
            QaError::Catalogue(_) => "INVALID_CATALOGUE",
        }
    }
}
