//! Findings shared by catalogue validation, the agreement lint, selection
//! checks and surface checks.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Machine-readable finding code. Serialized in `SCREAMING_SNAKE_CASE`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    // catalogue structure
    NoLanguages,
    SourceLanguage,
    EmptyList,
    DuplicateOption,
    MissingLanguageText,
    ParallelOptionCount,
    PlaceholderParity,
    SlotOrdinal,
    UnresolvedList,
    DepthOrder,
    DepthBound,
    SegmentDepth,
    SlotCycle,
    SplitSource,
    SplitSublist,
    SplitTextMismatch,
    SegmentCount,
    MissingLayout,
    SourceLayout,
    LayoutPermutation,
    SplitLayoutMismatch,
    EmptyRendering,
    EmptySourceOption,
    UnreachableList,
    // agreement lint
    AgreementConflict,
    AgreementUndeclared,
    // selections
    UnknownPhrase,
    MissingChoice,
    ExtraneousChoice,
    StaleOption,
    PronounCheck,
    MissingJokerText,
    // rendered text
    DoubleSpace,
    LeadingOrTrailingSpace,
    LowercaseStart,
    UnresolvedMarker,
    EmptyText,
    // publishing
    EmptyBulletin,
    RenderFailed,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::NoLanguages => "NO_LANGUAGES",
            Code::SourceLanguage => "SOURCE_LANGUAGE",
            Code::EmptyList => "EMPTY_LIST",
            Code::DuplicateOption => "DUPLICATE_OPTION",
            Code::MissingLanguageText => "MISSING_LANGUAGE_TEXT",
            Code::ParallelOptionCount => "PARALLEL_OPTION_COUNT",
            Code::PlaceholderParity => "PLACEHOLDER_PARITY",
            Code::SlotOrdinal => "SLOT_ORDINAL",
            Code::UnresolvedList => "UNRESOLVED_LIST",
            Code::DepthOrder => "DEPTH_ORDER",
            Code::DepthBound => "DEPTH_BOUND",
            Code::SegmentDepth => "SEGMENT_DEPTH",
            Code::SlotCycle => "SLOT_CYCLE",
            Code::SplitSource => "SPLIT_SOURCE",
            Code::SplitSublist => "SPLIT_SUBLIST",
            Code::SplitTextMismatch => "SPLIT_TEXT_MISMATCH",
            Code::SegmentCount => "SEGMENT_COUNT",
            Code::MissingLayout => "MISSING_LAYOUT",
            Code::SourceLayout => "SOURCE_LAYOUT",
            Code::LayoutPermutation => "LAYOUT_PERMUTATION",
            Code::SplitLayoutMismatch => "SPLIT_LAYOUT_MISMATCH",
            Code::EmptyRendering => "EMPTY_RENDERING",
            Code::EmptySourceOption => "EMPTY_SOURCE_OPTION",
            Code::UnreachableList => "UNREACHABLE_LIST",
            Code::AgreementConflict => "AGREEMENT_CONFLICT",
            Code::AgreementUndeclared => "AGREEMENT_UNDECLARED",
            Code::UnknownPhrase => "UNKNOWN_PHRASE",
            Code::MissingChoice => "MISSING_CHOICE",
            Code::ExtraneousChoice => "EXTRANEOUS_CHOICE",
            Code::StaleOption => "STALE_OPTION",
            Code::PronounCheck => "PRONOUN_CHECK",
            Code::MissingJokerText => "MISSING_JOKER_TEXT",
            Code::DoubleSpace => "DOUBLE_SPACE",
            Code::LeadingOrTrailingSpace => "LEADING_OR_TRAILING_SPACE",
            Code::LowercaseStart => "LOWERCASE_START",
            Code::UnresolvedMarker => "UNRESOLVED_MARKER",
            Code::EmptyText => "EMPTY_TEXT",
            Code::EmptyBulletin => "EMPTY_BULLETIN",
            Code::RenderFailed => "RENDER_FAILED",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// One diagnostic: a code, the location it applies to and a human message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub code: Code,
    pub path: String,
    pub message: String,
}

impl Finding {
    pub fn new(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.path, self.code, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn error(&mut self, code: Code, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(Finding::new(code, path, message));
    }

    pub fn warning(&mut self, code: Code, path: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Finding::new(code, path, message));
    }

    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }

    pub fn has_error(&self, code: Code) -> bool {
        self.errors.iter().any(|f| f.code == code)
    }

    pub fn has_warning(&self, code: Code) -> bool {
        self.warnings.iter().any(|f| f.code == code)
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.errors.extend(other.errors);
        self.warnings.extend(other.warnings);
    }

    /// Merge `other`, prefixing every path with `prefix/`.
    pub fn merge_prefixed(&mut self, prefix: &str, other: ValidationReport) {
        let rebase = |mut f: Finding| {
            f.path = if f.path.is_empty() {
                prefix.to_owned()
            } else {
                format!("{prefix}/{}", f.path)
            };
            f
        };
        self.errors.extend(other.errors.into_iter().map(rebase));
        self.warnings.extend(other.warnings.into_iter().map(rebase));
    }
}

/// Line-oriented diagnostics: `error: path: CODE: message`.
impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}
