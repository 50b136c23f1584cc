//! Catalogue data model.
//!
//! A catalogue holds the language set, the shared option lists and the
//! phrases. Option texts are stored column-wise: each list keeps one column of
//! [`OptionText`] per language, parallel to its option metadata. This mirrors
//! how translators work on a list and lets validation tell a missing language
//! column apart from a column with the wrong number of entries.

mod document;
mod lint;
mod markup;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ids::{LanguageTag, ListId, OptionId, PhraseId};

pub use document::{parse_catalogue, serialize_catalogue, CatalogueError};
pub use lint::lint_agreement;
pub use markup::{format_run, parse_run, MarkupError, EMPTY_MARKER, GLUE};
pub use validate::validate_catalogue;

/// Supported document schema version.
pub const SCHEMA_VERSION: u32 = 1;
/// Deepest list nesting: segment (0), sub-segment (1), sub-sub-segment (2).
pub const MAX_DEPTH: u8 = 2;
/// Upper bound on segments per phrase.
pub const MAX_SEGMENTS: usize = 10;

/// Reference to a nested slot inside an option text.
///
/// `ordinal` is the 1-based occurrence index of `list` among the slots of the
/// option's source-language text, which lets target languages place the same
/// slots in a different order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotRef {
    pub list: ListId,
    pub ordinal: u32,
}

impl SlotRef {
    pub fn new(list: impl Into<ListId>, ordinal: u32) -> Self {
        Self {
            list: list.into(),
            ordinal,
        }
    }
}

impl fmt::Display for SlotRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.list, self.ordinal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    /// Whitespace-collapsed text, never empty.
    pub text: String,
    /// No space between the previous fragment and this one.
    pub glue_before: bool,
    /// No space between this fragment and the next one.
    pub glue_after: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fragment {
    Literal(Literal),
    Slot(SlotRef),
}

/// An ordered run of fragments; the empty run is the `[Empty]` option.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TextRun(pub Vec<Fragment>);

impl TextRun {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.0
    }

    pub fn slots(&self) -> impl Iterator<Item = &SlotRef> {
        self.0.iter().filter_map(|f| match f {
            Fragment::Slot(s) => Some(s),
            Fragment::Literal(_) => None,
        })
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.0.iter().filter_map(|f| match f {
            Fragment::Literal(l) => Some(l),
            Fragment::Slot(_) => None,
        })
    }

    pub fn glue_before(&self) -> bool {
        matches!(self.0.first(), Some(Fragment::Literal(l)) if l.glue_before)
    }

    pub fn glue_after(&self) -> bool {
        matches!(self.0.last(), Some(Fragment::Literal(l)) if l.glue_after)
    }
}

/// The text of one option in one language.
///
/// `Split` is used in languages where the option's list is split: the phrase
/// layout then places part a and part b independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OptionText {
    Whole(TextRun),
    Split(TextRun, TextRun),
}

impl OptionText {
    pub fn empty() -> Self {
        OptionText::Whole(TextRun::default())
    }

    pub fn is_split(&self) -> bool {
        matches!(self, OptionText::Split(..))
    }

    pub fn is_empty(&self) -> bool {
        match self {
            OptionText::Whole(r) => r.is_empty(),
            OptionText::Split(a, b) => a.is_empty() && b.is_empty(),
        }
    }

    pub fn runs(&self) -> impl Iterator<Item = &TextRun> {
        let (first, second) = match self {
            OptionText::Whole(r) => (r, None),
            OptionText::Split(a, b) => (a, Some(b)),
        };
        std::iter::once(first).chain(second)
    }

    /// All slot references, part a before part b.
    pub fn slots(&self) -> impl Iterator<Item = &SlotRef> {
        self.runs().flat_map(TextRun::slots)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammaticalFeatures {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub number: Option<String>,
}

/// Agreement metadata consumed by [`lint_agreement`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Agreement {
    /// This option (typically an adjective) must agree with whatever is
    /// chosen from the governing list.
    AgreesWith(ListId),
    /// Gender and number of this option's subject, per language.
    Features(BTreeMap<LanguageTag, GrammaticalFeatures>),
}

/// Language-independent data of one option.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionMeta {
    pub id: OptionId,
    /// Shown next to the option in the editor, never rendered.
    pub hints: BTreeMap<LanguageTag, String>,
    pub agreement: Option<Agreement>,
    /// Free-text annotation of when a described future process happens. The
    /// tense itself is part of the stored translations.
    pub future: Option<String>,
}

impl OptionMeta {
    pub fn new(id: impl Into<OptionId>) -> Self {
        Self {
            id: id.into(),
            hints: BTreeMap::new(),
            agreement: None,
            future: None,
        }
    }

    pub fn has_metadata(&self) -> bool {
        !self.hints.is_empty() || self.agreement.is_some() || self.future.is_some()
    }
}

/// A named list of parallel options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionList {
    pub id: ListId,
    pub depth: u8,
    /// Languages in which every option carries a part a / part b pair.
    pub split_languages: BTreeSet<LanguageTag>,
    pub options: Vec<OptionMeta>,
    /// One column per language, parallel to `options`.
    pub texts: BTreeMap<LanguageTag, Vec<OptionText>>,
}

impl OptionList {
    pub fn position(&self, option: &str) -> Option<usize> {
        self.options.iter().position(|o| o.id == *option)
    }

    pub fn text(&self, lang: &str, index: usize) -> Option<&OptionText> {
        self.texts.get(lang).and_then(|col| col.get(index))
    }

    pub fn entry(&self, index: usize) -> Option<OptionEntry<'_>> {
        self.options.get(index).map(|meta| OptionEntry {
            list: self,
            index,
            meta,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = OptionEntry<'_>> {
        (0..self.options.len()).filter_map(move |i| self.entry(i))
    }
}

/// Row view over one option of a list: its metadata plus its text in each
/// language.
#[derive(Debug, Clone, Copy)]
pub struct OptionEntry<'a> {
    pub list: &'a OptionList,
    pub index: usize,
    pub meta: &'a OptionMeta,
}

impl<'a> OptionEntry<'a> {
    pub fn id(&self) -> &'a OptionId {
        &self.meta.id
    }

    pub fn text(&self, lang: &str) -> Option<&'a OptionText> {
        self.list.text(lang, self.index)
    }

    pub fn hint(&self, lang: &str) -> Option<&'a str> {
        self.meta.hints.get(lang).map(String::as_str)
    }
}

/// One position in a language's segment order. Segment numbers are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutPart {
    Whole(usize),
    PartA(usize),
    PartB(usize),
}

impl LayoutPart {
    pub fn segment(self) -> usize {
        match self {
            LayoutPart::Whole(s) | LayoutPart::PartA(s) | LayoutPart::PartB(s) => s,
        }
    }
}

impl fmt::Display for LayoutPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutPart::Whole(s) => write!(f, "{s}"),
            LayoutPart::PartA(s) => write!(f, "{s}a"),
            LayoutPart::PartB(s) => write!(f, "{s}b"),
        }
    }
}

/// Segment order for one language, written as e.g. `3a 1 2 3b 4 5`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Layout(pub Vec<LayoutPart>);

impl Layout {
    pub fn identity(segments: usize) -> Self {
        Layout((1..=segments).map(LayoutPart::Whole).collect())
    }

    pub fn parts(&self) -> &[LayoutPart] {
        &self.0
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutParseError(pub String);

impl fmt::Display for LayoutParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid layout token {:?}", self.0)
    }
}

impl FromStr for Layout {
    type Err = LayoutParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace()
            .map(|token| {
                let (digits, ctor): (&str, fn(usize) -> LayoutPart) = if let Some(d) = token.strip_suffix('a') {
                    (d, LayoutPart::PartA)
                } else if let Some(d) = token.strip_suffix('b') {
                    (d, LayoutPart::PartB)
                } else {
                    (token, LayoutPart::Whole)
                };
                match digits.parse::<usize>() {
                    Ok(n) if n > 0 && digits.bytes().all(|b| b.is_ascii_digit()) => Ok(ctor(n)),
                    _ => Err(LayoutParseError(token.to_owned())),
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Layout)
    }
}

/// A sentence template: an ordered succession of segments, each filled from a
/// depth-0 option list, with a segment order per language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phrase {
    pub id: PhraseId,
    pub number: u32,
    /// Example sentence in the source language, used in menus.
    pub title: String,
    /// Segment `n` (1-based) is filled from `segments[n - 1]`.
    pub segments: Vec<ListId>,
    pub layouts: BTreeMap<LanguageTag, Layout>,
}

impl Phrase {
    pub fn segment_list(&self, seg_no: usize) -> Option<&ListId> {
        seg_no.checked_sub(1).and_then(|i| self.segments.get(i))
    }
}

/// Immutable snapshot of a phrase catalogue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalogue {
    pub schema_version: u32,
    /// Catalogue languages in document order.
    pub languages: Vec<LanguageTag>,
    /// The authoring language; never split, always in identity layout.
    pub source: LanguageTag,
    pub lists: BTreeMap<ListId, OptionList>,
    pub phrases: BTreeMap<PhraseId, Phrase>,
}

impl Catalogue {
    pub fn has_language(&self, lang: &str) -> bool {
        self.languages.iter().any(|l| l == lang)
    }

    pub fn list(&self, id: &str) -> Option<&OptionList> {
        self.lists.get(id)
    }

    pub fn phrase(&self, id: &str) -> Option<&Phrase> {
        self.phrases.get(id)
    }

    /// Phrases ordered by display number, then id.
    pub fn phrases_by_number(&self) -> Vec<&Phrase> {
        let mut phrases: Vec<&Phrase> = self.phrases.values().collect();
        phrases.sort_by(|a, b| a.number.cmp(&b.number).then_with(|| a.id.cmp(&b.id)));
        phrases
    }

    /// Lists reachable from `phrase` through segments and nested slots, in
    /// first-visit order. Each list appears once.
    pub fn reachable_lists(&self, phrase: &Phrase) -> Vec<&OptionList> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut stack: Vec<&ListId> = phrase.segments.iter().rev().collect();
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            let Some(list) = self.lists.get(id) else {
                continue;
            };
            out.push(list);
            let mut children: Vec<&ListId> = Vec::new();
            if let Some(column) = list.texts.get(&self.source) {
                for text in column {
                    children.extend(text.slots().map(|s| &s.list));
                }
            }
            stack.extend(children.into_iter().rev());
        }
        out
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn content_hash(&self) -> String {
        let bytes = serialize_catalogue(self);
        hex::encode(Sha256::digest(&bytes))
    }
}
