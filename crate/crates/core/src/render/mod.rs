//! Sentence assembly.
//!
//! Rendering walks the target language's layout, fetches the chosen option's
//! text (whole, part a or part b), expands nested slots into leaf literals and
//! only then decides spacing: adjacent literals are joined by one space unless
//! the left one ends in glue or the right one starts with glue. The first
//! alphabetic character is uppercased at the end.

mod selection;
mod slots;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalogue::{Catalogue, Fragment, LayoutPart, Literal, OptionList, OptionText, TextRun};
use crate::ids::LanguageTag;
use crate::report::Code;

pub use selection::{validate_selection, Choice, Selection, SlotKey, SlotPath};
pub use slots::{option_label, resolve_slots, OptionDescriptor, SlotDescriptor, SlotTree, EMPTY_LABEL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("unknown phrase {0:?}")]
    UnknownPhrase(String),
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error("slot {path}: unknown option {option:?}")]
    UnknownOption { path: String, option: String },
    #[error("incomplete selection at {path}: {code}: {message}")]
    IncompleteSelection { path: String, code: Code, message: String },
    #[error("joker sentence has no text for {0:?}")]
    MissingJokerText(String),
    #[error("catalogue is not renderable: {0}")]
    Catalogue(String),
}

impl RenderError {
    pub fn code(&self) -> &'static str {
        match self {
            RenderError::UnknownPhrase(_) => "UNKNOWN_PHRASE",
            RenderError::UnknownLanguage(_) => "UNKNOWN_LANGUAGE",
            RenderError::UnknownOption { .. } => "STALE_OPTION",
            RenderError::IncompleteSelection { .. } => "INCOMPLETE_SELECTION",
            RenderError::MissingJokerText(_) => "MISSING_JOKER_TEXT",
            RenderError::Catalogue(_) => "INVALID_CATALOGUE",
        }
    }
}

/// Render `sel` in `lang`.
pub fn render_sentence(cat: &Catalogue, sel: &Selection, lang: &str) -> Result<String, RenderError> {
    if !cat.has_language(lang) {
        return Err(RenderError::UnknownLanguage(lang.to_owned()));
    }
    let phrase = cat
        .phrase(sel.phrase.as_str())
        .ok_or_else(|| RenderError::UnknownPhrase(sel.phrase.to_string()))?;
    let report = validate_selection(cat, sel);
    if let Some(first) = report.errors.into_iter().next() {
        return Err(RenderError::IncompleteSelection {
            path: first.path,
            code: first.code,
            message: first.message,
        });
    }
    let layout = phrase
        .layouts
        .get(lang)
        .ok_or_else(|| RenderError::Catalogue(format!("phrase {} has no {lang} layout", phrase.id)))?;

    let mut leaves: Vec<&Literal> = Vec::new();
    for part in layout.parts() {
        let seg_no = part.segment();
        let list = phrase
            .segment_list(seg_no)
            .and_then(|id| cat.list(id.as_str()))
            .ok_or_else(|| RenderError::Catalogue(format!("phrase {} segment {seg_no}", phrase.id)))?;
        let choice = &sel.segments[&seg_no];
        let text = option_text(list, choice, lang)?;
        match (part, text) {
            (LayoutPart::Whole(_), text) => {
                for run in text.runs() {
                    expand(cat, run, choice, lang, &mut leaves)?;
                }
            }
            (LayoutPart::PartA(_), OptionText::Split(a, _)) => expand(cat, a, choice, lang, &mut leaves)?,
            (LayoutPart::PartB(_), OptionText::Split(_, b)) => expand(cat, b, choice, lang, &mut leaves)?,
            (LayoutPart::PartA(_), OptionText::Whole(run)) => expand(cat, run, choice, lang, &mut leaves)?,
            (LayoutPart::PartB(_), OptionText::Whole(_)) => {}
        }
    }
    Ok(capitalize_first(&join(&leaves)))
}

fn option_text<'a>(list: &'a OptionList, choice: &Choice, lang: &str) -> Result<&'a OptionText, RenderError> {
    list.position(choice.option.as_str())
        .and_then(|i| list.text(lang, i))
        .ok_or_else(|| RenderError::Catalogue(format!("list {} has no {lang} text for {}", list.id, choice.option)))
}

fn expand<'a>(
    cat: &'a Catalogue,
    run: &'a TextRun,
    choice: &Choice,
    lang: &str,
    out: &mut Vec<&'a Literal>,
) -> Result<(), RenderError> {
    for fragment in run.fragments() {
        match fragment {
            Fragment::Literal(lit) => out.push(lit),
            Fragment::Slot(slot) => {
                let child = choice
                    .slots
                    .get(&SlotKey::from(slot))
                    .ok_or_else(|| RenderError::Catalogue(format!("slot {slot} has no choice")))?;
                let list = cat
                    .list(slot.list.as_str())
                    .ok_or_else(|| RenderError::Catalogue(format!("missing list {}", slot.list)))?;
                for child_run in option_text(list, child, lang)?.runs() {
                    expand(cat, child_run, child, lang, out)?;
                }
            }
        }
    }
    Ok(())
}

fn join(leaves: &[&Literal]) -> String {
    let mut out = String::with_capacity(leaves.iter().map(|l| l.text.len() + 1).sum());
    let mut glue_pending = false;
    for leaf in leaves {
        if !out.is_empty() && !glue_pending && !leaf.glue_before {
            out.push(' ');
        }
        out.push_str(&leaf.text);
        glue_pending = leaf.glue_after;
    }
    out
}

/// Uppercase the first alphabetic character; everything else is untouched.
pub fn capitalize_first(text: &str) -> String {
    match text.char_indices().find(|(_, c)| c.is_alphabetic()) {
        Some((i, c)) if !c.is_uppercase() => {
            let mut out = String::with_capacity(text.len() + 2);
            out.push_str(&text[..i]);
            out.extend(c.to_uppercase());
            out.push_str(&text[i + c.len_utf8()..]);
            out
        }
        _ => text.to_owned(),
    }
}

/// Free-text sentence supplied in every language, bypassing the catalogue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JokerSentence {
    pub texts: BTreeMap<LanguageTag, String>,
}

impl JokerSentence {
    pub fn new<'a>(texts: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        Self {
            texts: texts
                .into_iter()
                .map(|(l, t)| (LanguageTag::from(l), t.to_owned()))
                .collect(),
        }
    }
}

/// One sentence of a description: `{"selection": {...}}` or
/// `{"joker": {"de": "...", ...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceEntry {
    Selection(Selection),
    Joker(JokerSentence),
}

impl SentenceEntry {
    pub fn is_joker(&self) -> bool {
        matches!(self, SentenceEntry::Joker(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sentence {index}: {source}")]
pub struct DescriptionError {
    /// 0-based position of the failing sentence.
    pub index: usize,
    #[source]
    pub source: RenderError,
}

/// Render one sentence entry; joker text is trimmed and otherwise verbatim.
pub fn render_entry(cat: &Catalogue, entry: &SentenceEntry, lang: &str) -> Result<String, RenderError> {
    match entry {
        SentenceEntry::Selection(sel) => render_sentence(cat, sel, lang),
        SentenceEntry::Joker(joker) => {
            if !cat.has_language(lang) {
                return Err(RenderError::UnknownLanguage(lang.to_owned()));
            }
            joker
                .texts
                .get(lang)
                .map(|t| t.trim())
                .filter(|t| !t.is_empty())
                .map(str::to_owned)
                .ok_or_else(|| RenderError::MissingJokerText(lang.to_owned()))
        }
    }
}

/// Render sentences in order, joined by single spaces.
pub fn render_description(
    cat: &Catalogue,
    sentences: &[SentenceEntry],
    lang: &str,
) -> Result<String, DescriptionError> {
    let mut parts = Vec::with_capacity(sentences.len());
    for (index, entry) in sentences.iter().enumerate() {
        let text = render_entry(cat, entry, lang).map_err(|source| DescriptionError { index, source })?;
        if !text.is_empty() {
            parts.push(text);
        }
    }
    Ok(parts.join(" "))
}
