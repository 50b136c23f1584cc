//! Inline markup of option texts.
//!
//! - `{list}` and `{{list}}` are slots; both forms parse the same way, the
//!   double form is written for depth-2 lists. `{list#2}` names an explicit
//!   ordinal, otherwise the ordinal is the occurrence count of `list` so far.
//! - `(-)` suppresses one space: at the start of a text fragment the space
//!   before it (`(-),`), at the end the space after it (`de(-)`). A fragment
//!   is the text between slots; a marker anywhere else is rejected.
//! - `""` and `[Empty]` are the empty option.
//!
//! Literal whitespace is collapsed to single spaces and trimmed; spacing
//! between fragments is decided by the renderer.

use std::collections::BTreeMap;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use super::{Fragment, Literal, SlotRef, TextRun};
use crate::ids::ListId;

pub const GLUE: &str = "(-)";
pub const EMPTY_MARKER: &str = "[Empty]";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkupError {
    #[error("unbalanced brace at byte {0}")]
    UnbalancedBrace(usize),
    #[error("malformed slot {0:?}")]
    BadSlot(String),
    #[error("glue marker not attached to any text")]
    DetachedGlue,
    #[error("glue marker inside a text fragment; it may only start or end one")]
    MidFragmentGlue,
    #[error("[Empty] cannot be combined with other text")]
    MixedEmptyMarker,
}

/// Per-text slot occurrence counter, shared across the two parts of a split.
pub(crate) type OrdinalCounter = BTreeMap<ListId, u32>;

/// Parse one run of marked-up text with a fresh ordinal counter.
pub fn parse_run(raw: &str) -> Result<TextRun, MarkupError> {
    parse_run_counted(raw, &mut OrdinalCounter::new())
}

pub(crate) fn parse_run_counted(raw: &str, counter: &mut OrdinalCounter) -> Result<TextRun, MarkupError> {
    let raw: String = raw.nfc().collect();
    let trimmed = raw.trim();
    if trimmed.is_empty() || trimmed == EMPTY_MARKER {
        return Ok(TextRun::default());
    }
    if trimmed.contains(EMPTY_MARKER) {
        return Err(MarkupError::MixedEmptyMarker);
    }

    let mut fragments = Vec::new();
    let mut literal_start = 0;
    let bytes = raw.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'{' => {
                push_literal(&raw[literal_start..i], &mut fragments)?;
                let double = bytes.get(i + 1) == Some(&b'{');
                let (open, close) = if double { ("{{", "}}") } else { ("{", "}") };
                let body_start = i + open.len();
                let Some(rel_end) = raw[body_start..].find('}') else {
                    return Err(MarkupError::UnbalancedBrace(i));
                };
                let body_end = body_start + rel_end;
                if !raw[body_end..].starts_with(close) {
                    return Err(MarkupError::UnbalancedBrace(body_end));
                }
                let slot = parse_slot_body(&raw[body_start..body_end], counter)?;
                fragments.push(Fragment::Slot(slot));
                i = body_end + close.len();
                literal_start = i;
            }
            b'}' => return Err(MarkupError::UnbalancedBrace(i)),
            _ => i += 1,
        }
    }
    push_literal(&raw[literal_start..], &mut fragments)?;
    Ok(TextRun(fragments))
}

fn parse_slot_body(body: &str, counter: &mut OrdinalCounter) -> Result<SlotRef, MarkupError> {
    let bad = || MarkupError::BadSlot(body.to_owned());
    let (name, explicit) = match body.split_once('#') {
        Some((name, n)) => {
            let ordinal: u32 = n.parse().map_err(|_| bad())?;
            if ordinal == 0 {
                return Err(bad());
            }
            (name, Some(ordinal))
        }
        None => (body, None),
    };
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || "{}#".contains(c)) {
        return Err(bad());
    }
    let list = ListId::new(name);
    let seen = counter.entry(list.clone()).or_insert(0);
    *seen += 1;
    Ok(SlotRef {
        list,
        ordinal: explicit.unwrap_or(*seen),
    })
}

fn push_literal(piece: &str, out: &mut Vec<Fragment>) -> Result<(), MarkupError> {
    let mut text = piece.trim();
    if text.is_empty() {
        return Ok(());
    }
    let glue_before = match text.strip_prefix(GLUE) {
        Some(rest) => {
            text = rest.trim_start();
            true
        }
        None => false,
    };
    let glue_after = match text.strip_suffix(GLUE) {
        Some(rest) => {
            text = rest.trim_end();
            true
        }
        None => false,
    };
    if text.is_empty() {
        return Err(MarkupError::DetachedGlue);
    }
    if text.contains(GLUE) {
        return Err(MarkupError::MidFragmentGlue);
    }
    out.push(Fragment::Literal(Literal {
        text: text.split_whitespace().collect::<Vec<_>>().join(" "),
        glue_before,
        glue_after,
    }));
    Ok(())
}

/// Canonical markup for `run`. `depth_of` decides between `{..}` and `{{..}}`.
pub fn format_run(run: &TextRun, depth_of: impl Fn(&ListId) -> Option<u8>) -> String {
    format_run_counted(run, &depth_of, &mut OrdinalCounter::new())
}

pub(crate) fn format_run_counted(
    run: &TextRun,
    depth_of: &dyn Fn(&ListId) -> Option<u8>,
    counter: &mut OrdinalCounter,
) -> String {
    let mut out = String::new();
    for fragment in run.fragments() {
        if !out.is_empty() {
            out.push(' ');
        }
        match fragment {
            Fragment::Literal(l) => {
                if l.glue_before {
                    out.push_str(GLUE);
                }
                out.push_str(&l.text);
                if l.glue_after {
                    out.push_str(GLUE);
                }
            }
            Fragment::Slot(slot) => {
                let seen = counter.entry(slot.list.clone()).or_insert(0);
                *seen += 1;
                let double = depth_of(&slot.list) == Some(2);
                out.push_str(if double { "{{" } else { "{" });
                out.push_str(slot.list.as_str());
                if slot.ordinal != *seen {
                    out.push('#');
                    out.push_str(&slot.ordinal.to_string());
                }
                out.push_str(if double { "}}" } else { "}" });
            }
        }
    }
    out
}
