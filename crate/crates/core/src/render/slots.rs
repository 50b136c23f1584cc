//! Fillable slots of a (possibly partial) selection, as shown in the editor.

use serde::Serialize;

use super::selection::{required_slots, Choice, SlotKey, SlotPath};
use super::{RenderError, Selection};
use crate::catalogue::{format_run, Catalogue, OptionList, OptionText, TextRun};
use crate::ids::{ListId, OptionId, PhraseId};

/// Label shown for an option whose source text is empty.
pub const EMPTY_LABEL: &str = "[Empty]";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptionDescriptor {
    pub id: OptionId,
    /// Source-language text with slot markers, or `[Empty]`.
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlotDescriptor {
    pub path: SlotPath,
    pub list: ListId,
    pub depth: u8,
    pub chosen: Option<OptionId>,
    pub options: Vec<OptionDescriptor>,
}

/// Every fillable slot for the current choices, depth-first in segment and
/// source-text order. Slots below an unchosen option are not listed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlotTree {
    pub phrase: PhraseId,
    pub slots: Vec<SlotDescriptor>,
}

impl SlotTree {
    pub fn get(&self, path: &SlotPath) -> Option<&SlotDescriptor> {
        self.slots.iter().find(|s| &s.path == path)
    }

    /// True when every listed slot has a choice.
    pub fn is_complete(&self) -> bool {
        self.slots.iter().all(|s| s.chosen.is_some())
    }
}

pub fn option_label(cat: &Catalogue, text: Option<&OptionText>) -> String {
    let label = |run: &TextRun| {
        if run.is_empty() {
            EMPTY_LABEL.to_owned()
        } else {
            format_run(run, |id: &ListId| cat.lists.get(id).map(|l| l.depth))
        }
    };
    match text {
        Some(OptionText::Whole(run)) => label(run),
        Some(OptionText::Split(a, b)) if !(a.is_empty() && b.is_empty()) => {
            format!("{} ‖ {}", label(a), label(b))
        }
        _ => EMPTY_LABEL.to_owned(),
    }
}

fn describe_list(cat: &Catalogue, list: &OptionList) -> Vec<OptionDescriptor> {
    list.entries()
        .map(|entry| OptionDescriptor {
            id: entry.id().clone(),
            label: option_label(cat, entry.text(cat.source.as_str())),
            hint: entry.hint(cat.source.as_str()).map(str::to_owned),
        })
        .collect()
}

/// Resolve the slot tree of `sel`. Choices naming options that do not exist
/// are an error; missing choices simply leave their slot open.
pub fn resolve_slots(cat: &Catalogue, sel: &Selection) -> Result<SlotTree, RenderError> {
    let phrase = cat
        .phrase(sel.phrase.as_str())
        .ok_or_else(|| RenderError::UnknownPhrase(sel.phrase.to_string()))?;
    let mut slots = Vec::new();
    for (i, list_id) in phrase.segments.iter().enumerate() {
        let path = SlotPath::segment(i + 1);
        let list = cat
            .list(list_id.as_str())
            .ok_or_else(|| RenderError::Catalogue(format!("missing list {list_id}")))?;
        walk(cat, list, sel.segments.get(&(i + 1)), path, &mut slots)?;
    }
    Ok(SlotTree {
        phrase: phrase.id.clone(),
        slots,
    })
}

fn walk(
    cat: &Catalogue,
    list: &OptionList,
    choice: Option<&Choice>,
    path: SlotPath,
    out: &mut Vec<SlotDescriptor>,
) -> Result<(), RenderError> {
    out.push(SlotDescriptor {
        path: path.clone(),
        list: list.id.clone(),
        depth: list.depth,
        chosen: choice.map(|c| c.option.clone()),
        options: describe_list(cat, list),
    });
    let Some(choice) = choice else {
        return Ok(());
    };
    let index = list
        .position(choice.option.as_str())
        .ok_or_else(|| RenderError::UnknownOption {
            path: path.to_string(),
            option: choice.option.to_string(),
        })?;
    for slot in required_slots(cat, list, index) {
        let key = SlotKey::from(slot);
        let child_list = cat
            .list(slot.list.as_str())
            .ok_or_else(|| RenderError::Catalogue(format!("missing list {}", slot.list)))?;
        let child = choice.slots.get(&key);
        walk(cat, child_list, child, path.child(key), out)?;
    }
    Ok(())
}
