//! Language-independent selections and their validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::catalogue::{Catalogue, OptionList, SlotRef};
use crate::ids::{ListId, OptionId, PhraseId};
use crate::report::{Code, ValidationReport};

/// Key of a nested slot: the referenced list and its ordinal in the source
/// text. Written `list#n`; a bare `list` means ordinal 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotKey {
    pub list: ListId,
    pub ordinal: u32,
}

impl SlotKey {
    pub fn new(list: impl Into<ListId>, ordinal: u32) -> Self {
        Self {
            list: list.into(),
            ordinal,
        }
    }
}

impl From<&SlotRef> for SlotKey {
    fn from(slot: &SlotRef) -> Self {
        Self {
            list: slot.list.clone(),
            ordinal: slot.ordinal,
        }
    }
}

impl fmt::Display for SlotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.list, self.ordinal)
    }
}

impl FromStr for SlotKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (list, ordinal) = match s.rsplit_once('#') {
            Some((list, n)) => match n.parse::<u32>() {
                Ok(n) if n > 0 => (list, n),
                _ => return Err(format!("invalid slot ordinal in {s:?}")),
            },
            None => (s, 1),
        };
        if list.is_empty() {
            return Err(format!("invalid slot key {s:?}"));
        }
        Ok(SlotKey::new(list, ordinal))
    }
}

impl Serialize for SlotKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlotKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// The chosen option at one slot, plus choices for the slots its source
/// text opens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Choice {
    pub option: OptionId,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub slots: BTreeMap<SlotKey, Choice>,
}

impl Choice {
    pub fn new(option: impl Into<OptionId>) -> Self {
        Self {
            option: option.into(),
            slots: BTreeMap::new(),
        }
    }

    /// Fill the first occurrence of `list`.
    pub fn with(self, list: &str, child: Choice) -> Self {
        self.with_slot(SlotKey::new(list, 1), child)
    }

    pub fn with_slot(mut self, key: SlotKey, child: Choice) -> Self {
        self.slots.insert(key, child);
        self
    }
}

/// A tree of choices for one sentence. Segment numbers are 1-based.
///
/// ```json
/// {"phrase": "p65", "choices": {"1": {"option": "wet"},
///   "3": {"option": "sunny_slopes", "slots": {"an_steilen#1": {"option": "very_steep"}}}}}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selection {
    pub phrase: PhraseId,
    #[serde(rename = "choices", default)]
    pub segments: BTreeMap<usize, Choice>,
}

impl Selection {
    pub fn new(phrase: impl Into<PhraseId>) -> Self {
        Self {
            phrase: phrase.into(),
            segments: BTreeMap::new(),
        }
    }

    pub fn segment(mut self, seg_no: usize, choice: Choice) -> Self {
        self.segments.insert(seg_no, choice);
        self
    }

    /// The choice at `path`, if present.
    pub fn choice_at(&self, path: &SlotPath) -> Option<&Choice> {
        let mut node = self.segments.get(&path.segment)?;
        for key in &path.slots {
            node = node.slots.get(key)?;
        }
        Some(node)
    }
}

/// Location of a slot within a selection: the segment number followed by the
/// nested slot keys, written `1/Gebiet#1/östlich#1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotPath {
    pub segment: usize,
    pub slots: Vec<SlotKey>,
}

impl SlotPath {
    pub fn segment(segment: usize) -> Self {
        Self {
            segment,
            slots: Vec::new(),
        }
    }

    pub fn child(&self, key: SlotKey) -> Self {
        let mut slots = self.slots.clone();
        slots.push(key);
        Self {
            segment: self.segment,
            slots,
        }
    }

    pub fn depth(&self) -> usize {
        self.slots.len()
    }
}

impl fmt::Display for SlotPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.segment)?;
        for key in &self.slots {
            write!(f, "/{key}")?;
        }
        Ok(())
    }
}

impl FromStr for SlotPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split('/');
        let segment = parts
            .next()
            .and_then(|p| p.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("invalid slot path {s:?}"))?;
        let slots = parts.map(str::parse).collect::<Result<Vec<SlotKey>, _>>()?;
        Ok(SlotPath { segment, slots })
    }
}

impl Serialize for SlotPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlotPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Slot keys opened by option `index` of `list`, in source-text order.
pub(crate) fn required_slots<'a>(
    cat: &'a Catalogue,
    list: &'a OptionList,
    index: usize,
) -> impl Iterator<Item = &'a SlotRef> {
    list.text(cat.source.as_str(), index)
        .into_iter()
        .flat_map(|text| text.slots())
}

/// Check `sel` against `cat`: missing, extraneous and stale choices are
/// errors; a chosen option carrying an editor hint raises `PRONOUN_CHECK`.
pub fn validate_selection(cat: &Catalogue, sel: &Selection) -> ValidationReport {
    let mut report = ValidationReport::new();
    let Some(phrase) = cat.phrase(sel.phrase.as_str()) else {
        report.error(
            Code::UnknownPhrase,
            "phrase",
            format!("no phrase {:?}", sel.phrase.as_str()),
        );
        return report;
    };
    for (seg_no, list_id) in phrase.segments.iter().enumerate() {
        let seg_no = seg_no + 1;
        let path = SlotPath::segment(seg_no);
        match (sel.segments.get(&seg_no), cat.list(list_id.as_str())) {
            (None, _) => report.error(
                Code::MissingChoice,
                path.to_string(),
                format!("no option chosen for segment {seg_no}"),
            ),
            (Some(choice), Some(list)) => check_choice(cat, list, choice, &path, &mut report),
            (Some(_), None) => {}
        }
    }
    for seg_no in sel.segments.keys() {
        if *seg_no == 0 || *seg_no > phrase.segments.len() {
            report.error(
                Code::ExtraneousChoice,
                seg_no.to_string(),
                format!("phrase {} has {} segments", phrase.id, phrase.segments.len()),
            );
        }
    }
    report
}

fn check_choice(cat: &Catalogue, list: &OptionList, choice: &Choice, path: &SlotPath, report: &mut ValidationReport) {
    let Some(index) = list.position(choice.option.as_str()) else {
        report.error(
            Code::StaleOption,
            path.to_string(),
            format!("list {} has no option {:?}", list.id, choice.option.as_str()),
        );
        return;
    };
    if let Some(hint) = list.options[index].hints.get(&cat.source) {
        report.warning(
            Code::PronounCheck,
            path.to_string(),
            format!(
                "option {} is annotated {hint:?}; confirm it still fits the context",
                choice.option
            ),
        );
    }
    let mut expected = BTreeSet::new();
    for slot in required_slots(cat, list, index) {
        let key = SlotKey::from(slot);
        let child_path = path.child(key.clone());
        match (choice.slots.get(&key), cat.list(slot.list.as_str())) {
            (None, _) => report.error(
                Code::MissingChoice,
                child_path.to_string(),
                format!("no option chosen for slot {{{}}}", slot.list),
            ),
            (Some(child), Some(child_list)) => check_choice(cat, child_list, child, &child_path, report),
            (Some(_), None) => {}
        }
        expected.insert(key);
    }
    for key in choice.slots.keys() {
        if !expected.contains(key) {
            report.error(
                Code::ExtraneousChoice,
                path.child(key.clone()).to_string(),
                format!("option {} has no slot {key}", choice.option),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_key_text_forms() {
        assert_eq!("Gebiet".parse::<SlotKey>().unwrap(), SlotKey::new("Gebiet", 1));
        assert_eq!(",Gebiet#2".parse::<SlotKey>().unwrap(), SlotKey::new(",Gebiet", 2));
        assert!("Gebiet#0".parse::<SlotKey>().is_err());
        assert!("#1".parse::<SlotKey>().is_err());
    }

    #[test]
    fn slot_path_round_trip() {
        let path = SlotPath::segment(1)
            .child(SlotKey::new("Gebiet", 1))
            .child(SlotKey::new("östlich", 1));
        assert_eq!(path.to_string(), "1/Gebiet#1/östlich#1");
        assert_eq!(path.to_string().parse::<SlotPath>().unwrap(), path);
        assert!("0".parse::<SlotPath>().is_err());
    }

    #[test]
    fn selection_json_shape() {
        let sel = Selection::new("p65").segment(1, Choice::new("wet")).segment(
            3,
            Choice::new("sunny_slopes").with("an_steilen", Choice::new("very_steep")),
        );
        let json = serde_json::to_string(&sel).unwrap();
        assert_eq!(
            json,
            r#"{"phrase":"p65","choices":{"1":{"option":"wet"},"3":{"option":"sunny_slopes","slots":{"an_steilen#1":{"option":"very_steep"}}}}}"#
        );
        let back: Selection = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sel);
        let bare: Selection = serde_json::from_str(
            r#"{"phrase":"p65","choices":{"3":{"option":"sunny_slopes","slots":{"an_steilen":{"option":"very_steep"}}}}}"#,
        )
        .unwrap();
        assert_eq!(bare.segments[&3], sel.segments[&3]);
    }
}
