//! Structural validation: everything that has to hold for unsupervised
//! rendering to be safe in every language.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{Catalogue, LayoutPart, OptionList, OptionText, Phrase, SlotRef, TextRun};
use super::{MAX_DEPTH, MAX_SEGMENTS};
use crate::ids::{LanguageTag, ListId};
use crate::report::{Code, ValidationReport};

/// Check every structural invariant of `cat`. Never fails; findings are
/// collected in the report.
pub fn validate_catalogue(cat: &Catalogue) -> ValidationReport {
    let mut report = ValidationReport::new();
    if cat.languages.is_empty() {
        report.error(Code::NoLanguages, "languages", "catalogue declares no language");
    }
    if !cat.has_language(cat.source.as_str()) {
        report.error(
            Code::SourceLanguage,
            "source",
            format!("source language {} is not a catalogue language", cat.source),
        );
    }
    for list in cat.lists.values() {
        check_list(cat, list, &mut report);
    }
    check_cycles(cat, &mut report);
    for phrase in cat.phrases.values() {
        check_phrase(cat, phrase, &mut report);
    }
    check_empty_renderings(cat, &mut report);
    report
}

fn slot_multiset(text: &OptionText) -> BTreeMap<&SlotRef, usize> {
    let mut out = BTreeMap::new();
    for slot in text.slots() {
        *out.entry(slot).or_insert(0) += 1;
    }
    out
}

fn describe(slots: &BTreeMap<&SlotRef, usize>) -> String {
    let parts: Vec<String> = slots
        .iter()
        .flat_map(|(s, n)| std::iter::repeat_n(s.to_string(), *n))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn check_list(cat: &Catalogue, list: &OptionList, report: &mut ValidationReport) {
    let path = format!("lists/{}", list.id);
    if list.options.is_empty() {
        report.error(Code::EmptyList, &path, "list has no options");
    }
    if list.depth > MAX_DEPTH {
        report.error(
            Code::DepthBound,
            &path,
            format!("depth {} exceeds the maximum of {MAX_DEPTH}", list.depth),
        );
    }
    let mut seen = HashSet::new();
    for meta in &list.options {
        if !seen.insert(&meta.id) {
            report.error(
                Code::DuplicateOption,
                format!("{path}/options/{}", meta.id),
                "option id occurs more than once",
            );
        }
    }
    if list.split_languages.contains(&cat.source) {
        report.error(
            Code::SplitSource,
            &path,
            format!("list is split in the source language {}", cat.source),
        );
    }
    if !list.split_languages.is_empty() && list.depth > 0 {
        report.error(
            Code::SplitSublist,
            &path,
            format!("only segment lists can be split, this list has depth {}", list.depth),
        );
    }

    let mut columns_ok = true;
    for lang in &cat.languages {
        let cpath = format!("{path}/texts/{lang}");
        match list.texts.get(lang) {
            None => {
                columns_ok = false;
                report.error(Code::MissingLanguageText, cpath, "no texts for this language");
            }
            Some(column) if column.len() != list.options.len() => {
                columns_ok = false;
                report.error(
                    Code::ParallelOptionCount,
                    cpath,
                    format!("{} texts for {} options", column.len(), list.options.len()),
                );
            }
            Some(column) => {
                let split = list.split_languages.contains(lang);
                for (meta, text) in list.options.iter().zip(column) {
                    if text.is_split() != split {
                        let expected = if split { "a split pair" } else { "a single text" };
                        report.error(
                            Code::SplitTextMismatch,
                            format!("{path}/options/{}/{lang}", meta.id),
                            format!("expected {expected}"),
                        );
                    }
                }
            }
        }
    }

    // slot references: resolution, depth order, ordinals, parity
    for (lang, column) in &list.texts {
        for (meta, text) in list.options.iter().zip(column) {
            let opath = format!("{path}/options/{}/{lang}", meta.id);
            for slot in text.slots() {
                match cat.lists.get(&slot.list) {
                    None => report.error(
                        Code::UnresolvedList,
                        &opath,
                        format!("slot {{{}}} names no list", slot.list),
                    ),
                    Some(child) if child.depth <= list.depth => report.error(
                        Code::DepthOrder,
                        &opath,
                        format!(
                            "slot {{{}}} has depth {}, not deeper than {}",
                            slot.list, child.depth, list.depth
                        ),
                    ),
                    Some(_) => {}
                }
            }
        }
    }

    let Some(source_column) = list.texts.get(&cat.source) else {
        return;
    };
    for (idx, (meta, source_text)) in list.options.iter().zip(source_column).enumerate() {
        let opath = format!("{path}/options/{}", meta.id);
        check_ordinals(source_text, &format!("{opath}/{}", cat.source), report);
        if !columns_ok {
            continue;
        }
        let expected = slot_multiset(source_text);
        for lang in cat.languages.iter().filter(|l| **l != cat.source) {
            let Some(text) = list.text(lang.as_str(), idx) else {
                continue;
            };
            let got = slot_multiset(text);
            if got != expected {
                report.error(
                    Code::PlaceholderParity,
                    format!("{opath}/{lang}"),
                    format!(
                        "slots {} differ from source slots {}",
                        describe(&got),
                        describe(&expected)
                    ),
                );
            }
        }
    }

    if !list.options.is_empty() && source_column.iter().all(OptionText::is_empty) {
        report.warning(
            Code::EmptySourceOption,
            &path,
            "every option is empty in the source language",
        );
    }
}

/// Source-language ordinals of each list must be exactly 1..=k.
fn check_ordinals(text: &OptionText, path: &str, report: &mut ValidationReport) {
    let mut by_list: BTreeMap<&ListId, Vec<u32>> = BTreeMap::new();
    for slot in text.slots() {
        by_list.entry(&slot.list).or_default().push(slot.ordinal);
    }
    for (list, mut ordinals) in by_list {
        ordinals.sort_unstable();
        let expected: Vec<u32> = (1..=ordinals.len() as u32).collect();
        if ordinals != expected {
            report.error(
                Code::SlotOrdinal,
                path,
                format!("ordinals of {{{list}}} are {ordinals:?}, expected {expected:?}"),
            );
        }
    }
}

/// Cycle detection over slot references in any language, independent of the
/// depth ordering.
fn check_cycles(cat: &Catalogue, report: &mut ValidationReport) {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }

    fn children<'a>(cat: &'a Catalogue, list: &'a OptionList) -> BTreeSet<&'a ListId> {
        list.texts
            .values()
            .flatten()
            .flat_map(OptionText::slots)
            .map(|s| &s.list)
            .filter(|id| cat.lists.contains_key(*id))
            .collect()
    }

    let mut marks: HashMap<&ListId, Mark> = HashMap::new();
    let mut reported = HashSet::new();
    for root in cat.lists.keys() {
        if marks.contains_key(root) {
            continue;
        }
        // iterative DFS; each frame holds the list and its remaining children
        let mut stack: Vec<(&ListId, Vec<&ListId>)> = Vec::new();
        marks.insert(root, Mark::Active);
        stack.push((root, children(cat, &cat.lists[root]).into_iter().rev().collect()));
        while let Some((node, pending)) = stack.last_mut() {
            let node = *node;
            match pending.pop() {
                Some(child) => match marks.get(child) {
                    Some(Mark::Active) => {
                        if reported.insert(child) {
                            report.error(
                                Code::SlotCycle,
                                format!("lists/{child}"),
                                format!("slot reference cycle through {{{node}}}"),
                            );
                        }
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(child, Mark::Active);
                        let next = children(cat, &cat.lists[child]).into_iter().rev().collect();
                        stack.push((child, next));
                    }
                },
                None => {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                }
            }
        }
    }
}

fn check_phrase(cat: &Catalogue, phrase: &Phrase, report: &mut ValidationReport) {
    let path = format!("phrases/{}", phrase.id);
    let n = phrase.segments.len();
    if n == 0 || n > MAX_SEGMENTS {
        report.error(
            Code::SegmentCount,
            &path,
            format!("{n} segments, expected 1 to {MAX_SEGMENTS}"),
        );
    }
    for (i, list_id) in phrase.segments.iter().enumerate() {
        let spath = format!("{path}/segments/{}", i + 1);
        match cat.lists.get(list_id) {
            None => report.error(
                Code::UnresolvedList,
                spath,
                format!("segment list {list_id} does not exist"),
            ),
            Some(list) if list.depth != 0 => report.error(
                Code::SegmentDepth,
                spath,
                format!("segment list {list_id} has depth {}, expected 0", list.depth),
            ),
            Some(_) => {}
        }
    }
    for lang in &cat.languages {
        let lpath = format!("{path}/layouts/{lang}");
        let Some(layout) = phrase.layouts.get(lang) else {
            report.error(Code::MissingLayout, lpath, "no segment order for this language");
            continue;
        };
        if *lang == cat.source {
            if layout.parts() != super::Layout::identity(n).parts() {
                report.error(
                    Code::SourceLayout,
                    lpath,
                    format!("source layout must be {:?}", super::Layout::identity(n).to_string()),
                );
            }
            continue;
        }
        check_layout(cat, phrase, lang, layout.parts(), &lpath, report);
    }
}

fn check_layout(
    cat: &Catalogue,
    phrase: &Phrase,
    lang: &LanguageTag,
    parts: &[LayoutPart],
    path: &str,
    report: &mut ValidationReport,
) {
    let n = phrase.segments.len();
    // per segment: (whole, a, b) occurrence positions
    let mut seen: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> = vec![Default::default(); n];
    for (pos, part) in parts.iter().enumerate() {
        let seg = part.segment();
        if seg > n {
            report.error(
                Code::LayoutPermutation,
                path,
                format!("{part} names a segment beyond {n}"),
            );
            continue;
        }
        let entry = &mut seen[seg - 1];
        match part {
            LayoutPart::Whole(_) => entry.0.push(pos),
            LayoutPart::PartA(_) => entry.1.push(pos),
            LayoutPart::PartB(_) => entry.2.push(pos),
        }
    }
    for (i, (whole, a, b)) in seen.iter().enumerate() {
        let seg = i + 1;
        let as_whole = whole.len() == 1 && a.is_empty() && b.is_empty();
        let as_split = whole.is_empty() && a.len() == 1 && b.len() == 1;
        if !as_whole && !as_split {
            report.error(
                Code::LayoutPermutation,
                path,
                format!("segment {seg} must appear once, or once each as {seg}a and {seg}b"),
            );
            continue;
        }
        if as_split && a[0] > b[0] {
            report.error(Code::LayoutPermutation, path, format!("{seg}a must precede {seg}b"));
        }
        let Some(list) = phrase.segments.get(i).and_then(|id| cat.lists.get(id)) else {
            continue;
        };
        let split = list.split_languages.contains(lang);
        if split != as_split {
            let msg = if split {
                format!(
                    "list {} is split in {lang}, layout must place {seg}a and {seg}b",
                    list.id
                )
            } else {
                format!("list {} is not split in {lang}, layout must place {seg} whole", list.id)
            };
            report.error(Code::SplitLayoutMismatch, path, msg);
        }
    }
}

/// A phrase whose every segment can render empty in some language can
/// produce an empty sentence.
fn check_empty_renderings(cat: &Catalogue, report: &mut ValidationReport) {
    for lang in &cat.languages {
        let mut memo: HashMap<&ListId, bool> = HashMap::new();
        for phrase in cat.phrases.values() {
            if phrase.segments.is_empty() {
                continue;
            }
            let all_empty = phrase
                .segments
                .iter()
                .all(|id| can_be_empty(cat, id, lang, &mut memo, &mut HashSet::new()));
            if all_empty {
                report.error(
                    Code::EmptyRendering,
                    format!("phrases/{}", phrase.id),
                    format!("some selection renders an empty sentence in {lang}"),
                );
            }
        }
    }
}

fn can_be_empty<'a>(
    cat: &'a Catalogue,
    id: &'a ListId,
    lang: &LanguageTag,
    memo: &mut HashMap<&'a ListId, bool>,
    visiting: &mut HashSet<&'a ListId>,
) -> bool {
    if let Some(&known) = memo.get(id) {
        return known;
    }
    let Some(list) = cat.lists.get(id) else {
        return false;
    };
    if !visiting.insert(id) {
        // cycle, reported elsewhere
        return false;
    }
    let run_can_be_empty =
        |run: &'a TextRun, memo: &mut HashMap<&'a ListId, bool>, visiting: &mut HashSet<&'a ListId>| {
            run.literals().next().is_none() && run.slots().all(|s| can_be_empty(cat, &s.list, lang, memo, visiting))
        };
    let result = list.texts.get(lang).is_some_and(|column| {
        column
            .iter()
            .any(|text| text.runs().all(|run| run_can_be_empty(run, memo, visiting)))
    });
    visiting.remove(id);
    memo.insert(id, result);
    result
}
