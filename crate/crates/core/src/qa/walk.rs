use std::collections::HashSet;

use serde::Serialize;

use crate::catalogue::Catalogue;
use crate::ids::{LanguageTag, ListId, OptionId};
use crate::render::option_label;
use crate::report::{Code, ValidationReport};

/// One option with its text in every language side by side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReviewRow {
    pub list: ListId,
    pub option: OptionId,
    /// Display text per catalogue language; `[Empty]` for empty options,
    /// split parts joined by ` ‖ `.
    pub texts: Vec<String>,
    pub hints: Vec<Option<String>>,
    pub reachable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReviewSheet {
    pub languages: Vec<LanguageTag>,
    /// Ordered by list id, then option order within the list.
    pub rows: Vec<ReviewRow>,
    /// `UNREACHABLE_LIST` warnings for lists no phrase can reach.
    pub report: ValidationReport,
}

impl ReviewSheet {
    /// Tab-separated export: `list`, `option`, then one column per language.
    /// Hints are appended to their cell in parentheses.
    pub fn to_tsv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .delimiter(b'\t')
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(Vec::new());
        let mut header = vec!["list".to_owned(), "option".to_owned()];
        header.extend(self.languages.iter().map(|l| l.to_string()));
        writer.write_record(&header).expect("write to memory");
        for row in &self.rows {
            let mut record = vec![row.list.to_string(), row.option.to_string()];
            for (text, hint) in row.texts.iter().zip(&row.hints) {
                record.push(match hint {
                    Some(h) => format!("{text} ({h})"),
                    None => text.clone(),
                });
            }
            writer.write_record(&record).expect("write to memory");
        }
        let bytes = writer.into_inner().expect("flush to memory");
        String::from_utf8(bytes).expect("UTF-8 input yields UTF-8 output")
    }
}

/// Every option of every list, all languages side by side, for sequential
/// review. Lists unreachable from any phrase are included and flagged.
pub fn option_walk(cat: &Catalogue) -> ReviewSheet {
    let reachable: HashSet<&ListId> = cat
        .phrases
        .values()
        .flat_map(|p| cat.reachable_lists(p))
        .map(|l| &l.id)
        .collect();
    let mut report = ValidationReport::new();
    let mut rows = Vec::new();
    for list in cat.lists.values() {
        let is_reachable = reachable.contains(&list.id);
        if !is_reachable {
            report.warning(
                Code::UnreachableList,
                format!("lists/{}", list.id),
                "no phrase reaches this list",
            );
        }
        for entry in list.entries() {
            rows.push(ReviewRow {
                list: list.id.clone(),
                option: entry.id().clone(),
                texts: cat
                    .languages
                    .iter()
                    .map(|l| option_label(cat, entry.text(l.as_str())))
                    .collect(),
                hints: cat
                    .languages
                    .iter()
                    .map(|l| entry.hint(l.as_str()).map(str::to_owned))
                    .collect(),
                reachable: is_reachable,
            });
        }
    }
    ReviewSheet {
        languages: cat.languages.clone(),
        rows,
        report,
    }
}
