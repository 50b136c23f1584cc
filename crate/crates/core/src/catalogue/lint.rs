//! Agreement lint: an adjective may only be offered where every possible
//! subject shares its gender and number.

use super::{Agreement, Catalogue};
use crate::report::{Code, ValidationReport};

/// Warn for every option declaring `agrees_with` whose governing list does not
/// pin down a single set of grammatical features. Options without agreement
/// metadata are skipped.
pub fn lint_agreement(cat: &Catalogue) -> ValidationReport {
    let mut report = ValidationReport::new();
    for list in cat.lists.values() {
        for meta in &list.options {
            let Some(Agreement::AgreesWith(target)) = &meta.agreement else {
                continue;
            };
            let Some(governing) = cat.lists.get(target) else {
                continue;
            };
            let path = format!("lists/{}/options/{}", list.id, meta.id);
            let mut first = None;
            let mut undeclared = Vec::new();
            let mut conflict = None;
            for subject in &governing.options {
                match &subject.agreement {
                    Some(Agreement::Features(features)) => match first {
                        None => first = Some((&subject.id, features)),
                        Some((first_id, first_features)) if first_features != features => {
                            conflict.get_or_insert((first_id, &subject.id));
                        }
                        Some(_) => {}
                    },
                    _ => undeclared.push(subject.id.as_str()),
                }
            }
            if let Some((a, b)) = conflict {
                report.warning(
                    Code::AgreementConflict,
                    &path,
                    format!("subjects {a} and {b} of {target} differ in gender or number"),
                );
            }
            if !undeclared.is_empty() {
                report.warning(
                    Code::AgreementUndeclared,
                    &path,
                    format!("subjects of {target} without gender/number: {}", undeclared.join(", ")),
                );
            }
        }
    }
    report
}
