use crate::catalogue::{EMPTY_MARKER, GLUE};
use crate::report::{Code, Finding};

/// Check a rendered sentence: nonempty, trimmed, single spaces, capital first
/// letter and no leftover markup. Findings carry `lang` as their path.
pub fn check_surface_invariants(text: &str, lang: &str) -> Vec<Finding> {
    let mut out = check_whitespace(text, lang);
    if text.trim().is_empty() {
        return out;
    }
    if text.chars().find(|c| c.is_alphabetic()).is_some_and(char::is_lowercase) {
        out.push(Finding::new(
            Code::LowercaseStart,
            lang,
            "first letter is not uppercase",
        ));
    }
    let markers: Vec<&str> = ["{", "}", GLUE, EMPTY_MARKER]
        .into_iter()
        .filter(|m| text.contains(m))
        .collect();
    if !markers.is_empty() {
        out.push(Finding::new(
            Code::UnresolvedMarker,
            lang,
            format!("markup left in text: {}", markers.join(" ")),
        ));
    }
    out
}

/// The whitespace subset of [`check_surface_invariants`], applied to joker
/// sentences.
pub fn check_whitespace(text: &str, lang: &str) -> Vec<Finding> {
    let mut out = Vec::new();
    if text.trim().is_empty() {
        out.push(Finding::new(Code::EmptyText, lang, "text is empty"));
        return out;
    }
    if text.trim() != text {
        out.push(Finding::new(
            Code::LeadingOrTrailingSpace,
            lang,
            "text starts or ends with whitespace",
        ));
    }
    let mut prev_space = false;
    for c in text.chars() {
        let space = c.is_whitespace();
        if space && prev_space {
            out.push(Finding::new(
                Code::DoubleSpace,
                lang,
                "consecutive whitespace characters",
            ));
            break;
        }
        prev_space = space;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(text: &str) -> Vec<Code> {
        let mut codes: Vec<Code> = check_surface_invariants(text, "it")
            .into_iter()
            .map(|f| f.code)
            .collect();
        codes.sort();
        codes
    }

    #[test]
    fn clean_sentence() {
        assert!(codes("Il legame degli accumuli di neve ventata è in corso.").is_empty());
        assert!(codes("«Über» alles.").is_empty());
    }

    #[test]
    fn violations() {
        assert_eq!(codes("il  legame"), [Code::DoubleSpace, Code::LowercaseStart]);
        assert_eq!(codes("Reste {Gebiet}"), [Code::UnresolvedMarker]);
        assert_eq!(codes("Reste (-)."), [Code::UnresolvedMarker]);
        assert_eq!(codes(" Reste."), [Code::LeadingOrTrailingSpace]);
        assert_eq!(codes(""), [Code::EmptyText]);
        assert_eq!(codes("  "), [Code::EmptyText]);
    }
}
