//! Catalogue document format (JSON).
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "languages": ["de", "fr", "it", "en"],
//!   "source": "de",
//!   "lists": {
//!     "seg2_of_p22": {
//!       "depth": 0,
//!       "split": ["it"],
//!       "options": ["of", {"id": "mutual", "hint": {"de": "..."}}],
//!       "texts": {
//!         "de": ["", "innerhalb"],
//!         "it": [["de(-)", ""], ["reciproco de(-)", ""]]
//!       }
//!     }
//!   },
//!   "phrases": {
//!     "p22": {
//!       "number": 22,
//!       "title": "...",
//!       "segments": ["seg1_of_p22", "seg2_of_p22"],
//!       "layouts": {"de": "1 2", "it": "1 2a 2b"}
//!     }
//!   }
//! }
//! ```
//!
//! Text columns are parallel to `options`. Split languages carry `[a, b]`
//! pairs. Inline markup is described in [`super::markup`]. Serialization is
//! canonical: lists and phrases sorted by id, per-language maps in catalogue
//! language order, two-space indentation and a trailing newline.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::marker::PhantomData;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};
use serde_json::{json, Map, Value};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use super::markup::{format_run_counted, parse_run_counted, MarkupError, OrdinalCounter};
use super::{
    Agreement, Catalogue, GrammaticalFeatures, Layout, LayoutParseError, OptionList, OptionMeta, OptionText, Phrase,
    SCHEMA_VERSION,
};
use crate::ids::{LanguageTag, ListId, PhraseId};

#[derive(Debug, Error)]
pub enum CatalogueError {
    #[error("syntax error at line {line}, column {column} (path {path}): {message}")]
    Syntax {
        line: usize,
        column: usize,
        path: String,
        message: String,
    },
    #[error("unsupported schema_version {0} (supported: {SCHEMA_VERSION})")]
    UnsupportedSchemaVersion(u64),
    #[error("duplicate {kind} id {id:?} at {path}")]
    DuplicateId {
        kind: &'static str,
        id: String,
        path: String,
    },
    #[error("invalid {kind} id {id:?} at {path}")]
    InvalidId {
        kind: &'static str,
        id: String,
        path: String,
    },
    #[error("unresolvable list reference {list:?} at {path}")]
    UnresolvedList { list: String, path: String },
    #[error("undeclared language {lang:?} at {path}")]
    UnknownLanguage { lang: String, path: String },
    #[error("invalid option text at {path}: {source}")]
    Markup {
        path: String,
        #[source]
        source: MarkupError,
    },
    #[error("invalid layout at {path}: {source}")]
    Layout {
        path: String,
        #[source]
        source: LayoutParseError,
    },
    #[error("invalid agreement at {path}: exactly one of agrees_with or features is required")]
    Agreement { path: String },
}

impl std::error::Error for LayoutParseError {}

/// JSON object read as ordered pairs, keeping duplicate keys so they can be
/// reported instead of silently overwritten.
struct Pairs<V>(Vec<(String, V)>);

impl<V> Default for Pairs<V> {
    fn default() -> Self {
        Pairs(Vec::new())
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Pairs<V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PairsVisitor<V>(PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for PairsVisitor<V> {
            type Value = Pairs<V>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(entry) = map.next_entry::<String, V>()? {
                    out.push(entry);
                }
                Ok(Pairs(out))
            }
        }

        deserializer.deserialize_map(PairsVisitor(PhantomData))
    }
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalogue {
    #[allow(dead_code)]
    schema_version: u32,
    languages: Vec<String>,
    source: String,
    #[serde(default)]
    lists: Pairs<RawList>,
    #[serde(default)]
    phrases: Pairs<RawPhrase>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawList {
    depth: u8,
    #[serde(default)]
    split: Vec<String>,
    options: Vec<RawOption>,
    #[serde(default)]
    texts: Pairs<Vec<RawText>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawOption {
    Id(String),
    Full(RawOptionMeta),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptionMeta {
    id: String,
    #[serde(default)]
    hint: Pairs<String>,
    #[serde(default)]
    agreement: Option<RawAgreement>,
    #[serde(default)]
    future: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgreement {
    #[serde(default)]
    agrees_with: Option<String>,
    #[serde(default)]
    features: Option<Pairs<GrammaticalFeatures>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawText {
    Whole(String),
    Split(String, String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhrase {
    number: u32,
    #[serde(default)]
    title: String,
    segments: Vec<String>,
    #[serde(default)]
    layouts: Pairs<String>,
}

fn nfc(s: &str) -> String {
    s.nfc().collect()
}

fn syntax_error(err: serde_path_to_error::Error<serde_json::Error>) -> CatalogueError {
    let path = err.path().to_string();
    let inner = err.into_inner();
    CatalogueError::Syntax {
        line: inner.line(),
        column: inner.column(),
        path,
        message: inner.to_string(),
    }
}

fn check_id(kind: &'static str, id: &str, path: &str) -> Result<(), CatalogueError> {
    let bad_char = |c: char| c.is_whitespace() || "{}#/".contains(c);
    if id.is_empty() || id.chars().any(bad_char) {
        return Err(CatalogueError::InvalidId {
            kind,
            id: id.to_owned(),
            path: path.to_owned(),
        });
    }
    Ok(())
}

struct Languages {
    ordered: Vec<LanguageTag>,
    known: HashSet<String>,
}

impl Languages {
    fn resolve(&self, lang: &str, path: &str) -> Result<LanguageTag, CatalogueError> {
        let lang = nfc(lang);
        if self.known.contains(&lang) {
            Ok(LanguageTag::new(lang))
        } else {
            Err(CatalogueError::UnknownLanguage {
                lang,
                path: path.to_owned(),
            })
        }
    }
}

/// Parse a catalogue document. All strings are normalized to NFC.
pub fn parse_catalogue(bytes: &[u8]) -> Result<Catalogue, CatalogueError> {
    let probe: VersionProbe =
        serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_slice(bytes)).map_err(syntax_error)?;
    match probe.schema_version {
        Some(v) if v == u64::from(SCHEMA_VERSION) => {}
        Some(v) => return Err(CatalogueError::UnsupportedSchemaVersion(v)),
        None => {
            return Err(CatalogueError::Syntax {
                line: 1,
                column: 1,
                path: ".".into(),
                message: "missing field `schema_version`".into(),
            })
        }
    }
    let raw: RawCatalogue =
        serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_slice(bytes)).map_err(syntax_error)?;
    convert(raw)
}

fn convert(raw: RawCatalogue) -> Result<Catalogue, CatalogueError> {
    let mut langs = Languages {
        ordered: Vec::new(),
        known: HashSet::new(),
    };
    for (i, code) in raw.languages.iter().enumerate() {
        let code = nfc(code);
        let path = format!("languages/{i}");
        check_id("language", &code, &path)?;
        if !langs.known.insert(code.clone()) {
            return Err(CatalogueError::DuplicateId {
                kind: "language",
                id: code,
                path,
            });
        }
        langs.ordered.push(LanguageTag::new(code));
    }
    let source = langs.resolve(&raw.source, "source")?;

    let mut lists = BTreeMap::new();
    for (id, raw_list) in raw.lists.0 {
        let id = nfc(&id);
        let path = format!("lists/{id}");
        check_id("list", &id, &path)?;
        let list = convert_list(ListId::new(id.clone()), raw_list, &langs, &path)?;
        if lists.insert(list.id.clone(), list).is_some() {
            return Err(CatalogueError::DuplicateId { kind: "list", id, path });
        }
    }

    let mut phrases = BTreeMap::new();
    for (id, raw_phrase) in raw.phrases.0 {
        let id = nfc(&id);
        let path = format!("phrases/{id}");
        check_id("phrase", &id, &path)?;
        let mut layouts = BTreeMap::new();
        for (lang, layout) in raw_phrase.layouts.0 {
            let lpath = format!("{path}/layouts/{lang}");
            let lang = langs.resolve(&lang, &lpath)?;
            let layout: Layout = layout.parse().map_err(|source| CatalogueError::Layout {
                path: lpath.clone(),
                source,
            })?;
            if layouts.insert(lang.clone(), layout).is_some() {
                return Err(CatalogueError::DuplicateId {
                    kind: "layout language",
                    id: lang.to_string(),
                    path: lpath,
                });
            }
        }
        let phrase = Phrase {
            id: PhraseId::new(id.clone()),
            number: raw_phrase.number,
            title: nfc(&raw_phrase.title),
            segments: raw_phrase.segments.iter().map(|s| ListId::new(nfc(s))).collect(),
            layouts,
        };
        if phrases.insert(phrase.id.clone(), phrase).is_some() {
            return Err(CatalogueError::DuplicateId {
                kind: "phrase",
                id,
                path,
            });
        }
    }

    let catalogue = Catalogue {
        schema_version: SCHEMA_VERSION,
        languages: langs.ordered,
        source,
        lists,
        phrases,
    };
    check_references(&catalogue)?;
    Ok(catalogue)
}

fn convert_list(id: ListId, raw: RawList, langs: &Languages, path: &str) -> Result<OptionList, CatalogueError> {
    let mut split_languages = BTreeSet::new();
    for (i, lang) in raw.split.iter().enumerate() {
        split_languages.insert(langs.resolve(lang, &format!("{path}/split/{i}"))?);
    }

    let mut options = Vec::with_capacity(raw.options.len());
    let mut seen = HashSet::new();
    for (i, raw_option) in raw.options.into_iter().enumerate() {
        let opath = format!("{path}/options/{i}");
        let meta = match raw_option {
            RawOption::Id(id) => OptionMeta::new(nfc(&id)),
            RawOption::Full(full) => {
                let mut meta = OptionMeta::new(nfc(&full.id));
                for (lang, hint) in full.hint.0 {
                    let lang = langs.resolve(&lang, &format!("{opath}/hint"))?;
                    meta.hints.insert(lang, nfc(&hint));
                }
                meta.agreement = full
                    .agreement
                    .map(|a| convert_agreement(a, langs, &format!("{opath}/agreement")))
                    .transpose()?;
                meta.future = full.future.as_deref().map(nfc);
                meta
            }
        };
        check_id("option", meta.id.as_str(), &opath)?;
        if !seen.insert(meta.id.clone()) {
            return Err(CatalogueError::DuplicateId {
                kind: "option",
                id: meta.id.to_string(),
                path: opath,
            });
        }
        options.push(meta);
    }

    let mut texts = BTreeMap::new();
    for (lang, column) in raw.texts.0 {
        let cpath = format!("{path}/texts/{lang}");
        let lang = langs.resolve(&lang, &cpath)?;
        let column = column
            .into_iter()
            .enumerate()
            .map(|(i, raw_text)| {
                convert_text(raw_text).map_err(|source| CatalogueError::Markup {
                    path: format!("{cpath}/{i}"),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if texts.insert(lang.clone(), column).is_some() {
            return Err(CatalogueError::DuplicateId {
                kind: "text language",
                id: lang.to_string(),
                path: cpath,
            });
        }
    }

    Ok(OptionList {
        id,
        depth: raw.depth,
        split_languages,
        options,
        texts,
    })
}

fn convert_agreement(raw: RawAgreement, langs: &Languages, path: &str) -> Result<Agreement, CatalogueError> {
    match (raw.agrees_with, raw.features) {
        (Some(list), None) => Ok(Agreement::AgreesWith(ListId::new(nfc(&list)))),
        (None, Some(features)) => {
            let mut map = BTreeMap::new();
            for (lang, f) in features.0 {
                let lang = langs.resolve(&lang, path)?;
                map.insert(
                    lang,
                    GrammaticalFeatures {
                        gender: f.gender.as_deref().map(nfc),
                        number: f.number.as_deref().map(nfc),
                    },
                );
            }
            Ok(Agreement::Features(map))
        }
        _ => Err(CatalogueError::Agreement { path: path.to_owned() }),
    }
}

fn convert_text(raw: RawText) -> Result<OptionText, MarkupError> {
    let mut counter = OrdinalCounter::new();
    Ok(match raw {
        RawText::Whole(s) => OptionText::Whole(parse_run_counted(&s, &mut counter)?),
        RawText::Split(a, b) => OptionText::Split(
            parse_run_counted(&a, &mut counter)?,
            parse_run_counted(&b, &mut counter)?,
        ),
    })
}

fn check_references(cat: &Catalogue) -> Result<(), CatalogueError> {
    let unresolved = |list: &ListId, path: String| CatalogueError::UnresolvedList {
        list: list.to_string(),
        path,
    };
    for phrase in cat.phrases.values() {
        for (i, list) in phrase.segments.iter().enumerate() {
            if !cat.lists.contains_key(list) {
                return Err(unresolved(list, format!("phrases/{}/segments/{i}", phrase.id)));
            }
        }
    }
    for list in cat.lists.values() {
        for (lang, column) in &list.texts {
            for (i, text) in column.iter().enumerate() {
                for slot in text.slots() {
                    if !cat.lists.contains_key(&slot.list) {
                        return Err(unresolved(&slot.list, format!("lists/{}/texts/{lang}/{i}", list.id)));
                    }
                }
            }
        }
        for (i, meta) in list.options.iter().enumerate() {
            if let Some(Agreement::AgreesWith(target)) = &meta.agreement {
                if !cat.lists.contains_key(target) {
                    return Err(unresolved(target, format!("lists/{}/options/{i}/agreement", list.id)));
                }
            }
        }
    }
    Ok(())
}

/// Canonical document bytes for `cat`.
pub fn serialize_catalogue(cat: &Catalogue) -> Vec<u8> {
    let lang_order = |map_keys: &dyn Fn(&LanguageTag) -> bool| -> Vec<&LanguageTag> {
        cat.languages.iter().filter(|l| map_keys(l)).collect()
    };
    let depth_of = |id: &ListId| cat.lists.get(id).map(|l| l.depth);

    let mut lists = Map::new();
    for list in cat.lists.values() {
        let mut obj = Map::new();
        obj.insert("depth".into(), json!(list.depth));
        if !list.split_languages.is_empty() {
            let split: Vec<&LanguageTag> = lang_order(&|l| list.split_languages.contains(l));
            obj.insert("split".into(), json!(split));
        }
        let options: Vec<Value> = list
            .options
            .iter()
            .map(|meta| option_value(meta, &cat.languages))
            .collect();
        obj.insert("options".into(), Value::Array(options));
        let mut texts = Map::new();
        for lang in lang_order(&|l| list.texts.contains_key(l)) {
            let column: Vec<Value> = list.texts[lang]
                .iter()
                .map(|text| text_value(text, &depth_of))
                .collect();
            texts.insert(lang.to_string(), Value::Array(column));
        }
        obj.insert("texts".into(), Value::Object(texts));
        lists.insert(list.id.to_string(), Value::Object(obj));
    }

    let mut phrases = Map::new();
    for phrase in cat.phrases.values() {
        let mut layouts = Map::new();
        for lang in lang_order(&|l| phrase.layouts.contains_key(l)) {
            layouts.insert(lang.to_string(), json!(phrase.layouts[lang].to_string()));
        }
        let mut obj = Map::new();
        obj.insert("number".into(), json!(phrase.number));
        obj.insert("title".into(), json!(phrase.title));
        obj.insert("segments".into(), json!(phrase.segments));
        obj.insert("layouts".into(), Value::Object(layouts));
        phrases.insert(phrase.id.to_string(), Value::Object(obj));
    }

    let mut root = Map::new();
    root.insert("schema_version".into(), json!(cat.schema_version));
    root.insert("languages".into(), json!(cat.languages));
    root.insert("source".into(), json!(cat.source));
    root.insert("lists".into(), Value::Object(lists));
    root.insert("phrases".into(), Value::Object(phrases));

    let mut out = serde_json::to_vec_pretty(&Value::Object(root)).expect("JSON values serialize");
    out.push(b'\n');
    out
}

fn option_value(meta: &OptionMeta, languages: &[LanguageTag]) -> Value {
    if !meta.has_metadata() {
        return json!(meta.id);
    }
    let mut obj = Map::new();
    obj.insert("id".into(), json!(meta.id));
    if !meta.hints.is_empty() {
        let mut hints = Map::new();
        for lang in languages.iter().filter(|l| meta.hints.contains_key(*l)) {
            hints.insert(lang.to_string(), json!(meta.hints[lang]));
        }
        obj.insert("hint".into(), Value::Object(hints));
    }
    match &meta.agreement {
        Some(Agreement::AgreesWith(list)) => {
            obj.insert("agreement".into(), json!({ "agrees_with": list }));
        }
        Some(Agreement::Features(features)) => {
            let mut map = Map::new();
            for lang in languages.iter().filter(|l| features.contains_key(*l)) {
                map.insert(lang.to_string(), json!(features[lang]));
            }
            obj.insert("agreement".into(), json!({ "features": map }));
        }
        None => {}
    }
    if let Some(future) = &meta.future {
        obj.insert("future".into(), json!(future));
    }
    Value::Object(obj)
}

fn text_value(text: &OptionText, depth_of: &dyn Fn(&ListId) -> Option<u8>) -> Value {
    let mut counter = OrdinalCounter::new();
    match text {
        OptionText::Whole(run) => json!(format_run_counted(run, depth_of, &mut counter)),
        OptionText::Split(a, b) => json!([
            format_run_counted(a, depth_of, &mut counter),
            format_run_counted(b, depth_of, &mut counter)
        ]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::{Fragment, LayoutPart, SlotRef};

    pub(crate) const MINIMAL: &str = r#"{
  "schema_version": 1,
  "languages": ["en"],
  "source": "en",
  "lists": {"only": {"depth": 0, "options": ["test"], "texts": {"en": ["Test."]}}},
  "phrases": {"p1": {"number": 1, "title": "Test.", "segments": ["only"], "layouts": {"en": "1"}}}
}"#;

    #[test]
    fn minimal_catalogue() {
        let cat = parse_catalogue(MINIMAL.as_bytes()).unwrap();
        assert_eq!(cat.phrases.len(), 1);
        assert_eq!(cat.lists.len(), 1);
        assert_eq!(cat.lists["only"].options.len(), 1);
        assert_eq!(cat.phrases["p1"].layouts["en"].0, vec![LayoutPart::Whole(1)]);
    }

    #[test]
    fn minimal_round_trip() {
        let cat = parse_catalogue(MINIMAL.as_bytes()).unwrap();
        let bytes = serialize_catalogue(&cat);
        assert_eq!(parse_catalogue(&bytes).unwrap(), cat);
        assert_eq!(serialize_catalogue(&parse_catalogue(&bytes).unwrap()), bytes);
    }

    #[test]
    fn unknown_schema_version() {
        let doc = MINIMAL.replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(matches!(
            parse_catalogue(doc.as_bytes()),
            Err(CatalogueError::UnsupportedSchemaVersion(7))
        ));
    }

    #[test]
    fn syntax_error_carries_line_and_path() {
        let doc = MINIMAL.replace("\"number\": 1", "\"number\": \"one\"");
        match parse_catalogue(doc.as_bytes()) {
            Err(CatalogueError::Syntax { line, path, .. }) => {
                assert_eq!(line, 6);
                assert!(path.contains("p1"), "{path}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_catalogue(b"{\"schema_version\": 1,"),
            Err(CatalogueError::Syntax { .. })
        ));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let doc = MINIMAL.replace("[\"test\"]", "[\"test\", \"test\"]");
        assert!(matches!(
            parse_catalogue(doc.as_bytes()),
            Err(CatalogueError::DuplicateId { kind: "option", .. })
        ));
        let doc = MINIMAL.replace(
            "\"lists\": {",
            "\"lists\": {\"only\": {\"depth\": 0, \"options\": [\"x\"]}, ",
        );
        assert!(matches!(
            parse_catalogue(doc.as_bytes()),
            Err(CatalogueError::DuplicateId { kind: "list", .. })
        ));
    }

    #[test]
    fn unresolvable_references_are_rejected() {
        let doc = MINIMAL.replace("\"segments\": [\"only\"]", "\"segments\": [\"nope\"]");
        assert!(matches!(
            parse_catalogue(doc.as_bytes()),
            Err(CatalogueError::UnresolvedList { .. })
        ));
        let doc = MINIMAL.replace("[\"Test.\"]", "[\"Test {missing}.\"]");
        assert!(matches!(
            parse_catalogue(doc.as_bytes()),
            Err(CatalogueError::UnresolvedList { .. })
        ));
    }

    #[test]
    fn undeclared_language_is_rejected() {
        let doc = MINIMAL.replace("{\"en\": \"1\"}", "{\"en\": \"1\", \"xx\": \"1\"}");
        assert!(matches!(
            parse_catalogue(doc.as_bytes()),
            Err(CatalogueError::UnknownLanguage { .. })
        ));
    }

    #[test]
    fn texts_are_nfc_normalized() {
        // "Grashänge" with a combining diaeresis
        let decomposed = "Grasha\u{0308}nge";
        let doc = MINIMAL.replace("Test.", decomposed);
        let cat = parse_catalogue(doc.as_bytes()).unwrap();
        let OptionText::Whole(run) = &cat.lists["only"].texts["en"][0] else {
            panic!()
        };
        let Fragment::Literal(lit) = &run.0[0] else { panic!() };
        assert_eq!(lit.text, "Grash\u{e4}nge");
    }

    #[test]
    fn repeated_slot_ordinals_match_independent_scan() {
        let doc = MINIMAL
            .replace(
                "\"lists\": {",
                "\"lists\": {\"Gebiet\": {\"depth\": 1, \"options\": [\"a\"], \"texts\": {\"en\": [\"x\"]}}, ",
            )
            .replace("[\"Test.\"]", "[\"in {Gebiet} and {Gebiet}.\"]");
        let cat = parse_catalogue(doc.as_bytes()).unwrap();
        let refs: Vec<SlotRef> = cat.lists["only"].texts["en"][0].slots().cloned().collect();

        // independent scan: count `{Gebiet}` occurrences left to right
        let raw = "in {Gebiet} and {Gebiet}.";
        let expected: Vec<SlotRef> = raw
            .match_indices("{Gebiet}")
            .enumerate()
            .map(|(i, _)| SlotRef::new("Gebiet", i as u32 + 1))
            .collect();
        assert_eq!(expected.len(), 2);
        assert_eq!(refs, expected);
    }
}
