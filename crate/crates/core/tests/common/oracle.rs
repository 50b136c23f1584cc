//! Reference implementations that work on the raw catalogue JSON, without the
//! crate's parsed model: a textual renderer and brute-force counting and
//! enumeration.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;
use serde_json::{json, Map, Value};

static SLOT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{\{?([^{}#\s]+)(?:#(\d+))?\}?\}").unwrap());
static GLUE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s*\(-\)\s*").unwrap());
static SPACE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s+").unwrap());

pub struct RawCatalogue {
    doc: Value,
}

impl RawCatalogue {
    pub fn new(bytes: &[u8]) -> Self {
        Self {
            doc: serde_json::from_slice(bytes).unwrap(),
        }
    }

    fn list(&self, id: &str) -> &Value {
        &self.doc["lists"][id]
    }

    fn source(&self) -> &str {
        self.doc["source"].as_str().unwrap()
    }

    pub fn phrase_ids(&self) -> Vec<String> {
        self.doc["phrases"].as_object().unwrap().keys().cloned().collect()
    }

    pub fn languages(&self) -> Vec<String> {
        self.doc["languages"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| l.as_str().unwrap().to_owned())
            .collect()
    }

    fn option_ids(&self, list: &str) -> Vec<String> {
        self.list(list)["options"]
            .as_array()
            .unwrap()
            .iter()
            .map(|o| match o {
                Value::String(s) => s.clone(),
                other => other["id"].as_str().unwrap().to_owned(),
            })
            .collect()
    }

    /// The one or two raw strings of an option in `lang`.
    fn raw_parts(&self, list: &str, option: &str, lang: &str) -> Vec<String> {
        let index = self.option_ids(list).iter().position(|o| o == option).unwrap();
        match &self.list(list)["texts"][lang][index] {
            Value::String(s) => vec![s.clone()],
            Value::Array(parts) => parts.iter().map(|p| p.as_str().unwrap().to_owned()).collect(),
            other => panic!("unexpected text {other}"),
        }
    }

    fn segments(&self, phrase: &str) -> Vec<String> {
        self.doc["phrases"][phrase]["segments"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().to_owned())
            .collect()
    }

    /// Slots of a source text, as `(list, ordinal)` in order of appearance.
    fn slots_in(&self, text: &str, counter: &mut HashMap<String, u32>) -> Vec<(String, u32)> {
        SLOT.captures_iter(text)
            .map(|c| {
                let name = c[1].to_owned();
                let seen = counter.entry(name.clone()).or_insert(0);
                *seen += 1;
                let ordinal = c.get(2).map_or(*seen, |m| m.as_str().parse().unwrap());
                (name, ordinal)
            })
            .collect()
    }

    fn substitute(&self, text: &str, choice: &Value, lang: &str, counter: &mut HashMap<String, u32>) -> String {
        let mut out = String::new();
        let mut last = 0;
        for c in SLOT.captures_iter(text) {
            let whole = c.get(0).unwrap();
            out.push_str(&text[last..whole.start()]);
            last = whole.end();
            let name = &c[1];
            let seen = counter.entry(name.to_owned()).or_insert(0);
            *seen += 1;
            let ordinal: u32 = c.get(2).map_or(*seen, |m| m.as_str().parse().unwrap());
            let slots = &choice["slots"];
            let child = match slots.get(format!("{name}#{ordinal}")) {
                Some(child) => child,
                None if ordinal == 1 => &slots[name],
                None => panic!("no choice for {name}#{ordinal}"),
            };
            let option = child["option"].as_str().unwrap();
            let mut child_counter = HashMap::new();
            let child_text: Vec<String> = self
                .raw_parts(name, option, lang)
                .iter()
                .map(|p| self.substitute(p, child, lang, &mut child_counter))
                .collect();
            out.push(' ');
            out.push_str(&child_text.join(" "));
            out.push(' ');
        }
        out.push_str(&text[last..]);
        out
    }

    /// Substitute slots textually, strip markers, normalize spaces, capitalize.
    pub fn render(&self, selection: &Value, lang: &str) -> String {
        let phrase = selection["phrase"].as_str().unwrap();
        let segments = self.segments(phrase);
        let layout = self.doc["phrases"][phrase]["layouts"][lang].as_str().unwrap();
        let mut pieces = Vec::new();
        for token in layout.split_whitespace() {
            let (number, part) = match token.strip_suffix('a') {
                Some(n) => (n, Some(0)),
                None => match token.strip_suffix('b') {
                    Some(n) => (n, Some(1)),
                    None => (token, None),
                },
            };
            let seg: usize = number.parse().unwrap();
            let choice = &selection["choices"][seg.to_string()];
            let option = choice["option"].as_str().unwrap();
            let parts = self.raw_parts(&segments[seg - 1], option, lang);
            // ordinals are counted across both parts of a split text
            let mut counter = HashMap::new();
            let texts: Vec<String> = parts
                .iter()
                .map(|p| self.substitute(p, choice, lang, &mut counter))
                .collect();
            match part {
                None => pieces.push(texts.join(" ")),
                Some(i) => pieces.push(texts.get(i).cloned().unwrap_or_default()),
            }
        }
        let text = pieces.join(" ").replace("[Empty]", " ");
        let text = GLUE.replace_all(&text, "");
        let text = SPACE.replace_all(text.trim(), " ").into_owned();
        capitalize(&text)
    }

    fn option_count(&self, list: &str, option: &str) -> u128 {
        let source = self.raw_parts(list, option, self.source()).join(" ");
        let mut counter = HashMap::new();
        self.slots_in(&source, &mut counter)
            .iter()
            .map(|(child, _)| self.list_count(child))
            .product()
    }

    fn list_count(&self, list: &str) -> u128 {
        self.option_ids(list).iter().map(|o| self.option_count(list, o)).sum()
    }

    /// Product over segments of the number of complete choices per list.
    pub fn count(&self, phrase: &str) -> u128 {
        self.segments(phrase).iter().map(|l| self.list_count(l)).product()
    }

    fn all_choices(&self, list: &str) -> Vec<Value> {
        let mut out = Vec::new();
        for option in self.option_ids(list) {
            let source = self.raw_parts(list, &option, self.source()).join(" ");
            let mut counter = HashMap::new();
            let slots = self.slots_in(&source, &mut counter);
            let mut partial: Vec<Map<String, Value>> = vec![Map::new()];
            for (child, ordinal) in &slots {
                let children = self.all_choices(child);
                partial = partial
                    .into_iter()
                    .flat_map(|m| {
                        children.iter().map(move |c| {
                            let mut m = m.clone();
                            m.insert(format!("{child}#{ordinal}"), c.clone());
                            m
                        })
                    })
                    .collect();
            }
            for slots in partial {
                out.push(if slots.is_empty() {
                    json!({ "option": option })
                } else {
                    json!({ "option": option, "slots": slots })
                });
            }
        }
        out
    }

    /// Every complete selection of `phrase`, as selection JSON.
    pub fn enumerate(&self, phrase: &str) -> Vec<Value> {
        let mut all: Vec<Map<String, Value>> = vec![Map::new()];
        for (i, list) in self.segments(phrase).iter().enumerate() {
            let choices = self.all_choices(list);
            all = all
                .into_iter()
                .flat_map(|m| {
                    choices.iter().map(move |c| {
                        let mut m = m.clone();
                        m.insert((i + 1).to_string(), c.clone());
                        m
                    })
                })
                .collect();
        }
        all.into_iter()
            .map(|choices| json!({ "phrase": phrase, "choices": choices }))
            .collect()
    }
}

fn capitalize(text: &str) -> String {
    match text.char_indices().find(|(_, c)| c.is_alphabetic()) {
        Some((i, c)) => format!("{}{}{}", &text[..i], c.to_uppercase(), &text[i + c.len_utf8()..]),
        None => text.to_owned(),
    }
}
