//! Phrase finder over source-language option texts.
//!
//! Each phrase is a bag of the terms found in every option of every list it
//! can reach, at any depth. Terms are NFC-normalized, lowercased and split on
//! anything that is not alphanumeric; there is no stemming, so compounds stay
//! whole. Ranking is coverage first (number of distinct query terms matched),
//! then TF-IDF score `Σ (1 + ln tf) · ln(1 + N / df)`, then phrase number.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;
use unicode_normalization::UnicodeNormalization;

use crate::catalogue::Catalogue;
use crate::ids::PhraseId;

/// Split text into normalized search terms.
pub fn tokenize(text: &str) -> Vec<String> {
    let normalized: String = text.nfc().collect::<String>().to_lowercase();
    normalized
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct IndexedPhrase {
    id: PhraseId,
    number: u32,
    title: String,
    tf: BTreeMap<String, u32>,
}

/// Immutable index built from one catalogue snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhraseIndex {
    catalogue_hash: String,
    phrases: Vec<IndexedPhrase>,
    df: BTreeMap<String, u32>,
}

impl PhraseIndex {
    /// Content hash of the catalogue this index was built from.
    pub fn catalogue_hash(&self) -> &str {
        &self.catalogue_hash
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.df.len()
    }

    /// Phrases indexed under `term` (already normalized), by number.
    pub fn phrases_with(&self, term: &str) -> Vec<&PhraseId> {
        self.phrases
            .iter()
            .filter(|p| p.tf.contains_key(term))
            .map(|p| &p.id)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchHit {
    pub phrase: PhraseId,
    pub number: u32,
    pub title: String,
    /// Distinct query terms matched.
    pub coverage: usize,
    pub score: f64,
    pub matched_terms: Vec<String>,
}

pub fn build_index(cat: &Catalogue) -> PhraseIndex {
    let mut phrases = Vec::with_capacity(cat.phrases.len());
    let mut df: BTreeMap<String, u32> = BTreeMap::new();
    for phrase in cat.phrases_by_number() {
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for list in cat.reachable_lists(phrase) {
            let Some(column) = list.texts.get(&cat.source) else {
                continue;
            };
            for literal in column.iter().flat_map(|t| t.runs()).flat_map(|r| r.literals()) {
                for term in tokenize(&literal.text) {
                    *tf.entry(term).or_insert(0) += 1;
                }
            }
        }
        for term in tf.keys() {
            *df.entry(term.clone()).or_insert(0) += 1;
        }
        phrases.push(IndexedPhrase {
            id: phrase.id.clone(),
            number: phrase.number,
            title: phrase.title.clone(),
            tf,
        });
    }
    PhraseIndex {
        catalogue_hash: cat.content_hash(),
        phrases,
        df,
    }
}

/// Rank phrases for `query`; at most `limit` hits, none for an empty query.
pub fn search(idx: &PhraseIndex, query: &str, limit: usize) -> Vec<SearchHit> {
    let mut terms = tokenize(query);
    let mut seen = std::collections::HashSet::new();
    terms.retain(|t| seen.insert(t.clone()));
    if terms.is_empty() || limit == 0 {
        return Vec::new();
    }
    let n = idx.phrases.len() as f64;
    let idf: Vec<f64> = terms
        .iter()
        .map(|t| match idx.df.get(t) {
            Some(&df) => (1.0 + n / f64::from(df)).ln(),
            None => 0.0,
        })
        .collect();

    let mut hits: Vec<SearchHit> = idx
        .phrases
        .iter()
        .filter_map(|p| {
            let mut score = 0.0;
            let mut matched = Vec::new();
            for (term, w) in terms.iter().zip(&idf) {
                if let Some(&tf) = p.tf.get(term) {
                    score += (1.0 + f64::from(tf).ln()) * w;
                    matched.push(term.clone());
                }
            }
            (!matched.is_empty()).then(|| SearchHit {
                phrase: p.id.clone(),
                number: p.number,
                title: p.title.clone(),
                coverage: matched.len(),
                score,
                matched_terms: matched,
            })
        })
        .collect();
    hits.sort_by(rank);
    hits.truncate(limit);
    hits
}

fn rank(a: &SearchHit, b: &SearchHit) -> Ordering {
    b.coverage
        .cmp(&a.coverage)
        .then_with(|| b.score.total_cmp(&a.score))
        .then_with(|| a.number.cmp(&b.number))
        .then_with(|| a.phrase.cmp(&b.phrase))
}
