mod common;

use std::collections::BTreeMap;
use std::sync::LazyLock;

use proptest::prelude::*;

use common::oracle::RawCatalogue;
use phrasecat::catalogue::{format_run, parse_run};
use phrasecat::qa::{check_surface_invariants, generate_random, GenerationSpec};
use phrasecat::render::capitalize_first;
use phrasecat::search::PhraseIndex;
use phrasecat::search::{build_index, search, tokenize};
use phrasecat::{parse_catalogue, render_sentence, serialize_catalogue, Catalogue};

static CATALOGUE: LazyLock<Catalogue> = LazyLock::new(common::avalanche);
static RAW: LazyLock<RawCatalogue> = LazyLock::new(|| RawCatalogue::new(common::AVALANCHE));
static INDEX: LazyLock<PhraseIndex> = LazyLock::new(|| build_index(&CATALOGUE));
static VOCABULARY: LazyLock<Vec<String>> = LazyLock::new(|| {
    let cat = &*CATALOGUE;
    cat.lists
        .values()
        .filter_map(|l| l.texts.get(&cat.source))
        .flatten()
        .flat_map(|t| {
            t.runs()
                .flat_map(|r| r.literals())
                .map(|l| l.text.clone())
                .collect::<Vec<_>>()
        })
        .flat_map(|t| tokenize(&t))
        .collect()
});

fn word() -> impl Strategy<Value = String> {
    "[a-zäöüéè]{1,8}"
}

/// Words, optionally glued at either edge.
fn fragment() -> impl Strategy<Value = String> {
    (prop::collection::vec(word(), 1..4), any::<bool>(), any::<bool>()).prop_map(|(words, before, after)| {
        let glue = |on: bool| if on { "(-)" } else { "" };
        format!("{}{}{}", glue(before), words.join(" "), glue(after))
    })
}

/// Fragments alternating with slots.
fn markup() -> impl Strategy<Value = String> {
    let slot = prop_oneof![
        "[A-Za-z_]{1,6}".prop_map(|l| format!("{{{l}}}")),
        "[A-Za-z_]{1,6}".prop_map(|l| format!("{{{{{l}}}}}")),
    ];
    (
        prop::option::of(fragment()),
        prop::collection::vec((slot, prop::option::of(fragment())), 0..4),
    )
        .prop_filter("non-empty", |(first, rest)| first.is_some() || !rest.is_empty())
        .prop_map(|(first, rest)| {
            let mut parts: Vec<String> = first.into_iter().collect();
            for (slot, fragment) in rest {
                parts.push(slot);
                parts.extend(fragment);
            }
            parts.join(" ")
        })
}

proptest! {
    #[test]
    fn capitalization_is_idempotent(s in "\\PC{0,24}") {
        let once = capitalize_first(&s);
        prop_assert_eq!(capitalize_first(&once), once.clone());
        prop_assert_eq!(once.chars().count(), s.chars().count().max(once.chars().count()));
        // only the first alphabetic character may change
        if let Some(i) = s.chars().position(char::is_alphabetic) {
            prop_assert_eq!(s.chars().take(i).collect::<String>(), once.chars().take(i).collect::<String>());
        } else {
            prop_assert_eq!(&once, &s);
        }
    }

    #[test]
    fn markup_round_trips(raw in markup()) {
        let run = parse_run(&raw).unwrap();
        let formatted = format_run(&run, |_| None);
        prop_assert_eq!(parse_run(&formatted).unwrap(), run);
    }

    #[test]
    fn tokens_are_normalized(s in "\\PC{0,40}") {
        for t in tokenize(&s) {
            prop_assert!(!t.is_empty());
            prop_assert!(t.chars().all(char::is_alphanumeric));
            prop_assert_eq!(tokenize(&t), vec![t.clone()]);
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_selections_render_like_the_oracle(seed in any::<u64>(), phrase in 0usize..10) {
        let (cat, raw) = (&*CATALOGUE, &*RAW);
        let ids = raw.phrase_ids();
        let spec = GenerationSpec { phrase: ids[phrase].as_str().into(), seed, count: 5 };
        for sel in generate_random(cat, &spec).unwrap() {
            let json = serde_json::to_value(&sel).unwrap();
            for lang in raw.languages() {
                let text = render_sentence(cat, &sel, &lang).unwrap();
                prop_assert!(check_surface_invariants(&text, &lang).is_empty(), "{}", text);
                prop_assert_eq!(text, raw.render(&json, &lang));
            }
        }
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>()) {
        let spec = GenerationSpec { phrase: "p19".into(), seed, count: 3 };
        prop_assert_eq!(generate_random(&CATALOGUE, &spec).unwrap(), generate_random(&CATALOGUE, &spec).unwrap());
    }

    #[test]
    fn coverage_dominates_score(words in prop::collection::vec("[a-zäöü]{2,10}", 1..4), pick in prop::collection::vec(0usize..400, 0..3)) {
        // mix in real vocabulary so queries hit
        let vocab = &*VOCABULARY;
        let mut query = words;
        query.extend(pick.iter().map(|i| vocab[i % vocab.len()].clone()));
        let hits = search(&INDEX, &query.join(" "), 100);
        for pair in hits.windows(2) {
            prop_assert!(pair[0].coverage >= pair[1].coverage);
            if pair[0].coverage == pair[1].coverage {
                prop_assert!(pair[0].score >= pair[1].score);
            }
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn synthetic_catalogues_round_trip(seed in 0u64..4) {
        let bytes = common::synthetic::document(seed);
        let cat = parse_catalogue(&bytes).unwrap();
        let canonical = serialize_catalogue(&cat);
        let again = parse_catalogue(&canonical).unwrap();
        prop_assert_eq!(&again, &cat);
        prop_assert_eq!(serialize_catalogue(&again), canonical);
    }
}

#[test]
fn layout_orders_are_applied_per_language() {
    let cat = common::avalanche();
    let texts: BTreeMap<_, _> = cat
        .languages
        .iter()
        .map(|l| {
            (
                l.to_string(),
                render_sentence(&cat, &common::wet_slopes(), l.as_str()).unwrap(),
            )
        })
        .collect();
    assert_eq!(texts.len(), 4);
    assert!(texts.values().all(|t| check_surface_invariants(t, "x").is_empty()));
}
