//! Seeded generator for a catalogue at operational scale: 110 phrases, 603
//! lists, 4.3 segments per phrase on average.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

pub const PHRASES: usize = 110;
pub const LISTS: usize = 603;
const LANGS: [&str; 4] = ["de", "fr", "it", "en"];
const DEPTH1: usize = 100;

fn word(rng: &mut ChaCha8Rng, lang: &str) -> String {
    const SYLLABLES: [&str; 8] = ["la", "wi", "ne", "schnee", "ber", "hang", "to", "ri"];
    let n = rng.random_range(2..5);
    let mut w = String::from(&lang[..1]);
    for _ in 0..n {
        w.push_str(SYLLABLES[rng.random_range(0..SYLLABLES.len())]);
    }
    w
}

fn phrase_text(rng: &mut ChaCha8Rng, lang: &str) -> String {
    let n = rng.random_range(1..4);
    (0..n).map(|_| word(rng, lang)).collect::<Vec<_>>().join(" ")
}

/// Returns the catalogue document bytes.
pub fn document(seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 33 phrases with 5 segments and 77 with 4: 473 segments, mean 4.3
    let seg_counts: Vec<usize> = (0..PHRASES).map(|i| if i % 10 < 3 { 5 } else { 4 }).collect();
    let segment_lists: usize = seg_counts.iter().sum();
    let depth2 = LISTS - segment_lists - DEPTH1;

    let mut lists = Map::new();
    let mut add_list = |id: String,
                        depth: u8,
                        options: usize,
                        split: bool,
                        slot: Option<(String, u8)>,
                        rng: &mut ChaCha8Rng,
                        may_be_empty: bool| {
        let ids: Vec<String> = (0..options).map(|k| format!("o{k}")).collect();
        let mut texts = Map::new();
        for lang in LANGS {
            let column: Vec<Value> = (0..options)
                .map(|k| {
                    let mut text = if may_be_empty && k == 0 {
                        String::new()
                    } else {
                        phrase_text(rng, lang)
                    };
                    if let (Some((target, target_depth)), 1) = (&slot, k) {
                        let marker = if *target_depth == 2 {
                            format!("{{{{{target}}}}}")
                        } else {
                            format!("{{{target}}}")
                        };
                        text = format!("{text} {marker}");
                    }
                    if split && lang == "fr" {
                        json!([text, word(rng, lang)])
                    } else {
                        json!(text)
                    }
                })
                .collect();
            texts.insert(lang.to_owned(), Value::Array(column));
        }
        let mut obj = Map::new();
        obj.insert("depth".into(), json!(depth));
        if split {
            obj.insert("split".into(), json!(["fr"]));
        }
        obj.insert("options".into(), json!(ids));
        obj.insert("texts".into(), Value::Object(texts));
        lists.insert(id, Value::Object(obj));
    };

    for j in 0..depth2 {
        let n = rng.random_range(2..6);
        add_list(format!("sub2_{j}"), 2, n, false, None, &mut rng, false);
    }
    for j in 0..DEPTH1 {
        let n = rng.random_range(3..9);
        let slot = (j % 2 == 0).then(|| (format!("sub2_{}", j % depth2), 2));
        add_list(format!("sub1_{j}"), 1, n, false, slot, &mut rng, j % 3 == 0);
    }

    let mut phrases = Map::new();
    let mut next = 0;
    for (p, &n) in seg_counts.iter().enumerate() {
        let mut segments = Vec::new();
        let mut split = Vec::new();
        for s in 0..n {
            let id = format!("seg_{next}");
            let is_split = next % 7 == 3;
            let options = rng.random_range(2..15);
            let slot = (next % 3 == 0).then(|| (format!("sub1_{}", next % DEPTH1), 1));
            add_list(id.clone(), 0, options, is_split, slot, &mut rng, s > 0);
            segments.push(id);
            split.push(is_split);
            next += 1;
        }
        let identity: Vec<String> = (1..=n).map(|s| s.to_string()).collect();
        let reversed: Vec<String> = (1..=n)
            .rev()
            .map(|s| {
                if split[s - 1] {
                    format!("{s}a {s}b")
                } else {
                    s.to_string()
                }
            })
            .collect();
        let mut rotated = identity.clone();
        rotated.rotate_left(1);
        phrases.insert(
            format!("p{}", p + 1),
            json!({
                "number": p + 1,
                "title": format!("Phrase {}", p + 1),
                "segments": segments,
                "layouts": {
                    "de": identity.join(" "),
                    "fr": reversed.join(" "),
                    "it": identity.join(" "),
                    "en": rotated.join(" "),
                }
            }),
        );
    }
    assert_eq!(lists.len(), LISTS);

    let doc = json!({
        "schema_version": 1,
        "languages": LANGS,
        "source": "de",
        "lists": lists,
        "phrases": phrases,
    });
    serde_json::to_vec_pretty(&doc).unwrap()
}
