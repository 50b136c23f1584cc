//! Shared fixtures for integration tests.
#![allow(dead_code)]

pub mod oracle;
pub mod synthetic;

use phrasecat::render::{Choice, JokerSentence, SentenceEntry};
use phrasecat::workbench::{Bulletin, DangerDescription};
use phrasecat::{parse_catalogue, Catalogue, Selection};

pub const AVALANCHE: &[u8] = include_bytes!("../fixtures/avalanche.json");
pub const MINIMAL: &[u8] = include_bytes!("../fixtures/minimal.json");

pub fn avalanche() -> Catalogue {
    parse_catalogue(AVALANCHE).expect("avalanche fixture parses")
}

pub fn minimal() -> Catalogue {
    parse_catalogue(MINIMAL).expect("minimal fixture parses")
}

pub fn c(option: &str) -> Choice {
    Choice::new(option)
}

/// Wet avalanches on very steep sunny slopes.
pub fn wet_slopes() -> Selection {
    Selection::new("p65")
        .segment(1, c("wet"))
        .segment(2, c("can"))
        .segment(3, c("sunny_slopes").with("an_steilen", c("very_steep")))
        .segment(4, c("empty"))
        .segment(5, c("large").with("ziemlich", c("dangerously")))
}

/// Pronoun sentence with the Italian 2a/2b split.
pub fn margins() -> Selection {
    Selection::new("p57")
        .segment(1, c("they_drifts"))
        .segment(2, c("margins"))
        .segment(3, c("single_participant"))
        .segment(4, c("released"))
}

/// Bonding sentence with glue across a slot boundary in Italian.
pub fn bonding() -> Selection {
    Selection::new("p22")
        .segment(1, c("bonding"))
        .segment(2, c("of"))
        .segment(3, c("the"))
        .segment(4, c("drifts"))
        .segment(5, c("in_progress"))
}

/// Five-segment drift sentence with nested regions.
pub fn drifts_grow() -> Selection {
    let regions = c("regions")
        .with("vor_alle", c("above_all"))
        .with(
            "Gebiet",
            c("northern_flank")
                .with("östlich", c("east"))
                .with("Ort", c("interlaken")),
        )
        .with(",Gebiet", c("urseren"))
        .with("und_Gebiet", c("eastern_prealps"));
    Selection::new("p19")
        .segment(1, regions)
        .segment(2, c("grow"))
        .segment(3, c("the"))
        .segment(4, c("drifts"))
        .segment(5, c("strongly"))
}

/// The four sentences of the Bise description.
pub fn bise_description() -> Vec<Selection> {
    vec![
        Selection::new("p101")
            .segment(1, c("bise"))
            .segment(2, c("form"))
            .segment(3, c("mostly_small"))
            .segment(4, c("drifts")),
        Selection::new("p102")
            .segment(1, c("these_drifts"))
            .segment(2, c("poorly")),
        Selection::new("p103")
            .segment(1, c("avalanches"))
            .segment(2, c("single_participant"))
            .segment(3, c("released"))
            .segment(4, c("mostly_small")),
        Selection::new("p104")
            .segment(1, c("burial"))
            .segment(2, c("in_particular"))
            .segment(3, c("sweep_fall")),
    ]
}

pub fn entries(selections: Vec<Selection>) -> Vec<SentenceEntry> {
    selections.into_iter().map(SentenceEntry::Selection).collect()
}

/// Edition used by the bulletin fixtures.
pub fn edition() -> chrono::DateTime<chrono::Utc> {
    use chrono::TimeZone;
    chrono::Utc.with_ymd_and_hms(2013, 2, 24, 8, 0, 0).unwrap()
}

/// Draft with three descriptions, eight sentences, one of them a joker.
pub fn publish_fixture(id: &str, catalogue_hash: &str) -> Bulletin {
    let joker = SentenceEntry::Joker(JokerSentence::new([
        ("de", "Am Nachmittag ist mit Nassschneelawinen zu rechnen."),
        (
            "fr",
            "L'après-midi, il faut s'attendre à des avalanches de neige mouillée.",
        ),
        ("it", "Nel pomeriggio sono probabili valanghe di neve bagnata."),
        ("en", "Wet snow avalanches are to be expected in the afternoon."),
    ]));
    let bise = bise_description();
    let mut b = Bulletin::draft(id, edition(), catalogue_hash);
    b.descriptions = vec![
        DangerDescription {
            id: "north".into(),
            region: "Alpennordhang".into(),
            sentences: entries(vec![wet_slopes(), margins()]),
        },
        DangerDescription {
            id: "central".into(),
            region: "Zentralschweiz".into(),
            sentences: entries(vec![bonding(), drifts_grow(), bise[0].clone()]),
        },
        DangerDescription {
            id: "south".into(),
            region: "Tessin".into(),
            sentences: {
                let mut s = entries(vec![bise[1].clone(), bise[2].clone()]);
                s.push(joker);
                s
            },
        },
    ];
    b
}
