use phrasecat::catalogue::lint_agreement;
use phrasecat::{parse_catalogue, serialize_catalogue, validate_catalogue};

const AVALANCHE: &[u8] = include_bytes!("fixtures/avalanche.json");

#[test]
fn avalanche_fixture_validates_cleanly() {
    let cat = parse_catalogue(AVALANCHE).unwrap();
    let report = validate_catalogue(&cat);
    assert!(report.is_empty(), "{report}");
    let lint = lint_agreement(&cat);
    assert!(lint.is_empty(), "{lint}");
}

#[test]
fn avalanche_fixture_is_canonical() {
    let cat = parse_catalogue(AVALANCHE).unwrap();
    let bytes = serialize_catalogue(&cat);
    assert_eq!(parse_catalogue(&bytes).unwrap(), cat);
    assert_eq!(
        String::from_utf8(bytes).unwrap(),
        std::str::from_utf8(AVALANCHE).unwrap()
    );
}
