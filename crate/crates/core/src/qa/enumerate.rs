use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::QaError;
use crate::catalogue::{Catalogue, OptionList};
use crate::ids::ListId;
use crate::render::{Choice, SlotKey};
use crate::Selection;

/// Number of distinct complete selections of `phrase`: the product over
/// segments of the sum over options of the product of the option's slot
/// counts. Options with identical texts count separately.
pub fn enumerate_count(cat: &Catalogue, phrase: &str) -> Result<BigUint, QaError> {
    let phrase = cat
        .phrase(phrase)
        .ok_or_else(|| QaError::UnknownPhrase(phrase.to_owned()))?;
    let mut memo = HashMap::new();
    let mut total = BigUint::one();
    for id in &phrase.segments {
        total *= list_count(cat, id, &mut memo, 0)?;
    }
    Ok(total)
}

fn list_count<'a>(
    cat: &'a Catalogue,
    id: &'a ListId,
    memo: &mut HashMap<&'a ListId, BigUint>,
    depth: usize,
) -> Result<BigUint, QaError> {
    if let Some(n) = memo.get(id) {
        return Ok(n.clone());
    }
    if depth > usize::from(crate::catalogue::MAX_DEPTH) + 1 {
        return Err(QaError::Catalogue(format!("slot nesting too deep at {id}")));
    }
    let list = lookup(cat, id)?;
    let mut sum = BigUint::zero();
    for index in 0..list.options.len() {
        let mut product = BigUint::one();
        if let Some(text) = list.text(cat.source.as_str(), index) {
            for slot in text.slots() {
                product *= list_count(cat, &slot.list, memo, depth + 1)?;
            }
        }
        sum += product;
    }
    memo.insert(id, sum.clone());
    Ok(sum)
}

fn lookup<'a>(cat: &'a Catalogue, id: &ListId) -> Result<&'a OptionList, QaError> {
    cat.list(id.as_str())
        .ok_or_else(|| QaError::Catalogue(format!("missing list {id}")))
}

/// All complete selections of `phrase` in lexicographic order: segment 1
/// varies slowest, options in catalogue order, slots in source-text order.
/// Fails with `LIMIT_EXCEEDED` when there are more than `limit`.
pub fn enumerate_all(cat: &Catalogue, phrase: &str, limit: u64) -> Result<Vec<Selection>, QaError> {
    let count = enumerate_count(cat, phrase)?;
    if count > BigUint::from(limit) {
        return Err(QaError::LimitExceeded {
            count: count.to_string(),
            limit,
        });
    }
    if count.is_zero() {
        return Ok(Vec::new());
    }
    let phrase = cat.phrase(phrase).expect("checked by enumerate_count");
    let capacity = count.to_usize().unwrap_or(0);
    let mut memo: HashMap<&ListId, Vec<Choice>> = HashMap::new();
    let mut per_segment = Vec::new();
    for id in &phrase.segments {
        per_segment.push(list_choices(cat, id, &mut memo)?);
    }

    let mut out = Vec::with_capacity(capacity);
    let mut odometer = vec![0usize; per_segment.len()];
    loop {
        let mut sel = Selection::new(phrase.id.clone());
        for (i, (&k, choices)) in odometer.iter().zip(&per_segment).enumerate() {
            sel.segments.insert(i + 1, choices[k].clone());
        }
        out.push(sel);
        if !advance(&mut odometer, |i| per_segment[i].len()) {
            break;
        }
    }
    Ok(out)
}

/// Step the rightmost digit; false once every combination has been visited.
fn advance(odometer: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for i in (0..odometer.len()).rev() {
        odometer[i] += 1;
        if odometer[i] < radix(i) {
            return true;
        }
        odometer[i] = 0;
    }
    false
}

fn list_choices<'a>(
    cat: &'a Catalogue,
    id: &'a ListId,
    memo: &mut HashMap<&'a ListId, Vec<Choice>>,
) -> Result<Vec<Choice>, QaError> {
    if let Some(choices) = memo.get(id) {
        return Ok(choices.clone());
    }
    let list = lookup(cat, id)?;
    let mut out = Vec::new();
    for (index, meta) in list.options.iter().enumerate() {
        let slots: Vec<_> = list
            .text(cat.source.as_str(), index)
            .map(|t| t.slots().collect())
            .unwrap_or_default();
        let mut children = Vec::with_capacity(slots.len());
        for slot in &slots {
            children.push(list_choices(cat, &slot.list, memo)?);
        }
        if children.iter().any(Vec::is_empty) {
            continue;
        }
        let mut odometer = vec![0usize; slots.len()];
        loop {
            let mut choice = Choice::new(meta.id.clone());
            for ((slot, &k), options) in slots.iter().zip(&odometer).zip(&children) {
                choice.slots.insert(SlotKey::from(*slot), options[k].clone());
            }
            out.push(choice);
            if !advance(&mut odometer, |i| children[i].len()) {
                break;
            }
        }
    }
    memo.insert(id, out.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::parse_catalogue;

    const DOC: &str = r#"{
  "schema_version": 1,
  "languages": ["de"],
  "source": "de",
  "lists": {
    "a": {"depth": 0, "options": ["x", "y"], "texts": {"de": ["X", "Y {s}"]}},
    "b": {"depth": 0, "options": ["p", "q", "r"], "texts": {"de": ["P", "Q", "R"]}},
    "s": {"depth": 1, "options": ["m", "n"], "texts": {"de": ["M", "N"]}}
  },
  "phrases": {
    "flat": {"number": 1, "segments": ["b"], "layouts": {"de": "1"}},
    "pair": {"number": 2, "segments": ["a", "b"], "layouts": {"de": "1 2"}}
  }
}"#;

    #[test]
    fn counts() {
        let cat = parse_catalogue(DOC.as_bytes()).unwrap();
        assert_eq!(enumerate_count(&cat, "flat").unwrap(), BigUint::from(3u32));
        // (1 + 2) * 3
        assert_eq!(enumerate_count(&cat, "pair").unwrap(), BigUint::from(9u32));
        assert!(matches!(enumerate_count(&cat, "nope"), Err(QaError::UnknownPhrase(_))));
    }

    #[test]
    fn enumeration_order_and_limit() {
        let cat = parse_catalogue(DOC.as_bytes()).unwrap();
        let all = enumerate_all(&cat, "pair", 100).unwrap();
        assert_eq!(all.len(), 9);
        let first: Vec<&str> = all.iter().map(|s| s.segments[&1].option.as_str()).collect();
        assert_eq!(first, ["x", "x", "x", "y", "y", "y", "y", "y", "y"]);
        assert_eq!(all[3].segments[&1].slots[&SlotKey::new("s", 1)].option, "m");
        assert_eq!(all[8].segments[&1].slots[&SlotKey::new("s", 1)].option, "n");
        assert!(matches!(
            enumerate_all(&cat, "pair", 8),
            Err(QaError::LimitExceeded { .. })
        ));
    }
}
