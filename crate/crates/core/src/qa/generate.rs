use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::QaError;
use crate::catalogue::{Catalogue, OptionList};
use crate::ids::PhraseId;
use crate::render::{Choice, SlotKey};
use crate::Selection;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationSpec {
    pub phrase: PhraseId,
    pub seed: u64,
    pub count: usize,
}

/// Draw `spec.count` complete selections.
///
/// The stream is ChaCha8 seeded with `seed_from_u64(spec.seed)`. Each choice
/// is one uniform draw over the list's options (`random_range(0..n)`), taken
/// depth-first: a segment's option, then its slots in source-text order,
/// then the next segment.
pub fn generate_random(cat: &Catalogue, spec: &GenerationSpec) -> Result<Vec<Selection>, QaError> {
    let phrase = cat
        .phrase(spec.phrase.as_str())
        .ok_or_else(|| QaError::UnknownPhrase(spec.phrase.to_string()))?;
    let lists = phrase
        .segments
        .iter()
        .map(|id| lookup(cat, id.as_str()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    for _ in 0..spec.count {
        let mut sel = Selection::new(phrase.id.clone());
        for (i, list) in lists.iter().enumerate() {
            sel.segments.insert(i + 1, draw(cat, list, &mut rng)?);
        }
        out.push(sel);
    }
    Ok(out)
}

fn lookup<'a>(cat: &'a Catalogue, id: &str) -> Result<&'a OptionList, QaError> {
    cat.list(id)
        .ok_or_else(|| QaError::Catalogue(format!("missing list {id}")))
}

fn draw(cat: &Catalogue, list: &OptionList, rng: &mut ChaCha8Rng) -> Result<Choice, QaError> {
    if list.options.is_empty() {
        return Err(QaError::Catalogue(format!("list {} has no options", list.id)));
    }
    let index = rng.random_range(0..list.options.len());
    let mut choice = Choice::new(list.options[index].id.clone());
    if let Some(text) = list.text(cat.source.as_str(), index) {
        for slot in text.slots() {
            let child = draw(cat, lookup(cat, slot.list.as_str())?, rng)?;
            choice.slots.insert(SlotKey::from(slot), child);
        }
    }
    Ok(choice)
}
