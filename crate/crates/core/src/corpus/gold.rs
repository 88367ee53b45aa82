use std::collections::{BTreeMap, BTreeSet};

use super::{tokenize, CorpusError, Vocabulary};

/// Evaluation ground truth: object id to its acceptable word ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoldLexicon {
    entries: BTreeMap<u32, BTreeSet<u32>>,
}

impl GoldLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `words` as aliases of `object`. Empty alias sets are rejected.
    pub fn insert<I: IntoIterator<Item = u32>>(
        &mut self,
        object: u32,
        words: I,
    ) -> Result<(), CorpusError> {
        let set: BTreeSet<u32> = words.into_iter().collect();
        if set.is_empty() {
            return Err(CorpusError::Gold(format!(
                "object {object} has an empty alias set"
            )));
        }
        self.entries.entry(object).or_default().extend(set);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn aliases(&self, object: u32) -> Option<&BTreeSet<u32>> {
        self.entries.get(&object)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BTreeSet<u32>)> {
        self.entries.iter().map(|(&o, s)| (o, s))
    }

    /// Pairs usable for zero-shot evaluation: objects with exactly one alias
    /// whose word is not an alias of any other object. Sorted by object id.
    pub fn unambiguous_pairs(&self) -> Vec<(u32, u32)> {
        let mut owners: BTreeMap<u32, usize> = BTreeMap::new();
        for set in self.entries.values() {
            for &w in set {
                *owners.entry(w).or_default() += 1;
            }
        }
        self.entries
            .iter()
            .filter(|(_, set)| set.len() == 1)
            .map(|(&o, set)| (o, *set.iter().next().unwrap()))
            .filter(|(_, w)| owners[w] == 1)
            .collect()
    }

    /// Resolves a symbol map against vocabularies.
    ///
    /// Aliases are normalised with [`tokenize`]; an alias that does not
    /// tokenize to exactly one in-vocabulary word is skipped, and objects left
    /// without aliases (or absent from the object vocabulary) are dropped.
    /// Returns the lexicon and the number of dropped objects.
    pub fn from_symbols(
        map: &BTreeMap<String, Vec<String>>,
        objects: &Vocabulary,
        words: &Vocabulary,
    ) -> (Self, usize) {
        let mut lex = GoldLexicon::new();
        let mut dropped = 0;
        for (obj, aliases) in map {
            let Some(oid) = objects.id(obj) else {
                dropped += 1;
                continue;
            };
            let ids: BTreeSet<u32> = aliases
                .iter()
                .filter_map(|a| match tokenize(a).as_slice() {
                    [single] => words.id(single),
                    _ => None,
                })
                .collect();
            if ids.is_empty() {
                dropped += 1;
            } else {
                lex.entries.insert(oid, ids);
            }
        }
        (lex, dropped)
    }

    pub fn to_symbols(
        &self,
        objects: &Vocabulary,
        words: &Vocabulary,
    ) -> BTreeMap<String, Vec<String>> {
        self.entries
            .iter()
            .filter_map(|(&o, set)| {
                let o = objects.symbol(o)?;
                let ws = set
                    .iter()
                    .filter_map(|&w| words.symbol(w).map(str::to_owned))
                    .collect();
                Some((o.to_owned(), ws))
            })
            .collect()
    }
}
