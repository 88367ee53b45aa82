use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::RawEpisode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Object,
    Word,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Object => "object",
            Modality::Word => "word",
        }
    }
}

/// Dense symbol/id mapping for one modality.
///
/// Ids are assigned in first-seen order starting at 0. `counts` holds the raw
/// frequency observed while the vocabulary was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    modality: Modality,
    symbols: Vec<String>,
    counts: Vec<u64>,
    min_count: u64,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn new(modality: Modality, min_count: u64) -> Self {
        Vocabulary {
            modality,
            symbols: Vec::new(),
            counts: Vec::new(),
            min_count,
            index: HashMap::new(),
        }
    }

    /// Rebuilds a vocabulary from its symbol list, e.g. after deserialization.
    pub fn from_parts(
        modality: Modality,
        symbols: Vec<String>,
        counts: Vec<u64>,
        min_count: u64,
    ) -> Result<Self, String> {
        if counts.len() != symbols.len() {
            return Err(format!(
                "{} symbols but {} counts",
                symbols.len(),
                counts.len()
            ));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (id, sym) in symbols.iter().enumerate() {
            if index.insert(sym.clone(), id as u32).is_some() {
                return Err(format!("duplicate symbol {sym:?}"));
            }
        }
        Ok(Vocabulary {
            modality,
            symbols,
            counts,
            min_count,
            index,
        })
    }

    /// Restores the lookup index; needed after `serde` deserialization.
    pub fn reindex(&mut self) {
        self.index = self
            .symbols
            .iter()
            .enumerate()
            .map(|(id, s)| (s.clone(), id as u32))
            .collect();
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn id(&self, symbol: &str) -> Option<u32> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, id: u32) -> Option<&str> {
        self.symbols.get(id as usize).map(String::as_str)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts.get(id as usize).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Returns the id of `symbol`, appending it when unseen, and bumps its count.
    pub fn observe(&mut self, symbol: &str) -> u32 {
        self.add(symbol, 1)
    }

    /// Like [`observe`](Self::observe) but adds `n` occurrences at once.
    pub fn add(&mut self, symbol: &str, n: u64) -> u32 {
        let id = match self.index.get(symbol) {
            Some(&id) => id,
            None => {
                let id = self.symbols.len() as u32;
                self.symbols.push(symbol.to_owned());
                self.counts.push(0);
                self.index.insert(symbol.to_owned(), id);
                id
            }
        };
        self.counts[id as usize] += n;
        id
    }
}

/// Offline first pass over raw episodes.
///
/// Every observed object is kept; words are kept only when their total
/// frequency reaches `min_count`. Retained ids follow first-seen order.
pub fn build_vocabulary<I>(episodes: I, min_count: u64) -> (Vocabulary, Vocabulary)
where
    I: IntoIterator<Item = RawEpisode>,
{
    let mut objects = Vocabulary::new(Modality::Object, 0);
    let mut all_words = Vocabulary::new(Modality::Word, 0);
    for ep in episodes {
        for o in &ep.objects {
            objects.observe(o);
        }
        for w in &ep.words {
            all_words.observe(w);
        }
    }
    let mut words = Vocabulary::new(Modality::Word, min_count);
    for (sym, &count) in all_words.symbols.iter().zip(&all_words.counts) {
        if count >= min_count {
            let id = words.symbols.len() as u32;
            words.symbols.push(sym.clone());
            words.counts.push(count);
            words.index.insert(sym.clone(), id);
        }
    }
    (objects, words)
}
