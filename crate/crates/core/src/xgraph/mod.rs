//! The cross-modal relational graph: occurrence counters for objects and
//! words, and sparse co-occurrence counters for the object–object,
//! word–word and object–word edge families.
//!
//! Absent keys mean a count of zero. Weights are derived from counts on
//! demand; [`CrossWeightTable`] caches the row and column normalizers of the
//! cross weights while it borrows the graph, so it can never outlive an
//! ingest.

pub mod export;
pub mod snapshot;
mod weights;

pub use weights::{CrossWeightMode, CrossWeightTable, MappingDistribution};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::corpus::{context_windows, Episode, Modality};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("{modality:?} id {id} at position {position} is out of range (size {size})")]
    OutOfRange {
        modality: Modality,
        position: usize,
        id: u32,
        size: usize,
    },
    #[error("self-loop query ({0}, {0})")]
    SelfLoop(u32),
    #[error("window size must be at least 1")]
    ZeroWindow,
    #[error("no pairs to zero out")]
    NoPairs,
}

/// Which cross counts [`CrossModalGraph::zero_out_pairs`] erases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroScope {
    /// Only the listed `(o, w)` counts.
    PairOnly,
    /// Every count sharing an object or a word with a listed pair.
    RowAndColumn,
}

pub(crate) type PairCounts = FxHashMap<(u32, u32), u64>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrossModalGraph {
    pub(crate) object_counts: Vec<u64>,
    pub(crate) word_counts: Vec<u64>,
    /// keys are `(i, j)` with `i < j`
    pub(crate) object_pairs: PairCounts,
    pub(crate) word_pairs: PairCounts,
    /// keys are `(object, word)`
    pub(crate) cross_pairs: PairCounts,
    pub(crate) episodes_ingested: u64,
    pub(crate) windows_ingested: u64,
}

fn ordered(i: u32, j: u32) -> (u32, u32) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl CrossModalGraph {
    pub fn new(n_objects: usize, n_words: usize) -> Self {
        CrossModalGraph {
            object_counts: vec![0; n_objects],
            word_counts: vec![0; n_words],
            ..Default::default()
        }
    }

    /// Grows the node sets; existing counts are kept. Never shrinks.
    pub fn resize(&mut self, n_objects: usize, n_words: usize) {
        if n_objects > self.object_counts.len() {
            self.object_counts.resize(n_objects, 0);
        }
        if n_words > self.word_counts.len() {
            self.word_counts.resize(n_words, 0);
        }
    }

    pub fn n_objects(&self) -> usize {
        self.object_counts.len()
    }

    pub fn n_words(&self) -> usize {
        self.word_counts.len()
    }

    pub fn episodes_ingested(&self) -> u64 {
        self.episodes_ingested
    }

    pub fn windows_ingested(&self) -> u64 {
        self.windows_ingested
    }

    /// Streams one episode into the counters.
    ///
    /// Objects update once per episode; words and cross pairs update once per
    /// context window. The episode is validated before anything is touched.
    pub fn ingest_episode(&mut self, episode: &Episode, h: usize) -> Result<(), GraphError> {
        if h == 0 {
            return Err(GraphError::ZeroWindow);
        }
        let check = |ids: &[u32], size: usize, modality| {
            ids.iter()
                .enumerate()
                .find(|(_, &id)| id as usize >= size)
                .map_or(Ok(()), |(position, &id)| {
                    Err(GraphError::OutOfRange {
                        modality,
                        position,
                        id,
                        size,
                    })
                })
        };
        check(episode.objects(), self.n_objects(), Modality::Object)?;
        check(episode.words(), self.n_words(), Modality::Word)?;

        let objects = episode.objects();
        for (a, &oi) in objects.iter().enumerate() {
            self.object_counts[oi as usize] += 1;
            for &oj in &objects[a + 1..] {
                *self.object_pairs.entry(ordered(oi, oj)).or_insert(0) += 1;
            }
        }
        self.episodes_ingested += 1;

        for ctx in context_windows(episode.words(), h) {
            for (a, &wi) in ctx.iter().enumerate() {
                self.word_counts[wi as usize] += 1;
                // ctx is sorted and unique, so (wi, wj) is already ordered
                for &wj in &ctx[a + 1..] {
                    *self.word_pairs.entry((wi, wj)).or_insert(0) += 1;
                }
                for &o in objects {
                    *self.cross_pairs.entry((o, wi)).or_insert(0) += 1;
                }
            }
            self.windows_ingested += 1;
        }
        Ok(())
    }

    /// Occurrence count `d` of a node; 0 for ids past the end.
    pub fn occurrences(&self, modality: Modality, id: u32) -> u64 {
        let counts = match modality {
            Modality::Object => &self.object_counts,
            Modality::Word => &self.word_counts,
        };
        counts.get(id as usize).copied().unwrap_or(0)
    }

    pub fn occurrence_counts(&self, modality: Modality) -> &[u64] {
        match modality {
            Modality::Object => &self.object_counts,
            Modality::Word => &self.word_counts,
        }
    }

    /// Within-modality co-occurrence count, symmetric; 0 on the diagonal.
    pub fn co_occurrences(&self, modality: Modality, i: u32, j: u32) -> u64 {
        if i == j {
            return 0;
        }
        self.pairs(modality).get(&ordered(i, j)).copied().unwrap_or(0)
    }

    pub fn cross_count(&self, object: u32, word: u32) -> u64 {
        self.cross_pairs.get(&(object, word)).copied().unwrap_or(0)
    }

    fn pairs(&self, modality: Modality) -> &PairCounts {
        match modality {
            Modality::Object => &self.object_pairs,
            Modality::Word => &self.word_pairs,
        }
    }

    /// Within-modality pairs `((i, j), count)` with `i < j`, sorted.
    pub fn sorted_pairs(&self, modality: Modality) -> Vec<((u32, u32), u64)> {
        sorted(self.pairs(modality))
    }

    /// Cross pairs `((object, word), count)`, sorted.
    pub fn sorted_cross_pairs(&self) -> Vec<((u32, u32), u64)> {
        sorted(&self.cross_pairs)
    }

    pub fn n_edges(&self, modality: Modality) -> usize {
        self.pairs(modality).len()
    }

    pub fn n_cross_edges(&self) -> usize {
        self.cross_pairs.len()
    }

    /// `c² / (d_i · d_j)`, or 0 when any factor is 0.
    pub fn edge_weight(&self, modality: Modality, i: u32, j: u32) -> Result<f64, GraphError> {
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        let c = self.co_occurrences(modality, i, j);
        Ok(squared_ratio(
            c,
            self.occurrences(modality, i),
            self.occurrences(modality, j),
        ))
    }

    /// Cross weight of a single pair. Builds the normalizers on every call;
    /// use [`CrossWeightTable`] for batches.
    pub fn cross_weight(&self, object: u32, word: u32, mode: CrossWeightMode) -> f64 {
        CrossWeightTable::new(self).weight(object, word, mode)
    }

    pub fn mapping_distribution(&self, object: u32, mode: CrossWeightMode) -> MappingDistribution {
        CrossWeightTable::new(self).mapping_distribution(object, mode)
    }

    /// Returns a copy with the selected cross counts removed. Occurrence and
    /// within-modality counters are untouched.
    pub fn zero_out_pairs(
        &self,
        pairs: &[(u32, u32)],
        scope: ZeroScope,
    ) -> Result<CrossModalGraph, GraphError> {
        if pairs.is_empty() {
            return Err(GraphError::NoPairs);
        }
        for (position, &(o, w)) in pairs.iter().enumerate() {
            if o as usize >= self.n_objects() {
                return Err(GraphError::OutOfRange {
                    modality: Modality::Object,
                    position,
                    id: o,
                    size: self.n_objects(),
                });
            }
            if w as usize >= self.n_words() {
                return Err(GraphError::OutOfRange {
                    modality: Modality::Word,
                    position,
                    id: w,
                    size: self.n_words(),
                });
            }
        }
        let mut out = self.clone();
        match scope {
            ZeroScope::PairOnly => {
                for p in pairs {
                    out.cross_pairs.remove(p);
                }
            }
            ZeroScope::RowAndColumn => {
                let objects: rustc_hash::FxHashSet<u32> = pairs.iter().map(|p| p.0).collect();
                let words: rustc_hash::FxHashSet<u32> = pairs.iter().map(|p| p.1).collect();
                out.cross_pairs
                    .retain(|(o, w), _| !objects.contains(o) && !words.contains(w));
            }
        }
        Ok(out)
    }
}

pub(crate) fn squared_ratio(c: u64, di: u64, dj: u64) -> f64 {
    if c == 0 || di == 0 || dj == 0 {
        return 0.0;
    }
    let c = c as f64;
    c * c / (di as f64 * dj as f64)
}

fn sorted(map: &PairCounts) -> Vec<((u32, u32), u64)> {
    let mut v: Vec<_> = map.iter().map(|(&k, &c)| (k, c)).collect();
    v.sort_unstable_by_key(|e| e.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> CrossModalGraph {
        let mut g = CrossModalGraph::new(2, 2);
        g.ingest_episode(&Episode::new(vec![0, 1], vec![0, 1]), 2)
            .unwrap();
        g
    }

    #[test]
    fn hand_traced_counts() {
        let g = toy();
        assert_eq!(g.object_counts, [1, 1]);
        assert_eq!(g.co_occurrences(Modality::Object, 0, 1), 1);
        assert_eq!(g.word_counts, [2, 2]);
        assert_eq!(g.co_occurrences(Modality::Word, 1, 0), 1);
        for o in 0..2 {
            for w in 0..2 {
                assert_eq!(g.cross_count(o, w), 2);
            }
        }
        assert_eq!(g.windows_ingested(), 3);
        assert_eq!(g.episodes_ingested(), 1);
    }

    #[test]
    fn objects_only_episode() {
        let mut g = CrossModalGraph::new(1, 3);
        g.ingest_episode(&Episode::new(vec![0], vec![]), 10).unwrap();
        assert_eq!(g.object_counts, [1]);
        assert_eq!(g.word_counts, [0, 0, 0]);
        assert_eq!(g.n_cross_edges(), 0);
        assert_eq!(g.n_edges(Modality::Word), 0);
    }

    #[test]
    fn ingesting_twice_doubles() {
        let once = toy();
        let mut twice = toy();
        twice
            .ingest_episode(&Episode::new(vec![0, 1], vec![0, 1]), 2)
            .unwrap();
        assert_eq!(twice.co_occurrences(Modality::Object, 0, 1), 2);
        for (k, c) in once.sorted_cross_pairs() {
            assert_eq!(twice.cross_count(k.0, k.1), 2 * c);
        }
        for (k, c) in once.sorted_pairs(Modality::Word) {
            assert_eq!(twice.co_occurrences(Modality::Word, k.0, k.1), 2 * c);
        }
        assert_eq!(twice.word_counts, [4, 4]);
    }

    #[test]
    fn out_of_range_rejected_without_partial_update() {
        let mut g = CrossModalGraph::new(2, 2);
        let err = g
            .ingest_episode(&Episode::new(vec![0], vec![1, 5]), 2)
            .unwrap_err();
        assert_eq!(
            err,
            GraphError::OutOfRange {
                modality: Modality::Word,
                position: 1,
                id: 5,
                size: 2
            }
        );
        assert_eq!(g, CrossModalGraph::new(2, 2));
    }

    #[test]
    fn edge_weight_values() {
        let mut g = CrossModalGraph::new(3, 0);
        for _ in 0..3 {
            g.ingest_episode(&Episode::new(vec![0, 1], vec![]), 1).unwrap();
        }
        assert_eq!(g.edge_weight(Modality::Object, 0, 1).unwrap(), 1.0);
        assert_eq!(g.edge_weight(Modality::Object, 0, 2).unwrap(), 0.0);
        assert_eq!(
            g.edge_weight(Modality::Object, 1, 1),
            Err(GraphError::SelfLoop(1))
        );

        let mut g = CrossModalGraph::new(3, 0);
        g.ingest_episode(&Episode::new(vec![0, 1], vec![]), 1).unwrap();
        g.ingest_episode(&Episode::new(vec![0, 2], vec![]), 1).unwrap();
        g.ingest_episode(&Episode::new(vec![1], vec![]), 1).unwrap();
        // c=1, d0=2, d1=2
        assert_eq!(g.edge_weight(Modality::Object, 0, 1).unwrap(), 0.25);
    }

    #[test]
    fn zero_out_pair_only() {
        let g = toy();
        let z = g.zero_out_pairs(&[(0, 0)], ZeroScope::PairOnly).unwrap();
        assert_eq!(z.cross_count(0, 0), 0);
        assert_eq!(z.cross_count(0, 1), 2);
        assert_eq!(z.cross_count(1, 0), 2);
        assert_eq!(z.cross_count(1, 1), 2);
        assert_eq!(g.cross_count(0, 0), 2, "original untouched");
        assert_eq!(z.word_counts, g.word_counts);
        for mode in CrossWeightMode::ALL {
            assert_eq!(z.cross_weight(0, 0, mode), 0.0);
        }
    }

    #[test]
    fn zero_out_row_and_column() {
        let g = toy();
        let z = g.zero_out_pairs(&[(0, 0)], ZeroScope::RowAndColumn).unwrap();
        assert_eq!(z.cross_count(0, 0), 0);
        assert_eq!(z.cross_count(0, 1), 0);
        assert_eq!(z.cross_count(1, 0), 0);
        assert_eq!(z.cross_count(1, 1), 2);
        assert_eq!(z.object_pairs, g.object_pairs);
    }

    #[test]
    fn zero_out_validates() {
        let g = toy();
        assert_eq!(
            g.zero_out_pairs(&[], ZeroScope::PairOnly),
            Err(GraphError::NoPairs)
        );
        assert!(g.zero_out_pairs(&[(0, 9)], ZeroScope::PairOnly).is_err());
    }
}
