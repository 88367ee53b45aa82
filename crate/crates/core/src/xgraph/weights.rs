use serde::{Deserialize, Serialize};

use super::{squared_ratio, CrossModalGraph};

/// How an object–word strength is derived from the cross counts.
///
/// With `s(o,w) = c_ow² / (d_o · d_w)`, the object-side probability
/// `a_o(w)` normalizes `s` over the words of `o` and the word-side
/// probability `a_w(o)` normalizes it over the objects of `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossWeightMode {
    /// `a_o(w) · a_w(o)`
    Product,
    /// `a_o(w)` alone (the word-side factor dropped).
    #[serde(rename = "object-side")]
    ObjectSideOnly,
    /// `a_w(o)` alone (the object-side factor dropped).
    #[serde(rename = "word-side")]
    WordSideOnly,
    /// `p(o|w) / Σ_u p(o|w_u)` with `p(o|w) = c_ow / d_w`.
    Prior,
}

impl CrossWeightMode {
    pub const ALL: [CrossWeightMode; 4] = [
        CrossWeightMode::Product,
        CrossWeightMode::WordSideOnly,
        CrossWeightMode::ObjectSideOnly,
        CrossWeightMode::Prior,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CrossWeightMode::Product => "product",
            CrossWeightMode::ObjectSideOnly => "object-side",
            CrossWeightMode::WordSideOnly => "word-side",
            CrossWeightMode::Prior => "prior",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Cross-weight normalizers computed once from a borrowed graph.
pub struct CrossWeightTable<'g> {
    graph: &'g CrossModalGraph,
    /// per object: `(word, count)` sorted by word
    rows: Vec<Vec<(u32, u64)>>,
    object_norm: Vec<f64>,
    word_norm: Vec<f64>,
    prior_norm: Vec<f64>,
}

impl<'g> CrossWeightTable<'g> {
    pub fn new(graph: &'g CrossModalGraph) -> Self {
        let mut rows = vec![Vec::new(); graph.n_objects()];
        for ((o, w), c) in graph.sorted_cross_pairs() {
            rows[o as usize].push((w, c));
        }
        let mut object_norm = vec![0.0; graph.n_objects()];
        let mut word_norm = vec![0.0; graph.n_words()];
        let mut prior_norm = vec![0.0; graph.n_objects()];
        for (o, row) in rows.iter().enumerate() {
            let d_o = graph.object_counts[o];
            for &(w, c) in row {
                let d_w = graph.word_counts[w as usize];
                let s = squared_ratio(c, d_o, d_w);
                object_norm[o] += s;
                word_norm[w as usize] += s;
                if d_w > 0 {
                    prior_norm[o] += c as f64 / d_w as f64;
                }
            }
        }
        CrossWeightTable {
            graph,
            rows,
            object_norm,
            word_norm,
            prior_norm,
        }
    }

    pub fn graph(&self) -> &'g CrossModalGraph {
        self.graph
    }

    fn weight_with_count(&self, o: u32, w: u32, c: u64, mode: CrossWeightMode) -> f64 {
        if c == 0 {
            return 0.0;
        }
        let d_o = self.graph.occurrences(crate::Modality::Object, o);
        let d_w = self.graph.occurrences(crate::Modality::Word, w);
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        match mode {
            CrossWeightMode::Prior => {
                let p = ratio(c as f64, d_w as f64);
                ratio(p, self.prior_norm[o as usize])
            }
            _ => {
                let s = squared_ratio(c, d_o, d_w);
                let a_o = ratio(s, self.object_norm[o as usize]);
                let a_w = ratio(s, self.word_norm[w as usize]);
                match mode {
                    CrossWeightMode::Product => a_o * a_w,
                    CrossWeightMode::ObjectSideOnly => a_o,
                    CrossWeightMode::WordSideOnly => a_w,
                    CrossWeightMode::Prior => unreachable!(),
                }
            }
        }
    }

    /// Cross weight of `(object, word)`; 0 for unseen pairs or ids past the end.
    pub fn weight(&self, object: u32, word: u32, mode: CrossWeightMode) -> f64 {
        if object as usize >= self.rows.len() || word as usize >= self.word_norm.len() {
            return 0.0;
        }
        self.weight_with_count(object, word, self.graph.cross_count(object, word), mode)
    }

    /// Object-side probability `a_o(w)`.
    pub fn object_side(&self, object: u32, word: u32) -> f64 {
        self.weight(object, word, CrossWeightMode::ObjectSideOnly)
    }

    /// Word-side probability `a_w(o)`.
    pub fn word_side(&self, object: u32, word: u32) -> f64 {
        self.weight(object, word, CrossWeightMode::WordSideOnly)
    }

    /// Nonzero weights of one object's row, sorted by word.
    pub fn row(&self, object: u32, mode: CrossWeightMode) -> Vec<(u32, f64)> {
        let Some(row) = self.rows.get(object as usize) else {
            return Vec::new();
        };
        row.iter()
            .map(|&(w, c)| (w, self.weight_with_count(object, w, c, mode)))
            .filter(|&(_, e)| e > 0.0)
            .collect()
    }

    /// All nonzero `(object, word, weight)` triples, sorted.
    pub fn nonzero_weights(&self, mode: CrossWeightMode) -> Vec<(u32, u32, f64)> {
        (0..self.rows.len() as u32)
            .flat_map(|o| self.row(o, mode).into_iter().map(move |(w, e)| (o, w, e)))
            .collect()
    }

    /// `p(w | o)`: the object's row of weights normalized to sum to one.
    pub fn mapping_distribution(&self, object: u32, mode: CrossWeightMode) -> MappingDistribution {
        let row = self.row(object, mode);
        let total: f64 = row.iter().map(|e| e.1).sum();
        if total <= 0.0 {
            return MappingDistribution::default();
        }
        MappingDistribution {
            entries: row.into_iter().map(|(w, e)| (w, e / total)).collect(),
        }
    }
}

/// Word probabilities for one object, sorted by word id; zero entries omitted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MappingDistribution {
    entries: Vec<(u32, f64)>,
}

impl MappingDistribution {
    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probability(&self, word: u32) -> f64 {
        self.entries
            .binary_search_by_key(&word, |e| e.0)
            .map_or(0.0, |i| self.entries[i].1)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// The `k` most probable words, ties broken by ascending word id.
    pub fn top_k(&self, k: usize) -> Vec<u32> {
        let mut ranked = self.entries.clone();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.into_iter().take(k).map(|e| e.0).collect()
    }
}
