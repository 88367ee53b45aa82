//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use xsl_core::corpus::{generate_synthetic_corpus, SyntheticConfig};
use xsl_core::rng::seeded;
use xsl_core::{CrossModalGraph, Episode, GoldLexicon, Modality};

pub const WINDOW: usize = 10;

/// Counts recomputed from scratch by literally padding each sequence.
#[derive(Debug, Default, PartialEq)]
pub struct Recount {
    pub d_objects: BTreeMap<u32, u64>,
    pub d_words: BTreeMap<u32, u64>,
    pub c_objects: BTreeMap<(u32, u32), u64>,
    pub c_words: BTreeMap<(u32, u32), u64>,
    pub c_cross: BTreeMap<(u32, u32), u64>,
}

pub fn recount(episodes: &[Episode], h: usize) -> Recount {
    let mut r = Recount::default();
    for ep in episodes {
        let objects: BTreeSet<u32> = ep.objects().iter().copied().collect();
        for &a in &objects {
            *r.d_objects.entry(a).or_default() += 1;
            for &b in &objects {
                if a < b {
                    *r.c_objects.entry((a, b)).or_default() += 1;
                }
            }
        }
        if ep.words().is_empty() {
            continue;
        }
        let padded: Vec<Option<u32>> = std::iter::repeat_n(None, h - 1)
            .chain(ep.words().iter().map(|&w| Some(w)))
            .collect();
        let t_len = padded.len();
        for t in 0..t_len {
            let window: BTreeSet<u32> = padded[t..(t + h).min(t_len)].iter().flatten().copied().collect();
            for &a in &window {
                *r.d_words.entry(a).or_default() += 1;
                for &b in &window {
                    if a < b {
                        *r.c_words.entry((a, b)).or_default() += 1;
                    }
                }
                for &o in &objects {
                    *r.c_cross.entry((o, a)).or_default() += 1;
                }
            }
        }
    }
    r
}

fn nonzero(counts: &[u64]) -> BTreeMap<u32, u64> {
    counts
        .iter()
        .enumerate()
        .filter(|e| *e.1 > 0)
        .map(|(i, &c)| (i as u32, c))
        .collect()
}

/// The graph's counters in the oracle's shape.
pub fn observed(g: &CrossModalGraph) -> Recount {
    Recount {
        d_objects: nonzero(g.occurrence_counts(Modality::Object)),
        d_words: nonzero(g.occurrence_counts(Modality::Word)),
        c_objects: g.sorted_pairs(Modality::Object).into_iter().collect(),
        c_words: g.sorted_pairs(Modality::Word).into_iter().collect(),
        c_cross: g.sorted_cross_pairs().into_iter().collect(),
    }
}

/// Small random episodes: repeated words, objects-only and word-only
/// episodes, sequences both shorter and longer than the window.
pub fn random_episodes(seed: u64, n: usize, n_objects: u32, n_words: u32) -> Vec<Episode> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| {
            let n_obj = rng.random_range(0..=4);
            let n_w = if rng.random::<f64>() < 0.1 { 0 } else { rng.random_range(1..=25) };
            Episode::new(
                (0..n_obj).map(|_| rng.random_range(0..n_objects)).collect(),
                (0..n_w).map(|_| rng.random_range(0..n_words)).collect(),
            )
        })
        .collect()
}

/// Cross weights recomputed from the oracle counts, straight from the
/// definitions: `s = c² / (d_o d_w)` normalized over the object's row and the
/// word's column.
pub fn oracle_product_weights(r: &Recount) -> BTreeMap<(u32, u32), (f64, f64)> {
    let s = |&(o, w): &(u32, u32), c: u64| {
        (c * c) as f64 / (r.d_objects[&o] as f64 * r.d_words[&w] as f64)
    };
    let mut row = BTreeMap::<u32, f64>::new();
    let mut col = BTreeMap::<u32, f64>::new();
    for (k, &c) in &r.c_cross {
        *row.entry(k.0).or_default() += s(k, c);
        *col.entry(k.1).or_default() += s(k, c);
    }
    r.c_cross
        .iter()
        .map(|(k, &c)| (*k, (s(k, c) / row[&k.0], s(k, c) / col[&k.1])))
        .collect()
}

/// The standard synthetic benchmark ingested with the default window.
pub fn standard_graph(seed: u64) -> (CrossModalGraph, GoldLexicon) {
    let corpus = generate_synthetic_corpus(&SyntheticConfig::standard(seed)).unwrap();
    let mut g = CrossModalGraph::new(corpus.objects.len(), corpus.words.len());
    for ep in corpus.episodes {
        g.ingest_episode(&ep, WINDOW).unwrap();
    }
    (g, corpus.gold)
}
