//! Fixtures shared by the benchmarks.

use ndarray::Array2;
use xsl_core::corpus::{generate_synthetic_corpus, SyntheticConfig};
use xsl_core::{CrossModalGraph, Episode};

pub const WINDOW: usize = 10;

/// The first `n` episodes of the standard synthetic benchmark.
pub fn standard_episodes(n: usize) -> (usize, usize, Vec<Episode>) {
    let config = SyntheticConfig {
        n_episodes: n,
        ..SyntheticConfig::standard(0)
    };
    let corpus = generate_synthetic_corpus(&config).expect("standard config is valid");
    let (n_objects, n_words) = (corpus.objects.len(), corpus.words.len());
    (n_objects, n_words, corpus.episodes.collect())
}

pub fn standard_graph(n: usize) -> CrossModalGraph {
    let (n_objects, n_words, episodes) = standard_episodes(n);
    let mut g = CrossModalGraph::new(n_objects, n_words);
    for ep in &episodes {
        g.ingest_episode(ep, WINDOW).expect("ids are in range");
    }
    g
}

/// Deterministic pseudo-random matrix with entries in `[0, 1)`.
pub fn scrambled_matrix(n: usize, seed: u64) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        let x = xsl_core::rng::derive_seed(seed, &[i as u64, j as u64]);
        (x >> 11) as f64 / (1u64 << 53) as f64
    })
}
