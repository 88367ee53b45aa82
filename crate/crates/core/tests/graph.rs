mod common;

use common::{observed, oracle_product_weights, random_episodes, recount};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use xsl_core::rng::seeded;
use xsl_core::{CrossModalGraph, CrossWeightMode, CrossWeightTable, Episode, Modality};

fn build(episodes: &[Episode], h: usize) -> CrossModalGraph {
    let mut g = CrossModalGraph::new(12, 30);
    for ep in episodes {
        g.ingest_episode(ep, h).unwrap();
    }
    g
}

#[test]
fn streaming_counts_equal_batch_recount() {
    for h in [1, 2, 5, 10] {
        let episodes = random_episodes(h as u64, 150, 12, 30);
        let g = build(&episodes, h);
        assert_eq!(observed(&g), recount(&episodes, h), "h = {h}");
        assert_eq!(g.episodes_ingested(), 150);
        let windows: usize = episodes
            .iter()
            .filter(|e| !e.words().is_empty())
            .map(|e| e.words().len() + h - 1)
            .sum();
        assert_eq!(g.windows_ingested(), windows as u64);
    }
}

#[test]
fn counts_ignore_episode_order() {
    let mut episodes = random_episodes(3, 120, 12, 30);
    let a = build(&episodes, 4);
    episodes.shuffle(&mut seeded(9));
    assert_eq!(build(&episodes, 4), a);
}

#[test]
fn pair_counts_never_exceed_occurrences() {
    let g = build(&random_episodes(5, 200, 12, 30), 6);
    for m in [Modality::Object, Modality::Word] {
        for ((i, j), c) in g.sorted_pairs(m) {
            assert!(c <= g.occurrences(m, i).min(g.occurrences(m, j)));
        }
    }
}

#[test]
fn weights_match_definitions_and_ranges() {
    let episodes = random_episodes(8, 200, 12, 30);
    let g = build(&episodes, 5);
    let oracle = oracle_product_weights(&recount(&episodes, 5));
    let table = CrossWeightTable::new(&g);
    for (&(o, w), &(a_o, a_w)) in &oracle {
        assert!((table.object_side(o, w) - a_o).abs() < 1e-12);
        assert!((table.word_side(o, w) - a_w).abs() < 1e-12);
        assert!((table.weight(o, w, CrossWeightMode::Product) - a_o * a_w).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&a_o) && (0.0..=1.0).contains(&a_w));
    }
    for o in 0..12 {
        let row: f64 = (0..30).map(|w| table.object_side(o, w)).sum();
        assert!(row == 0.0 || (row - 1.0).abs() < 1e-9);
    }
    for w in 0..30 {
        let col: f64 = (0..12).map(|o| table.word_side(o, w)).sum();
        assert!(col == 0.0 || (col - 1.0).abs() < 1e-9);
    }
    for m in [Modality::Object, Modality::Word] {
        let n = if m == Modality::Object { 12 } else { 30 };
        for i in 0..n {
            for j in i + 1..n {
                let e = g.edge_weight(m, i, j).unwrap();
                assert!((0.0..=1.0).contains(&e));
            }
        }
    }
}

#[test]
fn absent_pairs_weigh_nothing() {
    let g = build(&random_episodes(2, 20, 12, 30), 3);
    for o in 0..12 {
        for w in 0..30 {
            if g.cross_count(o, w) == 0 {
                for mode in CrossWeightMode::ALL {
                    assert_eq!(g.cross_weight(o, w, mode), 0.0);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_stream_matches_the_recount(seed in any::<u64>(), h in 1usize..8, n in 1usize..40) {
        let episodes = random_episodes(seed, n, 12, 30);
        prop_assert_eq!(observed(&build(&episodes, h)), recount(&episodes, h));
    }

    #[test]
    fn mapping_distributions_are_normalized(seed in any::<u64>()) {
        let g = build(&random_episodes(seed, 30, 12, 30), 4);
        for o in 0..12 {
            for mode in CrossWeightMode::ALL {
                let d = g.mapping_distribution(o, mode);
                prop_assert!(d.is_empty() || (d.total() - 1.0).abs() < 1e-9);
            }
        }
    }
}
