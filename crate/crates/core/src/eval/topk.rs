use std::collections::BTreeMap;

use super::EvalError;
use crate::corpus::GoldLexicon;
use crate::xgraph::{CrossModalGraph, CrossWeightMode, CrossWeightTable};

/// Percentage of gold objects whose `k` most probable words contain an alias.
pub fn topk_accuracy(
    graph: &CrossModalGraph,
    gold: &GoldLexicon,
    k: usize,
    mode: CrossWeightMode,
) -> Result<f64, EvalError> {
    Ok(topk_accuracies(graph, gold, &[k], mode)?[&k])
}

/// [`topk_accuracy`] for several `K` sharing one pass over the graph.
///
/// Objects with an empty mapping distribution, or outside the graph, count as
/// misses.
pub fn topk_accuracies(
    graph: &CrossModalGraph,
    gold: &GoldLexicon,
    ks: &[usize],
    mode: CrossWeightMode,
) -> Result<BTreeMap<usize, f64>, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    if ks.contains(&0) {
        return Err(EvalError::InvalidK);
    }
    let max_k = ks.iter().copied().max().unwrap_or(0);
    let table = CrossWeightTable::new(graph);
    let mut hits = vec![0usize; ks.len()];
    for (object, aliases) in gold.iter() {
        let ranked = table.mapping_distribution(object, mode).top_k(max_k);
        // rank of the first correct word, if any
        let Some(first) = ranked.iter().position(|w| aliases.contains(w)) else {
            continue;
        };
        for (h, &k) in hits.iter_mut().zip(ks) {
            if first < k {
                *h += 1;
            }
        }
    }
    let n = gold.len() as f64;
    Ok(ks
        .iter()
        .zip(hits)
        .map(|(&k, h)| (k, 100.0 * h as f64 / n))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Episode;

    fn graph() -> (CrossModalGraph, GoldLexicon) {
        // object 0 is always named by word 0, object 1 by word 1;
        // object 2 is only seen with word 2, which also follows object 0
        let mut g = CrossModalGraph::new(4, 4);
        for _ in 0..3 {
            g.ingest_episode(&Episode::new(vec![0], vec![0]), 1).unwrap();
            g.ingest_episode(&Episode::new(vec![1], vec![1]), 1).unwrap();
        }
        g.ingest_episode(&Episode::new(vec![0, 2], vec![2]), 1).unwrap();
        let mut gold = GoldLexicon::new();
        gold.insert(0, [0]).unwrap();
        gold.insert(1, [1]).unwrap();
        gold.insert(2, [3]).unwrap();
        gold.insert(3, [3]).unwrap();
        (g, gold)
    }

    #[test]
    fn accuracies_by_k() {
        let (g, gold) = graph();
        let acc = topk_accuracies(&g, &gold, &[1, 2, 3], CrossWeightMode::Product).unwrap();
        assert_eq!(acc[&1], 50.0);
        assert_eq!(acc[&3], 50.0);
        assert_eq!(topk_accuracy(&g, &gold, 1, CrossWeightMode::Product).unwrap(), 50.0);
    }

    #[test]
    fn errors() {
        let (g, _) = graph();
        let empty = GoldLexicon::new();
        assert_eq!(
            topk_accuracy(&g, &empty, 1, CrossWeightMode::Product),
            Err(EvalError::EmptyGold)
        );
        let (_, gold) = graph();
        assert_eq!(
            topk_accuracy(&g, &gold, 0, CrossWeightMode::Product),
            Err(EvalError::InvalidK)
        );
    }
}
