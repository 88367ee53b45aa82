use ndarray::ArrayView2;
use rand::seq::SliceRandom;

use super::{average_ranks, AssignError};
use crate::rng::seeded;

/// Entries strictly above the diagonal, row-major.
pub fn upper_triangle(m: ArrayView2<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(m[[i, j]]);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    /// `permutation[object index] = word index`
    pub permutation: Vec<usize>,
    pub rho: f64,
    /// number of candidate permutations scored
    pub evaluated: usize,
}

fn factorial_at_most(n: usize, cap: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for k in 2..=n {
        acc = acc.checked_mul(k)?;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Finds the object→word permutation maximizing the Spearman correlation
/// between the upper triangle of `sim_objects` and the upper triangle of
/// `sim_words` with rows and columns relabelled by the permutation.
///
/// The permuted matrix reads `sim_words[min(π(i), π(j)), max(π(i), π(j))]`,
/// i.e. it is taken as symmetric. Because relabelling only reorders the same
/// multiset of word similarities, both rank vectors are computed once and each
/// candidate costs a single `O(Z²)` dot product.
///
/// All `Z!` permutations are scored when `Z! <= max_samples`; otherwise
/// `max_samples` uniform permutations are drawn (with replacement) from a
/// generator seeded by `seed`. Ties keep the lexicographically smallest
/// permutation.
pub fn alignment_correlation_search(
    sim_objects: ArrayView2<f64>,
    sim_words: ArrayView2<f64>,
    max_samples: usize,
    seed: u64,
) -> Result<SearchResult, AssignError> {
    for m in [&sim_objects, &sim_words] {
        let (r, c) = m.dim();
        if r != c {
            return Err(AssignError::NotSquare { rows: r, cols: c });
        }
    }
    let z = sim_objects.nrows();
    if sim_words.nrows() != z {
        return Err(AssignError::DimensionMismatch(z, sim_words.nrows()));
    }
    if z < 2 {
        return Ok(SearchResult {
            permutation: (0..z).collect(),
            rho: 0.0,
            evaluated: 1,
        });
    }

    let centered = |v: Vec<f64>| {
        let mean = (v.len() as f64 + 1.0) / 2.0;
        v.into_iter().map(|r| r - mean).collect::<Vec<_>>()
    };
    let a = centered(average_ranks(&upper_triangle(sim_objects)));
    let b = centered(average_ranks(&upper_triangle(sim_words)));
    let mut word_rank = vec![0.0; z * z];
    let mut k = 0;
    for p in 0..z {
        for q in p + 1..z {
            word_rank[p * z + q] = b[k];
            word_rank[q * z + p] = b[k];
            k += 1;
        }
    }
    let norm = (a.iter().map(|x| x * x).sum::<f64>() * b.iter().map(|x| x * x).sum::<f64>()).sqrt();

    let score = |perm: &[usize]| -> f64 {
        if norm == 0.0 {
            return 0.0;
        }
        let mut dot = 0.0;
        let mut k = 0;
        for i in 0..z {
            let row = perm[i] * z;
            for j in i + 1..z {
                dot += a[k] * word_rank[row + perm[j]];
                k += 1;
            }
        }
        dot / norm
    };

    let mut best: Vec<usize> = (0..z).collect();
    let mut best_rho = score(&best);
    let consider = |perm: &[usize], best: &mut Vec<usize>, best_rho: &mut f64| {
        let rho = score(perm);
        if rho > *best_rho || (rho == *best_rho && perm < best.as_slice()) {
            *best_rho = rho;
            best.clear();
            best.extend_from_slice(perm);
        }
    };

    let evaluated = match factorial_at_most(z, max_samples) {
        Some(total) => {
            let mut perm: Vec<usize> = (0..z).collect();
            while next_permutation(&mut perm) {
                consider(&perm, &mut best, &mut best_rho);
            }
            total
        }
        None => {
            let mut rng = seeded(seed);
            let mut perm: Vec<usize> = (0..z).collect();
            // the identity seeded `best` but is not one of the samples
            best_rho = f64::NEG_INFINITY;
            for _ in 0..max_samples {
                perm.shuffle(&mut rng);
                consider(&perm, &mut best, &mut best_rho);
            }
            if max_samples == 0 {
                best_rho = score(&best);
            }
            max_samples
        }
    };

    Ok(SearchResult {
        permutation: best,
        rho: best_rho.clamp(-1.0, 1.0),
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assign::spearman;
    use ndarray::Array2;
    use rand::Rng;

    fn random_symmetric(z: usize, seed: u64) -> Array2<f64> {
        let mut rng = seeded(seed);
        let mut m = Array2::<f64>::eye(z);
        for i in 0..z {
            for j in i + 1..z {
                let v = rng.random_range(-1.0..1.0);
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
        m
    }

    fn permute(m: &Array2<f64>, p: &[usize]) -> Array2<f64> {
        // result[p[i], p[j]] = m[i, j]
        let z = m.nrows();
        let mut out = Array2::zeros((z, z));
        for i in 0..z {
            for j in 0..z {
                out[[p[i], p[j]]] = m[[i, j]];
            }
        }
        out
    }

    #[test]
    fn recovers_planted_permutation() {
        let sim_o = random_symmetric(5, 11);
        let planted = vec![3, 0, 4, 1, 2];
        let sim_w = permute(&sim_o, &planted);
        let r = alignment_correlation_search(sim_o.view(), sim_w.view(), 1_000_000, 0).unwrap();
        assert_eq!(r.evaluated, 120);
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.permutation, planted);
    }

    #[test]
    fn score_matches_direct_spearman() {
        let sim_o = random_symmetric(6, 1);
        let sim_w = random_symmetric(6, 2);
        let r = alignment_correlation_search(sim_o.view(), sim_w.view(), 10_000, 0).unwrap();
        assert_eq!(r.evaluated, 720);
        let p = &r.permutation;
        let permuted = Array2::from_shape_fn((6, 6), |(i, j)| sim_w[[p[i], p[j]]]);
        let direct = spearman(
            &upper_triangle(sim_o.view()),
            &upper_triangle(permuted.view()),
        )
        .unwrap();
        assert!((direct - r.rho).abs() < 1e-12);
    }

    #[test]
    fn constant_similarity_gives_zero_everywhere() {
        let mut sim_o = Array2::from_elem((5, 5), 0.3);
        sim_o.diag_mut().fill(1.0);
        let sim_w = random_symmetric(5, 3);
        let r = alignment_correlation_search(sim_o.view(), sim_w.view(), 1000, 0).unwrap();
        assert_eq!(r.rho, 0.0);
        assert_eq!(r.permutation, vec![0, 1, 2, 3, 4], "ties keep the smallest");
    }

    #[test]
    fn sampling_is_deterministic() {
        let sim_o = random_symmetric(9, 5);
        let sim_w = random_symmetric(9, 6);
        let a = alignment_correlation_search(sim_o.view(), sim_w.view(), 500, 42).unwrap();
        let b = alignment_correlation_search(sim_o.view(), sim_w.view(), 500, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluated, 500);
    }

    #[test]
    fn next_permutation_enumerates_all() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }
}
