use ndarray::{Array2, ArrayView2};

use crate::corpus::Modality;
use crate::xgraph::{CrossModalGraph, CrossWeightMode, CrossWeightTable};

/// Compressed sparse rows of a square weight matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Csr {
    /// Builds a symmetric matrix from upper-triangle entries `((i, j), w)`.
    pub fn symmetric(n: usize, upper: &[((u32, u32), f64)]) -> Self {
        let mut entries: Vec<(u32, u32, f64)> = upper
            .iter()
            .filter(|e| e.1 != 0.0)
            .flat_map(|&((i, j), w)| [(i, j, w), (j, i, w)])
            .collect();
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0; n + 1];
        for e in &entries {
            row_ptr[e.0 as usize + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr {
            n,
            row_ptr,
            cols: entries.iter().map(|e| e.1).collect(),
            vals: entries.iter().map(|e| e.2).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.vals[r])
            .map(|(&j, &v)| (j as usize, v))
    }

    /// `out += scale · W · x`
    pub fn mul_add(&self, x: ArrayView2<f64>, scale: f64, out: &mut Array2<f64>) {
        for i in 0..self.n {
            for (j, w) in self.row(i) {
                out.row_mut(i).scaled_add(scale * w, &x.row(j));
            }
        }
    }

    /// `out += scale · Wᵀ · x`
    pub fn mul_t_add(&self, x: ArrayView2<f64>, scale: f64, out: &mut Array2<f64>) {
        for i in 0..self.n {
            for (j, w) in self.row(i) {
                out.row_mut(j).scaled_add(scale * w, &x.row(i));
            }
        }
    }
}

/// A frozen, training-ready view of a [`CrossModalGraph`]: within-modality
/// weight matrices and the nonzero cross weights.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingGraph {
    pub objects: Csr,
    pub words: Csr,
    /// `(object, word, e_ow)` with `e_ow > 0`, sorted
    pub cross: Vec<(u32, u32, f64)>,
}

impl TrainingGraph {
    pub fn new(graph: &CrossModalGraph, mode: CrossWeightMode) -> Self {
        let within = |m: Modality| -> Vec<((u32, u32), f64)> {
            graph
                .sorted_pairs(m)
                .into_iter()
                .map(|((i, j), _)| ((i, j), graph.edge_weight(m, i, j).unwrap_or(0.0)))
                .collect()
        };
        TrainingGraph {
            objects: Csr::symmetric(graph.n_objects(), &within(Modality::Object)),
            words: Csr::symmetric(graph.n_words(), &within(Modality::Word)),
            cross: CrossWeightTable::new(graph).nonzero_weights(mode),
        }
    }

    pub fn n_objects(&self) -> usize {
        self.objects.n()
    }

    pub fn n_words(&self) -> usize {
        self.words.n()
    }
}
