//! Neighborhood aggregation `r⁽ˡ⁾ = r⁽ˡ⁻¹⁾ + δ · W · r⁽ˡ⁻¹⁾`, applied `L` times.

use ndarray::{Array2, ArrayView2};

use super::graph::{Csr, TrainingGraph};

/// Node counts up to which the operator `(I + δW)ᴸ` is materialized as a
/// dense matrix; larger graphs apply the layers through the sparse weights.
const DENSE_LIMIT: usize = 1536;

/// The linear aggregation operator of one modality.
#[derive(Clone, Debug)]
pub struct Aggregator {
    adj: Csr,
    delta: f64,
    layers: usize,
    dense: Option<Array2<f64>>,
}

impl Aggregator {
    pub fn new(adj: &Csr, delta: f64, layers: usize) -> Self {
        let mut agg = Aggregator {
            adj: adj.clone(),
            delta,
            layers,
            dense: None,
        };
        if agg.is_identity() {
            return agg;
        }
        if adj.n() <= DENSE_LIMIT {
            let eye = Array2::<f64>::eye(adj.n());
            agg.dense = Some(agg.apply_layered(eye.view(), false));
        }
        agg
    }

    /// Forces the layer-by-layer sparse path.
    pub fn sparse(adj: &Csr, delta: f64, layers: usize) -> Self {
        Aggregator {
            adj: adj.clone(),
            delta,
            layers,
            dense: None,
        }
    }

    fn is_identity(&self) -> bool {
        self.layers == 0 || self.delta == 0.0 || self.adj.nnz() == 0
    }

    fn apply_layered(&self, x: ArrayView2<f64>, transpose: bool) -> Array2<f64> {
        let mut cur = x.to_owned();
        for _ in 0..self.layers {
            let mut next = cur.clone();
            if transpose {
                self.adj.mul_t_add(cur.view(), self.delta, &mut next);
            } else {
                self.adj.mul_add(cur.view(), self.delta, &mut next);
            }
            cur = next;
        }
        cur
    }

    /// `(I + δW)ᴸ · x`
    pub fn apply(&self, x: ArrayView2<f64>) -> Array2<f64> {
        if self.is_identity() {
            return x.to_owned();
        }
        match &self.dense {
            Some(p) => p.dot(&x),
            None => self.apply_layered(x, false),
        }
    }

    /// `((I + δW)ᴸ)ᵀ · g = (I + δWᵀ)ᴸ · g`, the backward pass of [`apply`](Self::apply).
    pub fn apply_transpose(&self, g: ArrayView2<f64>) -> Array2<f64> {
        if self.is_identity() {
            return g.to_owned();
        }
        match &self.dense {
            Some(p) => p.t().dot(&g),
            None => self.apply_layered(g, true),
        }
    }
}

/// Aggregated vectors of both modalities. Cross-modal edges take no part.
pub fn aggregate(
    graph: &TrainingGraph,
    objects: ArrayView2<f64>,
    words: ArrayView2<f64>,
    delta: f64,
    layers: usize,
) -> (Array2<f64>, Array2<f64>) {
    (
        Aggregator::sparse(&graph.objects, delta, layers).apply(objects),
        Aggregator::sparse(&graph.words, delta, layers).apply(words),
    )
}
