//! Self-identification and alignment losses with analytic gradients.
//!
//! ```text
//! A_X   = (I + δW_X)ᴸ R_X                  aggregated vectors
//! Z_X   = (A_X W1 + b1) W2 + b2            head logits, one class per node
//! ss_X  = Σ_i −log softmax(Z_X[i])[i]
//! align = Σ_{e_ow > 0} e_ow · (1 − cos(A_O[o], A_W[w]))
//! total = ss_O + ss_W + λ · align
//! ```

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::aggregate::Aggregator;
use super::graph::TrainingGraph;
use super::model::{Head, Parameters};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Losses {
    pub ss_objects: f64,
    pub ss_words: f64,
    pub align: f64,
    pub total: f64,
}

/// The training objective bound to a frozen graph.
pub struct AlignObjective<'g> {
    graph: &'g TrainingGraph,
    object_agg: Aggregator,
    word_agg: Aggregator,
    lambda_align: f64,
}

struct HeadPass {
    hidden: Array2<f64>,
    /// softmax probabilities
    probs: Array2<f64>,
    /// per-node cross-entropy
    losses: Vec<f64>,
}

fn head_forward(head: &Head, x: ArrayView2<f64>) -> HeadPass {
    let mut hidden = x.dot(&head.w1);
    hidden += &head.b1;
    let mut logits = hidden.dot(&head.w2);
    logits += &head.b2;
    let mut losses = Vec::with_capacity(logits.nrows());
    for (i, mut row) in logits.axis_iter_mut(Axis(0)).enumerate() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let own = row[i] - max;
        let mut sum = 0.0;
        row.mapv_inplace(|v| {
            let e = (v - max).exp();
            sum += e;
            e
        });
        row.mapv_inplace(|e| e / sum);
        // −log p_i = log Σ exp(z − max) − (z_i − max)
        losses.push(sum.ln() - own);
    }
    HeadPass {
        hidden,
        probs: logits,
        losses,
    }
}

/// Backward through a head given its forward pass; returns `∂loss/∂x`.
fn head_backward(head: &Head, x: ArrayView2<f64>, pass: HeadPass, grad: &mut Head) -> Array2<f64> {
    let mut d_logits = pass.probs;
    for i in 0..d_logits.nrows() {
        d_logits[[i, i]] -= 1.0;
    }
    grad.w2 = pass.hidden.t().dot(&d_logits);
    grad.b2 = d_logits.sum_axis(Axis(0));
    let d_hidden = d_logits.dot(&head.w2.t());
    grad.w1 = x.t().dot(&d_hidden);
    grad.b1 = d_hidden.sum_axis(Axis(0));
    d_hidden.dot(&head.w1.t())
}

fn row(m: &Array2<f64>, i: usize) -> &[f64] {
    let d = m.ncols();
    &m.as_slice().expect("standard layout")[i * d..(i + 1) * d]
}

/// Cosine distance `1 − u·v / (‖u‖‖v‖)`; 1 when either vector is zero.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> f64 {
    let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        uv += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return 1.0;
    }
    1.0 - uv / (uu.sqrt() * vv.sqrt())
}

impl<'g> AlignObjective<'g> {
    pub fn new(graph: &'g TrainingGraph, delta: f64, layers: usize, lambda_align: f64) -> Self {
        AlignObjective {
            graph,
            object_agg: Aggregator::new(&graph.objects, delta, layers),
            word_agg: Aggregator::new(&graph.words, delta, layers),
            lambda_align,
        }
    }

    pub fn graph(&self) -> &TrainingGraph {
        self.graph
    }

    /// Aggregated object and word vectors.
    pub fn aggregated(&self, params: &Parameters) -> (Array2<f64>, Array2<f64>) {
        (
            self.object_agg.apply(params.objects.view()),
            self.word_agg.apply(params.words.view()),
        )
    }

    /// Alignment loss and, when `grads` is given, its gradient (scaled by λ)
    /// accumulated into the aggregated-vector gradients.
    fn align_term(
        &self,
        agg_o: &Array2<f64>,
        agg_w: &Array2<f64>,
        grads: Option<(&mut Array2<f64>, &mut Array2<f64>)>,
    ) -> f64 {
        let mut loss = 0.0;
        let d = agg_o.ncols();
        let mut grads = grads.map(|(go, gw)| {
            (
                go.as_slice_mut().expect("standard layout"),
                gw.as_slice_mut().expect("standard layout"),
            )
        });
        for &(o, w, e) in &self.graph.cross {
            let (o, w) = (o as usize, w as usize);
            let (u, v) = (row(agg_o, o), row(agg_w, w));
            let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
            for (a, b) in u.iter().zip(v) {
                uv += a * b;
                uu += a * a;
                vv += b * b;
            }
            if uu == 0.0 || vv == 0.0 {
                loss += e;
                continue;
            }
            let (nu, nv) = (uu.sqrt(), vv.sqrt());
            let cos = uv / (nu * nv);
            loss += e * (1.0 - cos);
            if let Some((go, gw)) = grads.as_mut() {
                // ∂(−cos)/∂u = −(v/(‖u‖‖v‖) − cos·u/‖u‖²)
                let s = self.lambda_align * e;
                let inv = 1.0 / (nu * nv);
                let (cu, cv) = (cos / uu, cos / vv);
                let go = &mut go[o * d..(o + 1) * d];
                let gw = &mut gw[w * d..(w + 1) * d];
                for k in 0..d {
                    go[k] -= s * (v[k] * inv - cu * u[k]);
                    gw[k] -= s * (u[k] * inv - cv * v[k]);
                }
            }
        }
        loss
    }

    pub fn losses(&self, params: &Parameters) -> Losses {
        let (agg_o, agg_w) = self.aggregated(params);
        let ss_objects = head_forward(&params.object_head, agg_o.view()).losses.iter().sum();
        let ss_words = head_forward(&params.word_head, agg_w.view()).losses.iter().sum();
        let align = self.align_term(&agg_o, &agg_w, None);
        Losses {
            ss_objects,
            ss_words,
            align,
            total: ss_objects + ss_words + self.lambda_align * align,
        }
    }

    /// Loss components and exact gradients of `total` for every parameter.
    pub fn losses_and_gradients(&self, params: &Parameters) -> (Losses, Parameters) {
        let (agg_o, agg_w) = self.aggregated(params);
        let mut grad = params.zeros_like();

        let pass_o = head_forward(&params.object_head, agg_o.view());
        let pass_w = head_forward(&params.word_head, agg_w.view());
        let ss_objects: f64 = pass_o.losses.iter().sum();
        let ss_words: f64 = pass_w.losses.iter().sum();
        let mut d_agg_o =
            head_backward(&params.object_head, agg_o.view(), pass_o, &mut grad.object_head);
        let mut d_agg_w = head_backward(&params.word_head, agg_w.view(), pass_w, &mut grad.word_head);

        let align = self.align_term(&agg_o, &agg_w, Some((&mut d_agg_o, &mut d_agg_w)));

        grad.objects = self.object_agg.apply_transpose(d_agg_o.view());
        grad.words = self.word_agg.apply_transpose(d_agg_w.view());
        grad.standardize();
        let losses = Losses {
            ss_objects,
            ss_words,
            align,
            total: ss_objects + ss_words + self.lambda_align * align,
        };
        (losses, grad)
    }

    /// Per-node self-identification cross-entropies and whether each node's
    /// head picks its own label, for objects then words.
    pub fn identification(&self, params: &Parameters) -> [(Vec<f64>, Vec<bool>); 2] {
        let (agg_o, agg_w) = self.aggregated(params);
        let one = |head: &Head, x: &Array2<f64>| {
            let pass = head_forward(head, x.view());
            let hits = pass
                .probs
                .axis_iter(Axis(0))
                .enumerate()
                .map(|(i, r)| {
                    let best = r
                        .iter()
                        .enumerate()
                        .fold((0, f64::NEG_INFINITY), |b, (j, &p)| if p > b.1 { (j, p) } else { b });
                    best.0 == i
                })
                .collect();
            (pass.losses, hits)
        };
        [
            one(&params.object_head, &agg_o),
            one(&params.word_head, &agg_w),
        ]
    }
}

/// Mean of a slice; 0 when empty.
pub(crate) fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;

    #[test]
    fn cosine_distance_edges() {
        assert!(cosine_distance(&[1.0, 2.0], &[1.0, 2.0]).abs() < 1e-15);
        assert_eq!(cosine_distance(&[0.0, 0.0], &[1.0, 2.0]), 1.0);
        assert!((cosine_distance(&[1.0, 0.0], &[-3.0, 0.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn softmax_loss_of_uniform_logits() {
        let head = Head {
            w1: Array2::zeros((2, 2)),
            b1: Array1::zeros(2),
            w2: Array2::zeros((2, 4)),
            b2: Array1::zeros(4),
        };
        let x = Array2::from_elem((4, 2), 0.7);
        let pass = head_forward(&head, x.view());
        for l in pass.losses {
            assert!((l - 4f64.ln()).abs() < 1e-12);
        }
    }
}
