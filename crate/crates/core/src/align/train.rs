use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::Parameters;
use super::objective::{mean, Losses, AlignObjective};
use super::{RepresentationModel, TrainConfig, TrainingGraph};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPSILON: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("non-finite loss at step {step}")]
    NonFinite { step: usize },
    #[error("model has {model_objects} objects / {model_words} words but graph has {graph_objects} / {graph_words}")]
    ShapeMismatch {
        model_objects: usize,
        model_words: usize,
        graph_objects: usize,
        graph_words: usize,
    },
    #[error("invalid training configuration: {0}")]
    Config(String),
}

fn check_shapes(model: &RepresentationModel, graph: &TrainingGraph) -> Result<(), TrainError> {
    if model.n_objects() != graph.n_objects() || model.n_words() != graph.n_words() {
        return Err(TrainError::ShapeMismatch {
            model_objects: model.n_objects(),
            model_words: model.n_words(),
            graph_objects: graph.n_objects(),
            graph_words: graph.n_words(),
        });
    }
    Ok(())
}

pub fn forward_losses(
    model: &RepresentationModel,
    graph: &TrainingGraph,
    config: &TrainConfig,
) -> Result<Losses, TrainError> {
    check_shapes(model, graph)?;
    Ok(AlignObjective::new(graph, config.delta, config.layers, config.lambda_align).losses(&model.params))
}

/// Gradients of the total loss. Weight decay is not part of the loss; it is
/// applied separately by [`adam_step`].
pub fn backward(
    model: &RepresentationModel,
    graph: &TrainingGraph,
    config: &TrainConfig,
) -> Result<Parameters, TrainError> {
    check_shapes(model, graph)?;
    let objective = AlignObjective::new(graph, config.delta, config.layers, config.lambda_align);
    Ok(objective.losses_and_gradients(&model.params).1)
}

/// One Adam update with bias correction and decoupled weight decay:
/// `θ ← θ − lr·wd·θ − lr·m̂ / (√v̂ + ε)`.
pub fn adam_step(model: &mut RepresentationModel, grad: &Parameters, lr: f64, weight_decay: f64) {
    model.adam.step += 1;
    let t = model.adam.step as i32;
    let c1 = 1.0 - BETA1.powi(t);
    let c2 = 1.0 - BETA2.powi(t);
    let params = model.params.groups_mut();
    let ms = model.adam.m.groups_mut();
    let vs = model.adam.v.groups_mut();
    for (((p, g), m), v) in params.into_iter().zip(grad.groups()).zip(ms).zip(vs) {
        for i in 0..p.len() {
            m[i] = BETA1 * m[i] + (1.0 - BETA1) * g[i];
            v[i] = BETA2 * v[i] + (1.0 - BETA2) * g[i] * g[i];
            let update = (m[i] / c1) / ((v[i] / c2).sqrt() + EPSILON);
            p[i] -= lr * weight_decay * p[i] + lr * update;
        }
    }
}

/// Full-batch Adam for `config.steps` steps. Returns the loss recorded before
/// each update.
pub fn train(
    model: &mut RepresentationModel,
    graph: &TrainingGraph,
    config: &TrainConfig,
) -> Result<Vec<Losses>, TrainError> {
    config.validate().map_err(TrainError::Config)?;
    check_shapes(model, graph)?;
    let objective = AlignObjective::new(graph, config.delta, config.layers, config.lambda_align);
    let mut trace = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        let (losses, grad) = objective.losses_and_gradients(&model.params);
        if !losses.total.is_finite() {
            return Err(TrainError::NonFinite { step });
        }
        trace.push(losses);
        adam_step(model, &grad, config.lr, config.weight_decay);
        log::trace!("step {step}: total {:.6}", losses.total);
    }
    if !model.params.is_finite() {
        return Err(TrainError::NonFinite { step: config.steps });
    }
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perplexity {
    pub objects: f64,
    pub words: f64,
}

/// `exp` of the mean self-identification cross-entropy per modality.
pub fn perplexity(
    model: &RepresentationModel,
    graph: &TrainingGraph,
    config: &TrainConfig,
) -> Result<Perplexity, TrainError> {
    check_shapes(model, graph)?;
    let objective = AlignObjective::new(graph, config.delta, config.layers, config.lambda_align);
    let [(lo, _), (lw, _)] = objective.identification(&model.params);
    Ok(Perplexity {
        objects: mean(&lo).exp(),
        words: mean(&lw).exp(),
    })
}

/// Fraction of nodes (both modalities pooled) whose head ranks their own
/// label first.
pub fn identity_retention(
    model: &RepresentationModel,
    graph: &TrainingGraph,
    config: &TrainConfig,
) -> Result<f64, TrainError> {
    check_shapes(model, graph)?;
    let objective = AlignObjective::new(graph, config.delta, config.layers, config.lambda_align);
    let [(_, ho), (_, hw)] = objective.identification(&model.params);
    let total = ho.len() + hw.len();
    if total == 0 {
        return Ok(1.0);
    }
    Ok(ho.iter().chain(&hw).filter(|&&h| h).count() as f64 / total as f64)
}
