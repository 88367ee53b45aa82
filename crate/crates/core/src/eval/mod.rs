//! Evaluation protocols: top-K mapping accuracy, learning curves, zero-shot
//! assignment with its baselines, and hyperparameter sweeps.

mod curve;
mod report;
mod sweep;
mod topk;
mod zeroshot;

pub use crate::corpus::GoldLexicon;
pub use curve::{learning_curve, write_curve_csv, CurveConfig, CurvePoint};
pub use report::{write_topk_csv, EvalReport, TopKTable};
pub use sweep::{hyperparameter_sweep, write_sweep_csv, SweepGrid, SweepRow};
pub use topk::{topk_accuracies, topk_accuracy};
pub use zeroshot::{
    zero_shot_protocol, MethodSummary, MethodTiming, ZeroShotConfig, ZeroShotMethod,
    ZeroShotReport,
};

use thiserror::Error;

use crate::align::TrainError;
use crate::assign::AssignError;
use crate::xgraph::GraphError;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("gold lexicon is empty")]
    EmptyGold,
    #[error("K must be at least 1")]
    InvalidK,
    #[error("need {needed} unambiguous gold pairs, found {available}")]
    InsufficientPairs { needed: usize, available: usize },
    #[error("invalid evaluation configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Assign(#[from] AssignError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Sample mean and sample standard deviation (n − 1); std is 0 for one value.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}
