use serde::{Deserialize, Serialize};

use crate::xgraph::CrossWeightMode;

/// Hyperparameters for aligned representation training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    /// width of the single linear hidden layer of each identification head
    pub hidden: usize,
    /// propagation rate of the neighborhood aggregation
    pub delta: f64,
    /// number of aggregation layers
    pub layers: usize,
    pub lambda_align: f64,
    pub lr: f64,
    pub weight_decay: f64,
    pub steps: usize,
    pub seed: u64,
    pub init_scale: f64,
    /// cross weights used by the alignment term
    pub cross_mode: CrossWeightMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            hidden: 100,
            delta: 0.3,
            layers: 5,
            lambda_align: 1.6,
            lr: 0.001,
            weight_decay: 1e-5,
            steps: 2000,
            seed: 0,
            init_scale: 0.1,
            cross_mode: CrossWeightMode::Product,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.dim == 0 || self.hidden == 0 {
            return Err("dim and hidden must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(format!("delta {} outside [0,1]", self.delta));
        }
        for (name, v) in [
            ("lambda_align", self.lambda_align),
            ("lr", self.lr),
            ("weight_decay", self.weight_decay),
            ("init_scale", self.init_scale),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        Ok(())
    }
}
