//! Aligned cross-modal representation learning over a frozen graph.

mod aggregate;
mod config;
pub mod export;
mod graph;
mod model;
mod objective;
mod train;

pub use aggregate::{aggregate, Aggregator};
pub use config::TrainConfig;
pub use graph::{Csr, TrainingGraph};
pub use model::{AdamState, Head, Parameters, RepresentationModel, GROUP_NAMES};
pub use objective::{cosine_distance, Losses, AlignObjective};
pub use train::{
    adam_step, backward, forward_losses, identity_retention, perplexity, train, Perplexity,
    TrainError,
};
