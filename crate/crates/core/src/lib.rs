//! Streaming cross-situational learning over object/word co-occurrence graphs.
//!
//! The crate is organised along the pipeline:
//!
//! - [`corpus`]: tokenization, vocabularies, context windowing, episode files
//!   and the synthetic benchmark generator.
//! - [`xgraph`]: the incrementally built cross-modal graph with its edge,
//!   cross and mapping weights, snapshots and CSV export.
//! - [`align`]: neighborhood aggregation and training of aligned embeddings.
//! - [`assign`]: cosine similarity, Hungarian assignment, Spearman correlation
//!   and the alignment-correlation permutation search.
//! - [`eval`]: top-K mapping accuracy, learning curves, the zero-shot protocol
//!   and hyperparameter sweeps.

pub mod align;
pub mod assign;
pub mod corpus;
pub mod eval;
pub mod rng;
pub mod xgraph;

pub use align::{RepresentationModel, TrainConfig};
pub use corpus::{Episode, GoldLexicon, Modality, Vocabulary};
pub use xgraph::{CrossModalGraph, CrossWeightMode, CrossWeightTable, ZeroScope};
