//! Assignment and correlation tools used by the evaluation protocols.

mod hungarian;
mod search;
mod similarity;
mod spearman;

pub use hungarian::{hungarian, Assignment, Objective};
pub use search::{alignment_correlation_search, upper_triangle, SearchResult};
pub use similarity::{cosine_similarity_matrix, SimilarityMatrix};
pub use spearman::{average_ranks, pearson, spearman};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AssignError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("at least two observations are required, got {0}")]
    TooShort(usize),
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("duplicate id {0} in similarity matrix labels")]
    DuplicateId(u32),
}
