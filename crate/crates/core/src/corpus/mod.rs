//! Raw episode data to id-mapped, windowed multi-modal inputs.

mod episode;
mod gold;
pub mod io;
mod synthetic;
mod tokenize;
mod vocab;

pub use episode::{context_windows, window_episode, Episode, RawEpisode, WindowedInput};
pub use gold::GoldLexicon;
pub use synthetic::{generate_synthetic_corpus, SyntheticConfig, SyntheticCorpus};
pub use tokenize::tokenize;
pub use vocab::{build_vocabulary, Modality, Vocabulary};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("invalid synthetic configuration: {0}")]
    Config(String),
    #[error("invalid gold lexicon: {0}")]
    Gold(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
