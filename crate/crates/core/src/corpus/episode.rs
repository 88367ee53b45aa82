use serde::{Deserialize, Serialize};

use super::Vocabulary;

/// An episode before id mapping: object symbols and tokenized words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEpisode {
    pub objects: Vec<String>,
    pub words: Vec<String>,
}

impl RawEpisode {
    /// Maps symbols to ids. Words missing from `words` (filtered as rare) are
    /// removed from the sequence; unknown objects are dropped as well.
    pub fn encode(&self, objects: &Vocabulary, words: &Vocabulary) -> Episode {
        Episode::new(
            self.objects.iter().filter_map(|o| objects.id(o)).collect(),
            self.words.iter().filter_map(|w| words.id(w)).collect(),
        )
    }
}

/// One training sample: a set of object ids and a word-id sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Episode {
    objects: Vec<u32>,
    words: Vec<u32>,
}

impl Episode {
    /// Objects are stored sorted and deduplicated.
    pub fn new(mut objects: Vec<u32>, words: Vec<u32>) -> Self {
        objects.sort_unstable();
        objects.dedup();
        Episode { objects, words }
    }

    pub fn objects(&self) -> &[u32] {
        &self.objects
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }
}

/// A local context paired with the episode's full object set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedInput {
    pub objects: Vec<u32>,
    pub context: Vec<u32>,
}

/// Iterates the context sets of a word sequence for window size `h`.
///
/// The sequence is conceptually left-padded with `h - 1` dummies, giving
/// `T = N + h - 1` windows. Window `t` (1-based) covers padded positions
/// `t ..= t + h - 1`, truncated at `T`, so its real words are
/// `words[t - h .. t]` clipped to the sequence. Each yielded set is sorted
/// and duplicate-free. An empty sequence yields nothing.
pub fn context_windows(words: &[u32], h: usize) -> impl Iterator<Item = Vec<u32>> + '_ {
    assert!(h >= 1, "window size must be at least 1");
    let n = words.len();
    let t_max = if n == 0 { 0 } else { n + h - 1 };
    (1..=t_max).map(move |t| {
        let start = t.saturating_sub(h);
        let end = t.min(n);
        let mut ctx = words[start..end].to_vec();
        ctx.sort_unstable();
        ctx.dedup();
        ctx
    })
}

pub fn window_episode(episode: &Episode, h: usize) -> Vec<WindowedInput> {
    context_windows(episode.words(), h)
        .map(|context| WindowedInput {
            objects: episode.objects().to_vec(),
            context,
        })
        .collect()
}
