//! Episode JSON Lines and gold lexicon JSON.
//!
//! One episode per line, either `{"objects": [...], "text": "..."}` or the
//! pre-tokenized `{"objects": [...], "words": [...]}`. Objects-only episodes
//! omit both text fields. Blank lines are ignored.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{tokenize, CorpusError, RawEpisode};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EpisodeLine {
    #[serde(default)]
    objects: Vec<String>,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    words: Option<Vec<String>>,
}

#[derive(Serialize)]
struct EpisodeOut<'a> {
    objects: &'a [String],
    words: &'a [String],
}

/// Parses one line. `line_no` is 1-based and only used for error reporting.
pub fn parse_episode_line(line: &str, line_no: usize) -> Result<RawEpisode, CorpusError> {
    let parsed: EpisodeLine = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
        line: line_no,
        message: e.to_string(),
    })?;
    let words = match (parsed.text, parsed.words) {
        (Some(_), Some(_)) => {
            return Err(CorpusError::Malformed {
                line: line_no,
                message: "both \"text\" and \"words\" given".into(),
            })
        }
        (Some(text), None) => tokenize(&text),
        (None, Some(words)) => words,
        (None, None) => Vec::new(),
    };
    Ok(RawEpisode {
        objects: parsed.objects,
        words,
    })
}

/// Streams episodes from a reader, one line at a time.
pub fn read_episodes<R: BufRead>(
    reader: R,
) -> impl Iterator<Item = Result<RawEpisode, CorpusError>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(CorpusError::Io(e))),
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(parse_episode_line(&l, i + 1)),
        })
}

pub fn write_episode<W: Write + ?Sized>(out: &mut W, episode: &RawEpisode) -> std::io::Result<()> {
    let line = serde_json::to_string(&EpisodeOut {
        objects: &episode.objects,
        words: &episode.words,
    })?;
    writeln!(out, "{line}")
}

pub fn read_gold_symbols<R: std::io::Read>(
    reader: R,
) -> Result<BTreeMap<String, Vec<String>>, CorpusError> {
    serde_json::from_reader(reader).map_err(|e| CorpusError::Gold(e.to_string()))
}

pub fn write_gold_symbols<W: Write + ?Sized>(
    out: &mut W,
    map: &BTreeMap<String, Vec<String>>,
) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, map)?;
    writeln!(out)
}
