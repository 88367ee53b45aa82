//! Versioned binary graph snapshots.
//!
//! Layout (little endian):
//!
//! ```text
//! magic      8 bytes  "XSLGRAPH"
//! version    u32
//! header_len u64
//! header     JSON (window, vocabularies, counters, section lengths)
//! d_object   u64 × n_objects
//! d_word     u64 × n_words
//! c_object   (u32 i, u32 j, u64 c) × header.object_pairs, sorted, i < j
//! c_word     (u32 i, u32 j, u64 c) × header.word_pairs, sorted, i < j
//! c_cross    (u32 o, u32 w, u64 c) × header.cross_pairs, sorted
//! ```
//!
//! The whole file is read before anything is built, so a failed load never
//! yields a partial graph.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CrossModalGraph, PairCounts};
use crate::corpus::{Modality, Vocabulary};

pub const MAGIC: &[u8; 8] = b"XSLGRAPH";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A graph together with the vocabularies and window size it was built with.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub window: usize,
    pub objects: Vocabulary,
    pub words: Vocabulary,
    pub graph: CrossModalGraph,
}

#[derive(Serialize, Deserialize)]
struct Header {
    window: usize,
    n_objects: usize,
    n_words: usize,
    objects: Vocabulary,
    words: Vocabulary,
    episodes_ingested: u64,
    windows_ingested: u64,
    object_pairs: usize,
    word_pairs: usize,
    cross_pairs: usize,
}

impl Snapshot {
    pub fn to_bytes(&self) -> Result<Vec<u8>, SnapshotError> {
        let g = &self.graph;
        if self.objects.len() != g.n_objects() || self.words.len() != g.n_words() {
            return Err(SnapshotError::Corrupt(format!(
                "vocabulary sizes {}/{} do not match graph {}/{}",
                self.objects.len(),
                self.words.len(),
                g.n_objects(),
                g.n_words()
            )));
        }
        let header = Header {
            window: self.window,
            n_objects: g.n_objects(),
            n_words: g.n_words(),
            objects: self.objects.clone(),
            words: self.words.clone(),
            episodes_ingested: g.episodes_ingested,
            windows_ingested: g.windows_ingested,
            object_pairs: g.object_pairs.len(),
            word_pairs: g.word_pairs.len(),
            cross_pairs: g.cross_pairs.len(),
        };
        let header = serde_json::to_vec(&header).map_err(io::Error::from)?;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(header.len() as u64).to_le_bytes());
        out.extend_from_slice(&header);
        for d in g.object_counts.iter().chain(&g.word_counts) {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for pairs in [
            g.sorted_pairs(Modality::Object),
            g.sorted_pairs(Modality::Word),
            g.sorted_cross_pairs(),
        ] {
            for ((i, j), c) in pairs {
                out.extend_from_slice(&i.to_le_bytes());
                out.extend_from_slice(&j.to_le_bytes());
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(SnapshotError::Corrupt("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(SnapshotError::Version {
                found: version,
                expected: VERSION,
            });
        }
        let header_len = usize::try_from(r.u64()?)
            .map_err(|_| SnapshotError::Corrupt("header length overflow".into()))?;
        let mut header: Header = serde_json::from_slice(r.take(header_len)?)
            .map_err(|e| SnapshotError::Corrupt(format!("header: {e}")))?;
        header.objects.reindex();
        header.words.reindex();
        if header.objects.len() != header.n_objects || header.words.len() != header.n_words {
            return Err(SnapshotError::Corrupt("vocabulary size mismatch".into()));
        }

        let mut object_counts = Vec::with_capacity(header.n_objects);
        for _ in 0..header.n_objects {
            object_counts.push(r.u64()?);
        }
        let mut word_counts = Vec::with_capacity(header.n_words);
        for _ in 0..header.n_words {
            word_counts.push(r.u64()?);
        }
        let object_pairs = r.pairs(header.object_pairs, header.n_objects, header.n_objects, true)?;
        let word_pairs = r.pairs(header.word_pairs, header.n_words, header.n_words, true)?;
        let cross_pairs = r.pairs(header.cross_pairs, header.n_objects, header.n_words, false)?;
        if r.pos != bytes.len() {
            return Err(SnapshotError::Corrupt(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Ok(Snapshot {
            window: header.window,
            objects: header.objects,
            words: header.words,
            graph: CrossModalGraph {
                object_counts,
                word_counts,
                object_pairs,
                word_pairs,
                cross_pairs,
                episodes_ingested: header.episodes_ingested,
                windows_ingested: header.windows_ingested,
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), SnapshotError> {
        let bytes = self.to_bytes()?;
        let mut f = fs::File::create(path)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Snapshot, SnapshotError> {
        Self::from_bytes(&fs::read(path)?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SnapshotError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| SnapshotError::Corrupt("truncated file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, SnapshotError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn pairs(
        &mut self,
        n: usize,
        rows: usize,
        cols: usize,
        upper: bool,
    ) -> Result<PairCounts, SnapshotError> {
        let mut map = PairCounts::default();
        map.reserve(n);
        let mut prev: Option<(u32, u32)> = None;
        for _ in 0..n {
            let key = (self.u32()?, self.u32()?);
            let c = self.u64()?;
            let bad = key.0 as usize >= rows
                || key.1 as usize >= cols
                || (upper && key.0 >= key.1)
                || c == 0
                || prev.is_some_and(|p| p >= key);
            if bad {
                return Err(SnapshotError::Corrupt(format!("invalid pair entry {key:?}")));
            }
            prev = Some(key);
            map.insert(key, c);
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Episode;

    fn vocab(m: Modality, n: usize) -> Vocabulary {
        Vocabulary::from_parts(m, (0..n).map(|i| format!("s{i}")).collect(), vec![1; n], 1)
            .unwrap()
    }

    fn snap(graph: CrossModalGraph) -> Snapshot {
        Snapshot {
            window: 2,
            objects: vocab(Modality::Object, graph.n_objects()),
            words: vocab(Modality::Word, graph.n_words()),
            graph,
        }
    }

    fn toy() -> Snapshot {
        let mut g = CrossModalGraph::new(2, 2);
        g.ingest_episode(&Episode::new(vec![0, 1], vec![0, 1]), 2)
            .unwrap();
        snap(g)
    }

    #[test]
    fn empty_roundtrip() {
        let s = snap(CrossModalGraph::new(0, 0));
        assert_eq!(Snapshot::from_bytes(&s.to_bytes().unwrap()).unwrap(), s);
    }

    #[test]
    fn toy_roundtrip_through_file() {
        let s = toy();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        s.save(&path).unwrap();
        let back = Snapshot::load(&path).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.words.id("s1"), Some(1));
    }

    #[test]
    fn truncated_is_corrupt() {
        let bytes = toy().to_bytes().unwrap();
        for cut in [3, 12, 30, bytes.len() - 1] {
            assert!(matches!(
                Snapshot::from_bytes(&bytes[..cut]),
                Err(SnapshotError::Corrupt(_))
            ));
        }
    }

    #[test]
    fn version_mismatch_is_distinct() {
        let mut bytes = toy().to_bytes().unwrap();
        bytes[8..12].copy_from_slice(&99u32.to_le_bytes());
        assert!(matches!(
            Snapshot::from_bytes(&bytes),
            Err(SnapshotError::Version { found: 99, .. })
        ));
    }

    #[test]
    fn missing_file_is_io() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            Snapshot::load(&dir.path().join("nope")),
            Err(SnapshotError::Io(_))
        ));
    }
}
