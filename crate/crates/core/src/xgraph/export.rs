//! CSV edge lists: `modality,i_symbol,j_symbol,count,weight`.
//!
//! `modality` is `object`, `word` or `cross`; cross rows carry the object in
//! `i_symbol` and the word in `j_symbol`.

use std::io::{self, Write};

use super::{CrossModalGraph, CrossWeightMode, CrossWeightTable};
use crate::corpus::{Modality, Vocabulary};

/// Quotes a CSV field when it contains a separator, quote or newline.
pub fn csv_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"")).into()
    } else {
        s.into()
    }
}

fn symbol(v: &Vocabulary, id: u32) -> String {
    v.symbol(id).map_or_else(|| id.to_string(), |s| csv_field(s).into_owned())
}

pub fn write_edge_csv<W: Write + ?Sized>(
    out: &mut W,
    graph: &CrossModalGraph,
    objects: &Vocabulary,
    words: &Vocabulary,
    mode: CrossWeightMode,
) -> io::Result<()> {
    writeln!(out, "modality,i_symbol,j_symbol,count,weight")?;
    for (modality, vocab) in [(Modality::Object, objects), (Modality::Word, words)] {
        for ((i, j), c) in graph.sorted_pairs(modality) {
            let e = graph.edge_weight(modality, i, j).unwrap_or(0.0);
            writeln!(
                out,
                "{},{},{},{c},{e}",
                modality.as_str(),
                symbol(vocab, i),
                symbol(vocab, j)
            )?;
        }
    }
    let table = CrossWeightTable::new(graph);
    for ((o, w), c) in graph.sorted_cross_pairs() {
        let e = table.weight(o, w, mode);
        writeln!(out, "cross,{},{},{c},{e}", symbol(objects, o), symbol(words, w))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Episode;

    #[test]
    fn toy_export() {
        let mut g = CrossModalGraph::new(2, 2);
        g.ingest_episode(&Episode::new(vec![0, 1], vec![0, 1]), 2)
            .unwrap();
        let o = Vocabulary::from_parts(Modality::Object, vec!["o1".into(), "o,2".into()], vec![1, 1], 0)
            .unwrap();
        let w = Vocabulary::from_parts(Modality::Word, vec!["w1".into(), "w2".into()], vec![1, 1], 0)
            .unwrap();
        let mut buf = Vec::new();
        write_edge_csv(&mut buf, &g, &o, &w, CrossWeightMode::Product).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "modality,i_symbol,j_symbol,count,weight");
        assert_eq!(lines[1], "object,o1,\"o,2\",1,1");
        assert_eq!(lines[2], "word,w1,w2,1,0.25");
        assert_eq!(lines[3], "cross,o1,w1,2,0.25");
        assert_eq!(lines.len(), 7);
    }
}
