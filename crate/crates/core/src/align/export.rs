//! Embedding TSV: `modality<TAB>symbol<TAB>v1<TAB>…<TAB>vdim`.

use std::io::{self, Write};

use ndarray::Array2;

use crate::corpus::Vocabulary;

pub fn write_embeddings_tsv<W: Write + ?Sized>(
    out: &mut W,
    objects: (&Vocabulary, &Array2<f64>),
    words: (&Vocabulary, &Array2<f64>),
) -> io::Result<()> {
    for (vocab, vectors) in [objects, words] {
        let modality = vocab.modality().as_str();
        for (id, row) in vectors.rows().into_iter().enumerate() {
            let sym = vocab.symbol(id as u32).unwrap_or("");
            write!(out, "{modality}\t{sym}")?;
            for v in row {
                write!(out, "\t{v}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}
