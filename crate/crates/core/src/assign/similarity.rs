use std::io::{self, Write};

use ndarray::{Array2, ArrayView2};

use super::AssignError;
use crate::corpus::Vocabulary;
use crate::xgraph::export::csv_field;

/// Cosine similarities between the rows of `a` and the rows of `b`.
/// Rows with zero norm produce zero entries.
pub fn cosine_similarity_matrix(
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
) -> Result<Array2<f64>, AssignError> {
    if a.ncols() != b.ncols() {
        return Err(AssignError::DimensionMismatch(a.ncols(), b.ncols()));
    }
    let norms = |m: ArrayView2<f64>| -> Vec<f64> {
        m.rows().into_iter().map(|r| r.dot(&r).sqrt()).collect()
    };
    let (na, nb) = (norms(a), norms(b));
    let mut out = a.dot(&b.t());
    for ((i, j), v) in out.indexed_iter_mut() {
        let den = na[i] * nb[j];
        *v = if den > 0.0 { *v / den } else { 0.0 };
    }
    Ok(out)
}

/// A square similarity matrix between objects (rows) and words (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    rows: Vec<u32>,
    cols: Vec<u32>,
    values: Array2<f64>,
}

impl SimilarityMatrix {
    pub fn new(rows: Vec<u32>, cols: Vec<u32>, values: Array2<f64>) -> Result<Self, AssignError> {
        let (r, c) = values.dim();
        if r != c {
            return Err(AssignError::NotSquare { rows: r, cols: c });
        }
        if rows.len() != r {
            return Err(AssignError::LengthMismatch(rows.len(), r));
        }
        if cols.len() != c {
            return Err(AssignError::LengthMismatch(cols.len(), c));
        }
        for ids in [&rows, &cols] {
            let mut seen = std::collections::HashSet::new();
            if let Some(&d) = ids.iter().find(|&&id| !seen.insert(id)) {
                return Err(AssignError::DuplicateId(d));
            }
        }
        if let Some(((i, j), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(AssignError::NonFinite(i, j));
        }
        Ok(SimilarityMatrix { rows, cols, values })
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn cols(&self) -> &[u32] {
        &self.cols
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// CSV with a header row of word symbols and a leading object column.
    pub fn write_csv<W: Write + ?Sized>(
        &self,
        out: &mut W,
        objects: &Vocabulary,
        words: &Vocabulary,
    ) -> io::Result<()> {
        let sym = |v: &Vocabulary, id: u32| {
            v.symbol(id)
                .map_or_else(|| id.to_string(), |s| csv_field(s).into_owned())
        };
        let header: Vec<String> = self.cols.iter().map(|&w| sym(words, w)).collect();
        writeln!(out, "object,{}", header.join(","))?;
        for (i, &o) in self.rows.iter().enumerate() {
            let vals: Vec<String> = self.values.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{},{}", sym(objects, o), vals.join(","))?;
        }
        Ok(())
    }
}
