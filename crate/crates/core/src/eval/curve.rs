use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{topk_accuracies, EvalError};
use crate::corpus::{Episode, GoldLexicon, Modality};
use crate::xgraph::{CrossModalGraph, CrossWeightMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub eval_every: usize,
    pub ks: Vec<usize>,
    pub window: usize,
    pub mode: CrossWeightMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// episodes ingested so far, including any ingested before the curve started
    pub episodes: u64,
    pub accuracies: BTreeMap<usize, f64>,
    /// objects and words observed at least once
    pub n_objects: usize,
    pub n_words: usize,
}

fn checkpoint(
    graph: &CrossModalGraph,
    gold: &GoldLexicon,
    config: &CurveConfig,
) -> Result<CurvePoint, EvalError> {
    let seen = |m| graph.occurrence_counts(m).iter().filter(|&&c| c > 0).count();
    Ok(CurvePoint {
        episodes: graph.episodes_ingested(),
        accuracies: topk_accuracies(graph, gold, &config.ks, config.mode)?,
        n_objects: seen(Modality::Object),
        n_words: seen(Modality::Word),
    })
}

/// Streams `episodes` into `graph`, recording top-K accuracy and vocabulary
/// coverage after every `eval_every` episodes and once more at the end when
/// the stream length is not a multiple of `eval_every`.
pub fn learning_curve<I>(
    graph: &mut CrossModalGraph,
    episodes: I,
    gold: &GoldLexicon,
    config: &CurveConfig,
) -> Result<Vec<CurvePoint>, EvalError>
where
    I: IntoIterator<Item = Episode>,
{
    if config.eval_every == 0 {
        return Err(EvalError::Config("eval_every must be at least 1".into()));
    }
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let mut points = Vec::new();
    let mut since = 0;
    for episode in episodes {
        graph.ingest_episode(&episode, config.window)?;
        since += 1;
        if since == config.eval_every {
            points.push(checkpoint(graph, gold, config)?);
            since = 0;
        }
    }
    if since > 0 {
        points.push(checkpoint(graph, gold, config)?);
    }
    Ok(points)
}

/// CSV `episodes,top1,...,topK,n_objects,n_words`.
pub fn write_curve_csv<W: Write + ?Sized>(out: &mut W, points: &[CurvePoint]) -> std::io::Result<()> {
    let ks: Vec<usize> = points
        .first()
        .map(|p| p.accuracies.keys().copied().collect())
        .unwrap_or_default();
    write!(out, "episodes")?;
    for k in &ks {
        write!(out, ",top{k}")?;
    }
    writeln!(out, ",n_objects,n_words")?;
    for p in points {
        write!(out, "{}", p.episodes)?;
        for k in &ks {
            write!(out, ",{}", p.accuracies.get(k).copied().unwrap_or(f64::NAN))?;
        }
        writeln!(out, ",{},{}", p.n_objects, p.n_words)?;
    }
    Ok(())
}
