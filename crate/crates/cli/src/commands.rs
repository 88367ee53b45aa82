use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use xsl_core::align::export::write_embeddings_tsv;
use xsl_core::align::{identity_retention, perplexity, train, AlignObjective, TrainingGraph};
use xsl_core::assign::{cosine_similarity_matrix, SimilarityMatrix};
use xsl_core::corpus::io::{read_episodes, read_gold_symbols, write_episode, write_gold_symbols};
use xsl_core::corpus::{generate_synthetic_corpus, CorpusError, RawEpisode, SyntheticCorpus};
use xsl_core::eval::{
    hyperparameter_sweep, learning_curve, topk_accuracies, write_curve_csv, write_sweep_csv,
    write_topk_csv, CurveConfig, EvalReport, TopKTable, ZeroShotReport,
};
use xsl_core::xgraph::export::write_edge_csv;
use xsl_core::xgraph::snapshot::Snapshot;
use xsl_core::{
    CrossModalGraph, CrossWeightMode, GoldLexicon, Modality, RepresentationModel, TrainConfig,
    Vocabulary, ZeroScope,
};

use crate::config::RunConfig;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Buffered output to a file, or to stdout when no path is given.
pub struct Output {
    path: Option<PathBuf>,
    inner: Box<dyn Write>,
}

impl Output {
    pub fn create(path: Option<&Path>) -> Result<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::io(p, e))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Output {
            path: path.map(Path::to_owned),
            inner,
        })
    }

    fn err(&self, e: io::Error) -> CliError {
        CliError::io(self.path.as_deref().unwrap_or(Path::new("<stdout>")), e)
    }

    /// Runs a writer against the output and flushes it.
    pub fn write_with(mut self, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
        let r = f(&mut self.inner).and_then(|_| self.inner.flush());
        r.map_err(|e| self.err(e))
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Reads every episode, failing on the first malformed line.
fn for_each_episode(path: &Path, mut f: impl FnMut(RawEpisode)) -> Result<()> {
    for ep in read_episodes(open(path)?) {
        f(ep.map_err(|e| CliError::corpus(path, e))?);
    }
    Ok(())
}

/// Observed symbol counts in first-seen order.
fn count_symbols(path: &Path) -> Result<(Vocabulary, Vocabulary)> {
    let mut objects = Vocabulary::new(Modality::Object, 0);
    let mut words = Vocabulary::new(Modality::Word, 0);
    for_each_episode(path, |ep| {
        for o in &ep.objects {
            objects.observe(o);
        }
        for w in &ep.words {
            words.observe(w);
        }
    })?;
    Ok((objects, words))
}

/// Adds counted symbols to existing vocabularies. Known words always
/// accumulate; new words enter once their count here reaches the threshold.
fn merge_counts(
    objects: &mut Vocabulary,
    words: &mut Vocabulary,
    counted: &(Vocabulary, Vocabulary),
    min_count: u64,
) {
    for (sym, &n) in counted.0.symbols().iter().zip(counted.0.counts()) {
        objects.add(sym, n);
    }
    for (sym, &n) in counted.1.symbols().iter().zip(counted.1.counts()) {
        if words.id(sym).is_some() || n >= min_count {
            words.add(sym, n);
        }
    }
}

fn load_snapshot(path: &Path) -> Result<Snapshot> {
    Snapshot::load(path).map_err(|e| CliError::snapshot(path, e))
}

fn load_gold(path: &Path, snapshot_objects: &Vocabulary, words: &Vocabulary) -> Result<GoldLexicon> {
    let map = read_gold_symbols(open(path)?).map_err(|e| CliError::corpus(path, e))?;
    let (gold, dropped) = GoldLexicon::from_symbols(&map, snapshot_objects, words);
    if dropped > 0 {
        log::warn!("{dropped} gold objects dropped (unknown object or no single in-vocabulary alias)");
    }
    if gold.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no gold entry matches the vocabulary",
            path.display()
        )));
    }
    Ok(gold)
}

fn log_timing(stage: &str, start: Instant, timings: &mut BTreeMap<String, f64>) {
    let secs = start.elapsed().as_secs_f64();
    log::info!("{stage} took {secs:.3}s");
    timings.insert(stage.to_owned(), secs);
}

fn config_value(config: &RunConfig) -> Value {
    serde_json::from_str(&config.to_flat_json()).expect("flat config is JSON")
}

pub fn gen_corpus(config: &RunConfig, out: &Path, gold_path: &Path) -> Result<()> {
    let SyntheticCorpus {
        objects,
        words,
        gold,
        episodes,
    } = generate_synthetic_corpus(&config.synthetic()).map_err(|e| CliError::corpus(out, e))?;
    let mut file = BufWriter::new(File::create(out).map_err(|e| CliError::io(out, e))?);
    let mut n = 0usize;
    for ep in episodes {
        let raw = RawEpisode {
            objects: ep.objects().iter().map(|&o| objects.symbols()[o as usize].clone()).collect(),
            words: ep.words().iter().map(|&w| words.symbols()[w as usize].clone()).collect(),
        };
        write_episode(&mut file, &raw).map_err(|e| CliError::io(out, e))?;
        n += 1;
    }
    file.flush().map_err(|e| CliError::io(out, e))?;
    Output::create(Some(gold_path))?
        .write_with(|w| write_gold_symbols(w, &gold.to_symbols(&objects, &words)))?;
    log::info!("wrote {n} episodes to {}", out.display());
    Ok(())
}

pub fn build_graph(
    config: &RunConfig,
    episodes: &Path,
    out: &Path,
    resume: Option<&Path>,
) -> Result<()> {
    let start = Instant::now();
    let counted = count_symbols(episodes)?;
    let (mut objects, mut words, mut graph) = match resume {
        Some(path) => {
            let snap = load_snapshot(path)?;
            if snap.window != config.window {
                return Err(CliError::Config(format!(
                    "{} was built with window {} but window is {}",
                    path.display(),
                    snap.window,
                    config.window
                )));
            }
            if snap.words.min_count() != config.min_count {
                return Err(CliError::Config(format!(
                    "{} was built with min_count {} but min_count is {}",
                    path.display(),
                    snap.words.min_count(),
                    config.min_count
                )));
            }
            (snap.objects, snap.words, snap.graph)
        }
        None => (
            Vocabulary::new(Modality::Object, 0),
            Vocabulary::new(Modality::Word, config.min_count),
            CrossModalGraph::new(0, 0),
        ),
    };
    merge_counts(&mut objects, &mut words, &counted, config.min_count);
    graph.resize(objects.len(), words.len());

    for_each_episode(episodes, |ep| {
        graph
            .ingest_episode(&ep.encode(&objects, &words), config.window)
            .expect("encoded ids lie within the resized graph");
    })?;

    let snap = Snapshot {
        window: config.window,
        objects,
        words,
        graph,
    };
    snap.save(out).map_err(|e| CliError::snapshot(out, e))?;
    let g = &snap.graph;
    println!(
        "episodes={} windows={} objects={} words={} object_edges={} word_edges={} cross_edges={}",
        g.episodes_ingested(),
        g.windows_ingested(),
        g.n_objects(),
        g.n_words(),
        g.n_edges(Modality::Object),
        g.n_edges(Modality::Word),
        g.n_cross_edges()
    );
    log::info!("built graph in {:.3}s", start.elapsed().as_secs_f64());
    Ok(())
}

/// A trained model with the settings needed to rebuild its training graph.
#[derive(Serialize, Deserialize)]
pub struct ModelFile {
    pub train: TrainConfig,
    /// `(object, word)` symbol pairs whose cross counts were removed
    pub holdout: Vec<(String, String)>,
    pub scope: ZeroScope,
    pub model: RepresentationModel,
}

impl ModelFile {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut file: ModelFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        file.model.standardize();
        Ok(file)
    }

    /// The graph the model was trained on.
    fn training_graph(&self, snap: &Snapshot) -> Result<TrainingGraph> {
        let graph = held_out(snap, &self.holdout, self.scope)?;
        let tg = TrainingGraph::new(&graph, self.train.cross_mode);
        if tg.n_objects() != self.model.n_objects() || tg.n_words() != self.model.n_words() {
            return Err(CliError::Data(format!(
                "model has {} objects / {} words but graph has {} / {}",
                self.model.n_objects(),
                self.model.n_words(),
                tg.n_objects(),
                tg.n_words()
            )));
        }
        Ok(tg)
    }
}

fn resolve_pairs(snap: &Snapshot, pairs: &[(String, String)]) -> Result<Vec<(u32, u32)>> {
    pairs
        .iter()
        .map(|(o, w)| {
            let oid = snap.objects.id(o);
            let wid = snap.words.id(w);
            match (oid, wid) {
                (Some(o), Some(w)) => Ok((o, w)),
                _ => Err(CliError::Data(format!("pair ({o}, {w}) is not in the graph vocabulary"))),
            }
        })
        .collect()
}

fn held_out(snap: &Snapshot, pairs: &[(String, String)], scope: ZeroScope) -> Result<CrossModalGraph> {
    if pairs.is_empty() {
        return Ok(snap.graph.clone());
    }
    let ids = resolve_pairs(snap, pairs)?;
    snap.graph
        .zero_out_pairs(&ids, scope)
        .map_err(|e| CliError::Data(e.to_string()))
}

fn read_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    serde_json::from_reader(open(path)?).map_err(|e| {
        CliError::Data(format!(
            "{}: expected a list of [object, word] pairs: {e}",
            path.display()
        ))
    })
}

pub fn train_model(
    config: &RunConfig,
    graph_path: &Path,
    out: &Path,
    trace_path: Option<&Path>,
    holdout: Option<&Path>,
) -> Result<()> {
    let snap = load_snapshot(graph_path)?;
    let holdout = holdout.map(read_pairs).transpose()?.unwrap_or_default();
    let mut file = ModelFile {
        train: config.train.clone(),
        holdout,
        scope: config.zero_shot.scope,
        model: RepresentationModel::new(snap.graph.n_objects(), snap.graph.n_words(), &config.train),
    };
    let tg = file.training_graph(&snap)?;
    let start = Instant::now();
    let trace = train(&mut file.model, &tg, &config.train)?;
    log::info!(
        "trained {} steps in {:.3}s",
        trace.len(),
        start.elapsed().as_secs_f64()
    );
    if let Some(last) = trace.last() {
        log::info!(
            "final loss {:.6} (objects {:.6}, words {:.6}, align {:.6})",
            last.total,
            last.ss_objects,
            last.ss_words,
            last.align
        );
    }
    let p = perplexity(&file.model, &tg, &config.train)?;
    let retained = identity_retention(&file.model, &tg, &config.train)?;
    log::info!(
        "perplexity objects {:.4} words {:.4}; identity retention {:.4}",
        p.objects,
        p.words,
        retained
    );
    if let Some(path) = trace_path {
        Output::create(Some(path))?.write_with(|w| {
            writeln!(w, "step,loss_ss_o,loss_ss_w,loss_align,loss_total")?;
            for (step, l) in trace.iter().enumerate() {
                writeln!(w, "{step},{},{},{},{}", l.ss_objects, l.ss_words, l.align, l.total)?;
            }
            Ok(())
        })?;
    }
    let json = serde_json::to_string(&file).map_err(|e| CliError::Data(e.to_string()))?;
    write_file(out, &json)
}

pub fn eval_map(
    config: &RunConfig,
    graph_path: &Path,
    gold_path: &Path,
    out: Option<&Path>,
    report: Option<&Path>,
) -> Result<()> {
    let snap = load_snapshot(graph_path)?;
    let gold = load_gold(gold_path, &snap.objects, &snap.words)?;
    let start = Instant::now();
    let mut rows = Vec::new();
    for mode in CrossWeightMode::ALL {
        rows.push(TopKTable {
            method: mode.name().to_owned(),
            accuracies: topk_accuracies(&snap.graph, &gold, &config.ks, mode)?,
        });
    }
    let mut timings = BTreeMap::new();
    log_timing("mapping", start, &mut timings);
    Output::create(out)?.write_with(|w| write_topk_csv(w, &rows))?;
    if let Some(path) = report {
        let r = EvalReport {
            config: config_value(config),
            topk: rows,
            timings,
            ..EvalReport::default()
        };
        write_file(path, &r.to_json().expect("report serializes"))?;
    }
    Ok(())
}

pub fn learning_curve_cmd(
    config: &RunConfig,
    episodes: &Path,
    gold_path: &Path,
    out: Option<&Path>,
) -> Result<()> {
    let counted = count_symbols(episodes)?;
    let mut objects = Vocabulary::new(Modality::Object, 0);
    let mut words = Vocabulary::new(Modality::Word, config.min_count);
    merge_counts(&mut objects, &mut words, &counted, config.min_count);
    let gold = load_gold(gold_path, &objects, &words)?;

    let mut graph = CrossModalGraph::new(objects.len(), words.len());
    let curve_config = CurveConfig {
        eval_every: config.eval_every,
        ks: config.ks.clone(),
        window: config.window,
        mode: config.mode,
    };
    // the first pass validated every line; a late failure can only be I/O
    let mut failure: Option<CorpusError> = None;
    let stream = read_episodes(open(episodes)?).map_while(|r| match r {
        Ok(ep) => Some(ep.encode(&objects, &words)),
        Err(e) => {
            failure = Some(e);
            None
        }
    });
    let points = learning_curve(&mut graph, stream, &gold, &curve_config)?;
    if let Some(e) = failure {
        return Err(CliError::corpus(episodes, e));
    }
    Output::create(out)?.write_with(|w| write_curve_csv(w, &points))
}

fn write_zero_shot_csv(w: &mut dyn Write, report: &ZeroShotReport) -> io::Result<()> {
    writeln!(w, "method,mean,std,trials")?;
    for (name, s) in &report.methods {
        writeln!(w, "{name},{:.2},{:.2},{}", s.mean, s.std, s.trials)?;
    }
    Ok(())
}

pub fn eval_zeroshot(
    config: &RunConfig,
    graph_path: &Path,
    gold_path: &Path,
    out: Option<&Path>,
    report: Option<&Path>,
) -> Result<()> {
    let snap = load_snapshot(graph_path)?;
    let gold = load_gold(gold_path, &snap.objects, &snap.words)?;
    let start = Instant::now();
    let result = xsl_core::eval::zero_shot_protocol(&snap.graph, &gold, &config.zero_shot())?;
    let mut timings = BTreeMap::new();
    log_timing("zero_shot", start, &mut timings);
    for (name, s) in &result.methods {
        log::info!("{name}: {:.2} ± {:.2} over {} trials", s.mean, s.std, s.trials);
    }
    Output::create(out)?.write_with(|w| write_zero_shot_csv(w, &result))?;
    if let Some(path) = report {
        let r = EvalReport {
            config: config_value(config),
            zero_shot: vec![result],
            timings,
            ..EvalReport::default()
        };
        write_file(path, &r.to_json().expect("report serializes"))?;
    }
    Ok(())
}

pub fn sweep(config: &RunConfig, graph_path: &Path, gold_path: &Path, out: Option<&Path>) -> Result<()> {
    let snap = load_snapshot(graph_path)?;
    let gold = load_gold(gold_path, &snap.objects, &snap.words)?;
    let rows = hyperparameter_sweep(&snap.graph, &gold, &config.zero_shot(), &config.sweep_grid())?;
    Output::create(out)?.write_with(|w| write_sweep_csv(w, &rows))
}

pub fn export_graph(config: &RunConfig, graph_path: &Path, out: Option<&Path>) -> Result<()> {
    let snap = load_snapshot(graph_path)?;
    Output::create(out)?
        .write_with(|w| write_edge_csv(w, &snap.graph, &snap.objects, &snap.words, config.mode))
}

pub fn export_embeddings(
    graph_path: &Path,
    model_path: &Path,
    out: Option<&Path>,
    aggregated: bool,
) -> Result<()> {
    let snap = load_snapshot(graph_path)?;
    let file = ModelFile::load(model_path)?;
    let tg = file.training_graph(&snap)?;
    let params = &file.model.params;
    let (o, w) = if aggregated {
        let t = &file.train;
        AlignObjective::new(&tg, t.delta, t.layers, t.lambda_align).aggregated(params)
    } else {
        (params.objects.clone(), params.words.clone())
    };
    Output::create(out)?.write_with(|wr| write_embeddings_tsv(wr, (&snap.objects, &o), (&snap.words, &w)))
}

pub enum SimPairs<'a> {
    File(&'a Path),
    Gold { path: &'a Path, limit: Option<usize> },
}

pub fn export_sim(
    graph_path: &Path,
    model_path: &Path,
    pairs: SimPairs<'_>,
    out: Option<&Path>,
) -> Result<()> {
    let snap = load_snapshot(graph_path)?;
    let file = ModelFile::load(model_path)?;
    let tg = file.training_graph(&snap)?;
    let ids = match pairs {
        SimPairs::File(path) => resolve_pairs(&snap, &read_pairs(path)?)?,
        SimPairs::Gold { path, limit } => {
            let gold = load_gold(path, &snap.objects, &snap.words)?;
            let mut ids = gold.unambiguous_pairs();
            ids.truncate(limit.unwrap_or(usize::MAX));
            ids
        }
    };
    let t = &file.train;
    let (agg_o, agg_w) =
        AlignObjective::new(&tg, t.delta, t.layers, t.lambda_align).aggregated(&file.model.params);
    let rows: Vec<u32> = ids.iter().map(|p| p.0).collect();
    let cols: Vec<u32> = ids.iter().map(|p| p.1).collect();
    let pick = |m: &Array2<f64>, ids: &[u32]| {
        let idx: Vec<usize> = ids.iter().map(|&i| i as usize).collect();
        m.select(Axis(0), &idx)
    };
    let sim = cosine_similarity_matrix(pick(&agg_o, &rows).view(), pick(&agg_w, &cols).view())
        .map_err(|e| CliError::Data(e.to_string()))?;
    let sim = SimilarityMatrix::new(rows, cols, sim).map_err(|e| CliError::Data(e.to_string()))?;
    Output::create(out)?.write_with(|w| sim.write_csv(w, &snap.objects, &snap.words))
}
