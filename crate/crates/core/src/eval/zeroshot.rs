//! Zero-shot mapping: erase the cross counts of `Z` held-out gold pairs,
//! retrain, and recover the pairing from embedding similarities alone.

use std::collections::BTreeMap;
use std::time::Instant;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{mean_std, EvalError};
use crate::align::{perplexity, train, AlignObjective, Perplexity, TrainingGraph};
use crate::assign::{alignment_correlation_search, cosine_similarity_matrix, hungarian, Objective};
use crate::corpus::GoldLexicon;
use crate::rng::{derive_seed, seeded};
use crate::xgraph::{CrossModalGraph, ZeroScope};
use crate::{RepresentationModel, TrainConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroShotMethod {
    /// aligned training, Hungarian assignment over cross-modal cosine similarity
    Ours,
    /// the same with `lambda_align = 0`
    NoAlign,
    /// permutation maximizing the alignment correlation of the `Ours` model
    Spearman,
    Random,
}

impl ZeroShotMethod {
    pub const ALL: [ZeroShotMethod; 4] = [Self::Ours, Self::NoAlign, Self::Spearman, Self::Random];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ours => "ours",
            Self::NoAlign => "no_align",
            Self::Spearman => "spearman",
            Self::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZeroShotConfig {
    /// held-out pairs per trial
    pub z: usize,
    pub trials: usize,
    pub scope: ZeroScope,
    /// when false the held-out pairs keep their counts (control condition)
    pub zero_pairs: bool,
    pub methods: Vec<ZeroShotMethod>,
    pub seed: u64,
    pub spearman_max_samples: usize,
    pub train: TrainConfig,
}

impl Default for ZeroShotConfig {
    fn default() -> Self {
        ZeroShotConfig {
            z: 10,
            trials: 30,
            scope: ZeroScope::PairOnly,
            zero_pairs: true,
            methods: ZeroShotMethod::ALL.to_vec(),
            seed: 0,
            spearman_max_samples: 1_000_000,
            train: TrainConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    /// percentages
    pub mean: f64,
    pub std: f64,
    pub trials: usize,
    pub accuracies: Vec<f64>,
    /// mean over trials of the trained model's perplexities
    pub perplexity: Option<Perplexity>,
}

/// Wall-clock seconds summed over trials. Kept apart from the accuracies,
/// which are reproducible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MethodTiming {
    pub train_seconds: f64,
    pub mapping_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroShotReport {
    pub z: usize,
    pub trials: usize,
    pub scope: ZeroScope,
    pub zero_pairs: bool,
    pub methods: BTreeMap<String, MethodSummary>,
    pub timings: BTreeMap<String, MethodTiming>,
}

struct Trained {
    objects: Array2<f64>,
    words: Array2<f64>,
    perplexity: Perplexity,
    seconds: f64,
}

fn train_for_trial(
    graph: &TrainingGraph,
    config: &TrainConfig,
) -> Result<Trained, EvalError> {
    let start = Instant::now();
    let mut model = RepresentationModel::new(graph.n_objects(), graph.n_words(), config);
    train(&mut model, graph, config)?;
    let (objects, words) = AlignObjective::new(graph, config.delta, config.layers, config.lambda_align)
        .aggregated(&model.params);
    let perplexity = perplexity(&model, graph, config)?;
    Ok(Trained {
        objects,
        words,
        perplexity,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn accuracy(permutation: &[usize]) -> f64 {
    let hits = permutation.iter().enumerate().filter(|&(i, &p)| i == p).count();
    100.0 * hits as f64 / permutation.len() as f64
}

/// Rows `ids` of `m`, in order.
fn select(m: &Array2<f64>, ids: impl Iterator<Item = u32>) -> Array2<f64> {
    let idx: Vec<usize> = ids.map(|i| i as usize).collect();
    m.select(Axis(0), &idx)
}

#[derive(Default)]
struct Accumulator {
    accuracies: Vec<f64>,
    perplexities: Vec<Perplexity>,
    timing: MethodTiming,
}

impl Accumulator {
    fn summary(&self) -> MethodSummary {
        let (mean, std) = mean_std(&self.accuracies);
        let perplexity = (!self.perplexities.is_empty()).then(|| {
            let n = self.perplexities.len() as f64;
            Perplexity {
                objects: self.perplexities.iter().map(|p| p.objects).sum::<f64>() / n,
                words: self.perplexities.iter().map(|p| p.words).sum::<f64>() / n,
            }
        });
        MethodSummary {
            mean,
            std,
            trials: self.accuracies.len(),
            accuracies: self.accuracies.clone(),
            perplexity,
        }
    }
}

/// Runs `config.trials` independent trials. Each trial draws `Z` unambiguous
/// gold pairs, erases their cross counts on a copy of `graph`, trains fresh
/// models from a trial-derived seed and scores every requested method by the
/// fraction of objects mapped to their own word.
///
/// Only the random baseline is cheap; it never trains.
pub fn zero_shot_protocol(
    graph: &CrossModalGraph,
    gold: &GoldLexicon,
    config: &ZeroShotConfig,
) -> Result<ZeroShotReport, EvalError> {
    config.train.validate().map_err(EvalError::Config)?;
    if config.trials == 0 {
        return Err(EvalError::Config("trials must be at least 1".into()));
    }
    if config.methods.is_empty() {
        return Err(EvalError::Config("no zero-shot methods selected".into()));
    }
    let pool: Vec<(u32, u32)> = gold
        .unambiguous_pairs()
        .into_iter()
        .filter(|&(o, w)| (o as usize) < graph.n_objects() && (w as usize) < graph.n_words())
        .collect();
    if config.z < 2 || pool.len() < config.z {
        return Err(EvalError::InsufficientPairs {
            needed: config.z.max(2),
            available: pool.len(),
        });
    }

    let wants = |m| config.methods.contains(&m);
    let mut acc: BTreeMap<ZeroShotMethod, Accumulator> =
        config.methods.iter().map(|&m| (m, Accumulator::default())).collect();

    for trial in 0..config.trials as u64 {
        let mut pairs = pool.clone();
        let mut rng = seeded(derive_seed(config.seed, &[trial, 0]));
        pairs.partial_shuffle(&mut rng, config.z);
        pairs.truncate(config.z);
        log::debug!("zero-shot trial {trial}: pairs {pairs:?}");

        let needs_training = wants(ZeroShotMethod::Ours)
            || wants(ZeroShotMethod::NoAlign)
            || wants(ZeroShotMethod::Spearman);
        let training_graph = needs_training
            .then(|| -> Result<TrainingGraph, EvalError> {
                let held_out = if config.zero_pairs {
                    graph.zero_out_pairs(&pairs, config.scope)?
                } else {
                    graph.clone()
                };
                Ok(TrainingGraph::new(&held_out, config.train.cross_mode))
            })
            .transpose()?;
        let init_seed = derive_seed(config.seed, &[trial, 1]);
        let objects = || pairs.iter().map(|p| p.0);
        let words = || pairs.iter().map(|p| p.1);

        let hungarian_accuracy = |t: &Trained| -> Result<(f64, f64), EvalError> {
            let start = Instant::now();
            let sim = cosine_similarity_matrix(
                select(&t.objects, objects()).view(),
                select(&t.words, words()).view(),
            )?;
            let a = hungarian(sim.view(), Objective::Maximize)?;
            Ok((accuracy(&a.permutation), start.elapsed().as_secs_f64()))
        };

        if wants(ZeroShotMethod::Ours) || wants(ZeroShotMethod::Spearman) {
            let tg = training_graph.as_ref().expect("built when training is needed");
            let cfg = TrainConfig {
                seed: init_seed,
                ..config.train.clone()
            };
            let trained = train_for_trial(tg, &cfg)?;
            if let Some(a) = acc.get_mut(&ZeroShotMethod::Ours) {
                let (score, secs) = hungarian_accuracy(&trained)?;
                a.accuracies.push(score);
                a.perplexities.push(trained.perplexity);
                a.timing.train_seconds += trained.seconds;
                a.timing.mapping_seconds += secs;
            }
            if let Some(a) = acc.get_mut(&ZeroShotMethod::Spearman) {
                let start = Instant::now();
                let sim_o = cosine_similarity_matrix(
                    select(&trained.objects, objects()).view(),
                    select(&trained.objects, objects()).view(),
                )?;
                let sim_w = cosine_similarity_matrix(
                    select(&trained.words, words()).view(),
                    select(&trained.words, words()).view(),
                )?;
                let found = alignment_correlation_search(
                    sim_o.view(),
                    sim_w.view(),
                    config.spearman_max_samples,
                    derive_seed(config.seed, &[trial, 3]),
                )?;
                a.accuracies.push(accuracy(&found.permutation));
                a.perplexities.push(trained.perplexity);
                a.timing.train_seconds += trained.seconds;
                a.timing.mapping_seconds += start.elapsed().as_secs_f64();
            }
        }
        if let Some(a) = acc.get_mut(&ZeroShotMethod::NoAlign) {
            let tg = training_graph.as_ref().expect("built when training is needed");
            let cfg = TrainConfig {
                seed: init_seed,
                lambda_align: 0.0,
                ..config.train.clone()
            };
            let trained = train_for_trial(tg, &cfg)?;
            let (score, secs) = hungarian_accuracy(&trained)?;
            a.accuracies.push(score);
            a.perplexities.push(trained.perplexity);
            a.timing.train_seconds += trained.seconds;
            a.timing.mapping_seconds += secs;
        }
        if let Some(a) = acc.get_mut(&ZeroShotMethod::Random) {
            let start = Instant::now();
            let mut perm: Vec<usize> = (0..config.z).collect();
            perm.shuffle(&mut seeded(derive_seed(config.seed, &[trial, 2])));
            a.accuracies.push(accuracy(&perm));
            a.timing.mapping_seconds += start.elapsed().as_secs_f64();
        }
    }

    Ok(ZeroShotReport {
        z: config.z,
        trials: config.trials,
        scope: config.scope,
        zero_pairs: config.zero_pairs,
        methods: acc
            .iter()
            .map(|(m, a)| (m.name().to_string(), a.summary()))
            .collect(),
        timings: acc
            .iter()
            .map(|(m, a)| (m.name().to_string(), a.timing))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Episode;

    fn small() -> (CrossModalGraph, GoldLexicon) {
        let mut g = CrossModalGraph::new(6, 8);
        let mut gold = GoldLexicon::new();
        for o in 0..6u32 {
            gold.insert(o, [o]).unwrap();
        }
        for i in 0..40u32 {
            let (a, b) = (i % 6, (i * 7 + 1) % 6);
            g.ingest_episode(&Episode::new(vec![a, b], vec![a, 6 + i % 2, b]), 3)
                .unwrap();
        }
        (g, gold)
    }

    fn quick(methods: Vec<ZeroShotMethod>) -> ZeroShotConfig {
        ZeroShotConfig {
            z: 3,
            trials: 4,
            methods,
            train: TrainConfig {
                dim: 8,
                hidden: 8,
                steps: 20,
                ..TrainConfig::default()
            },
            ..ZeroShotConfig::default()
        }
    }

    #[test]
    fn random_only_reports_no_training() {
        let (g, gold) = small();
        let r = zero_shot_protocol(&g, &gold, &quick(vec![ZeroShotMethod::Random])).unwrap();
        assert_eq!(r.methods.len(), 1);
        let s = &r.methods["random"];
        assert_eq!(s.trials, 4);
        assert!(s.perplexity.is_none());
        assert_eq!(r.timings["random"].train_seconds, 0.0);
        for a in &s.accuracies {
            assert!([0.0, 100.0 / 3.0, 100.0].contains(a));
        }
    }

    #[test]
    fn all_methods_are_reproducible() {
        let (g, gold) = small();
        let cfg = quick(ZeroShotMethod::ALL.to_vec());
        let a = zero_shot_protocol(&g, &gold, &cfg).unwrap();
        let b = zero_shot_protocol(&g, &gold, &cfg).unwrap();
        assert_eq!(a.methods, b.methods);
        for s in a.methods.values() {
            assert_eq!(s.trials, 4);
            assert!(s.std >= 0.0);
            assert!(s.accuracies.iter().all(|a| (0.0..=100.0).contains(a)));
        }
        assert!(a.methods["ours"].perplexity.unwrap().objects >= 1.0);
    }

    #[test]
    fn too_few_pairs() {
        let (g, gold) = small();
        let cfg = ZeroShotConfig { z: 7, ..quick(vec![ZeroShotMethod::Random]) };
        assert_eq!(
            zero_shot_protocol(&g, &gold, &cfg).unwrap_err(),
            EvalError::InsufficientPairs { needed: 7, available: 6 }
        );
    }

    #[test]
    fn names_round_trip() {
        for m in ZeroShotMethod::ALL {
            assert_eq!(ZeroShotMethod::parse(m.name()), Some(m));
        }
    }
}
