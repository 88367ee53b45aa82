//! Seeded synthetic corpora with a known object-to-name lexicon.
//!
//! A scene is drawn around an anchor object. Objects have Zipf popularity
//! `(id + 1)^-s`, so rare objects keep entering the stream late. When
//! `scene_locality` is set, every object has a fixed latent position in the
//! unit square and companion weights are further scaled by `exp(-d² / 2σ²)`,
//! which gives the object graph a non-uniform structure. Each present object
//! emits one of its name words with `naming_probability`, distractors are
//! drawn from a Zipf law over the distractor vocabulary, and the word order is
//! shuffled.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{CorpusError, Episode, GoldLexicon, Modality, RawEpisode, Vocabulary};
use crate::rng::{seeded, Rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NameEmission {
    pub word: u32,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_objects: usize,
    /// Object id to the name words it may emit. Objects without an entry are
    /// never named. Name word ids are dense from 0; distractor ids follow.
    pub lexicon: BTreeMap<u32, Vec<NameEmission>>,
    pub objects_per_scene: RangeInclusive<usize>,
    pub naming_probability: f64,
    pub distractor_vocab_size: usize,
    pub distractor_words_per_episode: RangeInclusive<usize>,
    /// Zipf exponent for distractor frequencies; 0 is uniform.
    pub distractor_zipf_exponent: f64,
    /// Zipf exponent for object popularity by id; 0 is uniform.
    #[serde(default)]
    pub object_zipf_exponent: f64,
    /// Latent-space spread for scene composition; `None` draws companions uniformly.
    pub scene_locality: Option<f64>,
    pub n_episodes: usize,
    pub seed: u64,
}

impl SyntheticConfig {
    /// One distinct name word per object: object `i` emits word `i`.
    pub fn single_name_lexicon(n_objects: usize) -> BTreeMap<u32, Vec<NameEmission>> {
        (0..n_objects as u32)
            .map(|i| {
                (
                    i,
                    vec![NameEmission {
                        word: i,
                        probability: 1.0,
                    }],
                )
            })
            .collect()
    }

    /// The standard ambiguous benchmark: 50 objects, 1–4 per scene, naming
    /// probability 0.75, 150 distractors with 2–6 per episode, 20k episodes.
    pub fn standard(seed: u64) -> Self {
        SyntheticConfig {
            n_objects: 50,
            lexicon: Self::single_name_lexicon(50),
            objects_per_scene: 1..=4,
            naming_probability: 0.75,
            distractor_vocab_size: 150,
            distractor_words_per_episode: 2..=6,
            distractor_zipf_exponent: 1.0,
            object_zipf_exponent: 1.0,
            scene_locality: Some(0.15),
            n_episodes: 20_000,
            seed,
        }
    }

    pub fn n_name_words(&self) -> usize {
        self.lexicon
            .values()
            .flatten()
            .map(|e| e.word as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn n_words(&self) -> usize {
        self.n_name_words() + self.distractor_vocab_size
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let err = |m: String| Err(CorpusError::Config(m));
        if self.n_objects == 0 {
            return err("n_objects must be positive".into());
        }
        let (lo, hi) = (
            *self.objects_per_scene.start(),
            *self.objects_per_scene.end(),
        );
        if lo == 0 || lo > hi || hi > self.n_objects {
            return err(format!(
                "objects_per_scene {lo}..={hi} must be nonempty within 1..={}",
                self.n_objects
            ));
        }
        if self.distractor_words_per_episode.is_empty() {
            return err("distractor_words_per_episode is empty".into());
        }
        if *self.distractor_words_per_episode.end() > 0 && self.distractor_vocab_size == 0 {
            return err("distractors requested but distractor_vocab_size is 0".into());
        }
        if !(0.0..=1.0).contains(&self.naming_probability) {
            return err(format!(
                "naming_probability {} outside [0,1]",
                self.naming_probability
            ));
        }
        for (name, s) in [
            ("distractor_zipf_exponent", self.distractor_zipf_exponent),
            ("object_zipf_exponent", self.object_zipf_exponent),
        ] {
            if !(s >= 0.0 && s.is_finite()) {
                return err(format!("{name} must be finite and non-negative"));
            }
        }
        if let Some(s) = self.scene_locality {
            if !(s > 0.0 && s.is_finite()) {
                return err("scene_locality must be positive".into());
            }
        }
        for (&obj, names) in &self.lexicon {
            if obj as usize >= self.n_objects {
                return err(format!(
                    "lexicon references object {obj} but n_objects is {}",
                    self.n_objects
                ));
            }
            if names.is_empty() {
                return err(format!("object {obj} has an empty lexicon entry"));
            }
            let mut total = 0.0;
            for e in names {
                if !(0.0..=1.0).contains(&e.probability) {
                    return err(format!(
                        "emission probability {} of object {obj} outside [0,1]",
                        e.probability
                    ));
                }
                total += e.probability;
            }
            if (total - 1.0).abs() > 1e-9 {
                return err(format!(
                    "emission probabilities of object {obj} sum to {total}"
                ));
            }
        }
        Ok(())
    }
}

pub struct SyntheticCorpus {
    pub objects: Vocabulary,
    pub words: Vocabulary,
    pub gold: GoldLexicon,
    pub episodes: SyntheticStream,
}

impl SyntheticCorpus {
    pub fn to_raw(&self, episode: &Episode) -> RawEpisode {
        RawEpisode {
            objects: episode
                .objects()
                .iter()
                .map(|&o| self.objects.symbols()[o as usize].clone())
                .collect(),
            words: episode
                .words()
                .iter()
                .map(|&w| self.words.symbols()[w as usize].clone())
                .collect(),
        }
    }
}

/// Builds the symbol tables, the generating lexicon and a lazy episode stream.
pub fn generate_synthetic_corpus(config: &SyntheticConfig) -> Result<SyntheticCorpus, CorpusError> {
    config.validate()?;
    let n_names = config.n_name_words();
    let object_symbols = (0..config.n_objects).map(|i| format!("object{i:03}")).collect();
    let word_symbols = (0..n_names)
        .map(|i| format!("name{i:03}"))
        .chain((0..config.distractor_vocab_size).map(|i| format!("filler{i:03}")))
        .collect::<Vec<_>>();
    let objects = Vocabulary::from_parts(
        Modality::Object,
        object_symbols,
        vec![0; config.n_objects],
        0,
    )
    .map_err(CorpusError::Config)?;
    let n_words = word_symbols.len();
    let words = Vocabulary::from_parts(Modality::Word, word_symbols, vec![0; n_words], 0)
        .map_err(CorpusError::Config)?;

    let mut gold = GoldLexicon::new();
    for (&obj, names) in &config.lexicon {
        let ids: Vec<u32> = names
            .iter()
            .filter(|e| e.probability > 0.0)
            .map(|e| e.word)
            .collect();
        if !ids.is_empty() {
            gold.insert(obj, ids)?;
        }
    }

    Ok(SyntheticCorpus {
        objects,
        words,
        gold,
        episodes: SyntheticStream::new(config.clone(), n_names)?,
    })
}

/// Deterministic episode iterator driven by a single seeded generator.
pub struct SyntheticStream {
    config: SyntheticConfig,
    rng: Rng,
    remaining: usize,
    positions: Vec<(f64, f64)>,
    popularity: Vec<f64>,
    anchors: WeightedIndex<f64>,
    emitters: Vec<Option<(Vec<u32>, WeightedIndex<f64>)>>,
    distractors: Option<WeightedIndex<f64>>,
    distractor_offset: u32,
}

impl SyntheticStream {
    fn new(config: SyntheticConfig, n_names: usize) -> Result<Self, CorpusError> {
        let mut rng = seeded(config.seed);
        let positions = match config.scene_locality {
            Some(_) => (0..config.n_objects)
                .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
                .collect(),
            None => Vec::new(),
        };
        let popularity: Vec<f64> = (1..=config.n_objects)
            .map(|r| (r as f64).powf(-config.object_zipf_exponent))
            .collect();
        let anchors = WeightedIndex::new(&popularity)
            .map_err(|e| CorpusError::Config(e.to_string()))?;
        let mut emitters = vec![None; config.n_objects];
        for (&obj, names) in &config.lexicon {
            let words = names.iter().map(|e| e.word).collect();
            let dist = WeightedIndex::new(names.iter().map(|e| e.probability))
                .map_err(|e| CorpusError::Config(format!("object {obj}: {e}")))?;
            emitters[obj as usize] = Some((words, dist));
        }
        let distractors = if config.distractor_vocab_size > 0 {
            let s = config.distractor_zipf_exponent;
            let weights = (1..=config.distractor_vocab_size).map(|r| (r as f64).powf(-s));
            Some(WeightedIndex::new(weights).map_err(|e| CorpusError::Config(e.to_string()))?)
        } else {
            None
        };
        Ok(SyntheticStream {
            remaining: config.n_episodes,
            config,
            rng,
            positions,
            popularity,
            anchors,
            emitters,
            distractors,
            distractor_offset: n_names as u32,
        })
    }

    fn sample_scene(&mut self) -> Vec<u32> {
        let n = self.config.n_objects;
        let size = self
            .rng
            .random_range(self.config.objects_per_scene.clone())
            .min(n);
        let anchor = self.anchors.sample(&mut self.rng);
        let mut weights = self.popularity.clone();
        if let Some(sigma) = self.config.scene_locality {
            let (ax, ay) = self.positions[anchor];
            for (w, &(x, y)) in weights.iter_mut().zip(&self.positions) {
                let d2 = (x - ax).powi(2) + (y - ay).powi(2);
                *w *= (-d2 / (2.0 * sigma * sigma)).exp().max(1e-12);
            }
        }
        weights[anchor] = 0.0;
        let mut scene = vec![anchor as u32];
        // companions without replacement
        for _ in 1..size {
            let total: f64 = weights.iter().sum();
            let mut u = self.rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in weights.iter().enumerate() {
                if w > 0.0 && u < w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            // rounding can walk past the end; fall back to the last live entry
            if weights[pick] == 0.0 {
                pick = weights.iter().rposition(|&w| w > 0.0).unwrap();
            }
            weights[pick] = 0.0;
            scene.push(pick as u32);
        }
        scene
    }
}

impl Iterator for SyntheticStream {
    type Item = Episode;

    fn next(&mut self) -> Option<Episode> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let scene = self.sample_scene();
        let mut words = Vec::new();
        for &obj in &scene {
            let named = self.rng.random::<f64>() < self.config.naming_probability;
            if let (true, Some((names, dist))) = (named, &self.emitters[obj as usize]) {
                words.push(names[dist.sample(&mut self.rng)]);
            }
        }
        let k = self
            .rng
            .random_range(self.config.distractor_words_per_episode.clone());
        if let Some(dist) = &self.distractors {
            for _ in 0..k {
                words.push(self.distractor_offset + dist.sample(&mut self.rng) as u32);
            }
        }

        words.shuffle(&mut self.rng);
        Some(Episode::new(scene, words))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}
