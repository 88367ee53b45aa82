//! Run configuration: one JSON object with flat dotted keys, e.g.
//! `{"window": 10, "train.delta": 0.3}`. Nested objects are accepted and
//! flattened. Precedence is command-line flag, then `--set`, then the config
//! file, then `XSL_SEED` (seed only), then the built-in default.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use xsl_core::corpus::SyntheticConfig;
use xsl_core::eval::{SweepGrid, ZeroShotConfig, ZeroShotMethod};
use xsl_core::{CrossWeightMode, TrainConfig, ZeroScope};

use crate::error::CliError;

pub const SEED_ENV: &str = "XSL_SEED";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSection {
    pub n_objects: usize,
    pub objects_per_scene: [usize; 2],
    pub naming_probability: f64,
    pub distractor_vocab_size: usize,
    pub distractor_words_per_episode: [usize; 2],
    pub distractor_zipf_exponent: f64,
    pub object_zipf_exponent: f64,
    pub scene_locality: Option<f64>,
    pub n_episodes: usize,
}

impl Default for SyntheticSection {
    fn default() -> Self {
        let s = SyntheticConfig::standard(0);
        SyntheticSection {
            n_objects: s.n_objects,
            objects_per_scene: [*s.objects_per_scene.start(), *s.objects_per_scene.end()],
            naming_probability: s.naming_probability,
            distractor_vocab_size: s.distractor_vocab_size,
            distractor_words_per_episode: [
                *s.distractor_words_per_episode.start(),
                *s.distractor_words_per_episode.end(),
            ],
            distractor_zipf_exponent: s.distractor_zipf_exponent,
            object_zipf_exponent: s.object_zipf_exponent,
            scene_locality: s.scene_locality,
            n_episodes: s.n_episodes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZeroShotSection {
    pub z: usize,
    pub trials: usize,
    pub scope: ZeroScope,
    pub methods: Vec<ZeroShotMethod>,
    pub spearman_max_samples: usize,
}

impl Default for ZeroShotSection {
    fn default() -> Self {
        let d = ZeroShotConfig::default();
        ZeroShotSection {
            z: d.z,
            trials: d.trials,
            scope: d.scope,
            methods: d.methods,
            spearman_max_samples: d.spearman_max_samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub deltas: Vec<f64>,
    pub layers: Vec<usize>,
    pub lambdas: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            deltas: vec![0.0, 0.1, 0.3, 0.5],
            layers: vec![0, 1, 3, 5],
            lambdas: vec![0.0, 1.6],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// drives every stochastic stage
    pub seed: u64,
    /// local context window `H`
    pub window: usize,
    pub min_count: u64,
    pub mode: CrossWeightMode,
    pub ks: Vec<usize>,
    pub eval_every: usize,
    pub train: TrainConfig,
    pub synthetic: SyntheticSection,
    pub zero_shot: ZeroShotSection,
    pub sweep: SweepSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            window: 10,
            min_count: 5,
            mode: CrossWeightMode::Product,
            ks: vec![1, 2, 3, 4, 5],
            eval_every: 100,
            train: TrainConfig::default(),
            synthetic: SyntheticSection::default(),
            zero_shot: ZeroShotSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

impl RunConfig {
    pub fn synthetic(&self) -> SyntheticConfig {
        let s = &self.synthetic;
        SyntheticConfig {
            n_objects: s.n_objects,
            lexicon: SyntheticConfig::single_name_lexicon(s.n_objects),
            objects_per_scene: s.objects_per_scene[0]..=s.objects_per_scene[1],
            naming_probability: s.naming_probability,
            distractor_vocab_size: s.distractor_vocab_size,
            distractor_words_per_episode: s.distractor_words_per_episode[0]
                ..=s.distractor_words_per_episode[1],
            distractor_zipf_exponent: s.distractor_zipf_exponent,
            object_zipf_exponent: s.object_zipf_exponent,
            scene_locality: s.scene_locality,
            n_episodes: s.n_episodes,
            seed: self.seed,
        }
    }

    pub fn zero_shot(&self) -> ZeroShotConfig {
        let z = &self.zero_shot;
        ZeroShotConfig {
            z: z.z,
            trials: z.trials,
            scope: z.scope,
            zero_pairs: true,
            methods: z.methods.clone(),
            seed: self.seed,
            spearman_max_samples: z.spearman_max_samples,
            train: self.train.clone(),
        }
    }

    pub fn sweep_grid(&self) -> SweepGrid {
        SweepGrid {
            deltas: self.sweep.deltas.clone(),
            layers: self.sweep.layers.clone(),
            lambdas: self.sweep.lambdas.clone(),
        }
    }

    /// The configuration as flat dotted keys, the same shape a config file uses.
    pub fn to_flat_json(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let mut flat = BTreeMap::new();
        flatten("", &value, &mut flat);
        serde_json::to_string(&flat).expect("config serializes")
    }

    fn validate(&self) -> Result<(), CliError> {
        let err = |m: String| Err(CliError::Config(m));
        self.train.validate().map_err(CliError::Config)?;
        if self.window == 0 {
            return err("window must be at least 1".into());
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return err("ks must be a nonempty list of positive integers".into());
        }
        if self.eval_every == 0 {
            return err("eval_every must be at least 1".into());
        }
        Ok(())
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut BTreeMap<String, Value>) {
    match value {
        Value::Object(map) if !map.is_empty() => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => {
            out.insert(prefix.to_owned(), other.clone());
        }
    }
}

fn unflatten(flat: BTreeMap<String, Value>) -> Value {
    let mut root = Map::new();
    for (key, value) in flat {
        let mut node = &mut root;
        let mut parts = key.split('.').peekable();
        while let Some(part) = parts.next() {
            if parts.peek().is_none() {
                node.insert(part.to_owned(), value);
                break;
            }
            node = node
                .entry(part)
                .or_insert_with(|| Value::Object(Map::new()))
                .as_object_mut()
                .expect("prefixes of known keys are objects");
        }
    }
    Value::Object(root)
}

/// Parses `KEY=VALUE`; the value is read as JSON when possible and as a
/// plain string otherwise.
pub fn parse_assignment(s: &str) -> Result<(String, Value), CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected KEY=VALUE, got {s:?}")))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_owned()));
    Ok((k.trim().to_owned(), value))
}

pub struct Sources<'a> {
    pub file: Option<&'a Path>,
    pub env_seed: Option<String>,
    pub sets: Vec<(String, Value)>,
    pub flags: Vec<(String, Value)>,
}

pub fn resolve(sources: Sources<'_>) -> Result<RunConfig, CliError> {
    let mut flat = BTreeMap::new();
    flatten("", &serde_json::to_value(RunConfig::default()).unwrap(), &mut flat);
    // one seed drives everything; train.seed is derived from it
    flat.remove("train.seed");

    let mut assign = |key: String, value: Value, origin: &str| -> Result<(), CliError> {
        if !flat.contains_key(&key) {
            let hint = if key == "train.seed" { " (set `seed` instead)" } else { "" };
            return Err(CliError::Config(format!("unknown key {key:?} in {origin}{hint}")));
        }
        flat.insert(key, value);
        Ok(())
    };

    if let Some(raw) = sources.env_seed {
        let seed: u64 = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={raw:?} is not an integer")))?;
        assign("seed".into(), seed.into(), SEED_ENV)?;
    }
    if let Some(path) = sources.file {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                CliError::Config(format!("config file {} not found", path.display()))
            } else {
                CliError::io(path, e)
            }
        })?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if !value.is_object() {
            return Err(CliError::Config(format!(
                "{}: expected a JSON object",
                path.display()
            )));
        }
        let mut from_file = BTreeMap::new();
        flatten("", &value, &mut from_file);
        let origin = path.display().to_string();
        for (k, v) in from_file {
            assign(k, v, &origin)?;
        }
    }
    for (k, v) in sources.sets {
        assign(k, v, "--set")?;
    }
    for (k, v) in sources.flags {
        assign(k, v, "command-line flags")?;
    }

    let mut config: RunConfig = serde_json::from_value(unflatten(flat))
        .map_err(|e| CliError::Config(e.to_string()))?;
    config.train.seed = config.seed;
    config.validate()?;
    Ok(config)
}
