use ndarray::{Array1, Array2};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::TrainConfig;
use crate::rng::seeded;

/// Linear identification head `z = (x·W1 + b1)·W2 + b2` (no activation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Head {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

impl Head {
    fn zeros(dim: usize, hidden: usize, classes: usize) -> Self {
        Head {
            w1: Array2::zeros((dim, hidden)),
            b1: Array1::zeros(hidden),
            w2: Array2::zeros((hidden, classes)),
            b2: Array1::zeros(classes),
        }
    }

    pub fn n_classes(&self) -> usize {
        self.b2.len()
    }
}

/// Every trainable tensor. Gradients and optimizer moments share this shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// base object vectors, one row per object
    pub objects: Array2<f64>,
    /// base word vectors, one row per word
    pub words: Array2<f64>,
    pub object_head: Head,
    pub word_head: Head,
}

pub const GROUP_NAMES: [&str; 10] = [
    "objects",
    "words",
    "object_head.w1",
    "object_head.b1",
    "object_head.w2",
    "object_head.b2",
    "word_head.w1",
    "word_head.b1",
    "word_head.w2",
    "word_head.b2",
];

impl Parameters {
    pub fn zeros(n_objects: usize, n_words: usize, dim: usize, hidden: usize) -> Self {
        Parameters {
            objects: Array2::zeros((n_objects, dim)),
            words: Array2::zeros((n_words, dim)),
            object_head: Head::zeros(dim, hidden, n_objects),
            word_head: Head::zeros(dim, hidden, n_words),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Parameters::zeros(
            self.objects.nrows(),
            self.words.nrows(),
            self.objects.ncols(),
            self.object_head.b1.len(),
        )
    }

    /// Flat views in [`GROUP_NAMES`] order.
    pub fn groups(&self) -> [&[f64]; 10] {
        fn s(a: Option<&[f64]>) -> &[f64] {
            a.expect("parameters are kept in standard layout")
        }
        [
            s(self.objects.as_slice()),
            s(self.words.as_slice()),
            s(self.object_head.w1.as_slice()),
            s(self.object_head.b1.as_slice()),
            s(self.object_head.w2.as_slice()),
            s(self.object_head.b2.as_slice()),
            s(self.word_head.w1.as_slice()),
            s(self.word_head.b1.as_slice()),
            s(self.word_head.w2.as_slice()),
            s(self.word_head.b2.as_slice()),
        ]
    }

    pub fn groups_mut(&mut self) -> [&mut [f64]; 10] {
        fn s(a: Option<&mut [f64]>) -> &mut [f64] {
            a.expect("parameters are kept in standard layout")
        }
        [
            s(self.objects.as_slice_mut()),
            s(self.words.as_slice_mut()),
            s(self.object_head.w1.as_slice_mut()),
            s(self.object_head.b1.as_slice_mut()),
            s(self.object_head.w2.as_slice_mut()),
            s(self.object_head.b2.as_slice_mut()),
            s(self.word_head.w1.as_slice_mut()),
            s(self.word_head.b1.as_slice_mut()),
            s(self.word_head.w2.as_slice_mut()),
            s(self.word_head.b2.as_slice_mut()),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.groups().iter().all(|g| g.iter().all(|v| v.is_finite()))
    }

    /// Makes every tensor contiguous; deserialized arrays may not be.
    pub(crate) fn standardize(&mut self) {
        fn fix2(a: &mut Array2<f64>) {
            if !a.is_standard_layout() {
                *a = a.as_standard_layout().into_owned();
            }
        }
        fn fix1(a: &mut Array1<f64>) {
            if !a.is_standard_layout() {
                *a = a.as_standard_layout().into_owned();
            }
        }
        fix2(&mut self.objects);
        fix2(&mut self.words);
        for h in [&mut self.object_head, &mut self.word_head] {
            fix2(&mut h.w1);
            fix1(&mut h.b1);
            fix2(&mut h.w2);
            fix1(&mut h.b2);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub step: u64,
    pub m: Parameters,
    pub v: Parameters,
}

/// Base embeddings, identification heads and optimizer state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationModel {
    pub params: Parameters,
    pub adam: AdamState,
}

impl RepresentationModel {
    /// Embeddings and head weights are drawn i.i.d. from `N(0, init_scale²)`
    /// with a generator seeded by `config.seed`; biases start at zero.
    pub fn new(n_objects: usize, n_words: usize, config: &TrainConfig) -> Self {
        let mut params = Parameters::zeros(n_objects, n_words, config.dim, config.hidden);
        let mut rng = seeded(config.seed);
        let normal = Normal::new(0.0, config.init_scale).expect("init_scale is validated");
        let [objects, words, ow1, _, ow2, _, ww1, _, ww2, _] = params.groups_mut();
        for g in [objects, words, ow1, ow2, ww1, ww2] {
            for v in g.iter_mut() {
                *v = normal.sample(&mut rng);
            }
        }
        let zeros = params.zeros_like();
        RepresentationModel {
            adam: AdamState {
                step: 0,
                m: zeros.clone(),
                v: zeros,
            },
            params,
        }
    }

    pub fn n_objects(&self) -> usize {
        self.params.objects.nrows()
    }

    pub fn n_words(&self) -> usize {
        self.params.words.nrows()
    }

    pub fn dim(&self) -> usize {
        self.params.objects.ncols()
    }

    /// Makes every tensor contiguous, as the training code expects. Needed
    /// after deserializing a model embedded in another document.
    pub fn standardize(&mut self) {
        self.params.standardize();
        self.adam.m.standardize();
        self.adam.v.standardize();
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        let mut m: RepresentationModel = serde_json::from_str(s)?;
        m.standardize();
        Ok(m)
    }
}
