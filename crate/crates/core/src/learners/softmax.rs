//! fastText-style linear classifier: the averaged word vectors of a text feed a
//! softmax layer, trained by SGD with a linearly decaying learning rate.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::embedding::EmbeddingTable;
use super::{class_list, LearnerError, Result};
use crate::corpus::StanceLabel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxConfig {
    /// Vector size for randomly initialized embeddings; ignored with a pre-trained table.
    pub dimension: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Update word vectors during training. Pre-trained tables are usually frozen.
    pub trainable_embeddings: bool,
    pub seed: u64,
    /// Word n-gram length. Only unigrams are supported.
    pub word_ngrams: usize,
}

impl Default for SoftmaxConfig {
    fn default() -> Self {
        SoftmaxConfig::from_scratch()
    }
}

impl SoftmaxConfig {
    /// Randomly initialized, trainable vectors; 60 epochs.
    pub fn from_scratch() -> Self {
        SoftmaxConfig {
            dimension: 100,
            epochs: 60,
            learning_rate: 0.1,
            trainable_embeddings: true,
            seed: 0,
            word_ngrams: 1,
        }
    }

    /// Frozen pre-trained vectors; 20 epochs.
    pub fn pretrained() -> Self {
        SoftmaxConfig {
            epochs: 20,
            trainable_embeddings: false,
            ..SoftmaxConfig::from_scratch()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(LearnerError::InvalidParam("epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(LearnerError::InvalidParam("learning_rate must be positive".into()));
        }
        if self.dimension == 0 {
            return Err(LearnerError::InvalidParam("dimension must be >= 1".into()));
        }
        if self.word_ngrams != 1 {
            return Err(LearnerError::InvalidParam(format!(
                "word_ngrams = {} is not supported (unigrams only)",
                self.word_ngrams
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSoftmaxModel {
    pub config: SoftmaxConfig,
    pub classes: Vec<StanceLabel>,
    pub dimension: usize,
    pub vocabulary: BTreeMap<String, u32>,
    /// One row per vocabulary entry.
    pub embeddings: Vec<Vec<f64>>,
    /// classes × dimension.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

/// Gradients of the mean cross-entropy.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub embeddings: BTreeMap<u32, Vec<f64>>,
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

impl LinearSoftmaxModel {
    /// Zero output layer; embeddings come from `table` where available, otherwise
    /// uniform in `[-1/d, 1/d]`. With frozen embeddings, words missing from the
    /// table are left out of the vocabulary.
    pub fn init<T: AsRef<str>>(
        docs: &[Vec<T>],
        labels: &[StanceLabel],
        table: Option<&EmbeddingTable>,
        config: &SoftmaxConfig,
    ) -> Result<Self> {
        config.validate()?;
        if docs.len() != labels.len() {
            return Err(LearnerError::LengthMismatch(docs.len(), labels.len()));
        }
        if docs.is_empty() {
            return Err(LearnerError::EmptyTrainingSet);
        }
        let dimension = table.map_or(config.dimension, EmbeddingTable::dimension);
        let mut rng = crate::seeded_rng(config.seed);
        let mut vocabulary = BTreeMap::new();
        let mut embeddings = Vec::new();
        let words: std::collections::BTreeSet<&str> =
            docs.iter().flat_map(|d| d.iter().map(AsRef::as_ref)).collect();
        let bound = 1.0 / dimension as f64;
        for w in words {
            let row = match table.and_then(|t| t.get(w)) {
                Some(v) => v.to_vec(),
                None if table.is_some() && !config.trainable_embeddings => continue,
                None => (0..dimension).map(|_| rng.gen_range(-bound..=bound)).collect(),
            };
            vocabulary.insert(w.to_string(), embeddings.len() as u32);
            embeddings.push(row);
        }
        let classes = class_list(labels);
        Ok(LinearSoftmaxModel {
            config: config.clone(),
            weights: vec![vec![0.0; dimension]; classes.len()],
            bias: vec![0.0; classes.len()],
            classes,
            dimension,
            vocabulary,
            embeddings,
        })
    }

    fn ids<T: AsRef<str>>(&self, tokens: &[T]) -> Vec<u32> {
        tokens
            .iter()
            .filter_map(|t| self.vocabulary.get(t.as_ref()).copied())
            .collect()
    }

    fn hidden(&self, ids: &[u32]) -> Vec<f64> {
        let mut h = vec![0.0; self.dimension];
        for &i in ids {
            h.iter_mut()
                .zip(&self.embeddings[i as usize])
                .for_each(|(a, b)| *a += b);
        }
        if !ids.is_empty() {
            h.iter_mut().for_each(|a| *a /= ids.len() as f64);
        }
        h
    }

    fn probs_of(&self, h: &[f64]) -> Vec<f64> {
        let logits: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| w.iter().zip(h).map(|(a, x)| a * x).sum::<f64>() + b)
            .collect();
        softmax(&logits)
    }

    /// Class probabilities in `classes` order.
    pub fn predict_proba<T: AsRef<str>>(&self, tokens: &[T]) -> Vec<f64> {
        self.probs_of(&self.hidden(&self.ids(tokens)))
    }

    /// Most probable class; ties go to the earliest class.
    pub fn predict<T: AsRef<str>>(&self, tokens: &[T]) -> StanceLabel {
        let p = self.predict_proba(tokens);
        let best = (0..p.len()).fold(0, |b, i| if p[i] > p[b] { i } else { b });
        self.classes[best]
    }

    fn class_index(&self, label: StanceLabel) -> Option<usize> {
        self.classes.iter().position(|&c| c == label)
    }

    /// Mean cross-entropy over the examples.
    pub fn loss<T: AsRef<str>>(&self, docs: &[Vec<T>], labels: &[StanceLabel]) -> f64 {
        self.loss_and_gradients(docs, labels).0
    }

    /// Mean cross-entropy and its analytic gradients.
    pub fn loss_and_gradients<T: AsRef<str>>(&self, docs: &[Vec<T>], labels: &[StanceLabel]) -> (f64, Gradients) {
        let k = self.classes.len();
        let mut g = Gradients {
            weights: vec![vec![0.0; self.dimension]; k],
            bias: vec![0.0; k],
            embeddings: BTreeMap::new(),
        };
        let n = docs.len().max(1) as f64;
        let mut loss = 0.0;
        for (doc, &label) in docs.iter().zip(labels) {
            let Some(target) = self.class_index(label) else { continue };
            let ids = self.ids(doc);
            let h = self.hidden(&ids);
            let p = self.probs_of(&h);
            loss -= p[target].max(f64::MIN_POSITIVE).ln() / n;
            let delta: Vec<f64> = (0..k).map(|c| (p[c] - (c == target) as u8 as f64) / n).collect();
            for c in 0..k {
                g.bias[c] += delta[c];
                g.weights[c].iter_mut().zip(&h).for_each(|(gw, x)| *gw += delta[c] * x);
            }
            if !ids.is_empty() {
                let mut dh = vec![0.0; self.dimension];
                for c in 0..k {
                    dh.iter_mut().zip(&self.weights[c]).for_each(|(d, w)| *d += delta[c] * w);
                }
                for &i in &ids {
                    let row = g.embeddings.entry(i).or_insert_with(|| vec![0.0; self.dimension]);
                    row.iter_mut().zip(&dh).for_each(|(r, d)| *r += d / ids.len() as f64);
                }
            }
        }
        (loss, g)
    }

    /// One SGD step on a single example.
    fn step(&mut self, ids: &[u32], target: usize, lr: f64) {
        let h = self.hidden(ids);
        let p = self.probs_of(&h);
        let k = self.classes.len();
        let delta: Vec<f64> = (0..k).map(|c| p[c] - (c == target) as u8 as f64).collect();
        if self.config.trainable_embeddings && !ids.is_empty() {
            let mut dh = vec![0.0; self.dimension];
            for c in 0..k {
                dh.iter_mut().zip(&self.weights[c]).for_each(|(d, w)| *d += delta[c] * w);
            }
            let scale = lr / ids.len() as f64;
            for &i in ids {
                self.embeddings[i as usize]
                    .iter_mut()
                    .zip(&dh)
                    .for_each(|(e, d)| *e -= scale * d);
            }
        }
        for c in 0..k {
            self.bias[c] -= lr * delta[c];
            self.weights[c].iter_mut().zip(&h).for_each(|(w, x)| *w -= lr * delta[c] * x);
        }
    }

    /// SGD over `epochs` passes, each in a seeded shuffled order, with
    /// `lr(t) = lr0 * (1 - t/T)` over all `T` example steps.
    pub fn fit<T: AsRef<str>>(&mut self, docs: &[Vec<T>], labels: &[StanceLabel]) {
        let examples: Vec<(Vec<u32>, usize)> = docs
            .iter()
            .zip(labels)
            .filter_map(|(d, &l)| Some((self.ids(d), self.class_index(l)?)))
            .collect();
        let total = (self.config.epochs * examples.len()) as f64;
        let mut rng = crate::seeded_rng(self.config.seed.wrapping_add(1));
        let mut order: Vec<usize> = (0..examples.len()).collect();
        let mut t = 0usize;
        for _ in 0..self.config.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                let lr = self.config.learning_rate * (1.0 - t as f64 / total);
                let (ids, target) = &examples[i];
                self.step(ids, *target, lr);
                t += 1;
            }
        }
    }
}

/// Builds and trains a classifier. `table` provides initial (or frozen) word vectors.
pub fn train_linear_softmax<T: AsRef<str>>(
    docs: &[Vec<T>],
    labels: &[StanceLabel],
    table: Option<&EmbeddingTable>,
    config: &SoftmaxConfig,
) -> Result<LinearSoftmaxModel> {
    let mut model = LinearSoftmaxModel::init(docs, labels, table, config)?;
    model.fit(docs, labels);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use StanceLabel::*;

    fn docs(raw: &[&str]) -> Vec<Vec<String>> {
        raw.iter().map(|d| super::super::tokenize(d)).collect()
    }

    #[test]
    fn zero_output_layer_is_uniform() {
        let d = docs(&["a b", "c", "d e"]);
        let m = LinearSoftmaxModel::init(&d, &[Against, Favor, None], Option::None, &SoftmaxConfig::default()).unwrap();
        for p in m.predict_proba(&["a", "zzz"]) {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_two_class() {
        let d = docs(&["bueno genial", "genial feliz", "feliz bueno", "malo triste", "triste horrible", "horrible malo"]);
        let y = [Favor, Favor, Favor, Against, Against, Against];
        let cfg = SoftmaxConfig {
            epochs: 50,
            dimension: 10,
            ..SoftmaxConfig::from_scratch()
        };
        let m = train_linear_softmax(&d, &y, Option::None, &cfg).unwrap();
        for (doc, &l) in d.iter().zip(&y) {
            assert_eq!(m.predict(doc), l);
            assert!((m.predict_proba(doc).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn frozen_pretrained_skips_unknown_words() {
        let table = EmbeddingTable::read("2 2\nsi 1 0\nno 0 1\n".as_bytes(), "t").unwrap();
        let d = docs(&["si claro", "no nunca"]);
        let m = train_linear_softmax(&d, &[Favor, Against], Some(&table), &SoftmaxConfig::pretrained()).unwrap();
        assert_eq!(m.vocabulary.len(), 2);
        assert_eq!(m.embeddings[m.vocabulary["si"] as usize], vec![1.0, 0.0]);
        assert_eq!(m.predict(&["si"]), Favor);
    }

    #[test]
    fn bigrams_rejected_and_empty_corpus() {
        let cfg = SoftmaxConfig {
            word_ngrams: 2,
            ..SoftmaxConfig::default()
        };
        assert!(cfg.validate().is_err());
        let empty: Vec<Vec<String>> = vec![];
        assert!(matches!(
            LinearSoftmaxModel::init(&empty, &[], Option::None, &SoftmaxConfig::default()),
            Err(LearnerError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let d = docs(&["a b", "c d", "a d"]);
        let y = [Favor, Against, None];
        let cfg = SoftmaxConfig {
            epochs: 5,
            dimension: 4,
            ..SoftmaxConfig::default()
        };
        assert_eq!(
            train_linear_softmax(&d, &y, Option::None, &cfg).unwrap(),
            train_linear_softmax(&d, &y, Option::None, &cfg).unwrap()
        );
    }
}
