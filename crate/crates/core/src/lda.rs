//! Latent Dirichlet Allocation by collapsed Gibbs sampling.
//!
//! Each sweep resamples every token's topic from
//! `p(z = k) ∝ (n_dk + α) · (n_kw + β) / (n_k + Vβ)` with the token's own
//! assignment removed from the counts. The sampler is single-threaded and fully
//! determined by the seed ([`crate::Rng`]).

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io;
use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::corpus::{Corpus, LabelSource};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LdaError {
    #[error("invalid LDA config: {0}")]
    InvalidConfig(String),
    #[error("no documents")]
    NoDocuments,
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("topic {0} out of range (K = {1})")]
    TopicOutOfRange(usize, usize),
    #[error("document {0} out of range (D = {1})")]
    DocumentOutOfRange(usize, usize),
    #[error("corpus has {corpus} items but the model was trained on {model} documents")]
    Misaligned { corpus: usize, model: usize },
    #[error("count invariant violated: {0}")]
    Invariant(String),
    #[error("unsupported model format version {0}")]
    Version(u32),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub num_topics: usize,
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    pub iterations: usize,
    /// Sweeps excluded from the reported mean log-likelihood.
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig::with_topics(20)
    }
}

impl LdaConfig {
    /// Defaults for `k` topics: α = 50/K, β = 0.01, 1000 sweeps, 200 burn-in.
    pub fn with_topics(k: usize) -> Self {
        LdaConfig {
            num_topics: k,
            alpha: 50.0 / k.max(1) as f64,
            beta: 0.01,
            iterations: 1000,
            burn_in: 200,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), LdaError> {
        let bad = |m: &str| Err(LdaError::InvalidConfig(m.to_string()));
        if self.num_topics < 2 {
            return bad("num_topics must be >= 2");
        }
        if !(self.alpha > 0.0) || !(self.beta > 0.0) {
            return bad("alpha and beta must be positive");
        }
        if self.iterations < 1 {
            return bad("iterations must be >= 1");
        }
        if self.burn_in >= self.iterations {
            return bad("burn_in must be smaller than iterations");
        }
        Ok(())
    }
}

/// Latent state of a trained model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub format_version: u32,
    pub config: LdaConfig,
    /// Index → token; token ids follow first appearance.
    pub vocabulary: Vec<String>,
    /// Token ids per document.
    pub documents: Vec<Vec<u32>>,
    /// Topic per token, parallel to `documents`.
    pub assignments: Vec<Vec<u16>>,
    /// K × V.
    pub topic_word_counts: Vec<Vec<u32>>,
    /// D × K.
    pub doc_topic_counts: Vec<Vec<u32>>,
    pub topic_totals: Vec<u64>,
    /// Log-likelihood after each sweep.
    pub log_likelihood_trace: Vec<f64>,
}

impl TopicModel {
    pub fn num_topics(&self) -> usize {
        self.config.num_topics
    }

    pub fn num_docs(&self) -> usize {
        self.documents.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    /// Recomputes every count from the assignments and compares.
    pub fn check_invariants(&self) -> Result<(), LdaError> {
        let k = self.num_topics();
        let v = self.vocab_size();
        let err = |m: String| Err(LdaError::Invariant(m));
        let mut tw = vec![vec![0u32; v]; k];
        for (d, (doc, z)) in self.documents.iter().zip(&self.assignments).enumerate() {
            if doc.len() != z.len() {
                return err(format!("doc {d}: {} tokens, {} assignments", doc.len(), z.len()));
            }
            let mut dt = vec![0u32; k];
            for (&w, &t) in doc.iter().zip(z) {
                if usize::from(t) >= k {
                    return err(format!("doc {d}: assignment {t} outside [0, {k})"));
                }
                dt[usize::from(t)] += 1;
                tw[usize::from(t)][w as usize] += 1;
            }
            if dt != self.doc_topic_counts[d] {
                return err(format!("doc {d}: doc-topic counts drifted"));
            }
            let sum: u32 = self.doc_topic_counts[d].iter().sum();
            if sum as usize != doc.len() {
                return err(format!("doc {d}: counts sum to {sum}, length {}", doc.len()));
            }
        }
        if tw != self.topic_word_counts {
            return err("topic-word counts drifted".into());
        }
        for (t, row) in self.topic_word_counts.iter().enumerate() {
            let sum: u64 = row.iter().map(|&c| u64::from(c)).sum();
            if sum != self.topic_totals[t] {
                return err(format!("topic {t}: row sums to {sum}, total {}", self.topic_totals[t]));
            }
        }
        Ok(())
    }

    /// Collapsed joint log-likelihood `log p(w, z)`.
    pub fn log_likelihood(&self) -> f64 {
        let k = self.num_topics() as f64;
        let v = self.vocab_size() as f64;
        let (alpha, beta) = (self.config.alpha, self.config.beta);
        let lg_beta = ln_gamma(beta);
        let lg_alpha = ln_gamma(alpha);
        let mut ll = k * (ln_gamma(v * beta) - v * lg_beta);
        for (row, &total) in self.topic_word_counts.iter().zip(&self.topic_totals) {
            ll += row
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| ln_gamma(f64::from(c) + beta) - lg_beta)
                .sum::<f64>()
                + v * lg_beta
                - ln_gamma(total as f64 + v * beta);
        }
        let d = self.num_docs() as f64;
        ll += d * (ln_gamma(k * alpha) - k * lg_alpha);
        for (row, doc) in self.doc_topic_counts.iter().zip(&self.documents) {
            ll += row.iter().map(|&c| ln_gamma(f64::from(c) + alpha)).sum::<f64>()
                - ln_gamma(doc.len() as f64 + k * alpha);
        }
        ll
    }

    /// Mean log-likelihood over the sweeps after burn-in.
    pub fn mean_log_likelihood_after_burn_in(&self) -> Option<f64> {
        let tail = self.log_likelihood_trace.get(self.config.burn_in..)?;
        (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LdaError> {
        fs::write(path, serde_json::to_vec(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LdaError> {
        let model: TopicModel = serde_json::from_slice(&fs::read(path)?)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(LdaError::Version(model.format_version));
        }
        model.check_invariants()?;
        Ok(model)
    }
}

/// Collapsed Gibbs sampler over a [`TopicModel`]'s state.
pub struct GibbsSampler {
    model: TopicModel,
    rng: crate::Rng,
    weights: Vec<f64>,
}

impl GibbsSampler {
    /// Builds the vocabulary and draws initial assignments uniformly.
    pub fn new<S: AsRef<str>>(docs: &[Vec<S>], config: LdaConfig) -> Result<Self, LdaError> {
        config.validate()?;
        if docs.is_empty() {
            return Err(LdaError::NoDocuments);
        }
        if config.num_topics > usize::from(u16::MAX) {
            return Err(LdaError::InvalidConfig("num_topics too large".into()));
        }
        let mut index: HashMap<&str, u32> = HashMap::new();
        let mut vocabulary = Vec::new();
        let documents: Vec<Vec<u32>> = docs
            .iter()
            .map(|doc| {
                doc.iter()
                    .map(|tok| {
                        let tok = tok.as_ref();
                        *index.entry(tok).or_insert_with(|| {
                            vocabulary.push(tok.to_string());
                            (vocabulary.len() - 1) as u32
                        })
                    })
                    .collect()
            })
            .collect();
        if vocabulary.is_empty() {
            return Err(LdaError::EmptyVocabulary);
        }
        let k = config.num_topics;
        let v = vocabulary.len();
        let mut rng = crate::seeded_rng(config.seed);
        let mut topic_word_counts = vec![vec![0u32; v]; k];
        let mut doc_topic_counts = vec![vec![0u32; k]; documents.len()];
        let mut topic_totals = vec![0u64; k];
        let assignments: Vec<Vec<u16>> = documents
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                doc.iter()
                    .map(|&w| {
                        let t = rng.gen_range(0..k);
                        topic_word_counts[t][w as usize] += 1;
                        doc_topic_counts[d][t] += 1;
                        topic_totals[t] += 1;
                        t as u16
                    })
                    .collect()
            })
            .collect();
        Ok(GibbsSampler {
            model: TopicModel {
                format_version: MODEL_FORMAT_VERSION,
                config,
                vocabulary,
                documents,
                assignments,
                topic_word_counts,
                doc_topic_counts,
                topic_totals,
                log_likelihood_trace: Vec::new(),
            },
            rng,
            weights: vec![0.0; k],
        })
    }

    pub fn model(&self) -> &TopicModel {
        &self.model
    }

    /// One full pass over every token; records the log-likelihood afterwards.
    pub fn sweep(&mut self) {
        let m = &mut self.model;
        let k = m.config.num_topics;
        let alpha = m.config.alpha;
        let beta = m.config.beta;
        let v_beta = m.vocabulary.len() as f64 * beta;
        for d in 0..m.documents.len() {
            for i in 0..m.documents[d].len() {
                let w = m.documents[d][i] as usize;
                let old = usize::from(m.assignments[d][i]);
                m.topic_word_counts[old][w] -= 1;
                m.doc_topic_counts[d][old] -= 1;
                m.topic_totals[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let p = (f64::from(m.doc_topic_counts[d][t]) + alpha)
                        * (f64::from(m.topic_word_counts[t][w]) + beta)
                        / (m.topic_totals[t] as f64 + v_beta);
                    total += p;
                    self.weights[t] = total;
                }
                let u = self.rng.gen::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                m.topic_word_counts[new][w] += 1;
                m.doc_topic_counts[d][new] += 1;
                m.topic_totals[new] += 1;
                m.assignments[d][i] = new as u16;
            }
        }
        debug_assert!(m.check_invariants().is_ok());
        let ll = m.log_likelihood();
        m.log_likelihood_trace.push(ll);
    }

    pub fn into_model(self) -> TopicModel {
        self.model
    }
}

/// Runs `cfg.iterations` sweeps from a seeded uniform initialization.
pub fn train_lda<S: AsRef<str>>(docs: &[Vec<S>], cfg: &LdaConfig) -> Result<TopicModel, LdaError> {
    let mut sampler = GibbsSampler::new(docs, cfg.clone())?;
    for _ in 0..cfg.iterations {
        sampler.sweep();
    }
    let model = sampler.into_model();
    model.check_invariants()?;
    Ok(model)
}

/// The `n` most probable tokens of `topic` under `(count + β) / (total + Vβ)`.
pub fn top_words(model: &TopicModel, topic: usize, n: usize) -> Result<Vec<(String, f64)>, LdaError> {
    let k = model.num_topics();
    if topic >= k {
        return Err(LdaError::TopicOutOfRange(topic, k));
    }
    let beta = model.config.beta;
    let denom = model.topic_totals[topic] as f64 + model.vocab_size() as f64 * beta;
    let row = &model.topic_word_counts[topic];
    let mut ids: Vec<usize> = (0..model.vocab_size()).collect();
    ids.sort_by(|&a, &b| {
        row[b]
            .cmp(&row[a])
            .then_with(|| model.vocabulary[a].cmp(&model.vocabulary[b]))
    });
    Ok(ids
        .into_iter()
        .take(n)
        .map(|w| (model.vocabulary[w].clone(), (f64::from(row[w]) + beta) / denom))
        .collect())
}

/// Most frequent topic of document `doc` (ties → lowest id) and its share of tokens.
pub fn dominant_topic(model: &TopicModel, doc: usize) -> Result<(usize, f64), LdaError> {
    let counts = model
        .doc_topic_counts
        .get(doc)
        .ok_or(LdaError::DocumentOutOfRange(doc, model.num_docs()))?;
    let mut best = 0;
    for (t, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = t;
        }
    }
    let len = model.documents[doc].len();
    let share = if len == 0 { 0.0 } else { f64::from(counts[best]) / len as f64 };
    Ok((best, share))
}

/// Items whose dominant topic is accepted with at least `min_share` of their tokens.
/// Kept items are marked `lda-confirmed`.
pub fn select_by_topics(
    corpus: &Corpus,
    model: &TopicModel,
    accepted: &BTreeSet<usize>,
    min_share: f64,
) -> Result<Corpus, LdaError> {
    if corpus.len() != model.num_docs() {
        return Err(LdaError::Misaligned {
            corpus: corpus.len(),
            model: model.num_docs(),
        });
    }
    let mut items = Vec::new();
    for (d, item) in corpus.iter().enumerate() {
        let (topic, share) = dominant_topic(model, d)?;
        if accepted.contains(&topic) && share >= min_share {
            let mut item = item.clone();
            item.label_source = Some(LabelSource::LdaConfirmed);
            items.push(item);
        }
    }
    Ok(corpus.with_items(corpus.name.clone(), items))
}

/// Top words of every topic, for review.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic: usize,
    pub top_words: Vec<(String, f64)>,
    /// Documents whose dominant topic this is.
    pub documents: usize,
}

pub fn summarize(model: &TopicModel, n: usize) -> Vec<TopicSummary> {
    let mut docs_per_topic = vec![0; model.num_topics()];
    for d in 0..model.num_docs() {
        if !model.documents[d].is_empty() {
            docs_per_topic[dominant_topic(model, d).unwrap().0] += 1;
        }
    }
    (0..model.num_topics())
        .map(|topic| TopicSummary {
            topic,
            top_words: top_words(model, topic, n).unwrap(),
            documents: docs_per_topic[topic],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, iterations: usize) -> LdaConfig {
        LdaConfig {
            num_topics: k,
            alpha: 0.5,
            beta: 0.01,
            iterations,
            burn_in: 0,
            seed: 7,
        }
    }

    #[test]
    fn single_token_corpus() {
        let model = train_lda(&[vec!["hola"]], &cfg(2, 5)).unwrap();
        assert_eq!(model.doc_topic_counts[0].iter().sum::<u32>(), 1);
        model.check_invariants().unwrap();
        assert_eq!(dominant_topic(&model, 0).unwrap().1, 1.0);
    }

    #[test]
    fn empty_vocabulary_is_error() {
        let docs: Vec<Vec<&str>> = vec![vec![], vec![]];
        assert!(matches!(train_lda(&docs, &cfg(2, 1)), Err(LdaError::EmptyVocabulary)));
        let none: Vec<Vec<&str>> = vec![];
        assert!(matches!(train_lda(&none, &cfg(2, 1)), Err(LdaError::NoDocuments)));
    }

    #[test]
    fn config_validation() {
        assert!(LdaConfig { num_topics: 1, ..cfg(2, 1) }.validate().is_err());
        assert!(LdaConfig { burn_in: 3, ..cfg(2, 3) }.validate().is_err());
        assert!(LdaConfig { alpha: 0.0, ..cfg(2, 3) }.validate().is_err());
        let d = LdaConfig::default();
        assert_eq!((d.num_topics, d.alpha, d.beta, d.iterations, d.burn_in), (20, 2.5, 0.01, 1000, 200));
    }

    #[test]
    fn dominant_topic_tie_goes_to_lowest() {
        let mut model = train_lda(&[vec!["a", "b", "c", "d"]], &cfg(2, 1)).unwrap();
        model.doc_topic_counts[0] = vec![2, 2];
        assert_eq!(dominant_topic(&model, 0).unwrap(), (0, 0.5));
        model.doc_topic_counts[0] = vec![0, 4];
        assert_eq!(dominant_topic(&model, 0).unwrap(), (1, 1.0));
        assert!(dominant_topic(&model, 1).is_err());
    }

    #[test]
    fn top_words_clamps_and_validates() {
        let model = train_lda(&[vec!["a", "b", "a"]], &cfg(2, 3)).unwrap();
        assert!(top_words(&model, 0, 0).unwrap().is_empty());
        assert_eq!(top_words(&model, 0, 10).unwrap().len(), 2);
        assert!(top_words(&model, 2, 1).is_err());
        for (_, p) in top_words(&model, 1, 2).unwrap() {
            assert!(p > 0.0 && p < 1.0);
        }
    }

    #[test]
    fn model_json_round_trip() {
        let model = train_lda(&[vec!["a", "b"], vec!["c"]], &cfg(2, 2)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        model.save(&path).unwrap();
        assert_eq!(TopicModel::load(&path).unwrap(), model);
    }
}
