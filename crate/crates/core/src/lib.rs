//! # stance-corpus
//!
//! Toolkit for building stance-detection corpora from raw tweet dumps and
//! benchmarking classical classifiers on them.
//!
//! The pipeline stages map onto modules:
//!
//! - [`ingest`]: parse raw dumps, identify language, drop duplicates and short messages.
//! - [`propagation`]: expand manually labeled seed accounts over the retweet graph.
//! - [`topic`]: hashtag/keyword lexicons for on-topic filtering.
//! - [`lda`]: collapsed Gibbs LDA for recovering additional on-topic tweets.
//! - [`dataset`]: balanced assembly and train/dev/test splitting (proportional or user-disjoint).
//! - [`text`]: the four preprocessing recipes (Types A to D).
//! - [`learners`]: TF-IDF + SVM, averaged embeddings + SVM, linear softmax classifier.
//! - [`evaluation`]: F1 scoring, majority-vote error mining, upperbound oracle.
//! - [`pipeline`]: declarative run configs with per-stage manifests.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod corpus;
pub mod dataset;
pub mod evaluation;
pub mod ingest;
pub mod langid;
pub mod lda;
pub mod learners;
pub mod normalize;
pub mod pipeline;
pub mod propagation;
pub mod synthetic;
pub mod text;
pub mod topic;

pub use corpus::{
    AccountLabel, ClassDistribution, ColumnSchema, Corpus, LabelSource, LabeledTweet, Provenance,
    StanceLabel, Tweet,
};

/// Deterministic RNG used across the crate: ChaCha with 8 rounds, seeded from a `u64`
/// through `rand_core`'s `seed_from_u64` expansion.
pub type Rng = rand_chacha::ChaCha8Rng;

pub(crate) fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
