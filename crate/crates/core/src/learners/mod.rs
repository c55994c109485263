//! Classical stance classifiers: TF-IDF + kernel SVM, averaged embeddings + SVM,
//! and a linear softmax classifier over averaged word vectors.
//!
//! Default pairings follow common practice for these systems: TF-IDF features are
//! computed from Type A text, the embedding systems consume Type B text.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::StanceLabel;
use crate::text::PreprocessType;

pub mod embedding;
pub mod grid;
pub mod softmax;
pub mod svm;
pub mod tfidf;

pub use embedding::{embed_average, EmbeddingTable};
pub use grid::{grid_search, GridCell, GridResult, GridSpec, Validation};
pub use softmax::{train_linear_softmax, LinearSoftmaxModel, SoftmaxConfig};
pub use svm::{train_svm, Kernel, SvmModel, SvmParams};
pub use tfidf::{information_gain, select_positive, SparseVec, TfidfVectorizer};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("no training examples")]
    EmptyTrainingSet,
    #[error("training labels contain a single class ({0})")]
    SingleClass(StanceLabel),
    #[error("{0} features but {1} labels")]
    LengthMismatch(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("vector of length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("model format version {0} is not supported (expected {MODEL_FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = LearnerError> = std::result::Result<T, E>;

/// The trained part of one of the three systems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "kebab-case")]
pub enum TrainedSystem {
    TfidfSvm {
        vectorizer: TfidfVectorizer,
        svm: SvmModel,
    },
    /// The embedding table itself is referenced by hash; it is not copied into the model.
    EmbeddingSvm { svm: SvmModel },
    LinearSoftmax { model: LinearSoftmaxModel },
}

/// Versioned model file: the trained system plus everything needed to reproduce
/// its inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub preprocessing: PreprocessType,
    /// sha256 of the resource files (stopwords, lemmas, embeddings) used to build inputs.
    #[serde(default)]
    pub resource_hashes: std::collections::BTreeMap<String, String>,
    pub system: TrainedSystem,
}

impl ModelFile {
    pub fn new(preprocessing: PreprocessType, system: TrainedSystem) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            preprocessing,
            resource_hashes: Default::default(),
            system,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_vec(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let model: ModelFile = serde_json::from_slice(&fs::read(path)?)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(LearnerError::UnsupportedVersion(model.format_version));
        }
        Ok(model)
    }

    pub fn system_name(&self) -> &'static str {
        match self.system {
            TrainedSystem::TfidfSvm { .. } => "tfidf-svm",
            TrainedSystem::EmbeddingSvm { .. } => "embedding-svm",
            TrainedSystem::LinearSoftmax { .. } => "linear-softmax",
        }
    }

    /// Labels for already preprocessed, tokenized documents. The embedding SVM
    /// needs the table it was trained with.
    pub fn predict<T: AsRef<str>>(&self, docs: &[Vec<T>], embeddings: Option<&EmbeddingTable>) -> Result<Vec<StanceLabel>> {
        Ok(match &self.system {
            TrainedSystem::TfidfSvm { vectorizer, svm } => svm.predict_all(&vectorizer.transform_all(docs)),
            TrainedSystem::EmbeddingSvm { svm } => {
                let table = embeddings
                    .ok_or_else(|| LearnerError::InvalidParam("embedding-svm prediction needs the embedding table".into()))?;
                docs.iter()
                    .map(|d| svm.predict(&SparseVec::from_dense(&embed_average(d, table))))
                    .collect()
            }
            TrainedSystem::LinearSoftmax { model } => docs.iter().map(|d| model.predict(d)).collect(),
        })
    }
}

/// Distinct labels in AGAINST, FAVOR, NONE order.
pub(crate) fn class_list(labels: &[StanceLabel]) -> Vec<StanceLabel> {
    StanceLabel::ALL
        .into_iter()
        .filter(|l| labels.contains(l))
        .collect()
}

/// Whitespace tokenization of already preprocessed text.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}
