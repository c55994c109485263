//! Declarative runs: a TOML [`RunConfig`] names the stages to execute, and each
//! stage writes its artifacts plus a `manifest.json` (input hashes, parameters,
//! seed, crate version) under `<workspace>/<stage>/`.
//!
//! Stage order is fixed: ingest → propagate → topic → lda → assemble → split →
//! train → score. A stage reads the previous configured stage's output unless its
//! section names an explicit input. With `resume = true`, a stage whose manifest
//! matches the current inputs and parameters is skipped.
//!
//! ```toml
//! seed = 7
//! language = "es"
//!
//! [ingest]
//! input = "tweets.jsonl"
//!
//! [propagate]
//! seeds = "seeds.tsv"
//! max_hops = 2
//!
//! [topic]
//! lexicon = "lexicon.txt"
//!
//! [assemble]
//! target_total = 600
//!
//! [split]
//! mode = "user-disjoint"
//!
//! [train]
//! system = "tfidf-svm"
//!
//! [score]
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{self, ColumnSchema, Corpus, LabeledTweet};
use crate::dataset::{self, SplitSpec};
use crate::evaluation::{self, PredictionSet, ScoreReport};
use crate::ingest;
use crate::langid::{self, LanguageProfile};
use crate::lda::{self, LdaConfig};
use crate::learners::{self, EmbeddingTable, GridSpec, ModelFile, SoftmaxConfig, SvmParams, TrainedSystem, Validation};
use crate::propagation::{self, PropagationConfig};
use crate::text::{self, PreprocessResources, PreprocessType};
use crate::topic::{self, TopicLexicon};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const STAGES: [&str; 8] = ["ingest", "propagate", "topic", "lda", "assemble", "split", "train", "score"];

type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("missing input {}", .0.display())]
    MissingInput(PathBuf),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: BoxError,
    },
    #[error("stage {stage}: artifact {file} no longer matches its manifest; rerun without resume")]
    ManifestMismatch { stage: String, file: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl PipelineError {
    /// Process exit code: 2 for configuration problems, 3 for stage failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Toml(_) | PipelineError::MissingInput(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

fn default_language() -> String {
    "es".to_string()
}
fn default_min_words() -> usize {
    ingest::DEFAULT_MIN_WORDS
}
fn default_assemble_min_words() -> usize {
    4
}
fn default_max_hops() -> u32 {
    PropagationConfig::default().max_hops
}
fn default_margin() -> f64 {
    PropagationConfig::default().min_margin
}
fn default_evidence() -> u32 {
    PropagationConfig::default().min_evidence
}
fn default_topics() -> usize {
    20
}
fn default_beta() -> f64 {
    0.01
}
fn default_iterations() -> usize {
    1000
}
fn default_burn_in() -> usize {
    200
}
fn default_min_share() -> f64 {
    0.5
}
fn default_top_words() -> usize {
    10
}
fn default_ratios() -> [f64; 3] {
    SplitSpec::default().ratios
}
fn default_size_tol() -> f64 {
    SplitSpec::default().size_tolerance
}
fn default_label_tol() -> f64 {
    SplitSpec::default().label_tolerance
}
fn default_restarts() -> usize {
    SplitSpec::default().restarts
}
fn default_c() -> f64 {
    700.0
}
fn default_gamma() -> f64 {
    0.001
}
fn default_true() -> bool {
    true
}
fn default_folds() -> usize {
    5
}
fn default_ngrams() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestStage {
    /// Line-delimited JSON dump.
    pub input: PathBuf,
    #[serde(default = "default_min_words")]
    pub min_words: usize,
    /// Directory of `<lang>.txt` profile files; the bundled es/ca/en profiles otherwise.
    #[serde(default)]
    pub profiles_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateStage {
    #[serde(default)]
    pub input: Option<PathBuf>,
    pub seeds: PathBuf,
    #[serde(default = "default_max_hops")]
    pub max_hops: u32,
    #[serde(default = "default_margin")]
    pub min_margin: f64,
    #[serde(default = "default_evidence")]
    pub min_evidence: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicStage {
    #[serde(default)]
    pub input: Option<PathBuf>,
    pub lexicon: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdaStage {
    /// Off-lexicon candidates; `topic/remaining.tsv` by default.
    #[serde(default)]
    pub input: Option<PathBuf>,
    /// Hashtag-confirmed tweets merged into `combined.tsv`; `topic/on_topic.tsv` by default.
    #[serde(default)]
    pub on_topic: Option<PathBuf>,
    #[serde(default = "default_topics")]
    pub num_topics: usize,
    /// 50 / num_topics when omitted.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    /// Topics accepted by a curator. When absent, topics whose top words include
    /// one of `accept_words` are accepted.
    #[serde(default)]
    pub accepted_topics: Option<Vec<usize>>,
    #[serde(default)]
    pub accept_words: Vec<String>,
    #[serde(default = "default_min_share")]
    pub min_share: f64,
    #[serde(default = "default_top_words")]
    pub top_words: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssembleStage {
    #[serde(default)]
    pub input: Option<PathBuf>,
    pub target_total: usize,
    #[serde(default = "default_assemble_min_words")]
    pub min_words: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    UserDisjoint,
    Proportional,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitStage {
    #[serde(default)]
    pub input: Option<PathBuf>,
    pub mode: SplitMode,
    #[serde(default = "default_ratios")]
    pub ratios: [f64; 3],
    #[serde(default = "default_size_tol")]
    pub size_tolerance: f64,
    #[serde(default = "default_label_tol")]
    pub label_tolerance: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemaName {
    Canonical,
    Cic,
    Semeval,
}

impl SchemaName {
    pub fn schema(self, language: &str) -> ColumnSchema {
        match self {
            SchemaName::Canonical => ColumnSchema::canonical().language(language),
            SchemaName::Cic => ColumnSchema::cic(language),
            SchemaName::Semeval => ColumnSchema::semeval(),
        }
    }
}

fn default_schema() -> SchemaName {
    SchemaName::Canonical
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    TfidfSvm,
    EmbeddingSvm,
    LinearSoftmax,
}

impl SystemKind {
    /// TF-IDF uses Type A text, the embedding systems Type B.
    pub fn default_preprocessing(self) -> PreprocessType {
        match self {
            SystemKind::TfidfSvm => PreprocessType::A,
            _ => PreprocessType::B,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainStage {
    /// `split/train.tsv` and `split/dev.tsv` by default.
    #[serde(default)]
    pub train: Option<PathBuf>,
    #[serde(default)]
    pub dev: Option<PathBuf>,
    #[serde(default = "default_schema")]
    pub schema: SchemaName,
    pub system: SystemKind,
    #[serde(default)]
    pub preprocessing: Option<PreprocessType>,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Tune C and gamma over `grid_c` × `grid_gamma` (the default grid when empty).
    #[serde(default)]
    pub grid: bool,
    #[serde(default)]
    pub grid_c: Vec<f64>,
    #[serde(default)]
    pub grid_gamma: Vec<f64>,
    /// Folds for tuning when there is no dev set.
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_true")]
    pub information_gain: bool,
    #[serde(default)]
    pub embeddings: Option<PathBuf>,
    #[serde(default)]
    pub epochs: Option<usize>,
    #[serde(default)]
    pub learning_rate: Option<f64>,
    #[serde(default)]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub trainable_embeddings: Option<bool>,
    #[serde(default = "default_ngrams")]
    pub word_ngrams: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreStage {
    /// `split/test.tsv` by default.
    #[serde(default)]
    pub test: Option<PathBuf>,
    #[serde(default)]
    pub schema: Option<SchemaName>,
    /// `train/model.json` by default.
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub system_name: Option<String>,
    /// Needed by embedding-svm models; the train stage's table by default.
    #[serde(default)]
    pub embeddings: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub workspace: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_language")]
    pub language: String,
    #[serde(default)]
    pub resume: bool,
    /// Stopword/lemma files (`<lang>.stopwords.txt`, `<lang>.lemmas.tsv`); bundled otherwise.
    #[serde(default)]
    pub resources_dir: Option<PathBuf>,
    #[serde(default)]
    pub ingest: Option<IngestStage>,
    #[serde(default)]
    pub propagate: Option<PropagateStage>,
    #[serde(default)]
    pub topic: Option<TopicStage>,
    #[serde(default)]
    pub lda: Option<LdaStage>,
    #[serde(default)]
    pub assemble: Option<AssembleStage>,
    #[serde(default)]
    pub split: Option<SplitStage>,
    #[serde(default)]
    pub train: Option<TrainStage>,
    #[serde(default)]
    pub score: Option<ScoreStage>,
}

impl RunConfig {
    pub fn empty() -> Self {
        toml::from_str("").expect("empty config parses")
    }

    /// Parses TOML; relative paths are resolved against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text)?;
        cfg.resolve_paths(base_dir);
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|_| PipelineError::MissingInput(path.to_path_buf()))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// The config file (if any) with `overrides` merged over it key by key. Paths
    /// in the file are relative to its directory; override paths should be absolute.
    pub fn from_parts(file: Option<&Path>, overrides: Value) -> Result<Self> {
        let (mut merged, base) = match file {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|_| PipelineError::MissingInput(path.to_path_buf()))?;
                let table: toml::Table = toml::from_str(&text)?;
                let value = serde_json::to_value(table).map_err(|e| PipelineError::Config(e.to_string()))?;
                (value, path.parent().unwrap_or(Path::new(".")).to_path_buf())
            }
            None => (json!({}), PathBuf::from(".")),
        };
        merge(&mut merged, overrides);
        let mut cfg: RunConfig = serde_json::from_value(merged).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.resolve_paths(&base);
        Ok(cfg)
    }

    /// Keeps only `stage`; its unset inputs point at the artifacts earlier stages
    /// leave in the workspace.
    pub fn only(&self, stage: &str) -> Result<RunConfig> {
        let ws = self
            .workspace
            .clone()
            .ok_or_else(|| PipelineError::Config("no workspace directory given".into()))?;
        let art = |s: &str, f: &str| ws.join(s).join(f);
        let missing = || PipelineError::Config(format!("stage {stage} is not configured"));
        let mut out = RunConfig {
            ingest: None,
            propagate: None,
            topic: None,
            lda: None,
            assemble: None,
            split: None,
            train: None,
            score: None,
            ..self.clone()
        };
        match stage {
            "ingest" => out.ingest = Some(self.ingest.clone().ok_or_else(missing)?),
            "propagate" => {
                let mut s = self.propagate.clone().ok_or_else(missing)?;
                s.input.get_or_insert_with(|| art("ingest", "tweets.tsv"));
                out.propagate = Some(s);
            }
            "topic" => {
                let mut s = self.topic.clone().ok_or_else(missing)?;
                s.input.get_or_insert_with(|| art("propagate", "labeled.tsv"));
                out.topic = Some(s);
            }
            "lda" => {
                let mut s = self.lda.clone().ok_or_else(missing)?;
                s.input.get_or_insert_with(|| art("topic", "remaining.tsv"));
                if s.on_topic.is_none() && art("topic", "on_topic.tsv").exists() {
                    s.on_topic = Some(art("topic", "on_topic.tsv"));
                }
                out.lda = Some(s);
            }
            "assemble" => {
                let mut s = self.assemble.clone().ok_or_else(missing)?;
                s.input.get_or_insert_with(|| {
                    let combined = art("lda", "combined.tsv");
                    if combined.exists() {
                        combined
                    } else {
                        art("topic", "on_topic.tsv")
                    }
                });
                out.assemble = Some(s);
            }
            "split" => {
                let mut s = self.split.clone().ok_or_else(missing)?;
                s.input.get_or_insert_with(|| art("assemble", "corpus.tsv"));
                out.split = Some(s);
            }
            "train" => {
                let mut s = self.train.clone().ok_or_else(missing)?;
                if s.train.is_none() {
                    s.train = Some(art("split", "train.tsv"));
                    s.dev.get_or_insert_with(|| art("split", "dev.tsv"));
                }
                out.train = Some(s);
            }
            "score" => {
                let mut s = self.score.clone().ok_or_else(missing)?;
                s.test.get_or_insert_with(|| art("split", "test.tsv"));
                s.model.get_or_insert_with(|| art("train", "model.json"));
                if s.embeddings.is_none() {
                    s.embeddings = self.train.as_ref().and_then(|t| t.embeddings.clone());
                }
                if s.schema.is_none() {
                    s.schema = self.train.as_ref().filter(|t| t.train.is_some()).map(|t| t.schema);
                }
                out.score = Some(s);
            }
            other => return Err(PipelineError::Config(format!("unknown stage {other}"))),
        }
        Ok(out)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let fix_opt = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                fix(p);
            }
        };
        fix_opt(&mut self.workspace);
        fix_opt(&mut self.resources_dir);
        if let Some(s) = &mut self.ingest {
            fix(&mut s.input);
            fix_opt(&mut s.profiles_dir);
        }
        if let Some(s) = &mut self.propagate {
            fix_opt(&mut s.input);
            fix(&mut s.seeds);
        }
        if let Some(s) = &mut self.topic {
            fix_opt(&mut s.input);
            fix(&mut s.lexicon);
        }
        if let Some(s) = &mut self.lda {
            fix_opt(&mut s.input);
            fix_opt(&mut s.on_topic);
        }
        if let Some(s) = &mut self.assemble {
            fix_opt(&mut s.input);
        }
        if let Some(s) = &mut self.split {
            fix_opt(&mut s.input);
        }
        if let Some(s) = &mut self.train {
            fix_opt(&mut s.train);
            fix_opt(&mut s.dev);
            fix_opt(&mut s.embeddings);
        }
        if let Some(s) = &mut self.score {
            fix_opt(&mut s.test);
            fix_opt(&mut s.model);
            fix_opt(&mut s.embeddings);
        }
    }

    /// Configured stages in execution order.
    pub fn stages(&self) -> Vec<&'static str> {
        let present = [
            self.ingest.is_some(),
            self.propagate.is_some(),
            self.topic.is_some(),
            self.lda.is_some(),
            self.assemble.is_some(),
            self.split.is_some(),
            self.train.is_some(),
            self.score.is_some(),
        ];
        STAGES.iter().zip(present).filter(|(_, p)| *p).map(|(s, _)| *s).collect()
    }

    /// Checks that every stage has an input, either explicit or from an earlier stage.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(PipelineError::Config(m));
        if self.workspace.is_none() {
            return cfg_err("no workspace directory given".into());
        }
        if self.stages().is_empty() {
            return cfg_err("no stages configured".into());
        }
        let needs = |name: &str, explicit: bool, upstream: &[bool]| -> Result<()> {
            if explicit || upstream.iter().any(|&u| u) {
                Ok(())
            } else {
                Err(PipelineError::Config(format!("stage {name} has no input: configure an earlier stage or set its input")))
            }
        };
        if let Some(s) = &self.propagate {
            needs("propagate", s.input.is_some(), &[self.ingest.is_some()])?;
        }
        if let Some(s) = &self.topic {
            needs("topic", s.input.is_some(), &[self.propagate.is_some()])?;
        }
        if let Some(s) = &self.lda {
            needs("lda", s.input.is_some(), &[self.topic.is_some()])?;
            if s.accepted_topics.is_none() && s.accept_words.is_empty() {
                return cfg_err("lda needs accepted_topics or accept_words".into());
            }
        }
        if let Some(s) = &self.assemble {
            needs("assemble", s.input.is_some(), &[self.lda.is_some(), self.topic.is_some()])?;
        }
        if let Some(s) = &self.split {
            needs("split", s.input.is_some(), &[self.assemble.is_some()])?;
        }
        if let Some(s) = &self.train {
            needs("train", s.train.is_some(), &[self.split.is_some()])?;
            if s.word_ngrams != 1 {
                return cfg_err(format!("word_ngrams = {} is not supported (unigrams only)", s.word_ngrams));
            }
            if s.system == SystemKind::EmbeddingSvm && s.embeddings.is_none() {
                return cfg_err("embedding-svm needs an embeddings file".into());
            }
        }
        if let Some(s) = &self.score {
            needs("score", s.test.is_some(), &[self.split.is_some()])?;
            needs("score", s.model.is_some(), &[self.train.is_some()])?;
        }
        Ok(())
    }
}

fn merge(base: &mut Value, overrides: Value) {
    match (base, overrides) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Written next to every stage's artifacts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub version: String,
    pub seed: u64,
    pub params: Value,
    /// Input path → sha256.
    pub inputs: BTreeMap<String, String>,
    /// Artifact file name (relative to the stage directory) → sha256.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Executed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub stage: String,
    pub status: StageStatus,
    pub outputs: Vec<String>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub workspace: PathBuf,
    pub stages: Vec<StageOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<ScoreReport>,
}

impl RunReport {
    pub fn executed(&self) -> usize {
        self.stages.iter().filter(|s| s.status == StageStatus::Executed).count()
    }
}

fn stage_err(stage: &str) -> impl Fn(BoxError) -> PipelineError + '_ {
    move |source| PipelineError::Stage {
        stage: stage.to_string(),
        source,
    }
}

fn boxed<E: std::error::Error + Send + Sync + 'static>(e: E) -> BoxError {
    Box::new(e)
}

fn write_json(path: &Path, value: &impl Serialize) -> std::result::Result<(), BoxError> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn load_canonical(path: &Path, language: &str) -> std::result::Result<Corpus, BoxError> {
    let loaded = corpus::load_corpus(path, &ColumnSchema::canonical().language(language))?;
    if !loaded.rejected.is_empty() {
        return Err(format!("{}: {} malformed rows", path.display(), loaded.rejected.len()).into());
    }
    Ok(loaded.corpus)
}

fn load_with(path: &Path, schema: &ColumnSchema) -> std::result::Result<Corpus, BoxError> {
    let loaded = corpus::load_corpus(path, schema)?;
    for row in &loaded.rejected {
        log::warn!("{}: line {} rejected: {}", path.display(), row.line, row.reason);
    }
    Ok(loaded.corpus)
}

fn save(corpus: &Corpus, path: &Path) -> std::result::Result<(), BoxError> {
    corpus::save_corpus(corpus, path, &ColumnSchema::canonical())?;
    Ok(())
}

/// Executes a validated config.
pub struct Runner {
    cfg: RunConfig,
    workspace: PathBuf,
    resources: PreprocessResources,
    resources_hash: String,
}

impl Runner {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let workspace = cfg.workspace.clone().unwrap();
        let (resources, resources_hash) = match &cfg.resources_dir {
            Some(dir) => {
                if !dir.is_dir() {
                    return Err(PipelineError::MissingInput(dir.clone()));
                }
                let res = PreprocessResources::load_dir(dir).map_err(|e| PipelineError::Config(e.to_string()))?;
                let mut hasher = Sha256::new();
                let mut files: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<io::Result<_>>()?;
                files.sort();
                for f in files.iter().filter(|f| f.is_file()) {
                    hasher.update(f.file_name().unwrap().to_string_lossy().as_bytes());
                    hasher.update(fs::read(f)?);
                }
                (res, hex::encode(hasher.finalize()))
            }
            None => (PreprocessResources::bundled(), format!("bundled-{VERSION}")),
        };
        Ok(Runner {
            cfg,
            workspace,
            resources,
            resources_hash,
        })
    }

    fn dir(&self, stage: &str) -> PathBuf {
        self.workspace.join(stage)
    }

    fn input_or(&self, explicit: &Option<PathBuf>, candidates: &[(&str, bool, &str)]) -> PathBuf {
        if let Some(p) = explicit {
            return p.clone();
        }
        for (stage, configured, file) in candidates {
            if *configured {
                return self.dir(stage).join(file);
            }
        }
        unreachable!("validated config always has an input")
    }

    /// Runs `body` unless a matching manifest allows skipping it.
    fn stage(
        &self,
        name: &str,
        params: Value,
        inputs: &[PathBuf],
        body: impl FnOnce(&Path) -> std::result::Result<(), BoxError>,
    ) -> Result<StageOutcome> {
        let dir = self.dir(name);
        let mut input_hashes = BTreeMap::new();
        for p in inputs {
            if !p.exists() {
                return Err(PipelineError::MissingInput(p.clone()));
            }
            input_hashes.insert(p.display().to_string(), sha256_file(p)?);
        }
        let manifest_path = dir.join("manifest.json");
        if self.cfg.resume && manifest_path.exists() {
            let old: Manifest = serde_json::from_slice(&fs::read(&manifest_path)?).map_err(|e| stage_err(name)(boxed(e)))?;
            if old.params == params && old.inputs == input_hashes && old.seed == self.cfg.seed && old.version == VERSION {
                for (file, hash) in &old.outputs {
                    let path = dir.join(file);
                    if !path.exists() || &sha256_file(&path)? != hash {
                        return Err(PipelineError::ManifestMismatch {
                            stage: name.to_string(),
                            file: file.clone(),
                        });
                    }
                }
                log::info!("{name}: up to date, skipped");
                return Ok(StageOutcome {
                    stage: name.to_string(),
                    status: StageStatus::Skipped,
                    outputs: old.outputs.into_keys().collect(),
                    seconds: 0.0,
                });
            }
            log::info!("{name}: inputs or parameters changed, re-running");
        }
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir_all(&dir)?;
        let start = Instant::now();
        log::info!("{name}: running");
        body(&dir).map_err(stage_err(name))?;
        let mut outputs = BTreeMap::new();
        let mut entries: Vec<PathBuf> = fs::read_dir(&dir)?.map(|e| e.map(|e| e.path())).collect::<io::Result<_>>()?;
        entries.sort();
        for path in entries.iter().filter(|p| p.is_file()) {
            outputs.insert(path.file_name().unwrap().to_string_lossy().into_owned(), sha256_file(path)?);
        }
        let manifest = Manifest {
            stage: name.to_string(),
            version: VERSION.to_string(),
            seed: self.cfg.seed,
            params,
            inputs: input_hashes,
            outputs,
        };
        fs::write(&manifest_path, serde_json::to_string_pretty(&manifest).unwrap() + "\n")?;
        Ok(StageOutcome {
            stage: name.to_string(),
            status: StageStatus::Executed,
            outputs: manifest.outputs.into_keys().collect(),
            seconds: start.elapsed().as_secs_f64(),
        })
    }

    pub fn run(&self) -> Result<RunReport> {
        fs::create_dir_all(&self.workspace)?;
        let mut report = RunReport {
            workspace: self.workspace.clone(),
            stages: Vec::new(),
            score: None,
        };
        let cfg = &self.cfg;
        if let Some(s) = &cfg.ingest {
            report.stages.push(self.run_ingest(s)?);
        }
        if let Some(s) = &cfg.propagate {
            report.stages.push(self.run_propagate(s)?);
        }
        if let Some(s) = &cfg.topic {
            report.stages.push(self.run_topic(s)?);
        }
        if let Some(s) = &cfg.lda {
            report.stages.push(self.run_lda(s)?);
        }
        if let Some(s) = &cfg.assemble {
            report.stages.push(self.run_assemble(s)?);
        }
        if let Some(s) = &cfg.split {
            report.stages.push(self.run_split(s)?);
        }
        if let Some(s) = &cfg.train {
            report.stages.push(self.run_train(s)?);
        }
        if let Some(s) = &cfg.score {
            report.stages.push(self.run_score(s)?);
            let path = self.dir("score").join("report.json");
            let score: ScoreReport = serde_json::from_slice(&fs::read(&path)?).map_err(|e| stage_err("score")(boxed(e)))?;
            report.score = Some(score);
        }
        Ok(report)
    }

    fn run_ingest(&self, s: &IngestStage) -> Result<StageOutcome> {
        let mut inputs = vec![s.input.clone()];
        let profile_files: Vec<PathBuf> = match &s.profiles_dir {
            Some(dir) => {
                let mut files: Vec<PathBuf> = fs::read_dir(dir)
                    .map_err(|_| PipelineError::MissingInput(dir.clone()))?
                    .map(|e| e.map(|e| e.path()))
                    .collect::<io::Result<_>>()?;
                files.retain(|p| p.extension().is_some_and(|e| e == "txt"));
                files.sort();
                files
            }
            None => vec![],
        };
        inputs.extend(profile_files.iter().cloned());
        let language = self.cfg.language.clone();
        self.stage("ingest", json!({"stage": s, "language": language}), &inputs, |dir| {
            let profiles: Vec<LanguageProfile> = if profile_files.is_empty() {
                langid::builtin_profiles()
            } else {
                profile_files.iter().map(LanguageProfile::load).collect::<io::Result<_>>()?
            };
            let (raw, errors) = ingest::read_raw_jsonl(BufReader::new(File::open(&s.input)?))?;
            let (kept, mut report) = ingest::ingest(raw, &profiles, s.min_words)?;
            report.dropped_other += errors.len();
            report.input_count += errors.len();
            let by_lang = ingest::split_by_language(&kept);
            let corpus = by_lang.get(&language).cloned().unwrap_or_else(|| Corpus {
                name: format!("tweets.{language}"),
                language: language.clone(),
                items: vec![],
            });
            save(&corpus, &dir.join("tweets.tsv"))?;
            write_json(&dir.join("report.json"), &report)?;
            write_json(&dir.join("rejected.json"), &errors)?;
            Ok(())
        })
    }

    fn run_propagate(&self, s: &PropagateStage) -> Result<StageOutcome> {
        let input = self.input_or(&s.input, &[("ingest", self.cfg.ingest.is_some(), "tweets.tsv")]);
        let language = self.cfg.language.clone();
        self.stage("propagate", json!({"stage": s}), &[input.clone(), s.seeds.clone()], |dir| {
            let tweets: Vec<_> = load_canonical(&input, &language)?.items.into_iter().map(|i| i.tweet).collect();
            let seeds = propagation::read_seeds(BufReader::new(File::open(&s.seeds)?))?;
            let graph = propagation::build_retweet_graph(&tweets);
            let cfg = PropagationConfig {
                max_hops: s.max_hops,
                min_margin: s.min_margin,
                min_evidence: s.min_evidence,
            };
            let accounts = propagation::propagate(&graph, &seeds, &cfg)?;
            let labeled = propagation::project_labels(&tweets, &accounts)?;
            let corpus = Corpus::new(format!("labeled.{language}"), language.clone(), labeled)?;
            let mut out = Vec::new();
            propagation::write_accounts(&mut out, &accounts)?;
            fs::write(dir.join("accounts.tsv"), out)?;
            save(&corpus, &dir.join("labeled.tsv"))?;
            let account_dist = corpus::ClassDistribution::from_labels(accounts.iter().map(|a| a.label));
            write_json(
                &dir.join("distribution.json"),
                &json!({"accounts": account_dist, "tweets": corpus::distribution(&corpus)?}),
            )?;
            Ok(())
        })
    }

    fn run_topic(&self, s: &TopicStage) -> Result<StageOutcome> {
        let input = self.input_or(&s.input, &[("propagate", self.cfg.propagate.is_some(), "labeled.tsv")]);
        let language = self.cfg.language.clone();
        self.stage("topic", json!({"stage": s}), &[input.clone(), s.lexicon.clone()], |dir| {
            let corpus = load_canonical(&input, &language)?;
            let lexicon = TopicLexicon::load(&s.lexicon)?;
            let (on_topic, dist) = topic::filter_on_topic(&corpus, &lexicon)?;
            let remaining = corpus.subset(|i| !topic::match_topic(&i.tweet, &lexicon));
            save(&on_topic, &dir.join("on_topic.tsv"))?;
            save(&remaining, &dir.join("remaining.tsv"))?;
            write_json(&dir.join("distribution.json"), &dist)?;
            let hashtags: Vec<_> = topic::extract_hashtags(&corpus).into_iter().take(200).collect();
            write_json(&dir.join("hashtags.json"), &hashtags)?;
            Ok(())
        })
    }

    fn run_lda(&self, s: &LdaStage) -> Result<StageOutcome> {
        let input = self.input_or(&s.input, &[("topic", self.cfg.topic.is_some(), "remaining.tsv")]);
        let mut inputs = vec![input.clone()];
        let on_topic = s
            .on_topic
            .clone()
            .or_else(|| self.cfg.topic.as_ref().map(|_| self.dir("topic").join("on_topic.tsv")));
        inputs.extend(on_topic.clone());
        let language = self.cfg.language.clone();
        let seed = self.cfg.seed;
        let params = json!({"stage": s, "resources": self.resources_hash});
        self.stage("lda", params, &inputs, |dir| {
            let candidates = load_canonical(&input, &language)?;
            let docs: Vec<Vec<String>> = candidates
                .iter()
                .map(|i| text::preprocess(&i.tweet.text, PreprocessType::A, &self.resources, &language).map(|t| learners::tokenize(&t)))
                .collect::<std::result::Result<_, _>>()?;
            let mut selected = candidates.with_items(candidates.name.clone(), vec![]);
            if docs.iter().any(|d| !d.is_empty()) {
                let lda_cfg = LdaConfig {
                    num_topics: s.num_topics,
                    alpha: s.alpha.unwrap_or(50.0 / s.num_topics.max(1) as f64),
                    beta: s.beta,
                    iterations: s.iterations,
                    burn_in: s.burn_in,
                    seed,
                };
                let model = lda::train_lda(&docs, &lda_cfg)?;
                let summaries = lda::summarize(&model, s.top_words);
                let accept_words: BTreeSet<String> = s.accept_words.iter().map(|w| crate::normalize::fold(w)).collect();
                let accepted: BTreeSet<usize> = match &s.accepted_topics {
                    Some(t) => t.iter().copied().collect(),
                    None => summaries
                        .iter()
                        .filter(|t| t.top_words.iter().any(|(w, _)| accept_words.contains(w)))
                        .map(|t| t.topic)
                        .collect(),
                };
                selected = lda::select_by_topics(&candidates, &model, &accepted, s.min_share)?;
                model.save(dir.join("model.json"))?;
                save(&candidates, &dir.join("candidates.tsv"))?;
                write_json(&dir.join("topics.json"), &json!({"accepted": accepted, "topics": summaries}))?;
            } else {
                log::warn!("lda: no candidate tokens, nothing to select");
            }
            save(&selected, &dir.join("selected.tsv"))?;
            let mut combined: Vec<LabeledTweet> = match &on_topic {
                Some(p) => load_canonical(p, &language)?.items,
                None => vec![],
            };
            combined.extend(selected.items.iter().cloned());
            let combined = Corpus::new(format!("on_topic.{language}"), language.clone(), combined)?;
            save(&combined, &dir.join("combined.tsv"))?;
            write_json(
                &dir.join("distribution.json"),
                &json!({"selected": corpus::distribution(&selected)?, "combined": corpus::distribution(&combined)?}),
            )?;
            Ok(())
        })
    }

    fn run_assemble(&self, s: &AssembleStage) -> Result<StageOutcome> {
        let input = self.input_or(
            &s.input,
            &[
                ("lda", self.cfg.lda.is_some(), "combined.tsv"),
                ("topic", self.cfg.topic.is_some(), "on_topic.tsv"),
            ],
        );
        let language = self.cfg.language.clone();
        let seed = self.cfg.seed;
        self.stage("assemble", json!({"stage": s}), &[input.clone()], |dir| {
            let candidates = load_canonical(&input, &language)?;
            let out = dataset::assemble_balanced(&candidates, s.target_total, s.min_words, seed)?;
            let out = out.with_items(format!("corpus.{language}"), out.items.clone());
            save(&out, &dir.join("corpus.tsv"))?;
            write_json(&dir.join("distribution.json"), &corpus::distribution(&out)?)?;
            Ok(())
        })
    }

    fn run_split(&self, s: &SplitStage) -> Result<StageOutcome> {
        let input = self.input_or(&s.input, &[("assemble", self.cfg.assemble.is_some(), "corpus.tsv")]);
        let language = self.cfg.language.clone();
        let spec = SplitSpec {
            ratios: s.ratios,
            seed: self.cfg.seed,
            size_tolerance: s.size_tolerance,
            label_tolerance: s.label_tolerance,
            restarts: s.restarts,
        };
        self.stage("split", json!({"stage": s}), &[input.clone()], |dir| {
            let corpus = load_canonical(&input, &language)?;
            let split = match s.mode {
                SplitMode::UserDisjoint => dataset::split_user_disjoint(&corpus, &spec)?,
                SplitMode::Proportional => dataset::split_proportional(&corpus, &spec)?,
            };
            for v in &split.audit.violations {
                log::warn!("split: {v:?}");
            }
            split.write(dir, &ColumnSchema::canonical())?;
            Ok(())
        })
    }

    fn tokens(&self, corpus: &Corpus, kind: PreprocessType) -> std::result::Result<Vec<Vec<String>>, BoxError> {
        corpus
            .iter()
            .map(|i| Ok(learners::tokenize(&text::preprocess(&i.tweet.text, kind, &self.resources, &self.cfg.language)?)))
            .collect()
    }

    fn run_train(&self, s: &TrainStage) -> Result<StageOutcome> {
        let split = self.cfg.split.is_some();
        let train_path = self.input_or(&s.train, &[("split", split, "train.tsv")]);
        let dev_path = match (&s.dev, s.train.is_some()) {
            (Some(p), _) => Some(p.clone()),
            (None, false) => Some(self.dir("split").join("dev.tsv")),
            (None, true) => None,
        };
        let mut inputs = vec![train_path.clone()];
        inputs.extend(dev_path.clone());
        inputs.extend(s.embeddings.clone());
        let schema = s.schema.schema(&self.cfg.language);
        let seed = self.cfg.seed;
        let params = json!({"stage": s, "resources": self.resources_hash});
        self.stage("train", params, &inputs, |dir| {
            let kind = s.preprocessing.unwrap_or(s.system.default_preprocessing());
            let train = load_with(&train_path, &schema)?;
            let dev = match &dev_path {
                Some(p) => Some(load_with(p, &schema)?).filter(|d| !d.is_empty()),
                None => None,
            };
            let embeddings = s.embeddings.as_ref().map(EmbeddingTable::load).transpose()?;
            let train_docs = self.tokens(&train, kind)?;
            let train_labels = train.labels()?;
            let dev_data = match &dev {
                Some(d) => Some((self.tokens(d, kind)?, d.labels()?)),
                None => None,
            };
            let mut model = match s.system {
                SystemKind::TfidfSvm | SystemKind::EmbeddingSvm => {
                    let (features, vectorizer): (Box<dyn Fn(&[String]) -> learners::SparseVec>, _) = match s.system {
                        SystemKind::TfidfSvm => {
                            let mut v = learners::TfidfVectorizer::fit(&train_docs)?;
                            if s.information_gain {
                                let ig = learners::information_gain(&train_docs, &train_labels)?;
                                let selected = learners::select_positive(&v, &ig);
                                if selected.feature_count() > 0 {
                                    v = selected;
                                } else {
                                    log::warn!("information gain selected no feature; keeping all");
                                }
                            }
                            let v2 = v.clone();
                            (Box::new(move |d: &[String]| v2.transform(d)), Some(v))
                        }
                        _ => {
                            let table = embeddings.as_ref().unwrap();
                            (
                                Box::new(move |d: &[String]| learners::SparseVec::from_dense(&learners::embed_average(d, table))),
                                None,
                            )
                        }
                    };
                    let x: Vec<_> = train_docs.iter().map(|d| features(d)).collect();
                    let mut params = SvmParams::rbf(s.c, s.gamma);
                    if s.grid {
                        let mut grid = GridSpec::default();
                        if !s.grid_c.is_empty() {
                            grid.c_values = s.grid_c.clone();
                        }
                        if !s.grid_gamma.is_empty() {
                            grid.gamma_values = s.grid_gamma.clone();
                        }
                        let dev_x: Option<Vec<_>> = dev_data.as_ref().map(|(d, _)| d.iter().map(|t| features(t)).collect());
                        let validation = match (&dev_x, &dev_data) {
                            (Some(dx), Some((_, dy))) => Validation::Dev { x: dx, y: dy },
                            _ => Validation::KFold { k: s.folds, seed },
                        };
                        let result = learners::grid_search(&x, &train_labels, validation, &grid, &params)?;
                        log::info!(
                            "grid: best C={} gamma={} F1_avg={:.2}",
                            result.best.c,
                            result.best.gamma,
                            result.best.f1_avg
                        );
                        params = SvmParams::rbf(result.best.c, result.best.gamma);
                        write_json(&dir.join("grid.json"), &result)?;
                    }
                    let svm = learners::train_svm(&x, &train_labels, &params)?;
                    match vectorizer {
                        Some(vectorizer) => ModelFile::new(kind, TrainedSystem::TfidfSvm { vectorizer, svm }),
                        None => ModelFile::new(kind, TrainedSystem::EmbeddingSvm { svm }),
                    }
                }
                SystemKind::LinearSoftmax => {
                    let mut cfg = if embeddings.is_some() {
                        SoftmaxConfig::pretrained()
                    } else {
                        SoftmaxConfig::from_scratch()
                    };
                    cfg.seed = seed;
                    cfg.word_ngrams = s.word_ngrams;
                    if let Some(e) = s.epochs {
                        cfg.epochs = e;
                    }
                    if let Some(lr) = s.learning_rate {
                        cfg.learning_rate = lr;
                    }
                    if let Some(d) = s.dimension {
                        cfg.dimension = d;
                    }
                    if let Some(t) = s.trainable_embeddings {
                        cfg.trainable_embeddings = t;
                    }
                    let model = learners::train_linear_softmax(&train_docs, &train_labels, embeddings.as_ref(), &cfg)?;
                    ModelFile::new(kind, TrainedSystem::LinearSoftmax { model })
                }
            };
            model.resource_hashes.insert("preprocessing".into(), self.resources_hash.clone());
            if let Some(p) = &s.embeddings {
                model.resource_hashes.insert("embeddings".into(), sha256_file(p)?);
            }
            model.save(dir.join("model.json"))?;
            if let Some((docs, labels)) = &dev_data {
                let pred = model.predict(docs, embeddings.as_ref())?;
                let report = evaluation::score_labels("dev", labels, &pred)?;
                write_json(&dir.join("dev_report.json"), &report)?;
            }
            Ok(())
        })
    }

    fn run_score(&self, s: &ScoreStage) -> Result<StageOutcome> {
        let test_path = self.input_or(&s.test, &[("split", self.cfg.split.is_some(), "test.tsv")]);
        let model_path = self.input_or(&s.model, &[("train", self.cfg.train.is_some(), "model.json")]);
        let train_cfg = self.cfg.train.as_ref();
        let embeddings_path = s.embeddings.clone().or_else(|| train_cfg.and_then(|t| t.embeddings.clone()));
        let schema_name = s
            .schema
            .or(train_cfg.filter(|_| s.test.is_some()).map(|t| t.schema))
            .unwrap_or(SchemaName::Canonical);
        let schema = schema_name.schema(&self.cfg.language);
        let mut inputs = vec![test_path.clone(), model_path.clone()];
        inputs.extend(embeddings_path.clone());
        let params = json!({"stage": s, "resources": self.resources_hash});
        self.stage("score", params, &inputs, |dir| {
            let model = ModelFile::load(&model_path)?;
            let test = load_with(&test_path, &schema)?;
            let embeddings = embeddings_path.as_ref().map(EmbeddingTable::load).transpose()?;
            let docs = self.tokens(&test, model.preprocessing)?;
            let pred = model.predict(&docs, embeddings.as_ref())?;
            let name = s.system_name.clone().unwrap_or_else(|| model.system_name().to_string());
            let set = PredictionSet::from_pairs(name, test.iter().map(|i| i.id().to_string()).zip(pred));
            set.save(dir.join("predictions.tsv"))?;
            let report = evaluation::score(&test, &set)?;
            write_json(&dir.join("report.json"), &report)?;
            fs::write(dir.join("report.txt"), evaluation::render_table(std::slice::from_ref(&report)))?;
            if test.iter().any(|i| i.tweet.target.is_some()) {
                write_json(&dir.join("report_by_target.json"), &evaluation::score_by_target(&test, &set)?)?;
            }
            Ok(())
        })
    }
}

/// Validates and runs a config.
pub fn run(cfg: RunConfig) -> Result<RunReport> {
    Runner::new(cfg)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_order_and_validation() {
        let cfg = RunConfig::from_toml(
            "workspace = \"w\"\n[score]\n[split]\nmode = \"proportional\"\ninput = \"c.tsv\"\n[train]\nsystem = \"tfidf-svm\"\n",
            Path::new("/base"),
        )
        .unwrap();
        assert_eq!(cfg.stages(), vec!["split", "train", "score"]);
        assert_eq!(cfg.workspace.as_deref(), Some(Path::new("/base/w")));
        cfg.validate().unwrap();

        let bad = RunConfig::from_toml("workspace = \"w\"\n[train]\nsystem = \"tfidf-svm\"\n", Path::new(".")).unwrap();
        assert!(matches!(bad.validate(), Err(PipelineError::Config(_))));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = RunConfig::from_toml("workspace = \"w\"\nbogus = 1\n", Path::new(".")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bigram_option_rejected_at_parse() {
        let cfg = RunConfig::from_toml(
            "workspace = \"w\"\n[train]\ntrain = \"t.tsv\"\nsystem = \"linear-softmax\"\nword_ngrams = 2\n",
            Path::new("."),
        )
        .unwrap();
        assert!(matches!(cfg.validate(), Err(PipelineError::Config(_))));
    }

    #[test]
    fn ingest_only_on_three_tweets() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("raw.jsonl");
        fs::write(
            &input,
            concat!(
                "{\"id\":\"1\",\"user\":{\"id\":\"a\"},\"text\":\"el referéndum de octubre\",\"lang\":\"es\"}\n",
                "{\"id\":\"2\",\"user\":{\"id\":\"b\"},\"text\":\"el referéndum de octubre\",\"lang\":\"es\"}\n",
                "{\"id\":\"3\",\"user\":{\"id\":\"c\"},\"text\":\"hola\",\"lang\":\"es\"}\n",
            ),
        )
        .unwrap();
        let mut cfg = RunConfig::empty();
        cfg.workspace = Some(dir.path().join("ws"));
        cfg.ingest = Some(IngestStage {
            input,
            min_words: 3,
            profiles_dir: None,
        });
        let report = run(cfg.clone()).unwrap();
        assert_eq!(report.executed(), 1);
        let ws = dir.path().join("ws/ingest");
        let ingest_report: ingest::IngestReport = serde_json::from_slice(&fs::read(ws.join("report.json")).unwrap()).unwrap();
        assert_eq!((ingest_report.kept_count, ingest_report.dropped_duplicates, ingest_report.dropped_short), (1, 1, 1));
        assert!(ws.join("tweets.tsv").exists() && ws.join("manifest.json").exists());

        cfg.resume = true;
        assert_eq!(run(cfg.clone()).unwrap().executed(), 0);

        fs::write(ws.join("tweets.tsv"), "tampered").unwrap();
        assert!(matches!(run(cfg), Err(PipelineError::ManifestMismatch { .. })));
    }

    #[test]
    fn missing_input_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::empty();
        cfg.workspace = Some(dir.path().to_path_buf());
        cfg.ingest = Some(IngestStage {
            input: dir.path().join("nope.jsonl"),
            min_words: 3,
            profiles_dir: None,
        });
        let err = run(cfg).unwrap_err();
        assert!(matches!(err, PipelineError::MissingInput(_)));
        assert_eq!(err.exit_code(), 2);
    }
}
