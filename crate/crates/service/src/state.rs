//! Curation state: the curator's decisions, the data they apply to, and the
//! projections recomputed after each decision. Decisions are persisted as an
//! append-only JSON-lines event log plus a periodic snapshot.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stance_corpus::corpus::{self, AccountLabel, ClassDistribution, ColumnSchema, Corpus, LabeledTweet, StanceLabel, Tweet};
use stance_corpus::dataset;
use stance_corpus::lda::{self, TopicModel, TopicSummary};
use stance_corpus::propagation::{self, PropagationConfig, RetweetGraph};
use stance_corpus::topic::{self, TopicLexicon};
use thiserror::Error;

pub const SNAPSHOT_EVERY: u64 = 50;
pub const DEFAULT_PREVIEW_CAP: usize = 200_000;
pub const SAMPLE_SIZE: usize = 20;
pub const TOPIC_WORDS: usize = 15;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("unknown author {0}")]
    UnknownAuthor(String),
    #[error("{message}")]
    Invalid { message: String, details: Vec<String> },
    #[error("no topic model in the workspace")]
    NoTopicModel,
    #[error("corrupt curation log {}: {reason}", path.display())]
    CorruptLog { path: PathBuf, reason: String },
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Lda(#[from] lda::LdaError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl StateError {
    fn invalid(message: impl Into<String>, details: Vec<String>) -> Self {
        StateError::Invalid {
            message: message.into(),
            details,
        }
    }
}

/// A curator decision, as stored in the event log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Event {
    UserLabel { author_id: String, label: StanceLabel },
    HashtagSelection { accepted: BTreeSet<String>, keywords: BTreeSet<String> },
    TopicSelection { accepted: BTreeSet<usize>, min_share: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub version: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub label: StanceLabel,
    /// State version at which the label was last written.
    pub version: u64,
}

/// Everything the curator decided; replaying the event log rebuilds it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decisions {
    pub version: u64,
    pub labels: BTreeMap<String, LabelEntry>,
    pub lexicon: TopicLexicon,
    pub accepted_topics: BTreeSet<usize>,
    pub min_share: f64,
}

impl Default for Decisions {
    fn default() -> Self {
        Decisions {
            version: 0,
            labels: BTreeMap::new(),
            lexicon: TopicLexicon::default(),
            accepted_topics: BTreeSet::new(),
            min_share: 0.5,
        }
    }
}

impl Decisions {
    fn apply(&mut self, record: &EventRecord) {
        self.version = record.version;
        match &record.event {
            Event::UserLabel { author_id, label } => {
                self.labels.insert(
                    author_id.clone(),
                    LabelEntry {
                        label: *label,
                        version: record.version,
                    },
                );
            }
            Event::HashtagSelection { accepted, keywords } => {
                self.lexicon = TopicLexicon {
                    hashtags: accepted.clone(),
                    keywords: keywords.clone(),
                };
            }
            Event::TopicSelection { accepted, min_share } => {
                self.accepted_topics = accepted.clone();
                self.min_share = *min_share;
            }
        }
    }

    pub fn seeds(&self) -> Vec<AccountLabel> {
        self.labels.iter().map(|(a, e)| AccountLabel::seed(a.clone(), e.label)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserStats {
    pub tweets: usize,
    /// Retweets this account made.
    pub retweets_made: usize,
    /// Times this account's tweets were retweeted.
    pub times_retweeted: usize,
    /// Distinct accounts that retweeted it.
    pub retweeters: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleTweet {
    pub id: String,
    pub created_at: Option<String>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserCard {
    pub author_id: String,
    pub activity: usize,
    pub stats: UserStats,
    pub label: Option<StanceLabel>,
    pub sample: Vec<SampleTweet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HashtagRow {
    pub tag: String,
    pub count: usize,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicCard {
    pub topic: usize,
    pub top_words: Vec<(String, f64)>,
    pub documents: usize,
    pub accepted: bool,
}

/// What the corpus would look like if assembled now.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub version: u64,
    /// Account labels after propagation, seeds included.
    pub accounts: ClassDistribution,
    /// Every tweet whose author has a label.
    pub labeled: ClassDistribution,
    /// Labeled tweets matching the accepted lexicon.
    pub on_topic: ClassDistribution,
    /// Labeled off-lexicon tweets recovered through accepted topics.
    pub topic_selected: ClassDistribution,
    /// `on_topic` plus `topic_selected`: the assembly candidates.
    pub candidates: ClassDistribution,
    /// True when the projection covers only the first `preview_cap` tweets.
    pub sampled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub version: u64,
    pub users: usize,
    pub labeled_users: usize,
    pub tweets: usize,
    pub lexicon: TopicLexicon,
    pub accepted_topics: BTreeSet<usize>,
    pub min_share: f64,
    pub has_topic_model: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelOutcome {
    pub author_id: String,
    pub label: StanceLabel,
    pub version: u64,
    /// Accounts that one hop of propagation would label, per stance.
    pub propagation_preview: ClassDistribution,
    /// Change in `propagation_preview` caused by this decision.
    pub propagation_delta: BTreeMap<StanceLabel, i64>,
    pub distribution: Projection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HashtagOutcome {
    pub version: u64,
    pub lexicon: TopicLexicon,
    /// On-topic label counts under the new lexicon.
    pub preview: ClassDistribution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicOutcome {
    pub version: u64,
    pub accepted: BTreeSet<usize>,
    pub min_share: f64,
    /// Labeled tweets the accepted topics recover, per stance.
    pub preview: ClassDistribution,
    /// Stances with fewer on-topic tweets than the largest one.
    pub under_represented: Vec<StanceLabel>,
    /// `preview` restricted to the under-represented stances.
    pub recoverable: ClassDistribution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssemblePreview {
    pub version: u64,
    pub target_total: usize,
    pub available: ClassDistribution,
    pub selected: ClassDistribution,
}

struct TopicData {
    model: TopicModel,
    candidates: Vec<Tweet>,
    summaries: Vec<TopicSummary>,
}

struct EventLog {
    dir: PathBuf,
    events: File,
}

impl EventLog {
    fn events_path(dir: &Path) -> PathBuf {
        dir.join("events.jsonl")
    }

    fn snapshot_path(dir: &Path) -> PathBuf {
        dir.join("snapshot.json")
    }

    /// Snapshot plus every later event.
    fn open(dir: &Path) -> Result<(Self, Decisions), StateError> {
        fs::create_dir_all(dir)?;
        let snap = Self::snapshot_path(dir);
        let mut decisions = if snap.exists() {
            serde_json::from_slice(&fs::read(&snap)?).map_err(|e| StateError::CorruptLog {
                path: snap.clone(),
                reason: e.to_string(),
            })?
        } else {
            Decisions::default()
        };
        let path = Self::events_path(dir);
        if path.exists() {
            for (idx, line) in BufReader::new(File::open(&path)?).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: EventRecord = serde_json::from_str(&line).map_err(|e| StateError::CorruptLog {
                    path: path.clone(),
                    reason: format!("line {}: {e}", idx + 1),
                })?;
                if record.version > decisions.version {
                    if record.version != decisions.version + 1 {
                        return Err(StateError::CorruptLog {
                            path: path.clone(),
                            reason: format!("version gap before {}", record.version),
                        });
                    }
                    decisions.apply(&record);
                }
            }
        }
        let events = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok((
            EventLog {
                dir: dir.to_path_buf(),
                events,
            },
            decisions,
        ))
    }

    /// Durable before returning.
    fn append(&mut self, record: &EventRecord) -> io::Result<()> {
        let mut line = serde_json::to_string(record).map_err(io::Error::other)?;
        line.push('\n');
        self.events.write_all(line.as_bytes())?;
        self.events.sync_data()
    }

    fn snapshot(&self, decisions: &Decisions) -> io::Result<()> {
        let tmp = self.dir.join("snapshot.json.tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(decisions).map_err(io::Error::other)?)?;
        File::open(&tmp)?.sync_all()?;
        fs::rename(tmp, Self::snapshot_path(&self.dir))
    }
}

/// Where the state is read from and how previews are computed.
#[derive(Clone, Debug)]
pub struct StateConfig {
    pub workspace: PathBuf,
    pub language: String,
    pub propagation: PropagationConfig,
    pub preview_cap: usize,
    pub seed: u64,
}

impl StateConfig {
    pub fn new(workspace: impl Into<PathBuf>) -> Self {
        StateConfig {
            workspace: workspace.into(),
            language: "es".to_string(),
            propagation: PropagationConfig::default(),
            preview_cap: DEFAULT_PREVIEW_CAP,
            seed: 0,
        }
    }

    pub fn tweets_path(&self) -> PathBuf {
        self.workspace.join("ingest").join("tweets.tsv")
    }
}

pub struct CurationState {
    cfg: StateConfig,
    decisions: Decisions,
    log: EventLog,
    tweets: Vec<Tweet>,
    graph: RetweetGraph,
    /// Queue order: activity desc, id asc.
    users: Vec<(String, UserStats)>,
    user_index: HashMap<String, usize>,
    hashtags: Vec<(String, usize)>,
    topics: Option<TopicData>,
}

fn load_tweets(path: &Path, language: &str) -> Result<Vec<Tweet>, StateError> {
    let loaded = corpus::load_corpus(path, &ColumnSchema::canonical().language(language))?;
    Ok(loaded.corpus.items.into_iter().map(|i| i.tweet).collect())
}

fn distribution_of(labels: impl IntoIterator<Item = StanceLabel>) -> ClassDistribution {
    ClassDistribution::from_labels(labels)
}

impl CurationState {
    /// Loads the ingested tweets (`ingest/tweets.tsv`), the optional topic model
    /// (`lda/model.json` with `lda/candidates.tsv`) and replays `curation/`.
    pub fn open(cfg: StateConfig) -> Result<Self, StateError> {
        let tweets = load_tweets(&cfg.tweets_path(), &cfg.language)?;
        let graph = propagation::build_retweet_graph(&tweets);

        let mut stats: BTreeMap<&str, UserStats> = BTreeMap::new();
        let blank = || UserStats {
            tweets: 0,
            retweets_made: 0,
            times_retweeted: 0,
            retweeters: 0,
        };
        for t in &tweets {
            let s = stats.entry(t.author_id.as_str()).or_insert_with(blank);
            s.tweets += 1;
            if let Some(src) = &t.retweet_of_author {
                s.retweets_made += 1;
                stats.entry(src.as_str()).or_insert_with(blank).times_retweeted += 1;
            }
        }
        for (author, s) in stats.iter_mut() {
            s.retweeters = graph.retweeters_of(author).count();
        }
        let mut users: Vec<(String, UserStats)> = stats.into_iter().map(|(a, s)| (a.to_string(), s)).collect();
        users.sort_by(|a, b| activity(&b.1).cmp(&activity(&a.1)).then_with(|| a.0.cmp(&b.0)));
        let user_index = users.iter().enumerate().map(|(i, (a, _))| (a.clone(), i)).collect();

        let all = Corpus {
            name: "tweets".into(),
            language: cfg.language.clone(),
            items: tweets.iter().cloned().map(LabeledTweet::unlabeled).collect(),
        };
        let hashtags = topic::extract_hashtags(&all);

        let lda_dir = cfg.workspace.join("lda");
        let topics = if lda_dir.join("model.json").exists() {
            let model = TopicModel::load(lda_dir.join("model.json"))?;
            let candidates = load_tweets(&lda_dir.join("candidates.tsv"), &cfg.language)?;
            if candidates.len() != model.num_docs() {
                return Err(lda::LdaError::Misaligned {
                    corpus: candidates.len(),
                    model: model.num_docs(),
                }
                .into());
            }
            let summaries = lda::summarize(&model, TOPIC_WORDS);
            Some(TopicData {
                model,
                candidates,
                summaries,
            })
        } else {
            None
        };

        let (log, decisions) = EventLog::open(&cfg.workspace.join("curation"))?;
        Ok(CurationState {
            cfg,
            decisions,
            log,
            tweets,
            graph,
            users,
            user_index,
            hashtags,
            topics,
        })
    }

    pub fn version(&self) -> u64 {
        self.decisions.version
    }

    pub fn decisions(&self) -> &Decisions {
        &self.decisions
    }

    fn commit(&mut self, event: Event) -> Result<u64, StateError> {
        let record = EventRecord {
            version: self.decisions.version + 1,
            event,
        };
        self.log.append(&record)?;
        self.decisions.apply(&record);
        if record.version % SNAPSHOT_EVERY == 0 {
            self.log.snapshot(&self.decisions)?;
        }
        Ok(record.version)
    }

    pub fn summary(&self) -> StateSummary {
        StateSummary {
            version: self.version(),
            users: self.users.len(),
            labeled_users: self.decisions.labels.len(),
            tweets: self.tweets.len(),
            lexicon: self.decisions.lexicon.clone(),
            accepted_topics: self.decisions.accepted_topics.clone(),
            min_share: self.decisions.min_share,
            has_topic_model: self.topics.is_some(),
        }
    }

    /// Up to `limit` users from `offset`, optionally only those without a label.
    pub fn user_queue(&self, limit: usize, offset: usize, pending_only: bool) -> Vec<UserCard> {
        self.users
            .iter()
            .filter(|(a, _)| !pending_only || !self.decisions.labels.contains_key(a))
            .skip(offset)
            .take(limit)
            .map(|(a, s)| self.card(a, s))
            .collect()
    }

    fn card(&self, author: &str, stats: &UserStats) -> UserCard {
        let lexicon = &self.decisions.lexicon;
        let mut own: Vec<(usize, &Tweet)> = self
            .tweets
            .iter()
            .enumerate()
            .filter(|(_, t)| t.author_id == author)
            .filter(|(_, t)| lexicon.is_empty() || topic::match_topic(t, lexicon))
            .collect();
        // Most recent first; undated tweets count as oldest, later input rows as newer.
        own.sort_by(|a, b| b.1.created_at.cmp(&a.1.created_at).then(b.0.cmp(&a.0)));
        UserCard {
            author_id: author.to_string(),
            activity: activity(stats),
            stats: stats.clone(),
            label: self.decisions.labels.get(author).map(|e| e.label),
            sample: own
                .into_iter()
                .take(SAMPLE_SIZE)
                .map(|(_, t)| SampleTweet {
                    id: t.id.clone(),
                    created_at: t.created_at.clone(),
                    text: t.text.clone(),
                })
                .collect(),
        }
    }

    fn preview_counts(&self, seeds: &[AccountLabel]) -> [usize; 3] {
        propagation::one_hop_preview(&self.graph, seeds, &self.cfg.propagation)
    }

    pub fn label_user(&mut self, author_id: &str, label: StanceLabel) -> Result<LabelOutcome, StateError> {
        if !self.user_index.contains_key(author_id) {
            return Err(StateError::UnknownAuthor(author_id.to_string()));
        }
        let before = self.preview_counts(&self.decisions.seeds());
        let version = self.commit(Event::UserLabel {
            author_id: author_id.to_string(),
            label,
        })?;
        let after = self.preview_counts(&self.decisions.seeds());
        let delta = StanceLabel::ALL
            .iter()
            .map(|l| (*l, after[l.index()] as i64 - before[l.index()] as i64))
            .collect();
        Ok(LabelOutcome {
            author_id: author_id.to_string(),
            label,
            version,
            propagation_preview: ClassDistribution::from_counts(after),
            propagation_delta: delta,
            distribution: self.projection(),
        })
    }

    pub fn hashtags(&self, min_freq: usize) -> Vec<HashtagRow> {
        self.hashtags
            .iter()
            .filter(|(_, c)| *c >= min_freq)
            .map(|(tag, count)| HashtagRow {
                tag: tag.clone(),
                count: *count,
                accepted: self.decisions.lexicon.hashtags.contains(tag),
            })
            .collect()
    }

    /// Replaces the accepted hashtags (and keywords) in one step.
    pub fn select_hashtags(&mut self, accepted: &[String], keywords: &[String]) -> Result<HashtagOutcome, StateError> {
        let known: BTreeSet<&str> = self.hashtags.iter().map(|(t, _)| t.as_str()).collect();
        let mut lexicon = TopicLexicon::default();
        let mut unknown = Vec::new();
        for raw in accepted {
            match lexicon.add_hashtag(raw) {
                Ok(()) => {}
                Err(_) => unknown.push(raw.clone()),
            }
        }
        for tag in &lexicon.hashtags {
            if !known.contains(tag.as_str()) {
                unknown.push(tag.clone());
            }
        }
        if !unknown.is_empty() {
            return Err(StateError::invalid("unknown hashtags", unknown));
        }
        let mut bad_keywords = Vec::new();
        for k in keywords {
            if lexicon.add_keyword(k).is_err() {
                bad_keywords.push(k.clone());
            }
        }
        if !bad_keywords.is_empty() {
            return Err(StateError::invalid("invalid keywords", bad_keywords));
        }
        let version = self.commit(Event::HashtagSelection {
            accepted: lexicon.hashtags.clone(),
            keywords: lexicon.keywords.clone(),
        })?;
        let labeled = self.labeled_tweets().0;
        Ok(HashtagOutcome {
            version,
            preview: on_topic_distribution(&labeled, &lexicon),
            lexicon,
        })
    }

    pub fn topics(&self) -> Result<Vec<TopicCard>, StateError> {
        let data = self.topics.as_ref().ok_or(StateError::NoTopicModel)?;
        Ok(data
            .summaries
            .iter()
            .map(|s| TopicCard {
                topic: s.topic,
                top_words: s.top_words.clone(),
                documents: s.documents,
                accepted: self.decisions.accepted_topics.contains(&s.topic),
            })
            .collect())
    }

    pub fn select_topics(&mut self, accepted: &[usize], min_share: Option<f64>) -> Result<TopicOutcome, StateError> {
        let data = self.topics.as_ref().ok_or(StateError::NoTopicModel)?;
        let k = data.model.num_topics();
        let bad: Vec<String> = accepted.iter().filter(|&&t| t >= k).map(|t| t.to_string()).collect();
        if !bad.is_empty() {
            return Err(StateError::invalid(format!("topic ids must be below {k}"), bad));
        }
        let min_share = min_share.unwrap_or(self.decisions.min_share);
        if !(0.0..=1.0).contains(&min_share) {
            return Err(StateError::invalid("min_share must be in [0, 1]", vec![min_share.to_string()]));
        }
        let accepted: BTreeSet<usize> = accepted.iter().copied().collect();
        let version = self.commit(Event::TopicSelection {
            accepted: accepted.clone(),
            min_share,
        })?;
        let (labeled, account_labels) = self.labeled_tweets();
        let preview = self.topic_selected(&account_labels)?;
        let on_topic = on_topic_distribution(&labeled, &self.decisions.lexicon);
        let max = StanceLabel::ALL.iter().map(|l| on_topic.get(*l)).max().unwrap_or(0);
        let under: Vec<StanceLabel> = StanceLabel::ALL.into_iter().filter(|l| on_topic.get(*l) < max).collect();
        let mut recoverable = [0; 3];
        for l in &under {
            recoverable[l.index()] = preview.get(*l);
        }
        Ok(TopicOutcome {
            version,
            accepted,
            min_share,
            preview,
            under_represented: under,
            recoverable: ClassDistribution::from_counts(recoverable),
        })
    }

    /// Tweets in preview scope labeled by current propagation, and the account labels.
    fn labeled_tweets(&self) -> (Vec<LabeledTweet>, HashMap<String, StanceLabel>) {
        let seeds = self.decisions.seeds();
        let accounts = if seeds.is_empty() {
            vec![]
        } else {
            propagation::propagate(&self.graph, &seeds, &self.cfg.propagation).unwrap_or_default()
        };
        let account_labels: HashMap<String, StanceLabel> = accounts.into_iter().map(|a| (a.author_id, a.label)).collect();
        let labeled = self
            .tweets
            .iter()
            .take(self.cfg.preview_cap)
            .filter_map(|t| {
                account_labels
                    .get(&t.author_id)
                    .map(|l| LabeledTweet::new(t.clone(), *l, corpus::LabelSource::PropagatedUser))
            })
            .collect();
        (labeled, account_labels)
    }

    fn topic_selected(&self, account_labels: &HashMap<String, StanceLabel>) -> Result<ClassDistribution, StateError> {
        let Some(data) = &self.topics else {
            return Ok(ClassDistribution::default());
        };
        if self.decisions.accepted_topics.is_empty() {
            return Ok(ClassDistribution::default());
        }
        let candidates = Corpus {
            name: "candidates".into(),
            language: self.cfg.language.clone(),
            items: data.candidates.iter().cloned().map(LabeledTweet::unlabeled).collect(),
        };
        let selected = lda::select_by_topics(&candidates, &data.model, &self.decisions.accepted_topics, self.decisions.min_share)?;
        Ok(distribution_of(
            selected
                .iter()
                .take(self.cfg.preview_cap)
                .filter_map(|i| account_labels.get(&i.tweet.author_id).copied()),
        ))
    }

    pub fn projection(&self) -> Projection {
        let (labeled, account_labels) = self.labeled_tweets();
        let on_topic = on_topic_distribution(&labeled, &self.decisions.lexicon);
        let topic_selected = self.topic_selected(&account_labels).unwrap_or_default();
        let mut candidates = on_topic.as_array();
        for (c, t) in candidates.iter_mut().zip(topic_selected.as_array()) {
            *c += t;
        }
        Projection {
            version: self.version(),
            accounts: distribution_of(account_labels.values().copied()),
            labeled: distribution_of(labeled.iter().filter_map(|i| i.label)),
            on_topic,
            topic_selected,
            candidates: ClassDistribution::from_counts(candidates),
            sampled: self.tweets.len() > self.cfg.preview_cap,
        }
    }

    /// Label counts a balanced assembly of `target_total` would take from the
    /// current candidates.
    pub fn assemble_preview(&self, target_total: usize) -> Result<AssemblePreview, StateError> {
        if target_total < 3 {
            return Err(StateError::invalid("target_total must be at least 3", vec![target_total.to_string()]));
        }
        let available = self.projection().candidates;
        let quotas = dataset::balanced_quotas(target_total, available.as_array());
        Ok(AssemblePreview {
            version: self.version(),
            target_total,
            available,
            selected: ClassDistribution::from_counts(quotas),
        })
    }
}

fn activity(s: &UserStats) -> usize {
    s.tweets + s.times_retweeted
}

fn on_topic_distribution(labeled: &[LabeledTweet], lexicon: &TopicLexicon) -> ClassDistribution {
    if lexicon.is_empty() {
        return ClassDistribution::default();
    }
    distribution_of(
        labeled
            .iter()
            .filter(|i| topic::match_topic(&i.tweet, lexicon))
            .filter_map(|i| i.label),
    )
}
