//! Seed-account expansion over the retweet graph.
//!
//! Users tend to retweet accounts sharing their stance, so an unlabeled account
//! whose retweets go mostly to accounts of one stance inherits that stance. An
//! account is labeled only when the winning label holds at least `min_margin` of
//! its retweet mass toward labeled accounts and that mass is at least
//! `min_evidence`. Weak or tied evidence leaves the account unlabeled.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AccountLabel, LabelSource, LabeledTweet, Provenance, StanceLabel, Tweet};

#[derive(Debug, Error)]
pub enum PropagationError {
    #[error("no seed accounts given")]
    NoSeeds,
    #[error("seed {0} must have provenance seed-manual and hop 0")]
    InvalidSeed(String),
    #[error("invalid propagation config: {0}")]
    InvalidConfig(String),
    #[error("account {author} has conflicting labels {first} and {second}")]
    ConflictingLabels {
        author: String,
        first: StanceLabel,
        second: StanceLabel,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Directed retweet graph: `edges[u][v]` is how many times `u` retweeted `v`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetweetGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<String, BTreeMap<String, u32>>,
}

impl RetweetGraph {
    pub fn add_retweet(&mut self, retweeter: &str, retweeted: &str) {
        self.nodes.insert(retweeter.to_string());
        self.nodes.insert(retweeted.to_string());
        if retweeter == retweeted {
            return;
        }
        *self
            .edges
            .entry(retweeter.to_string())
            .or_default()
            .entry(retweeted.to_string())
            .or_insert(0) += 1;
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(BTreeMap::len).sum()
    }

    pub fn weight(&self, from: &str, to: &str) -> u32 {
        self.edges
            .get(from)
            .and_then(|m| m.get(to))
            .copied()
            .unwrap_or(0)
    }

    /// Accounts that retweeted `author`, with weights.
    pub fn retweeters_of<'a>(&'a self, author: &'a str) -> impl Iterator<Item = (&'a str, u32)> + 'a {
        self.edges
            .iter()
            .filter_map(move |(u, out)| out.get(author).map(|w| (u.as_str(), *w)))
    }

    /// Sorted `(from, to, weight)` triples.
    pub fn edge_list(&self) -> Vec<(&str, &str, u32)> {
        self.edges
            .iter()
            .flat_map(|(u, out)| out.iter().map(move |(v, w)| (u.as_str(), v.as_str(), *w)))
            .collect()
    }
}

pub fn build_retweet_graph(tweets: &[Tweet]) -> RetweetGraph {
    let mut graph = RetweetGraph::default();
    for tweet in tweets {
        if let Some(target) = &tweet.retweet_of_author {
            graph.add_retweet(&tweet.author_id, target);
        }
    }
    graph
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub max_hops: u32,
    /// Minimum share of labeled retweet mass held by the winning label.
    pub min_margin: f64,
    /// Minimum total retweet weight toward labeled accounts.
    pub min_evidence: u32,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            max_hops: 1,
            min_margin: 0.6,
            min_evidence: 1,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<(), PropagationError> {
        if self.max_hops < 1 {
            return Err(PropagationError::InvalidConfig("max_hops must be >= 1".into()));
        }
        if !(self.min_margin > 0.0 && self.min_margin <= 1.0) {
            return Err(PropagationError::InvalidConfig("min_margin must be in (0, 1]".into()));
        }
        if self.min_evidence < 1 {
            return Err(PropagationError::InvalidConfig("min_evidence must be >= 1".into()));
        }
        Ok(())
    }
}

/// Decision for one unlabeled account given the labels known so far.
fn tally(
    out: &BTreeMap<String, u32>,
    known: &HashMap<&str, (StanceLabel, u32)>,
    cfg: &PropagationConfig,
) -> Option<(StanceLabel, u32)> {
    let mut mass = [0u64; 3];
    let mut min_hop = [u32::MAX; 3];
    for (target, weight) in out {
        if let Some(&(label, hop)) = known.get(target.as_str()) {
            mass[label.index()] += u64::from(*weight);
            min_hop[label.index()] = min_hop[label.index()].min(hop);
        }
    }
    let total: u64 = mass.iter().sum();
    if total == 0 || total < u64::from(cfg.min_evidence) {
        return None;
    }
    let best = *mass.iter().max().unwrap();
    if mass.iter().filter(|&&m| m == best).count() > 1 {
        return None;
    }
    let winner = StanceLabel::ALL[mass.iter().position(|&m| m == best).unwrap()];
    if (best as f64) / (total as f64) < cfg.min_margin {
        return None;
    }
    Some((winner, min_hop[winner.index()] + 1))
}

/// Seeds followed by propagated accounts, ordered by hop then author id.
///
/// Each hop reads only labels committed by earlier hops. Seeds are never relabeled.
pub fn propagate(
    graph: &RetweetGraph,
    seeds: &[AccountLabel],
    cfg: &PropagationConfig,
) -> Result<Vec<AccountLabel>, PropagationError> {
    cfg.validate()?;
    if seeds.is_empty() {
        return Err(PropagationError::NoSeeds);
    }
    let mut known: HashMap<&str, (StanceLabel, u32)> = HashMap::new();
    for seed in seeds {
        if seed.provenance != Provenance::SeedManual || seed.hop != 0 {
            return Err(PropagationError::InvalidSeed(seed.author_id.clone()));
        }
        if let Some((prev, _)) = known.insert(seed.author_id.as_str(), (seed.label, 0)) {
            if prev != seed.label {
                return Err(PropagationError::ConflictingLabels {
                    author: seed.author_id.clone(),
                    first: prev,
                    second: seed.label,
                });
            }
        }
    }

    let mut result: Vec<AccountLabel> = known
        .iter()
        .map(|(a, (l, _))| AccountLabel::seed(*a, *l))
        .collect();
    result.sort_by(|a, b| a.author_id.cmp(&b.author_id));

    for _ in 0..cfg.max_hops {
        let assigned: Vec<(&str, StanceLabel, u32)> = graph
            .edges
            .iter()
            .filter(|(u, _)| !known.contains_key(u.as_str()))
            .filter_map(|(u, out)| tally(out, &known, cfg).map(|(l, h)| (u.as_str(), l, h)))
            .collect();
        if assigned.is_empty() {
            break;
        }
        for (author, label, hop) in assigned {
            known.insert(author, (label, hop));
            result.push(AccountLabel::propagated(author, label, hop));
        }
    }
    result.sort_by(|a, b| a.hop.cmp(&b.hop).then_with(|| a.author_id.cmp(&b.author_id)));
    Ok(result)
}

/// Account-level label per author; duplicates must agree.
pub fn account_index(accounts: &[AccountLabel]) -> Result<HashMap<&str, &AccountLabel>, PropagationError> {
    let mut index: HashMap<&str, &AccountLabel> = HashMap::new();
    for acc in accounts {
        if let Some(prev) = index.get(acc.author_id.as_str()) {
            if prev.label != acc.label {
                return Err(PropagationError::ConflictingLabels {
                    author: acc.author_id.clone(),
                    first: prev.label,
                    second: acc.label,
                });
            }
            continue;
        }
        index.insert(acc.author_id.as_str(), acc);
    }
    Ok(index)
}

/// Labels every tweet whose author has an account label; other tweets are omitted.
pub fn project_labels(
    tweets: &[Tweet],
    accounts: &[AccountLabel],
) -> Result<Vec<LabeledTweet>, PropagationError> {
    let index = account_index(accounts)?;
    Ok(tweets
        .iter()
        .filter_map(|t| {
            index.get(t.author_id.as_str()).map(|acc| {
                let source = match acc.provenance {
                    Provenance::SeedManual => LabelSource::ManualUser,
                    Provenance::Propagated => LabelSource::PropagatedUser,
                };
                LabeledTweet::new(t.clone(), acc.label, source)
            })
        })
        .collect())
}

/// Seeds file: `author_id<TAB>label` per line; an optional header line starting
/// with `author_id` is skipped.
pub fn read_seeds(reader: impl BufRead) -> Result<Vec<AccountLabel>, PropagationError> {
    let mut seeds = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || (idx == 0 && line.starts_with("author_id")) {
            continue;
        }
        let mut cells = line.split('\t');
        let (Some(author), Some(label)) = (cells.next(), cells.next()) else {
            return Err(PropagationError::Parse {
                line: idx + 1,
                reason: "expected author_id<TAB>label".into(),
            });
        };
        let label = label.parse().map_err(|e: crate::corpus::CorpusError| PropagationError::Parse {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        seeds.push(AccountLabel::seed(author.trim(), label));
    }
    Ok(seeds)
}

pub fn write_seeds(out: &mut impl Write, seeds: &[AccountLabel]) -> io::Result<()> {
    writeln!(out, "author_id\tlabel")?;
    for s in seeds {
        writeln!(out, "{}\t{}", s.author_id, s.label)?;
    }
    Ok(())
}

/// Output file: `author_id<TAB>label<TAB>provenance<TAB>hop` with a header line.
pub fn write_accounts(out: &mut impl Write, accounts: &[AccountLabel]) -> io::Result<()> {
    writeln!(out, "author_id\tlabel\tprovenance\thop")?;
    for a in accounts {
        writeln!(out, "{}\t{}\t{}\t{}", a.author_id, a.label, a.provenance.as_str(), a.hop)?;
    }
    Ok(())
}

pub fn read_accounts(reader: impl BufRead) -> Result<Vec<AccountLabel>, PropagationError> {
    let mut accounts = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() || (idx == 0 && line.starts_with("author_id")) {
            continue;
        }
        let parse_err = |reason: String| PropagationError::Parse {
            line: idx + 1,
            reason,
        };
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 4 {
            return Err(parse_err("expected 4 columns".into()));
        }
        let label: StanceLabel = cells[1].parse().map_err(|e: crate::corpus::CorpusError| parse_err(e.to_string()))?;
        let hop: u32 = cells[3].parse().map_err(|_| parse_err(format!("bad hop {:?}", cells[3])))?;
        let account = match cells[2] {
            "seed-manual" if hop == 0 => AccountLabel::seed(cells[0], label),
            "propagated" if hop >= 1 => AccountLabel::propagated(cells[0], label, hop),
            other => return Err(parse_err(format!("bad provenance/hop {other:?}/{hop}"))),
        };
        accounts.push(account);
    }
    Ok(accounts)
}

/// Number of accounts 1-hop propagation would label, per stance.
pub fn one_hop_preview(graph: &RetweetGraph, seeds: &[AccountLabel], cfg: &PropagationConfig) -> [usize; 3] {
    let cfg = PropagationConfig {
        max_hops: 1,
        ..cfg.clone()
    };
    let mut counts = [0; 3];
    if let Ok(accounts) = propagate(graph, seeds, &cfg) {
        for a in accounts.iter().filter(|a| a.provenance == Provenance::Propagated) {
            counts[a.label.index()] += 1;
        }
    }
    counts
}
