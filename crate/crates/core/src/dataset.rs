//! Final corpus assembly and train/dev/test split generation.
//!
//! Two splitters are provided: a label-stratified proportional split (authors may
//! appear in several partitions) and a user-disjoint split that moves whole
//! authors between partitions while keeping sizes and label balance close to the
//! requested ratios.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{self, ClassDistribution, ColumnSchema, Corpus, CorpusError, StanceLabel};
use crate::normalize::word_count;

pub const SPLIT_NAMES: [&str; 3] = ["train", "dev", "test"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid split spec: {0}")]
    InvalidSpec(String),
    #[error("target_total must be at least 3, got {0}")]
    TargetTooSmall(usize),
    #[error("corpus has {0} items, at least {1} required")]
    TooSmall(usize, usize),
    #[error("a user-disjoint split needs at least two authors")]
    SingleUser,
    #[error("item {0} has no author")]
    MissingAuthor(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Train, dev and test fractions.
    pub ratios: [f64; 3],
    pub seed: u64,
    pub size_tolerance: f64,
    pub label_tolerance: f64,
    /// Restarts tried by the user-disjoint splitter before returning its best effort.
    pub restarts: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            ratios: [0.6, 0.2, 0.2],
            seed: 0,
            size_tolerance: 0.02,
            label_tolerance: 0.05,
            restarts: 50,
        }
    }
}

impl SplitSpec {
    pub fn with_seed(seed: u64) -> Self {
        SplitSpec {
            seed,
            ..SplitSpec::default()
        }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |m: &str| Err(DatasetError::InvalidSpec(m.to_string()));
        if self.ratios.iter().any(|&r| !(r > 0.0)) {
            return bad("every ratio must be positive");
        }
        if (self.ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("ratios must sum to 1");
        }
        for tol in [self.size_tolerance, self.label_tolerance] {
            if !(tol > 0.0 && tol <= 0.2) {
                return bad("tolerances must lie in (0, 0.2]");
            }
        }
        if self.restarts == 0 {
            return bad("restarts must be >= 1");
        }
        Ok(())
    }
}

/// Splits `total` proportionally to `weights`: floors first, then one extra unit to
/// each of the largest fractional remainders (ties → lower index).
pub fn largest_remainder(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut out: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = out.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        out[i] += 1;
    }
    out
}

/// Per-label quotas that equalize labels as far as availability allows. Deficits
/// of exhausted labels are spread evenly over the others (largest remainder,
/// ties in AGAINST, FAVOR, NONE order).
pub fn balanced_quotas(target: usize, available: [usize; 3]) -> [usize; 3] {
    let mut quota = [0usize; 3];
    let mut remaining = target.min(available.iter().sum());
    while remaining > 0 {
        let active: Vec<usize> = (0..3).filter(|&l| quota[l] < available[l]).collect();
        if active.is_empty() {
            break;
        }
        let shares = largest_remainder(remaining, &vec![1.0; active.len()]);
        for (&l, share) in active.iter().zip(shares) {
            let add = share.min(available[l] - quota[l]);
            quota[l] += add;
            remaining -= add;
        }
    }
    quota
}

/// Drops items shorter than `min_words` and samples up to `target_total` items with
/// labels as equal as availability allows. Within a label, authors keep their share
/// of the pool. Output preserves candidate order.
pub fn assemble_balanced(
    candidates: &Corpus,
    target_total: usize,
    min_words: usize,
    seed: u64,
) -> Result<Corpus, DatasetError> {
    if target_total < 3 {
        return Err(DatasetError::TargetTooSmall(target_total));
    }
    let labels = candidates.labels()?;
    let mut by_label: [BTreeMap<&str, Vec<usize>>; 3] = Default::default();
    for (i, (item, label)) in candidates.iter().zip(&labels).enumerate() {
        if word_count(&item.tweet.text) >= min_words {
            by_label[label.index()]
                .entry(item.tweet.author_id.as_str())
                .or_default()
                .push(i);
        }
    }
    let available = by_label
        .each_ref()
        .map(|authors| authors.values().map(Vec::len).sum::<usize>());
    let quotas = balanced_quotas(target_total, available);

    let mut rng = crate::seeded_rng(seed);
    let mut chosen = Vec::new();
    for (authors, quota) in by_label.iter().zip(quotas) {
        let mut order: Vec<(&str, &Vec<usize>)> = authors.iter().map(|(a, v)| (*a, v)).collect();
        order.shuffle(&mut rng);
        let weights: Vec<f64> = order.iter().map(|(_, v)| v.len() as f64).collect();
        for ((_, items), take) in order.iter().zip(largest_remainder(quota, &weights)) {
            chosen.extend(items.choose_multiple(&mut rng, take).copied());
        }
    }
    chosen.sort_unstable();
    let items = chosen.into_iter().map(|i| candidates.items[i].clone()).collect();
    Ok(candidates.with_items("assembled", items))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitAuditEntry {
    pub name: String,
    pub size: usize,
    pub distribution: ClassDistribution,
    pub user_count: usize,
    pub users: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitAudit {
    pub mode: String,
    pub seed: u64,
    /// Seed of the restart that produced a user-disjoint split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart_seed: Option<u64>,
    pub splits: Vec<SplitAuditEntry>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Corpus,
    pub dev: Corpus,
    pub test: Corpus,
    pub audit: SplitAudit,
}

impl DatasetSplit {
    pub fn parts(&self) -> [&Corpus; 3] {
        [&self.train, &self.dev, &self.test]
    }

    fn from_assignment(
        corpus: &Corpus,
        assignment: &[usize],
        mode: &str,
        spec: &SplitSpec,
        require_user_disjoint: bool,
    ) -> DatasetSplit {
        let mut parts: [Vec<_>; 3] = Default::default();
        for (item, &s) in corpus.iter().zip(assignment) {
            parts[s].push(item.clone());
        }
        let [train, dev, test] = parts;
        let mut split = DatasetSplit {
            train: corpus.with_items(format!("{}.train", corpus.name), train),
            dev: corpus.with_items(format!("{}.dev", corpus.name), dev),
            test: corpus.with_items(format!("{}.test", corpus.name), test),
            audit: SplitAudit {
                mode: mode.to_string(),
                seed: spec.seed,
                restart_seed: None,
                splits: Vec::new(),
                violations: Vec::new(),
            },
        };
        split.audit.splits = audit_entries(&split);
        split.audit.violations = verify_split(&split, spec, require_user_disjoint).violations;
        split
    }

    /// Writes `train.tsv`, `dev.tsv`, `test.tsv` and `audit.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, schema: &ColumnSchema) -> Result<(), DatasetError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        for (name, part) in SPLIT_NAMES.iter().zip(self.parts()) {
            corpus::save_corpus(part, dir.join(format!("{name}.tsv")), schema)?;
        }
        fs::write(dir.join("audit.json"), serde_json::to_string_pretty(&self.audit)?)?;
        Ok(())
    }
}

fn audit_entries(split: &DatasetSplit) -> Vec<SplitAuditEntry> {
    SPLIT_NAMES
        .iter()
        .zip(split.parts())
        .map(|(name, part)| {
            let users: Vec<String> = part.authors().into_iter().map(str::to_string).collect();
            SplitAuditEntry {
                name: name.to_string(),
                size: part.len(),
                distribution: ClassDistribution::from_labels(part.iter().filter_map(|i| i.label)),
                user_count: users.len(),
                users,
            }
        })
        .collect()
}

/// Label-stratified split with largest-remainder sizes. Authors may span splits.
pub fn split_proportional(corpus: &Corpus, spec: &SplitSpec) -> Result<DatasetSplit, DatasetError> {
    spec.validate()?;
    if corpus.len() < 5 {
        return Err(DatasetError::TooSmall(corpus.len(), 5));
    }
    let labels = corpus.labels()?;
    let mut rng = crate::seeded_rng(spec.seed);
    let mut groups: [Vec<usize>; 3] = Default::default();
    for (i, l) in labels.iter().enumerate() {
        groups[l.index()].push(i);
    }
    // Interleave the shuffled label groups so every prefix is close to the global
    // label mix, then cut the sequence at the target sizes.
    let mut keyed: Vec<(f64, usize, usize)> = Vec::with_capacity(corpus.len());
    for (label, group) in groups.iter_mut().enumerate() {
        group.shuffle(&mut rng);
        let n = group.len() as f64;
        for (rank, &i) in group.iter().enumerate() {
            keyed.push(((rank as f64 + 0.5) / n, label, i));
        }
    }
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let sizes = largest_remainder(corpus.len(), &spec.ratios);
    let mut assignment = vec![0; corpus.len()];
    let mut pos = 0;
    for (s, &size) in sizes.iter().enumerate() {
        for &(_, _, i) in &keyed[pos..pos + size] {
            assignment[i] = s;
        }
        pos += size;
    }
    Ok(DatasetSplit::from_assignment(corpus, &assignment, "proportional", spec, false))
}

/// Greedy-plus-local-search state for one restart of the user-disjoint splitter.
struct UserPacking<'a> {
    users: &'a [[usize; 3]],
    targets: [[f64; 3]; 3],
    size_targets: [f64; 3],
    counts: [[usize; 3]; 3],
    sizes: [usize; 3],
    n: f64,
}

impl<'a> UserPacking<'a> {
    fn new(users: &'a [[usize; 3]], label_totals: [usize; 3], ratios: [f64; 3], n: usize) -> Self {
        let targets = ratios.map(|r| label_totals.map(|c| r * c as f64));
        UserPacking {
            users,
            targets,
            size_targets: ratios.map(|r| r * n as f64),
            counts: [[0; 3]; 3],
            sizes: [0; 3],
            n: n as f64,
        }
    }

    fn apply(&mut self, user: usize, split: usize, sign: i64) {
        for l in 0..3 {
            let c = self.users[user][l] as i64 * sign;
            self.counts[split][l] = (self.counts[split][l] as i64 + c) as usize;
            self.sizes[split] = (self.sizes[split] as i64 + c) as usize;
        }
    }

    /// Deviation of split `s` from its size and per-label targets, in items.
    fn split_cost(&self, s: usize) -> f64 {
        let size = (self.sizes[s] as f64 - self.size_targets[s]).abs();
        let labels: f64 = (0..3)
            .map(|l| (self.counts[s][l] as f64 - self.targets[s][l]).abs())
            .sum();
        (size + labels) / self.n
    }

    fn cost(&self) -> f64 {
        (0..3).map(|s| self.split_cost(s)).sum()
    }

    fn overflow_after(&self, user: usize, s: usize) -> f64 {
        (0..3)
            .map(|l| {
                let after = (self.counts[s][l] + self.users[user][l]) as f64;
                (after - self.targets[s][l]).max(0.0)
            })
            .sum()
    }

    fn fill(&self, s: usize) -> f64 {
        self.sizes[s] as f64 / self.size_targets[s]
    }
}

fn pack_users(
    users: &[[usize; 3]],
    label_totals: [usize; 3],
    ratios: [f64; 3],
    n: usize,
    seed: u64,
) -> Vec<usize> {
    let mut rng = crate::seeded_rng(seed);
    let mut order: Vec<usize> = (0..users.len()).collect();
    order.shuffle(&mut rng);

    let mut state = UserPacking::new(users, label_totals, ratios, n);
    let mut assignment = vec![0usize; users.len()];
    for &u in &order {
        let best = (0..3)
            .min_by(|&a, &b| {
                state
                    .overflow_after(u, a)
                    .partial_cmp(&state.overflow_after(u, b))
                    .unwrap()
                    .then(state.fill(a).partial_cmp(&state.fill(b)).unwrap())
            })
            .unwrap();
        assignment[u] = best;
        state.apply(u, best, 1);
    }

    // Local search: single-user moves, then pairwise swaps, until no improvement.
    const EPS: f64 = 1e-12;
    for _ in 0..50 {
        let mut improved = false;
        for &u in &order {
            let from = assignment[u];
            let mut best = (state.cost(), from);
            for to in (0..3).filter(|&t| t != from) {
                state.apply(u, from, -1);
                state.apply(u, to, 1);
                let c = state.cost();
                state.apply(u, to, -1);
                state.apply(u, from, 1);
                if c < best.0 - EPS {
                    best = (c, to);
                }
            }
            if best.1 != from {
                state.apply(u, from, -1);
                state.apply(u, best.1, 1);
                assignment[u] = best.1;
                improved = true;
            }
        }
        for (i, &u) in order.iter().enumerate() {
            for &v in &order[i + 1..] {
                let (su, sv) = (assignment[u], assignment[v]);
                if su == sv {
                    continue;
                }
                let before = state.cost();
                state.apply(u, su, -1);
                state.apply(v, sv, -1);
                state.apply(u, sv, 1);
                state.apply(v, su, 1);
                if state.cost() < before - EPS {
                    assignment[u] = sv;
                    assignment[v] = su;
                    improved = true;
                } else {
                    state.apply(u, sv, -1);
                    state.apply(v, su, -1);
                    state.apply(u, su, 1);
                    state.apply(v, sv, 1);
                }
            }
        }
        if !improved {
            break;
        }
    }
    assignment
}

/// Assigns whole authors to splits. User-disjointness is a hard constraint; size
/// and label tolerances are targets. Restarts with derived seeds until a split
/// without violations is found, otherwise returns the lowest-cost attempt with its
/// violations listed in the audit.
pub fn split_user_disjoint(corpus: &Corpus, spec: &SplitSpec) -> Result<DatasetSplit, DatasetError> {
    spec.validate()?;
    let labels = corpus.labels()?;
    let mut user_index: BTreeMap<&str, usize> = BTreeMap::new();
    for item in corpus.iter() {
        if item.tweet.author_id.is_empty() {
            return Err(DatasetError::MissingAuthor(item.id().to_string()));
        }
        let next = user_index.len();
        user_index.entry(item.tweet.author_id.as_str()).or_insert(next);
    }
    if user_index.len() < 2 {
        return Err(DatasetError::SingleUser);
    }
    // BTreeMap gives a stable, id-sorted user numbering.
    let ids: HashMap<&str, usize> = user_index.keys().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut users = vec![[0usize; 3]; ids.len()];
    let mut label_totals = [0usize; 3];
    for (item, label) in corpus.iter().zip(&labels) {
        users[ids[item.tweet.author_id.as_str()]][label.index()] += 1;
        label_totals[label.index()] += 1;
    }

    let mut seeder = crate::seeded_rng(spec.seed);
    let mut best: Option<(f64, DatasetSplit)> = None;
    for _ in 0..spec.restarts {
        let restart_seed: u64 = seeder.gen();
        let user_assignment = pack_users(&users, label_totals, spec.ratios, corpus.len(), restart_seed);
        let assignment: Vec<usize> = corpus
            .iter()
            .map(|i| user_assignment[ids[i.tweet.author_id.as_str()]])
            .collect();
        let mut split = DatasetSplit::from_assignment(corpus, &assignment, "user-disjoint", spec, true);
        split.audit.restart_seed = Some(restart_seed);
        if split.audit.violations.is_empty() {
            return Ok(split);
        }
        let cost = split_cost(&split, spec, &labels);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, split));
        }
    }
    Ok(best.unwrap().1)
}

fn split_cost(split: &DatasetSplit, spec: &SplitSpec, labels: &[StanceLabel]) -> f64 {
    let n = labels.len() as f64;
    let global = ClassDistribution::from_labels(labels.iter().copied());
    split
        .parts()
        .iter()
        .zip(spec.ratios)
        .map(|(part, r)| {
            let dist = ClassDistribution::from_labels(part.iter().filter_map(|i| i.label));
            let size = (part.len() as f64 - r * n).abs();
            let lab: f64 = StanceLabel::ALL
                .iter()
                .map(|&l| (dist.get(l) as f64 - r * global.get(l) as f64).abs())
                .sum();
            (size + lab) / n
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateId { id: String, splits: Vec<String> },
    UserOverlap { author: String, splits: Vec<String> },
    SizeOutOfTolerance { split: String, share: f64, expected: f64 },
    LabelOutOfTolerance { split: String, label: StanceLabel, share: f64, expected: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub violations: Vec<Violation>,
}

impl SplitReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks id disjointness, optional author disjointness, and size/label tolerances.
pub fn verify_split(split: &DatasetSplit, spec: &SplitSpec, require_user_disjoint: bool) -> SplitReport {
    let mut violations = Vec::new();
    let parts = split.parts();

    let mut id_splits: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut user_splits: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for (s, part) in parts.iter().enumerate() {
        for item in part.iter() {
            id_splits.entry(item.id()).or_default().push(SPLIT_NAMES[s].to_string());
            user_splits.entry(item.tweet.author_id.as_str()).or_default().insert(s);
        }
    }
    for (id, splits) in id_splits {
        if splits.len() > 1 {
            violations.push(Violation::DuplicateId {
                id: id.to_string(),
                splits,
            });
        }
    }
    if require_user_disjoint {
        for (author, splits) in user_splits {
            if splits.len() > 1 {
                violations.push(Violation::UserOverlap {
                    author: author.to_string(),
                    splits: splits.into_iter().map(|s| SPLIT_NAMES[s].to_string()).collect(),
                });
            }
        }
    }

    let total: usize = parts.iter().map(|p| p.len()).sum();
    if total == 0 {
        return SplitReport { violations };
    }
    let global = ClassDistribution::from_labels(parts.iter().flat_map(|p| p.iter().filter_map(|i| i.label)));
    for (s, part) in parts.iter().enumerate() {
        let share = part.len() as f64 / total as f64;
        if (share - spec.ratios[s]).abs() > spec.size_tolerance + 1e-12 {
            violations.push(Violation::SizeOutOfTolerance {
                split: SPLIT_NAMES[s].to_string(),
                share,
                expected: spec.ratios[s],
            });
        }
        let dist = ClassDistribution::from_labels(part.iter().filter_map(|i| i.label));
        if dist.total == 0 {
            continue;
        }
        for label in StanceLabel::ALL {
            let (p, g) = (dist.proportion(label), global.proportion(label));
            if (p - g).abs() > spec.label_tolerance + 1e-12 {
                violations.push(Violation::LabelOutOfTolerance {
                    split: SPLIT_NAMES[s].to_string(),
                    label,
                    share: p,
                    expected: g,
                });
            }
        }
    }
    SplitReport { violations }
}

/// Ids shared by more than one split, or ids of `input` missing from the split.
pub fn partition_errors(input: &Corpus, split: &DatasetSplit) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut errors = Vec::new();
    for part in split.parts() {
        for item in part.iter() {
            if !seen.insert(item.id()) {
                errors.push(format!("duplicate {}", item.id()));
            }
        }
    }
    for item in input.iter() {
        if !seen.contains(item.id()) {
            errors.push(format!("missing {}", item.id()));
        }
    }
    if seen.len() != input.len() {
        errors.push(format!("split holds {} ids, input {}", seen.len(), input.len()));
    }
    errors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LabelSource, LabeledTweet, Tweet};
    use StanceLabel::*;

    fn item(id: usize, author: &str, label: StanceLabel, text: &str) -> LabeledTweet {
        LabeledTweet::new(Tweet::new(format!("t{id:05}"), author, "es", text), label, LabelSource::ManualUser)
    }

    fn pool(counts: [usize; 3]) -> Corpus {
        let mut items = Vec::new();
        for (l, &n) in StanceLabel::ALL.iter().zip(&counts) {
            for i in 0..n {
                let id = items.len();
                items.push(item(id, &format!("{l}-{}", i % 7), *l, "uno dos tres cuatro"));
            }
        }
        Corpus::new("pool", "es", items).unwrap()
    }

    #[test]
    fn largest_remainder_examples() {
        assert_eq!(largest_remainder(10, &[0.6, 0.2, 0.2]), vec![6, 2, 2]);
        assert_eq!(largest_remainder(11, &[0.6, 0.2, 0.2]), vec![7, 2, 2]);
        assert_eq!(largest_remainder(5, &[1.0, 1.0]), vec![3, 2]);
        assert_eq!(largest_remainder(0, &[1.0, 2.0]), vec![0, 0]);
    }

    #[test]
    fn quotas_symmetric_and_capped() {
        assert_eq!(balanced_quotas(30, [100, 100, 100]), [10, 10, 10]);
        assert_eq!(balanced_quotas(30, [5, 100, 100]), [5, 13, 12]);
        assert_eq!(balanced_quotas(30, [5, 6, 7]), [5, 6, 7]);
    }

    #[test]
    fn assemble_balanced_examples() {
        let out = assemble_balanced(&pool([100, 100, 100]), 30, 4, 1).unwrap();
        assert_eq!(corpus::distribution(&out).unwrap().as_array(), [10, 10, 10]);
        let out = assemble_balanced(&pool([5, 100, 100]), 30, 4, 1).unwrap();
        assert_eq!(corpus::distribution(&out).unwrap().as_array(), [5, 13, 12]);
        assert!(matches!(assemble_balanced(&pool([1, 1, 1]), 2, 4, 1), Err(DatasetError::TargetTooSmall(2))));
    }

    #[test]
    fn assemble_drops_short_tweets() {
        let items = vec![
            item(0, "a", Favor, "solo tres palabras"),
            item(1, "a", Favor, "aqui hay cuatro palabras"),
            item(2, "b", Against, "otra con cuatro palabras"),
            item(3, "c", None, "y la ultima tambien cuatro"),
        ];
        let c = Corpus::new("c", "es", items).unwrap();
        let out = assemble_balanced(&c, 30, 4, 0).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|i| i.id() != "t00000"));
    }

    #[test]
    fn assemble_keeps_author_shares() {
        // FAVOR pool: author x has 60 tweets, y has 30, z has 10; quota 20 → 12/6/2
        let mut items = Vec::new();
        for (author, n) in [("x", 60), ("y", 30), ("z", 10)] {
            for _ in 0..n {
                let id = items.len();
                items.push(item(id, author, Favor, "uno dos tres cuatro"));
            }
        }
        for _ in 0..40 {
            let id = items.len();
            items.push(item(id, "w", Against, "uno dos tres cuatro"));
            let id = items.len();
            items.push(item(id, "v", None, "uno dos tres cuatro"));
        }
        let c = Corpus::new("c", "es", items).unwrap();
        let out = assemble_balanced(&c, 60, 4, 3).unwrap();
        let per_author = |a: &str| out.iter().filter(|i| i.tweet.author_id == a).count();
        assert_eq!((per_author("x"), per_author("y"), per_author("z")), (12, 6, 2));
    }

    #[test]
    fn proportional_sizes() {
        for (n, expected) in [(10, [6, 2, 2]), (11, [7, 2, 2])] {
            let c = pool([n / 3, n / 3, n - 2 * (n / 3)]);
            let split = split_proportional(&c, &SplitSpec::default()).unwrap();
            assert_eq!(split.parts().map(|p| p.len()), expected);
            assert!(partition_errors(&c, &split).is_empty());
        }
        assert!(matches!(split_proportional(&pool([1, 1, 2]), &SplitSpec::default()), Err(DatasetError::TooSmall(4, 5))));
    }

    #[test]
    fn user_disjoint_symmetric_fixture() {
        // 15 users × 10 tweets, 5 users per label
        let mut items = Vec::new();
        for u in 0..15 {
            let label = StanceLabel::ALL[u % 3];
            for _ in 0..10 {
                let id = items.len();
                items.push(item(id, &format!("user{u:02}"), label, "uno dos tres cuatro"));
            }
        }
        let c = Corpus::new("c", "es", items).unwrap();
        let split = split_user_disjoint(&c, &SplitSpec::with_seed(11)).unwrap();
        assert_eq!(split.audit.splits.iter().map(|s| s.user_count).collect::<Vec<_>>(), vec![9, 3, 3]);
        assert_eq!(split.parts().map(|p| p.len()), [90, 30, 30]);
        for entry in &split.audit.splits {
            let d = entry.distribution.as_array();
            assert!(d[0] == d[1] && d[1] == d[2]);
        }
        assert!(verify_split(&split, &SplitSpec::default(), true).is_clean());
        assert!(partition_errors(&c, &split).is_empty());
    }

    #[test]
    fn single_user_rejected() {
        let c = pool([0, 0, 0]);
        let items = vec![item(0, "solo", Favor, "a b c d"), item(1, "solo", Against, "e f g h")];
        let c1 = Corpus::new("c", "es", items).unwrap();
        assert!(matches!(split_user_disjoint(&c1, &SplitSpec::default()), Err(DatasetError::SingleUser)));
        assert!(matches!(split_user_disjoint(&c, &SplitSpec::default()), Err(DatasetError::SingleUser)));
    }

    #[test]
    fn verify_flags_shared_user_and_empty_split() {
        let train: Vec<_> = (0..6).map(|i| item(i, if i == 0 { "shared" } else { "a" }, Favor, "x y z")).collect();
        let test = vec![item(10, "shared", Favor, "x y z"), item(11, "b", Favor, "x y z")];
        let c = Corpus::new("c", "es", vec![]).unwrap();
        let split = DatasetSplit {
            train: c.with_items("train", train),
            dev: c.with_items("dev", vec![]),
            test: c.with_items("test", test),
            audit: SplitAudit {
                mode: "manual".into(),
                seed: 0,
                restart_seed: Option::None,
                splits: vec![],
                violations: vec![],
            },
        };
        let report = verify_split(&split, &SplitSpec::default(), true);
        let overlaps: Vec<_> = report
            .violations
            .iter()
            .filter_map(|v| match v {
                Violation::UserOverlap { author, .. } => Some(author.as_str()),
                _ => Option::None,
            })
            .collect();
        assert_eq!(overlaps, vec!["shared"]);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SizeOutOfTolerance { split, .. } if split == "dev")));
    }

    #[test]
    fn spec_validation() {
        assert!(SplitSpec { ratios: [0.5, 0.5, 0.0], ..SplitSpec::default() }.validate().is_err());
        assert!(SplitSpec { size_tolerance: 0.3, ..SplitSpec::default() }.validate().is_err());
        assert!(SplitSpec::default().validate().is_ok());
    }
}
