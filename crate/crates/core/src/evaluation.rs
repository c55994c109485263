//! Stance scoring: per-class P/R/F1, the FAVOR/AGAINST macro average, error
//! mining across systems and the any-system-correct upperbound.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, StanceLabel};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("system {system}: {} gold ids without prediction (first: {:?}), {} predictions for unknown ids (first: {:?})", .missing.len(), .missing.first(), .extra.len(), .extra.first())]
    Coverage {
        system: String,
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("threshold {threshold} exceeds the number of systems ({systems})")]
    ThresholdTooLarge { threshold: usize, systems: usize },
    #[error("{0}")]
    InvalidInput(String),
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = EvaluationError> = std::result::Result<T, E>;

/// Predictions of one system, keyed by tweet id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub system: String,
    pub predictions: BTreeMap<String, StanceLabel>,
}

impl PredictionSet {
    pub fn new(system: impl Into<String>) -> Self {
        PredictionSet {
            system: system.into(),
            predictions: BTreeMap::new(),
        }
    }

    pub fn from_pairs<I, S>(system: impl Into<String>, pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, StanceLabel)>,
        S: Into<String>,
    {
        PredictionSet {
            system: system.into(),
            predictions: pairs.into_iter().map(|(id, l)| (id.into(), l)).collect(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, label: StanceLabel) {
        self.predictions.insert(id.into(), label);
    }

    pub fn get(&self, id: &str) -> Option<StanceLabel> {
        self.predictions.get(id).copied()
    }

    /// `id<TAB>label` lines; an `id<TAB>label` header line is optional.
    pub fn parse(system: &str, text: &str, source: &str) -> Result<Self> {
        let mut set = PredictionSet::new(system);
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || (idx == 0 && line.eq_ignore_ascii_case("id\tlabel")) {
                continue;
            }
            let err = |reason: String| EvaluationError::Parse {
                path: source.to_string(),
                line: idx + 1,
                reason,
            };
            let (id, label) = line.split_once('\t').ok_or_else(|| err("expected id<TAB>label".into()))?;
            let label: StanceLabel = label.parse().map_err(|e: CorpusError| err(e.to_string()))?;
            if set.predictions.insert(id.to_string(), label).is_some() {
                return Err(err(format!("duplicate id {id}")));
            }
        }
        Ok(set)
    }

    /// System name defaults to the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let system = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse(&system, &fs::read_to_string(path)?, &path.display().to_string())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("id\tlabel\n");
        for (id, l) in &self.predictions {
            let _ = writeln!(out, "{id}\t{l}");
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_tsv())?;
        Ok(())
    }

    /// Predictions aligned with the corpus items.
    pub fn aligned(&self, gold: &Corpus) -> Result<Vec<StanceLabel>> {
        check_coverage(gold, self)?;
        Ok(gold.iter().map(|i| self.predictions[i.id()]).collect())
    }
}

fn check_coverage(gold: &Corpus, pred: &PredictionSet) -> Result<()> {
    let gold_ids: BTreeSet<&str> = gold.iter().map(|i| i.id()).collect();
    let missing: Vec<String> = gold_ids
        .iter()
        .filter(|id| !pred.predictions.contains_key(**id))
        .map(|id| id.to_string())
        .collect();
    let extra: Vec<String> = pred
        .predictions
        .keys()
        .filter(|id| !gold_ids.contains(id.as_str()))
        .cloned()
        .collect();
    if missing.is_empty() && extra.is_empty() {
        Ok(())
    } else {
        Err(EvaluationError::Coverage {
            system: pred.system.clone(),
            missing,
            extra,
        })
    }
}

/// Rounds half away from zero to `decimals` places after snapping away binary
/// representation noise (so 71.085 rounds to 71.09).
pub fn round_half_up(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    let scaled = x * scale;
    let snapped = (scaled * 1e6).round() / 1e6;
    snapped.round() / scale
}

/// Macro average of the two polar classes, both given as percentages.
pub fn f1_avg(f1_against: f64, f1_favor: f64) -> f64 {
    (f1_favor + f1_against) / 2.0
}

/// Percentage with two decimals, half-up.
pub fn format_pct(x: f64) -> String {
    format!("{:.2}", round_half_up(x, 2))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    /// Percentages in [0, 100].
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub schema_version: u32,
    pub system: String,
    pub per_class: BTreeMap<StanceLabel, ClassScore>,
    /// `(F1_favor + F1_against) / 2`, unrounded percentage.
    pub f1_avg: f64,
    /// Rows gold, columns predicted, both in AGAINST, FAVOR, NONE order.
    pub confusion: [[usize; 3]; 3],
}

impl ScoreReport {
    pub fn f1(&self, label: StanceLabel) -> f64 {
        self.per_class[&label].f1
    }

    /// F1_avg rounded to two decimals.
    pub fn f1_avg_rounded(&self) -> f64 {
        round_half_up(self.f1_avg, 2)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scores aligned gold and predicted labels.
pub fn score_labels(system: &str, gold: &[StanceLabel], pred: &[StanceLabel]) -> Result<ScoreReport> {
    if gold.len() != pred.len() {
        return Err(EvaluationError::InvalidInput(format!(
            "{} gold labels, {} predictions",
            gold.len(),
            pred.len()
        )));
    }
    let mut confusion = [[0usize; 3]; 3];
    for (g, p) in gold.iter().zip(pred) {
        confusion[g.index()][p.index()] += 1;
    }
    let mut per_class = BTreeMap::new();
    for label in StanceLabel::ALL {
        let c = label.index();
        let tp = confusion[c][c] as f64;
        let predicted: usize = (0..3).map(|g| confusion[g][c]).sum();
        let support: usize = confusion[c].iter().sum();
        let precision = if predicted > 0 { tp / predicted as f64 } else { 0.0 };
        let recall = if support > 0 { tp / support as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class.insert(
            label,
            ClassScore {
                precision: 100.0 * precision,
                recall: 100.0 * recall,
                f1: 100.0 * f1,
                support,
            },
        );
    }
    let f1_avg = f1_avg(per_class[&StanceLabel::Against].f1, per_class[&StanceLabel::Favor].f1);
    Ok(ScoreReport {
        schema_version: REPORT_SCHEMA_VERSION,
        system: system.to_string(),
        per_class,
        f1_avg,
        confusion,
    })
}

/// Scores `pred` against the gold corpus; every gold id must be predicted and no other.
pub fn score(gold: &Corpus, pred: &PredictionSet) -> Result<ScoreReport> {
    let predicted = pred.aligned(gold)?;
    score_labels(&pred.system, &gold.labels()?, &predicted)
}

/// Per-target scores for multi-target corpora, with both aggregates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetAggregate {
    /// All items scored together.
    pub pooled: ScoreReport,
    pub per_target: BTreeMap<String, ScoreReport>,
    /// Unweighted mean of the per-target F1_avg values.
    pub per_target_mean_f1_avg: f64,
}

/// Items without a target are grouped under `""`.
pub fn score_by_target(gold: &Corpus, pred: &PredictionSet) -> Result<TargetAggregate> {
    let predicted = pred.aligned(gold)?;
    let labels = gold.labels()?;
    let mut groups: BTreeMap<String, (Vec<StanceLabel>, Vec<StanceLabel>)> = BTreeMap::new();
    for ((item, &g), &p) in gold.iter().zip(&labels).zip(&predicted) {
        let entry = groups.entry(item.tweet.target.clone().unwrap_or_default()).or_default();
        entry.0.push(g);
        entry.1.push(p);
    }
    let per_target = groups
        .into_iter()
        .map(|(t, (g, p))| Ok((t, score_labels(&pred.system, &g, &p)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let mean = per_target.values().map(|r| r.f1_avg).sum::<f64>() / per_target.len().max(1) as f64;
    Ok(TargetAggregate {
        pooled: score_labels(&pred.system, &labels, &predicted)?,
        per_target,
        per_target_mean_f1_avg: mean,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityError {
    pub id: String,
    pub gold: StanceLabel,
    /// One prediction per system, in input order.
    pub predictions: Vec<StanceLabel>,
    pub wrong: usize,
}

impl MajorityError {
    /// Most frequent predicted label; ties in AGAINST, FAVOR, NONE order.
    pub fn vote(&self) -> StanceLabel {
        let mut counts = [0usize; 3];
        for p in &self.predictions {
            counts[p.index()] += 1;
        }
        let best = (0..3).fold(0, |b, i| if counts[i] > counts[b] { i } else { b });
        StanceLabel::ALL[best]
    }
}

/// Items mispredicted by at least `threshold` systems, in corpus order.
pub fn majority_error_set(gold: &Corpus, preds: &[PredictionSet], threshold: usize) -> Result<Vec<MajorityError>> {
    if preds.len() < 2 {
        return Err(EvaluationError::InvalidInput("at least two prediction sets are required".into()));
    }
    if threshold == 0 || threshold > preds.len() {
        return Err(EvaluationError::ThresholdTooLarge {
            threshold,
            systems: preds.len(),
        });
    }
    let aligned = preds.iter().map(|p| p.aligned(gold)).collect::<Result<Vec<_>>>()?;
    let labels = gold.labels()?;
    Ok(gold
        .iter()
        .zip(&labels)
        .enumerate()
        .filter_map(|(i, (item, &g))| {
            let predictions: Vec<StanceLabel> = aligned.iter().map(|a| a[i]).collect();
            let wrong = predictions.iter().filter(|&&p| p != g).count();
            (wrong >= threshold).then(|| MajorityError {
                id: item.id().to_string(),
                gold: g,
                predictions,
                wrong,
            })
        })
        .collect())
}

/// Gold versus majority-vote confusion over an error set.
pub fn error_confusion(errors: &[MajorityError]) -> [[usize; 3]; 3] {
    let mut m = [[0usize; 3]; 3];
    for e in errors {
        m[e.gold.index()][e.vote().index()] += 1;
    }
    m
}

/// Oracle that is right whenever any system is right; otherwise it keeps the
/// first system's prediction.
pub fn upperbound(gold: &Corpus, preds: &[PredictionSet]) -> Result<ScoreReport> {
    if preds.is_empty() {
        return Err(EvaluationError::InvalidInput("at least one prediction set is required".into()));
    }
    let aligned = preds.iter().map(|p| p.aligned(gold)).collect::<Result<Vec<_>>>()?;
    let labels = gold.labels()?;
    let oracle: Vec<StanceLabel> = labels
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            if aligned.iter().any(|a| a[i] == g) {
                g
            } else {
                aligned[0][i]
            }
        })
        .collect();
    let name = format!("upperbound({})", preds.iter().map(|p| p.system.as_str()).collect::<Vec<_>>().join(","));
    score_labels(&name, &labels, &oracle)
}

/// Aligned text table: system, F1 AGAINST, F1 FAVOR, F1_avg.
pub fn render_table(reports: &[ScoreReport]) -> String {
    let width = reports.iter().map(|r| r.system.chars().count()).max().unwrap_or(0).max(6);
    let mut out = format!("{:<width$}  {:>7}  {:>7}  {:>7}\n", "System", "AGAINST", "FAVOR", "F1_avg");
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>7}  {:>7}",
            r.system,
            format_pct(r.f1(StanceLabel::Against)),
            format_pct(r.f1(StanceLabel::Favor)),
            format_pct(r.f1_avg)
        );
    }
    out
}

pub fn render_confusion(m: &[[usize; 3]; 3]) -> String {
    let mut out = format!("{:<8}{:>8}{:>8}{:>8}\n", "gold\\pred", "AGAINST", "FAVOR", "NONE");
    for (label, row) in StanceLabel::ALL.iter().zip(m) {
        let _ = writeln!(out, "{:<9}{:>7}{:>8}{:>8}", label.as_str(), row[0], row[1], row[2]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LabelSource, LabeledTweet, Tweet};
    use StanceLabel::*;

    fn gold(labels: &[StanceLabel]) -> Corpus {
        let items = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| LabeledTweet::new(Tweet::new(format!("{i}"), "u", "es", "x"), l, LabelSource::ManualUser))
            .collect();
        Corpus::new("gold", "es", items).unwrap()
    }

    fn preds(name: &str, labels: &[StanceLabel]) -> PredictionSet {
        PredictionSet::from_pairs(name, labels.iter().enumerate().map(|(i, &l)| (i.to_string(), l)))
    }

    #[test]
    fn golden_macro_averages() {
        assert_eq!(format_pct(f1_avg(73.24, 53.52)), "63.38");
        assert_eq!(format_pct(f1_avg(70.69, 78.67)), "74.68");
        assert_eq!(format_pct(71.085), "71.09");
    }

    #[test]
    fn hand_computed_example() {
        let g = gold(&[Against, Against, Favor, None]);
        let r = score(&g, &preds("s", &[Against, Favor, Favor, None])).unwrap();
        assert!((r.f1(Against) - 200.0 / 3.0).abs() < 1e-9);
        assert!((r.f1(Favor) - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(format_pct(r.f1_avg), "66.67");
        assert_eq!(r.confusion[0], [1, 1, 0]);
    }

    #[test]
    fn perfect_is_100() {
        let labels = [Against, Favor, None];
        let r = score(&gold(&labels), &preds("s", &labels)).unwrap();
        assert_eq!(format_pct(r.f1_avg), "100.00");
    }

    #[test]
    fn coverage_errors() {
        let g = gold(&[Against, Favor]);
        let mut p = preds("s", &[Against]);
        let err = score(&g, &p).unwrap_err();
        assert!(matches!(err, EvaluationError::Coverage { ref missing, .. } if missing == &vec!["1".to_string()]));
        p.insert("1", Favor);
        p.insert("zz", Favor);
        assert!(matches!(score(&g, &p), Err(EvaluationError::Coverage { .. })));
    }

    #[test]
    fn majority_errors() {
        let g = gold(&[Against, Favor]);
        let systems: Vec<_> = (0..5)
            .map(|s| preds(&format!("s{s}"), &[if s < 3 { Favor } else { Against }, Favor]))
            .collect();
        let errs = majority_error_set(&g, &systems, 3).unwrap();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].id, "0");
        assert_eq!(errs[0].vote(), Favor);
        assert_eq!(error_confusion(&errs)[0], [0, 1, 0]);
        assert!(majority_error_set(&g, &systems, 4).unwrap().is_empty());
        assert!(matches!(
            majority_error_set(&g, &systems, 6),
            Err(EvaluationError::ThresholdTooLarge { .. })
        ));
    }

    #[test]
    fn upperbound_examples() {
        let labels = [Against, Favor, None, Against];
        let g = gold(&labels);
        let a = preds("a", &[Against, Against, None, Favor]);
        let b = preds("b", &[Favor, Favor, Favor, Against]);
        assert_eq!(format_pct(upperbound(&g, &[a.clone(), b]).unwrap().f1_avg), "100.00");
        assert_eq!(upperbound(&g, &[a.clone()]).unwrap().f1_avg, score(&g, &a).unwrap().f1_avg);
    }

    #[test]
    fn prediction_tsv_round_trip() {
        let p = preds("sys", &[Against, None]);
        assert_eq!(PredictionSet::parse("sys", &p.to_tsv(), "x").unwrap(), p);
        assert!(PredictionSet::parse("s", "1\tMAYBE\n", "x").is_err());
        assert!(PredictionSet::parse("s", "1\tFAVOR\n1\tNONE\n", "x").is_err());
    }

    #[test]
    fn per_target_aggregates() {
        let mut g = gold(&[Against, Favor, Against, Favor]);
        for (i, item) in g.items.iter_mut().enumerate() {
            item.tweet.target = Some(if i < 2 { "t1" } else { "t2" }.to_string());
        }
        let p = preds("s", &[Against, Favor, Favor, Favor]);
        let agg = score_by_target(&g, &p).unwrap();
        assert_eq!(agg.per_target["t1"].f1_avg, 100.0);
        assert_eq!(agg.per_target.len(), 2);
        assert!((agg.per_target_mean_f1_avg - (100.0 + agg.per_target["t2"].f1_avg) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn table_renders() {
        let labels = [Against, Favor];
        let r = score(&gold(&labels), &preds("TF-IDF+SVM", &labels)).unwrap();
        let t = render_table(&[r]);
        assert!(t.lines().nth(1).unwrap().ends_with("100.00"));
    }
}
