//! TF-IDF features and Information Gain feature selection.
//!
//! `tf` is the raw count, `idf(t) = ln((1 + N) / (1 + df(t))) + 1`, and every
//! document vector is L2-normalized.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{LearnerError, Result};
use crate::corpus::StanceLabel;

/// Sparse vector with strictly increasing indices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVec {
    /// Sorts by index; duplicate indices are summed.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut out = SparseVec::default();
        for (i, v) in pairs {
            if out.indices.last() == Some(&i) {
                *out.values.last_mut().unwrap() += v;
            } else {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        out
    }

    pub fn from_dense(values: &[f64]) -> Self {
        let mut out = SparseVec::default();
        for (i, &v) in values.iter().enumerate() {
            if v != 0.0 {
                out.indices.push(i as u32);
                out.values.push(v);
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut i, mut j, mut sum) = (0, 0, 0.0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn get(&self, index: u32) -> f64 {
        self.indices
            .binary_search(&index)
            .map(|p| self.values[p])
            .unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfidfVectorizer {
    /// Token → feature index; indices follow lexicographic token order.
    pub vocabulary: BTreeMap<String, u32>,
    pub idf: Vec<f64>,
    /// Feature subset kept after selection; `None` keeps everything.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected: Option<BTreeSet<u32>>,
}

impl TfidfVectorizer {
    pub fn fit<D, T>(docs: &[D]) -> Result<Self>
    where
        D: AsRef<[T]>,
        T: AsRef<str>,
    {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let unique: BTreeSet<&str> = doc.as_ref().iter().map(AsRef::as_ref).collect();
            for t in unique {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        if df.is_empty() {
            return Err(LearnerError::EmptyVocabulary);
        }
        let n = docs.len() as f64;
        let mut vocabulary = BTreeMap::new();
        let mut idf = Vec::with_capacity(df.len());
        for (i, (token, count)) in df.into_iter().enumerate() {
            vocabulary.insert(token.to_string(), i as u32);
            idf.push(((1.0 + n) / (1.0 + count as f64)).ln() + 1.0);
        }
        Ok(TfidfVectorizer {
            vocabulary,
            idf,
            selected: None,
        })
    }

    pub fn len(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocabulary.is_empty()
    }

    /// Number of features that survive selection.
    pub fn feature_count(&self) -> usize {
        self.selected.as_ref().map_or(self.len(), BTreeSet::len)
    }

    fn keeps(&self, index: u32) -> bool {
        self.selected.as_ref().is_none_or(|s| s.contains(&index))
    }

    /// L2-normalized TF-IDF vector; unknown and deselected tokens are ignored.
    pub fn transform<T: AsRef<str>>(&self, doc: &[T]) -> SparseVec {
        let mut counts: HashMap<u32, f64> = HashMap::new();
        for t in doc {
            if let Some(&i) = self.vocabulary.get(t.as_ref()) {
                if self.keeps(i) {
                    *counts.entry(i).or_insert(0.0) += 1.0;
                }
            }
        }
        let mut v = SparseVec::from_pairs(
            counts
                .into_iter()
                .map(|(i, tf)| (i, tf * self.idf[i as usize]))
                .collect(),
        );
        let norm = v.norm_sq().sqrt();
        if norm > 0.0 {
            v.values.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    pub fn transform_all<D, T>(&self, docs: &[D]) -> Vec<SparseVec>
    where
        D: AsRef<[T]>,
        T: AsRef<str>,
    {
        docs.iter().map(|d| self.transform(d.as_ref())).collect()
    }
}

fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

/// Information Gain (bits) of binary token presence with respect to the labels.
pub fn information_gain<D, T>(docs: &[D], labels: &[StanceLabel]) -> Result<BTreeMap<String, f64>>
where
    D: AsRef<[T]>,
    T: AsRef<str>,
{
    if docs.len() != labels.len() {
        return Err(LearnerError::LengthMismatch(docs.len(), labels.len()));
    }
    let mut class_totals = [0usize; 3];
    for l in labels {
        class_totals[l.index()] += 1;
    }
    let mut present: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    for (doc, label) in docs.iter().zip(labels) {
        let unique: BTreeSet<&str> = doc.as_ref().iter().map(AsRef::as_ref).collect();
        for t in unique {
            present.entry(t).or_default()[label.index()] += 1;
        }
    }
    if class_totals.iter().filter(|&&c| c > 0).count() < 2 {
        log::warn!("information gain on a single-class corpus: every score is 0");
        return Ok(present.into_keys().map(|t| (t.to_string(), 0.0)).collect());
    }
    let n = docs.len() as f64;
    let h_c = entropy(&class_totals);
    Ok(present
        .into_iter()
        .map(|(t, with)| {
            let without: Vec<usize> = (0..3).map(|c| class_totals[c] - with[c]).collect();
            let n_with: usize = with.iter().sum();
            let p_with = n_with as f64 / n;
            let conditional = p_with * entropy(&with) + (1.0 - p_with) * entropy(&without);
            // Clamp rounding noise so uninformative terms score exactly 0.
            let ig = h_c - conditional;
            (t.to_string(), if ig.abs() < 1e-12 { 0.0 } else { ig })
        })
        .collect())
}

/// Restricts the vectorizer to features with strictly positive score.
pub fn select_positive(vectorizer: &TfidfVectorizer, scores: &BTreeMap<String, f64>) -> TfidfVectorizer {
    let selected: BTreeSet<u32> = vectorizer
        .vocabulary
        .iter()
        .filter(|(t, &i)| vectorizer.keeps(i) && scores.get(*t).is_some_and(|&s| s > 0.0))
        .map(|(_, &i)| i)
        .collect();
    TfidfVectorizer {
        selected: Some(selected),
        ..vectorizer.clone()
    }
}

/// Scores divided by the maximum, for reporting.
pub fn max_scaled(scores: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let max = scores.values().copied().fold(0.0, f64::max);
    scores
        .iter()
        .map(|(t, &s)| (t.clone(), if max > 0.0 { s / max } else { 0.0 }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use StanceLabel::*;

    fn docs(raw: &[&[&str]]) -> Vec<Vec<String>> {
        raw.iter().map(|d| d.iter().map(|t| t.to_string()).collect()).collect()
    }

    #[test]
    fn hand_computed_idf_and_vector() {
        let d = docs(&[&["a", "b"], &["a"]]);
        let v = TfidfVectorizer::fit(&d).unwrap();
        assert!((v.idf[0] - 1.0).abs() < 1e-12);
        assert!((v.idf[1] - (1.5f64.ln() + 1.0)).abs() < 1e-12);
        let x = v.transform(&d[0]);
        assert!((x.values[0] - 0.580).abs() < 1e-3, "{:?}", x);
        assert!((x.values[1] - 0.815).abs() < 1e-3);
    }

    #[test]
    fn oov_doc_is_zero_vector() {
        let v = TfidfVectorizer::fit(&docs(&[&["a"]])).unwrap();
        assert_eq!(v.transform(&["zzz"]).nnz(), 0);
    }

    #[test]
    fn empty_vocabulary_error() {
        assert!(matches!(
            TfidfVectorizer::fit(&docs(&[&[]])),
            Err(LearnerError::EmptyVocabulary)
        ));
    }

    #[test]
    fn repetition_preserves_direction() {
        let v = TfidfVectorizer::fit(&docs(&[&["a", "b", "b"], &["b", "c"]])).unwrap();
        let once = v.transform(&["a", "b", "c"]);
        let thrice = v.transform(&["a", "b", "c", "a", "b", "c", "a", "b", "c"]);
        for (x, y) in once.values.iter().zip(&thrice.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn information_gain_examples() {
        let d = docs(&[&["t", "x"], &["t", "x"], &["x"], &["x"]]);
        let ig = information_gain(&d, &[Favor, Favor, Against, Against]).unwrap();
        assert!((ig["t"] - 1.0).abs() < 1e-12);
        assert_eq!(ig["x"], 0.0);

        let d = docs(&[&["t"], &["u"], &["u"], &["u"]]);
        let ig = information_gain(&d, &[Favor, Favor, Against, Against]).unwrap();
        assert!((ig["t"] - 0.3113).abs() < 1e-4);
    }

    #[test]
    fn single_class_gives_zero_scores() {
        let d = docs(&[&["t"], &["u"]]);
        let ig = information_gain(&d, &[Favor, Favor]).unwrap();
        assert!(ig.values().all(|&s| s == 0.0));
    }

    #[test]
    fn selection_shrinks_features() {
        let d = docs(&[&["t", "x"], &["t", "x"], &["x"], &["x"]]);
        let v = TfidfVectorizer::fit(&d).unwrap();
        let ig = information_gain(&d, &[Favor, Favor, Against, Against]).unwrap();
        let s = select_positive(&v, &ig);
        assert_eq!(s.feature_count(), 1);
        let x = s.transform(&["t", "x"]);
        assert_eq!(x.indices, vec![v.vocabulary["t"]]);
        assert!((x.values[0] - 1.0).abs() < 1e-12);
        assert_eq!(max_scaled(&ig)["t"], 1.0);
    }
}
