//! Rank-order character n-gram language identification (Cavnar & Trenkle).
//!
//! A profile is the list of the most frequent character 1- to 4-grams of a
//! monolingual sample. Texts are classified by the out-of-place distance between
//! their own profile and each language profile.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub const MAX_PROFILE_LEN: usize = 400;
pub const MAX_NGRAM: usize = 4;
/// Texts with fewer characters than this are reported as `und`.
pub const MIN_TEXT_CHARS: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageProfile {
    pub language: String,
    /// Descending frequency, ties lexicographic, no duplicates.
    pub ngrams: Vec<String>,
}

fn ngram_counts(text: &str) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    let lowered = crate::normalize::strip_urls(&text.to_lowercase());
    for word in lowered
        .split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
    {
        let padded: Vec<char> = std::iter::once('_')
            .chain(word.chars())
            .chain(std::iter::once('_'))
            .collect();
        for n in 1..=MAX_NGRAM {
            for window in padded.windows(n) {
                if n == 1 && window[0] == '_' {
                    continue;
                }
                *counts.entry(window.iter().collect::<String>()).or_insert(0) += 1;
            }
        }
    }
    counts
}

fn ranked(counts: HashMap<String, usize>, limit: usize) -> Vec<String> {
    let mut entries: Vec<(String, usize)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.into_iter().take(limit).map(|(g, _)| g).collect()
}

impl LanguageProfile {
    pub fn train(language: impl Into<String>, sample: &str) -> Self {
        LanguageProfile {
            language: language.into(),
            ngrams: ranked(ngram_counts(sample), MAX_PROFILE_LEN),
        }
    }

    /// One n-gram per line, first line `# <language>`.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.language);
        for g in &self.ngrams {
            out.push_str(g);
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> io::Result<Self> {
        let mut lines = text.lines();
        let language = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "missing '# <lang>' line"))?
            .trim()
            .to_string();
        let ngrams = lines.filter(|l| !l.is_empty()).map(str::to_string).collect();
        Ok(LanguageProfile { language, ngrams })
    }

    pub fn load(path: impl AsRef<Path>) -> io::Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    fn distance(&self, doc: &[String], index: &HashMap<&str, usize>) -> usize {
        let penalty = self.ngrams.len().max(1);
        doc.iter()
            .enumerate()
            .map(|(rank, g)| match index.get(g.as_str()) {
                Some(&pos) => rank.abs_diff(pos),
                None => penalty,
            })
            .sum()
    }
}

/// Profiles trained from the monolingual samples bundled with the crate (es, ca, en).
pub fn builtin_profiles() -> Vec<LanguageProfile> {
    vec![
        LanguageProfile::train("es", include_str!("../fixtures/langid/es.txt")),
        LanguageProfile::train("ca", include_str!("../fixtures/langid/ca.txt")),
        LanguageProfile::train("en", include_str!("../fixtures/langid/en.txt")),
    ]
}

/// Returns the closest profile's language and `1 - best / worst` as confidence,
/// `worst` being the distance to the farthest profile.
pub fn detect_language(text: &str, profiles: &[LanguageProfile]) -> (String, f64) {
    let undetermined = ("und".to_string(), 0.0);
    if profiles.is_empty() || text.trim().chars().count() < MIN_TEXT_CHARS {
        return undetermined;
    }
    let doc = ranked(ngram_counts(text), MAX_PROFILE_LEN);
    if doc.is_empty() {
        return undetermined;
    }
    let scored: Vec<(usize, &LanguageProfile)> = profiles
        .iter()
        .map(|p| {
            let index: HashMap<&str, usize> =
                p.ngrams.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
            (p.distance(&doc, &index), p)
        })
        .collect();
    let (best, profile) = scored
        .iter()
        .min_by_key(|(d, _)| *d)
        .map(|(d, p)| (*d, *p))
        .unwrap();
    let worst = scored.iter().map(|(d, _)| *d).max().unwrap();
    let confidence = if worst == 0 { 0.0 } else { 1.0 - best as f64 / worst as f64 };
    (profile.language.clone(), confidence)
}
