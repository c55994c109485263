//! On-topic filtering with curated hashtag and keyword lists.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ClassDistribution, Corpus, CorpusError, LabelSource, Tweet};
use crate::normalize::fold;

static HASHTAG_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#(\w+)").unwrap());
static WORD_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\w+").unwrap());

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("invalid lexicon entry {0:?}")]
    InvalidEntry(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Normalized hashtag tokens (casefolded, diacritic-free) found in `text`.
pub fn hashtags(text: &str) -> Vec<String> {
    HASHTAG_RE
        .captures_iter(text)
        .map(|c| fold(&c[1]))
        .collect()
}

/// Normalized word tokens of `text`, hashtag bodies included.
pub fn normalized_tokens(text: &str) -> Vec<String> {
    let folded = fold(&crate::normalize::strip_urls(text));
    WORD_RE.find_iter(&folded).map(|m| m.as_str().to_string()).collect()
}

/// Hashtags by descending frequency, ties lexicographic.
pub fn extract_hashtags(corpus: &Corpus) -> Vec<(String, usize)> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for item in corpus.iter() {
        for tag in hashtags(&item.tweet.text) {
            *counts.entry(tag).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicLexicon {
    /// Without the leading `#`.
    pub hashtags: BTreeSet<String>,
    /// One to three tokens joined by single spaces.
    pub keywords: BTreeSet<String>,
}

impl TopicLexicon {
    pub fn new<H, K>(hashtags: H, keywords: K) -> Result<Self, TopicError>
    where
        H: IntoIterator,
        H::Item: AsRef<str>,
        K: IntoIterator,
        K::Item: AsRef<str>,
    {
        let mut lexicon = TopicLexicon::default();
        for h in hashtags {
            lexicon.add_hashtag(h.as_ref())?;
        }
        for k in keywords {
            lexicon.add_keyword(k.as_ref())?;
        }
        Ok(lexicon)
    }

    pub fn add_hashtag(&mut self, raw: &str) -> Result<(), TopicError> {
        let tag = fold(raw.trim().trim_start_matches('#'));
        if tag.is_empty() || tag.chars().any(char::is_whitespace) {
            return Err(TopicError::InvalidEntry(raw.to_string()));
        }
        self.hashtags.insert(tag);
        Ok(())
    }

    pub fn add_keyword(&mut self, raw: &str) -> Result<(), TopicError> {
        let tokens = normalized_tokens(raw);
        if tokens.is_empty() || tokens.len() > 3 {
            return Err(TopicError::InvalidEntry(raw.to_string()));
        }
        self.keywords.insert(tokens.join(" "));
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.hashtags.is_empty() && self.keywords.is_empty()
    }

    /// Plain text, one entry per line: lines starting with `#` are hashtags,
    /// all other non-blank lines are keywords.
    pub fn parse(text: &str) -> Result<Self, TopicError> {
        let mut lexicon = TopicLexicon::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if line.starts_with('#') {
                lexicon.add_hashtag(line)?;
            } else {
                lexicon.add_keyword(line)?;
            }
        }
        Ok(lexicon)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TopicError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for h in &self.hashtags {
            out.push('#');
            out.push_str(h);
            out.push('\n');
        }
        for k in &self.keywords {
            out.push_str(k);
            out.push('\n');
        }
        out
    }
}

/// True when a normalized hashtag of the tweet is listed, or a keyword occurs as a
/// contiguous run of normalized tokens.
pub fn match_topic(tweet: &Tweet, lexicon: &TopicLexicon) -> bool {
    if hashtags(&tweet.text)
        .iter()
        .any(|h| lexicon.hashtags.contains(h))
    {
        return true;
    }
    if lexicon.keywords.is_empty() {
        return false;
    }
    let tokens = normalized_tokens(&tweet.text);
    lexicon.keywords.iter().any(|kw| {
        let needle: Vec<&str> = kw.split(' ').collect();
        tokens
            .windows(needle.len())
            .any(|w| w.iter().zip(&needle).all(|(a, b)| a == b))
    })
}

/// Keeps on-topic items (marked `hashtag-confirmed`) and returns their label counts.
pub fn filter_on_topic(
    corpus: &Corpus,
    lexicon: &TopicLexicon,
) -> Result<(Corpus, ClassDistribution), TopicError> {
    if lexicon.is_empty() {
        return Err(TopicError::EmptyLexicon);
    }
    let mut kept = corpus.subset(|item| match_topic(&item.tweet, lexicon));
    for item in &mut kept.items {
        item.label_source = Some(LabelSource::HashtagConfirmed);
    }
    let dist = crate::corpus::distribution(&kept)?;
    Ok((kept, dist))
}
