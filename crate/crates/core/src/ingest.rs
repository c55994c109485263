//! Raw dump ingestion: parsing, language identification, deduplication and the
//! minimum-length filter.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::corpus::{Corpus, LabeledTweet, RowError, Tweet};
use crate::langid::{detect_language, LanguageProfile};
use crate::normalize::{collapse_whitespace, strip_urls, word_count};

pub const DEFAULT_MIN_WORDS: usize = 3;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("min_words must be at least 1")]
    InvalidMinWords,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub input_count: usize,
    pub kept_count: usize,
    pub dropped_duplicates: usize,
    pub dropped_short: usize,
    /// Empty texts and similar unusable records.
    pub dropped_other: usize,
    pub per_language_counts: BTreeMap<String, usize>,
}

impl IngestReport {
    pub fn is_consistent(&self) -> bool {
        self.input_count
            == self.kept_count + self.dropped_duplicates + self.dropped_short + self.dropped_other
    }
}

/// Key under which two messages count as duplicates: casefolded, URL-free,
/// whitespace-collapsed text.
pub fn dedup_key(text: &str) -> String {
    collapse_whitespace(&strip_urls(&text.to_lowercase()))
}

/// Keeps the first occurrence of each normalized text among tweets with at least
/// `min_words` words (URLs excluded). Survivors keep their input order.
pub fn dedup_and_filter(
    tweets: Vec<Tweet>,
    min_words: usize,
) -> Result<(Vec<Tweet>, IngestReport), IngestError> {
    if min_words == 0 {
        return Err(IngestError::InvalidMinWords);
    }
    let mut report = IngestReport {
        input_count: tweets.len(),
        ..IngestReport::default()
    };
    let mut seen = HashSet::new();
    let mut kept = Vec::new();
    for tweet in tweets {
        if tweet.text.trim().is_empty() {
            report.dropped_other += 1;
        } else if word_count(&tweet.text) < min_words {
            report.dropped_short += 1;
        } else if !seen.insert(dedup_key(&tweet.text)) {
            report.dropped_duplicates += 1;
        } else {
            *report
                .per_language_counts
                .entry(tweet.language.clone())
                .or_insert(0) += 1;
            kept.push(tweet);
        }
    }
    report.kept_count = kept.len();
    Ok((kept, report))
}

/// Fills in the language of tweets that arrive without one (`""` or `"und"`).
pub fn assign_languages(tweets: &mut [Tweet], profiles: &[LanguageProfile]) {
    for tweet in tweets.iter_mut() {
        if tweet.language.is_empty() || tweet.language == "und" {
            tweet.language = detect_language(&tweet.text, profiles).0;
        }
    }
}

/// Language identification followed by [`dedup_and_filter`].
pub fn ingest(
    mut tweets: Vec<Tweet>,
    profiles: &[LanguageProfile],
    min_words: usize,
) -> Result<(Vec<Tweet>, IngestReport), IngestError> {
    assign_languages(&mut tweets, profiles);
    dedup_and_filter(tweets, min_words)
}

/// One unlabeled corpus per language, in first-seen item order.
pub fn split_by_language(tweets: &[Tweet]) -> BTreeMap<String, Corpus> {
    let mut groups: BTreeMap<String, Vec<LabeledTweet>> = BTreeMap::new();
    for tweet in tweets {
        groups
            .entry(tweet.language.clone())
            .or_default()
            .push(LabeledTweet::unlabeled(tweet.clone()));
    }
    groups
        .into_iter()
        .map(|(lang, items)| {
            let corpus = Corpus {
                name: format!("tweets.{lang}"),
                language: lang.clone(),
                items,
            };
            (lang, corpus)
        })
        .collect()
}

fn as_id(value: &Value) -> Option<String> {
    match value {
        Value::String(s) if !s.is_empty() => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn user_id(user: &Value) -> Option<String> {
    user.get("id_str")
        .and_then(as_id)
        .or_else(|| user.get("id").and_then(as_id))
}

/// Parses one line of a Twitter-style dump:
/// `{id, user: {id}, text, created_at?, lang?, retweeted_status?: {user: {id}}}`.
/// `id_str`, `full_text` and `quoted_status` are accepted as well.
pub fn parse_raw_tweet(line: &str) -> Result<Tweet, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let id = value
        .get("id_str")
        .and_then(as_id)
        .or_else(|| value.get("id").and_then(as_id))
        .ok_or("missing id")?;
    let author = value
        .get("user")
        .and_then(user_id)
        .ok_or_else(|| format!("tweet {id}: missing user.id"))?;
    let text = value
        .get("full_text")
        .or_else(|| value.get("text"))
        .and_then(Value::as_str)
        .ok_or_else(|| format!("tweet {id}: missing text"))?;
    let language = value
        .get("lang")
        .and_then(Value::as_str)
        .unwrap_or("und")
        .to_string();
    let mut tweet = Tweet::new(id, author, language, text);
    tweet.created_at = value
        .get("created_at")
        .and_then(Value::as_str)
        .map(str::to_string);
    tweet.retweet_of_author = ["retweeted_status", "quoted_status"]
        .iter()
        .filter_map(|k| value.get(*k))
        .find_map(|v| v.get("user").and_then(user_id));
    Ok(tweet)
}

/// Reads a line-delimited JSON dump; unparsable lines are reported, not dropped silently.
pub fn read_raw_jsonl(reader: impl BufRead) -> Result<(Vec<Tweet>, Vec<RowError>), IngestError> {
    let mut tweets = Vec::new();
    let mut errors = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_raw_tweet(&line) {
            Ok(t) => tweets.push(t),
            Err(reason) => errors.push(RowError {
                line: idx + 1,
                reason,
            }),
        }
    }
    Ok((tweets, errors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tweets(texts: &[&str]) -> Vec<Tweet> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Tweet::new(i.to_string(), "u", "es", *t))
            .collect()
    }

    #[test]
    fn drops_duplicates_and_short() {
        let (kept, report) =
            dedup_and_filter(tweets(&["hola mundo feliz", "hola mundo feliz", "hola"]), 3).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(report.dropped_duplicates, 1);
        assert_eq!(report.dropped_short, 1);
        assert_eq!(report.input_count, 3);
        assert!(report.is_consistent());
    }

    #[test]
    fn empty_input_gives_zero_report() {
        let (kept, report) = dedup_and_filter(vec![], 3).unwrap();
        assert!(kept.is_empty());
        assert_eq!(report, IngestReport::default());
    }

    #[test]
    fn exactly_min_words_is_kept() {
        let (kept, _) = dedup_and_filter(tweets(&["a b c"]), 3).unwrap();
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn urls_do_not_count_and_do_not_distinguish() {
        let (kept, report) = dedup_and_filter(
            tweets(&[
                "Visca Catalunya lliure https://t.co/AAA",
                "visca  catalunya LLIURE https://t.co/BBB",
                "dos paraules https://t.co/CCC",
            ]),
            3,
        )
        .unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(report.dropped_duplicates, 1);
        assert_eq!(report.dropped_short, 1);
    }

    #[test]
    fn zero_min_words_rejected() {
        assert!(dedup_and_filter(vec![], 0).is_err());
    }

    #[test]
    fn parses_twitter_json() {
        let line = r#"{"id": 1234567890123456789, "id_str": "1234567890123456789", "text": "RT @bob: hola", "lang": "es", "created_at": "Mon Oct 02 10:00:00 +0000 2017", "user": {"id": 42}, "retweeted_status": {"user": {"id_str": "7"}}}"#;
        let t = parse_raw_tweet(line).unwrap();
        assert_eq!(t.id, "1234567890123456789");
        assert_eq!(t.author_id, "42");
        assert_eq!(t.language, "es");
        assert_eq!(t.retweet_of_author.as_deref(), Some("7"));
        assert!(parse_raw_tweet(r#"{"text": "x"}"#).is_err());
    }

    #[test]
    fn jsonl_errors_are_reported() {
        let data = "{\"id\":\"1\",\"user\":{\"id\":\"a\"},\"text\":\"hola que tal\"}\nnot json\n";
        let (tweets, errors) = read_raw_jsonl(data.as_bytes()).unwrap();
        assert_eq!(tweets.len(), 1);
        assert_eq!(tweets[0].language, "und");
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].line, 2);
    }

    #[test]
    fn split_by_language_groups() {
        let mut ts = tweets(&["uno dos tres", "one two three"]);
        ts[1].language = "en".into();
        let groups = split_by_language(&ts);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups["en"].len(), 1);
        assert!(groups["es"].validate().is_ok());
    }
}
