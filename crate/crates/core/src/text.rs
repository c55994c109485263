//! The four preprocessing recipes (Types A to D) and their primitives.
//!
//! | Type | Recipe |
//! |------|--------|
//! | A | no URLs, RT, mentions, emojis, digits or punctuation (`#` kept); repeats squeezed; casefolded and diacritic-free; stopwords and tokens under 3 chars dropped (hashtags exempt); lemmatized |
//! | B | as A but diacritics, stopwords and short words kept |
//! | C | no URLs; `@`/`#` characters and punctuation removed; case kept |
//! | D | no URLs; `@`/`#` characters removed; case and punctuation kept |

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::{fold, strip_diacritics, strip_urls};

static RT_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\bRT\b").unwrap());
static MENTION_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").unwrap());

/// Minimum length of a non-hashtag token kept by Type A.
pub const MIN_TOKEN_CHARS: usize = 3;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("no preprocessing resources for language {0:?}")]
    UnknownLanguage(String),
    #[error("unknown preprocessing type {0:?} (expected A, B, C or D)")]
    UnknownType(String),
    #[error("{path}:{line}: {reason}")]
    InvalidResource {
        path: String,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PreprocessType {
    A,
    B,
    C,
    D,
}

impl PreprocessType {
    pub const ALL: [PreprocessType; 4] = [PreprocessType::A, PreprocessType::B, PreprocessType::C, PreprocessType::D];

    /// Whether the recipe needs stopwords and lemmas.
    pub fn needs_resources(self) -> bool {
        matches!(self, PreprocessType::A | PreprocessType::B)
    }
}

impl fmt::Display for PreprocessType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for PreprocessType {
    type Err = TextError;

    fn from_str(s: &str) -> Result<Self, TextError> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(PreprocessType::A),
            "B" => Ok(PreprocessType::B),
            "C" => Ok(PreprocessType::C),
            "D" => Ok(PreprocessType::D),
            _ => Err(TextError::UnknownType(s.to_string())),
        }
    }
}

/// Stopwords and lemma dictionary for one language.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LanguageResources {
    /// Folded (lowercase, diacritic-free).
    stopwords: HashSet<String>,
    /// Casefolded form → lemma, first entry wins.
    lemmas: HashMap<String, String>,
    /// Folded form → folded lemma, first entry wins.
    folded_lemmas: HashMap<String, String>,
}

impl LanguageResources {
    pub fn new<S: AsRef<str>>(stopwords: impl IntoIterator<Item = S>, lemmas: impl IntoIterator<Item = (S, S)>) -> Self {
        let mut res = LanguageResources::default();
        for w in stopwords {
            res.add_stopword(w.as_ref());
        }
        for (lemma, form) in lemmas {
            res.add_lemma(lemma.as_ref(), form.as_ref());
        }
        res
    }

    pub fn add_stopword(&mut self, word: &str) {
        let w = fold(word.trim());
        if !w.is_empty() {
            self.stopwords.insert(w);
        }
    }

    /// Ignored when `form` is already mapped.
    pub fn add_lemma(&mut self, lemma: &str, form: &str) {
        let (lemma, form) = (lemma.trim().to_lowercase(), form.trim().to_lowercase());
        self.folded_lemmas
            .entry(strip_diacritics(&form))
            .or_insert_with(|| strip_diacritics(&lemma));
        self.lemmas.entry(form).or_insert(lemma);
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(&fold(token))
    }

    pub fn lemma_map(&self) -> &HashMap<String, String> {
        &self.lemmas
    }

    /// One word per line; blank lines and `#` comments ignored.
    pub fn parse_stopwords(&mut self, text: &str) {
        for line in text.lines().map(str::trim) {
            if !line.is_empty() && !line.starts_with('#') {
                self.add_stopword(line);
            }
        }
    }

    /// `lemma<TAB>form` per line; blank lines and `#` comments ignored.
    pub fn parse_lemmas(&mut self, text: &str, source: &str) -> Result<(), TextError> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (lemma, form) = line.split_once('\t').ok_or_else(|| TextError::InvalidResource {
                path: source.to_string(),
                line: idx + 1,
                reason: "expected lemma<TAB>form".to_string(),
            })?;
            self.add_lemma(lemma, form);
        }
        Ok(())
    }
}

/// Per-language resources for Types A and B.
#[derive(Clone, Debug, Default)]
pub struct PreprocessResources {
    languages: BTreeMap<String, LanguageResources>,
}

impl PreprocessResources {
    pub fn insert(&mut self, language: impl Into<String>, resources: LanguageResources) {
        self.languages.insert(language.into(), resources);
    }

    pub fn get(&self, language: &str) -> Option<&LanguageResources> {
        self.languages.get(language)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.languages.keys().map(String::as_str)
    }

    /// Miniature Spanish and Catalan resources bundled with the crate.
    pub fn bundled() -> Self {
        let mut out = PreprocessResources::default();
        for (lang, stop, lemmas) in [
            (
                "es",
                include_str!("../fixtures/text/es.stopwords.txt"),
                include_str!("../fixtures/text/es.lemmas.tsv"),
            ),
            (
                "ca",
                include_str!("../fixtures/text/ca.stopwords.txt"),
                include_str!("../fixtures/text/ca.lemmas.tsv"),
            ),
        ] {
            let mut res = LanguageResources::default();
            res.parse_stopwords(stop);
            res.parse_lemmas(lemmas, lang).expect("bundled lemma file is well formed");
            out.insert(lang, res);
        }
        out
    }

    /// Reads `<lang>.stopwords.txt` and `<lang>.lemmas.tsv` for every language
    /// found in `dir`. Either file may be missing.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, TextError> {
        let dir = dir.as_ref();
        let mut langs: BTreeMap<String, LanguageResources> = BTreeMap::new();
        let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<Result<_, _>>()?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let name = entry.file_name().to_string_lossy().into_owned();
            let path = entry.path();
            if let Some(lang) = name.strip_suffix(".stopwords.txt") {
                langs
                    .entry(lang.to_string())
                    .or_default()
                    .parse_stopwords(&fs::read_to_string(&path)?);
            } else if let Some(lang) = name.strip_suffix(".lemmas.tsv") {
                langs
                    .entry(lang.to_string())
                    .or_default()
                    .parse_lemmas(&fs::read_to_string(&path)?, &path.display().to_string())?;
            }
        }
        Ok(PreprocessResources { languages: langs })
    }
}

/// Dictionary lemma of `token`, or the token itself.
pub fn lemmatize<'a>(token: &'a str, lemma_map: &'a HashMap<String, String>) -> &'a str {
    lemma_map.get(token).map(String::as_str).unwrap_or(token)
}

fn squeeze_by<K: PartialEq>(text: &str, key: impl Fn(char) -> K) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let k = key(chars[i]);
        let mut j = i + 1;
        while j < chars.len() && key(chars[j]) == k {
            j += 1;
        }
        let run = if j - i >= 3 { &chars[i..i + 1] } else { &chars[i..j] };
        out.extend(run);
        i = j;
    }
    out
}

/// Replaces every run of three or more identical characters with one; runs of two stay.
pub fn squeeze_repeats(text: &str) -> String {
    squeeze_by(text, |c| c)
}

fn fold_char(c: char) -> String {
    fold(c.encode_utf8(&mut [0; 4]))
}

/// Code points treated as emoji: pictographs, emoticons, transport and map symbols,
/// regional-indicator flags, skin-tone modifiers, dingbats, misc symbols and the
/// joiners/selectors used to compose emoji sequences.
pub fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF // mahjong .. symbols & pictographs ext-A, incl. flags and modifiers
        | 0x2300..=0x23FF // misc technical (watch, hourglass, ...)
        | 0x2600..=0x27BF // misc symbols, dingbats
        | 0x2B00..=0x2BFF // arrows, stars
        | 0x3030 | 0x303D | 0x3297 | 0x3299
        | 0x200D          // zero-width joiner
        | 0x20E3          // combining keycap
        | 0xFE00..=0xFE0F // variation selectors
        | 0xE0020..=0xE007F // tag characters
    )
}

/// Punctuation here means any character that is neither alphanumeric nor whitespace.
fn is_punctuation(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Trims the ends and turns tabs and newlines into spaces; internal runs of
/// spaces are preserved.
fn normalize_spaces(text: &str) -> String {
    text.trim()
        .chars()
        .map(|c| if c.is_whitespace() { ' ' } else { c })
        .collect()
}

/// Shared head of Types A and B: URLs, RT, mentions, emojis, digits and
/// punctuation other than `#` removed.
fn clean_social(text: &str) -> String {
    let text = strip_urls(text);
    let text = RT_RE.replace_all(&text, " ");
    let text = MENTION_RE.replace_all(&text, " ");
    text.chars()
        .filter_map(|c| {
            if is_emoji(c) {
                Some(' ')
            } else if c.is_numeric() || (is_punctuation(c) && c != '#') {
                None
            } else {
                Some(c)
            }
        })
        .collect()
}

fn is_hashtag(token: &str) -> bool {
    token.starts_with('#')
}

pub fn preprocess(
    text: &str,
    kind: PreprocessType,
    resources: &PreprocessResources,
    language: &str,
) -> Result<String, TextError> {
    let res = if kind.needs_resources() {
        Some(
            resources
                .get(language)
                .ok_or_else(|| TextError::UnknownLanguage(language.to_string()))?,
        )
    } else {
        None
    };
    Ok(match (kind, res) {
        (PreprocessType::A, Some(res)) => {
            let cleaned = squeeze_by(&clean_social(text), fold_char);
            fold(&cleaned)
                .split_whitespace()
                .filter(|t| *t != "#")
                .filter(|t| !res.stopwords.contains(*t))
                .filter(|t| is_hashtag(t) || t.chars().count() >= MIN_TOKEN_CHARS)
                .map(|t| lemmatize(t, &res.folded_lemmas))
                .collect::<Vec<_>>()
                .join(" ")
        }
        (PreprocessType::B, Some(res)) => {
            let cleaned = squeeze_by(&clean_social(text), |c| c.to_lowercase().collect::<String>());
            cleaned
                .to_lowercase()
                .split_whitespace()
                .filter(|t| *t != "#")
                .map(|t| lemmatize(t, &res.lemmas))
                .collect::<Vec<_>>()
                .join(" ")
        }
        (PreprocessType::C, _) => {
            let text: String = strip_urls(text)
                .chars()
                .filter(|&c| c != '@' && c != '#' && !is_punctuation(c))
                .collect();
            normalize_spaces(&text)
        }
        (PreprocessType::D, _) => {
            let text: String = strip_urls(text).chars().filter(|&c| c != '@' && c != '#').collect();
            normalize_spaces(&text)
        }
        _ => unreachable!("resources checked above"),
    })
}

/// Applies [`preprocess`] to every text, failing on the first error.
pub fn preprocess_all<'a>(
    texts: impl IntoIterator<Item = &'a str>,
    kind: PreprocessType,
    resources: &PreprocessResources,
    language: &str,
) -> Result<Vec<String>, TextError> {
    texts
        .into_iter()
        .map(|t| preprocess(t, kind, resources, language))
        .collect()
}
