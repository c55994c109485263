//! Small text normalization primitives shared by several stages.

use std::sync::LazyLock;

use regex::Regex;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Scheme-based URLs plus bare `t.co` shortener links.
pub static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bhttps?://\S+|\bt\.co/\S+").unwrap());

/// Lowercase and strip diacritics (NFD, drop combining marks, recompose).
///
/// `"CataluñaesEspaña"` becomes `"catalunaesespana"`.
pub fn fold(text: &str) -> String {
    strip_diacritics(&text.to_lowercase())
}

pub fn strip_diacritics(text: &str) -> String {
    text.nfd().filter(|c| !is_combining_mark(*c)).nfc().collect()
}

pub fn strip_urls(text: &str) -> String {
    URL_RE.replace_all(text, " ").into_owned()
}

/// Whitespace-separated tokens after URL removal. Hashtags and mentions count as words.
pub fn word_count(text: &str) -> usize {
    strip_urls(text).split_whitespace().count()
}

pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
