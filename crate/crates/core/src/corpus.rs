//! Domain types shared by every stage, plus the TSV corpus format.
//!
//! Corpora are stored as UTF-8 TSV with one record per line. Which column holds
//! which field is described by a [`ColumnSchema`]; tabs, newlines and backslashes
//! inside text are written as `\t`, `\n` and `\\`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("duplicate ids: {}", .0.join(", "))]
    DuplicateIds(Vec<String>),
    #[error("item {0} has no label")]
    Unlabeled(String),
    #[error("item {id} has language {found}, corpus language is {expected}")]
    LanguageMismatch {
        id: String,
        expected: String,
        found: String,
    },
    #[error("item {0} has empty text")]
    EmptyText(String),
    #[error("unknown stance label {0:?}")]
    UnknownLabel(String),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// Stance toward the target. Variant order is the tie-break order used
/// everywhere: AGAINST, FAVOR, NONE.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum StanceLabel {
    Against,
    Favor,
    None,
}

impl StanceLabel {
    pub const ALL: [StanceLabel; 3] = [StanceLabel::Against, StanceLabel::Favor, StanceLabel::None];

    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Against => "AGAINST",
            StanceLabel::Favor => "FAVOR",
            StanceLabel::None => "NONE",
        }
    }

    /// Position in [`StanceLabel::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StanceLabel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AGAINST" => Ok(StanceLabel::Against),
            "FAVOR" => Ok(StanceLabel::Favor),
            "NONE" => Ok(StanceLabel::None),
            _ => Err(CorpusError::UnknownLabel(s.to_string())),
        }
    }
}

/// Maps foreign label names onto stances (e.g. `NEUTRAL` in TW-1O files).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelAliases(pub BTreeMap<String, StanceLabel>);

impl Default for LabelAliases {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        map.insert("NEUTRAL".to_string(), StanceLabel::None);
        LabelAliases(map)
    }
}

impl LabelAliases {
    pub fn resolve(&self, raw: &str) -> Option<StanceLabel> {
        raw.parse()
            .ok()
            .or_else(|| self.0.get(&raw.trim().to_ascii_uppercase()).copied())
    }
}

/// One message. Ids are opaque strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub author_id: String,
    pub language: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
    /// Author of the retweeted or quoted message, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweet_of_author: Option<String>,
    /// Stance target for multi-target benchmarks such as SemEval 2016.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

impl Tweet {
    pub fn new(
        id: impl Into<String>,
        author_id: impl Into<String>,
        language: impl Into<String>,
        text: impl Into<String>,
    ) -> Self {
        Tweet {
            id: id.into(),
            author_id: author_id.into(),
            language: language.into(),
            text: text.into(),
            created_at: None,
            retweet_of_author: None,
            target: None,
        }
    }

    pub fn retweeting(mut self, author: impl Into<String>) -> Self {
        self.retweet_of_author = Some(author.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelSource {
    ManualUser,
    PropagatedUser,
    HashtagConfirmed,
    LdaConfirmed,
}

impl LabelSource {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelSource::ManualUser => "manual-user",
            LabelSource::PropagatedUser => "propagated-user",
            LabelSource::HashtagConfirmed => "hashtag-confirmed",
            LabelSource::LdaConfirmed => "lda-confirmed",
        }
    }
}

impl FromStr for LabelSource {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "manual-user" => Ok(LabelSource::ManualUser),
            "propagated-user" => Ok(LabelSource::PropagatedUser),
            "hashtag-confirmed" => Ok(LabelSource::HashtagConfirmed),
            "lda-confirmed" => Ok(LabelSource::LdaConfirmed),
            other => Err(CorpusError::Schema(format!("unknown label source {other:?}"))),
        }
    }
}

/// A tweet with its stance. Raw corpora carry items without a label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledTweet {
    pub tweet: Tweet,
    pub label: Option<StanceLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_source: Option<LabelSource>,
}

impl LabeledTweet {
    pub fn new(tweet: Tweet, label: StanceLabel, source: LabelSource) -> Self {
        LabeledTweet {
            tweet,
            label: Some(label),
            label_source: Some(source),
        }
    }

    pub fn unlabeled(tweet: Tweet) -> Self {
        LabeledTweet {
            tweet,
            label: None,
            label_source: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.tweet.id
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    SeedManual,
    Propagated,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::SeedManual => "seed-manual",
            Provenance::Propagated => "propagated",
        }
    }
}

/// Stance assigned to an account. `hop == 0` exactly for manual seeds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountLabel {
    pub author_id: String,
    pub label: StanceLabel,
    pub provenance: Provenance,
    pub hop: u32,
}

impl AccountLabel {
    pub fn seed(author_id: impl Into<String>, label: StanceLabel) -> Self {
        AccountLabel {
            author_id: author_id.into(),
            label,
            provenance: Provenance::SeedManual,
            hop: 0,
        }
    }

    pub fn propagated(author_id: impl Into<String>, label: StanceLabel, hop: u32) -> Self {
        assert!(hop >= 1, "propagated labels have hop >= 1");
        AccountLabel {
            author_id: author_id.into(),
            label,
            provenance: Provenance::Propagated,
            hop,
        }
    }
}

/// Per-label counts. Always carries all three labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub counts: BTreeMap<StanceLabel, usize>,
    pub total: usize,
}

impl Default for ClassDistribution {
    fn default() -> Self {
        ClassDistribution::from_counts([0, 0, 0])
    }
}

impl ClassDistribution {
    /// Counts in AGAINST, FAVOR, NONE order.
    pub fn from_counts(counts: [usize; 3]) -> Self {
        ClassDistribution {
            counts: StanceLabel::ALL.into_iter().zip(counts).collect(),
            total: counts.iter().sum(),
        }
    }

    pub fn from_labels(labels: impl IntoIterator<Item = StanceLabel>) -> Self {
        let mut dist = ClassDistribution::default();
        for label in labels {
            dist.add(label);
        }
        dist
    }

    pub fn add(&mut self, label: StanceLabel) {
        *self.counts.entry(label).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn get(&self, label: StanceLabel) -> usize {
        self.counts.get(&label).copied().unwrap_or(0)
    }

    pub fn as_array(&self) -> [usize; 3] {
        StanceLabel::ALL.map(|l| self.get(l))
    }

    /// Share of `label`; zero for an empty distribution.
    pub fn proportion(&self, label: StanceLabel) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.get(label) as f64 / self.total as f64
        }
    }
}

impl fmt::Display for ClassDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AGAINST={} FAVOR={} NONE={} (total {})",
            self.get(StanceLabel::Against),
            self.get(StanceLabel::Favor),
            self.get(StanceLabel::None),
            self.total
        )
    }
}

/// Ordered collection of (optionally labeled) tweets with unique ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    /// ISO-639-1 code, `"und"`, or `"mixed"`.
    pub language: String,
    pub items: Vec<LabeledTweet>,
}

impl Corpus {
    pub fn new(
        name: impl Into<String>,
        language: impl Into<String>,
        items: Vec<LabeledTweet>,
    ) -> Result<Self> {
        let corpus = Corpus {
            name: name.into(),
            language: language.into(),
            items,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.items.len());
        let mut dups = BTreeSet::new();
        for item in &self.items {
            if !seen.insert(item.id()) {
                dups.insert(item.id().to_string());
            }
        }
        if !dups.is_empty() {
            return Err(CorpusError::DuplicateIds(dups.into_iter().collect()));
        }
        for item in &self.items {
            if item.tweet.text.trim().is_empty() {
                return Err(CorpusError::EmptyText(item.id().to_string()));
            }
            if self.language != "mixed" && item.tweet.language != self.language {
                return Err(CorpusError::LanguageMismatch {
                    id: item.id().to_string(),
                    expected: self.language.clone(),
                    found: item.tweet.language.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledTweet> {
        self.items.iter()
    }

    /// Same name and language, items restricted to those matching `keep`.
    pub fn subset(&self, mut keep: impl FnMut(&LabeledTweet) -> bool) -> Corpus {
        Corpus {
            name: self.name.clone(),
            language: self.language.clone(),
            items: self.items.iter().filter(|i| keep(i)).cloned().collect(),
        }
    }

    pub fn with_items(&self, name: impl Into<String>, items: Vec<LabeledTweet>) -> Corpus {
        Corpus {
            name: name.into(),
            language: self.language.clone(),
            items,
        }
    }

    pub fn authors(&self) -> BTreeSet<&str> {
        self.items.iter().map(|i| i.tweet.author_id.as_str()).collect()
    }

    pub fn labels(&self) -> Result<Vec<StanceLabel>> {
        self.items
            .iter()
            .map(|i| i.label.ok_or_else(|| CorpusError::Unlabeled(i.id().to_string())))
            .collect()
    }
}

/// Label counts of a fully labeled corpus.
pub fn distribution(corpus: &Corpus) -> Result<ClassDistribution> {
    Ok(ClassDistribution::from_labels(corpus.labels()?))
}

/// Field a TSV column maps to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Id,
    Author,
    Language,
    Label,
    LabelSource,
    Target,
    CreatedAt,
    RetweetOf,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// `None` marks a column that is read past and written empty.
    pub field: Option<Field>,
}

/// Which column carries which field.
///
/// With a header, columns are located by case-insensitive name and extra header
/// columns are ignored; without one, columns are positional.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub columns: Vec<Column>,
    pub has_header: bool,
    /// Language assigned when the file has no language column.
    pub default_language: String,
    #[serde(default)]
    pub aliases: LabelAliases,
}

impl ColumnSchema {
    pub fn new(columns: &[(&str, Field)]) -> Self {
        ColumnSchema {
            columns: columns
                .iter()
                .map(|(name, field)| Column {
                    name: name.to_string(),
                    field: Some(*field),
                })
                .collect(),
            has_header: true,
            default_language: "und".to_string(),
            aliases: LabelAliases::default(),
        }
    }

    pub fn language(mut self, code: impl Into<String>) -> Self {
        self.default_language = code.into();
        self
    }

    pub fn headerless(mut self) -> Self {
        self.has_header = false;
        self
    }

    /// Layout written by this crate for every intermediate artifact.
    pub fn canonical() -> Self {
        ColumnSchema::new(&[
            ("id", Field::Id),
            ("author_id", Field::Author),
            ("language", Field::Language),
            ("label", Field::Label),
            ("label_source", Field::LabelSource),
            ("retweet_of_author", Field::RetweetOf),
            ("created_at", Field::CreatedAt),
            ("text", Field::Text),
        ])
    }

    /// Released CIC / CIC-Random TSVs: `id`, `TWEET`, `LABEL`.
    pub fn cic(language: &str) -> Self {
        ColumnSchema::new(&[("id", Field::Id), ("TWEET", Field::Text), ("LABEL", Field::Label)])
            .language(language)
    }

    /// SemEval 2016 task 6: `ID<TAB>Target<TAB>Tweet<TAB>Stance`.
    pub fn semeval() -> Self {
        ColumnSchema::new(&[
            ("ID", Field::Id),
            ("Target", Field::Target),
            ("Tweet", Field::Text),
            ("Stance", Field::Label),
        ])
        .language("en")
    }

    fn has(&self, field: Field) -> bool {
        self.columns.iter().any(|c| c.field == Some(field))
    }
}

/// A row that could not be turned into a tweet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    /// 1-based line number in the file.
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub rejected: Vec<RowError>,
}

pub fn escape_field(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_field(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    let mut chars = value.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn load_corpus(path: impl AsRef<Path>, schema: &ColumnSchema) -> Result<LoadedCorpus> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(io_err(path))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_corpus(BufReader::new(file), &name, schema).map_err(|e| match e {
        CorpusError::Io { source, .. } => io_err(path)(source),
        other => other,
    })
}

pub fn read_corpus(reader: impl BufRead, name: &str, schema: &ColumnSchema) -> Result<LoadedCorpus> {
    if !schema.has(Field::Id) || !schema.has(Field::Text) {
        return Err(CorpusError::Schema("schema must map an id and a text column".into()));
    }
    let mut lines = reader.lines().enumerate();
    // positions[field] = column index in the file
    let mut positions: Vec<(Field, usize)> = Vec::new();
    if schema.has_header {
        let header = match lines.next() {
            Some((_, line)) => line.map_err(io_err(Path::new(name)))?,
            None => String::new(),
        };
        let header = header.trim_end_matches('\r');
        if header.is_empty() {
            return Err(CorpusError::Schema("missing header line".into()));
        }
        let names: Vec<&str> = header.split('\t').map(str::trim).collect();
        for column in &schema.columns {
            let Some(field) = column.field else { continue };
            let pos = names
                .iter()
                .position(|n| n.eq_ignore_ascii_case(&column.name))
                .ok_or_else(|| {
                    CorpusError::Schema(format!(
                        "header {:?} lacks column {:?}",
                        names.join(","),
                        column.name
                    ))
                })?;
            positions.push((field, pos));
        }
    } else {
        for (pos, column) in schema.columns.iter().enumerate() {
            if let Some(field) = column.field {
                positions.push((field, pos));
            }
        }
    }

    let mut items = Vec::new();
    let mut rejected = Vec::new();
    let mut seen = HashSet::new();
    let mut dups = BTreeSet::new();
    let mut languages = BTreeSet::new();
    for (idx, line) in lines {
        let line = line.map_err(io_err(Path::new(name)))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        match parse_row(&cells, &positions, schema) {
            Ok(item) => {
                if !seen.insert(item.tweet.id.clone()) {
                    dups.insert(item.tweet.id.clone());
                }
                languages.insert(item.tweet.language.clone());
                items.push(item);
            }
            Err(reason) => rejected.push(RowError {
                line: idx + 1,
                reason,
            }),
        }
    }
    if !dups.is_empty() {
        return Err(CorpusError::DuplicateIds(dups.into_iter().collect()));
    }
    let language = if schema.has(Field::Language) {
        match languages.len() {
            0 => schema.default_language.clone(),
            1 => languages.into_iter().next().unwrap(),
            _ => "mixed".to_string(),
        }
    } else {
        schema.default_language.clone()
    };
    Ok(LoadedCorpus {
        corpus: Corpus {
            name: name.to_string(),
            language,
            items,
        },
        rejected,
    })
}

fn parse_row(
    cells: &[&str],
    positions: &[(Field, usize)],
    schema: &ColumnSchema,
) -> std::result::Result<LabeledTweet, String> {
    let mut tweet = Tweet::new("", "", schema.default_language.clone(), "");
    let mut label = None;
    let mut source = None;
    for &(field, pos) in positions {
        let Some(raw) = cells.get(pos) else {
            return Err(format!("missing column {pos} ({field:?})"));
        };
        let value = unescape_field(raw);
        let optional = || (!value.is_empty()).then(|| value.clone());
        match field {
            Field::Id => tweet.id = value.trim().to_string(),
            Field::Author => tweet.author_id = value.trim().to_string(),
            Field::Language => {
                if !value.trim().is_empty() {
                    tweet.language = value.trim().to_string();
                }
            }
            Field::Label => {
                if !value.trim().is_empty() {
                    label = Some(
                        schema
                            .aliases
                            .resolve(&value)
                            .ok_or_else(|| format!("unknown label {value:?}"))?,
                    );
                }
            }
            Field::LabelSource => {
                if !value.trim().is_empty() {
                    source = Some(value.parse::<LabelSource>().map_err(|e| e.to_string())?);
                }
            }
            Field::Target => tweet.target = optional(),
            Field::CreatedAt => tweet.created_at = optional(),
            Field::RetweetOf => tweet.retweet_of_author = optional(),
            Field::Text => tweet.text = value,
        }
    }
    if tweet.id.is_empty() {
        return Err("empty id".into());
    }
    if tweet.text.trim().is_empty() {
        return Err(format!("empty text for id {}", tweet.id));
    }
    Ok(LabeledTweet {
        tweet,
        label,
        label_source: source,
    })
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>, schema: &ColumnSchema) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut writer = BufWriter::new(file);
    write_corpus(&mut writer, corpus, schema).map_err(io_err(path))?;
    writer.flush().map_err(io_err(path))
}

pub fn write_corpus(out: &mut impl Write, corpus: &Corpus, schema: &ColumnSchema) -> io::Result<()> {
    if schema.has_header {
        let header: Vec<&str> = schema.columns.iter().map(|c| c.name.as_str()).collect();
        writeln!(out, "{}", header.join("\t"))?;
    }
    for item in &corpus.items {
        let cells: Vec<String> = schema
            .columns
            .iter()
            .map(|c| {
                let t = &item.tweet;
                let value = match c.field {
                    None => "",
                    Some(Field::Id) => &t.id,
                    Some(Field::Author) => &t.author_id,
                    Some(Field::Language) => &t.language,
                    Some(Field::Label) => item.label.map(StanceLabel::as_str).unwrap_or(""),
                    Some(Field::LabelSource) => {
                        item.label_source.map(LabelSource::as_str).unwrap_or("")
                    }
                    Some(Field::Target) => t.target.as_deref().unwrap_or(""),
                    Some(Field::CreatedAt) => t.created_at.as_deref().unwrap_or(""),
                    Some(Field::RetweetOf) => t.retweet_of_author.as_deref().unwrap_or(""),
                    Some(Field::Text) => &t.text,
                };
                escape_field(value)
            })
            .collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(text: &str, schema: &ColumnSchema) -> Result<LoadedCorpus> {
        read_corpus(text.as_bytes(), "fixture", schema)
    }

    #[test]
    fn label_serializes_uppercase() {
        assert_eq!(serde_json::to_string(&StanceLabel::Favor).unwrap(), "\"FAVOR\"");
        assert_eq!("none".parse::<StanceLabel>().unwrap(), StanceLabel::None);
        assert!("maybe".parse::<StanceLabel>().is_err());
    }

    #[test]
    fn neutral_aliases_to_none() {
        let aliases = LabelAliases::default();
        assert_eq!(aliases.resolve("NEUTRAL"), Some(StanceLabel::None));
        assert_eq!(aliases.resolve("neutral"), Some(StanceLabel::None));
        assert_eq!(aliases.resolve("AGAINST"), Some(StanceLabel::Against));
        assert_eq!(aliases.resolve("other"), None);
    }

    #[test]
    fn header_only_file_is_empty_corpus() {
        let loaded = load_str("id\tTWEET\tLABEL\n", &ColumnSchema::cic("ca")).unwrap();
        assert!(loaded.corpus.is_empty());
        assert!(loaded.rejected.is_empty());
    }

    #[test]
    fn row_missing_text_is_reported_not_dropped() {
        let text = "id\tTWEET\tLABEL\n1\tbon dia\tFAVOR\n2\n3\tadeu\tAGAINST\n";
        let schema = ColumnSchema::new(&[("id", Field::Id), ("TWEET", Field::Text), ("LABEL", Field::Label)]);
        let loaded = load_str(text, &schema).unwrap();
        assert_eq!(loaded.corpus.len(), 2);
        assert_eq!(loaded.rejected.len(), 1);
        assert_eq!(loaded.rejected[0].line, 3);
    }

    #[test]
    fn malformed_header_is_schema_error() {
        let err = load_str("identifier\ttext\n1\thola\n", &ColumnSchema::cic("es")).unwrap_err();
        assert!(matches!(err, CorpusError::Schema(_)));
    }

    #[test]
    fn duplicate_ids_listed() {
        let text = "id\tTWEET\tLABEL\n7\ta\tFAVOR\n7\tb\tFAVOR\n8\tc\tNONE\n8\td\tNONE\n";
        match load_str(text, &ColumnSchema::cic("es")).unwrap_err() {
            CorpusError::DuplicateIds(ids) => assert_eq!(ids, vec!["7", "8"]),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn header_columns_located_by_name() {
        let text = "LABEL\tid\textra\tTWEET\nNEUTRAL\t1\tx\thola que tal\n";
        let loaded = load_str(text, &ColumnSchema::cic("es")).unwrap();
        let item = &loaded.corpus.items[0];
        assert_eq!(item.label, Some(StanceLabel::None));
        assert_eq!(item.tweet.text, "hola que tal");
        assert_eq!(loaded.corpus.language, "es");
    }

    #[test]
    fn large_ids_stay_strings() {
        let text = "id\tTWEET\tLABEL\n1048576000123456789012\thola\tFAVOR\n";
        let loaded = load_str(text, &ColumnSchema::cic("es")).unwrap();
        assert_eq!(loaded.corpus.items[0].id(), "1048576000123456789012");
    }

    #[test]
    fn distribution_counts_and_unlabeled_error() {
        let mut items = Vec::new();
        for (i, label) in StanceLabel::ALL.iter().cycle().take(9).enumerate() {
            items.push(LabeledTweet::new(
                Tweet::new(i.to_string(), "u", "es", "text"),
                *label,
                LabelSource::ManualUser,
            ));
        }
        let corpus = Corpus::new("c", "es", items.clone()).unwrap();
        assert_eq!(distribution(&corpus).unwrap().as_array(), [3, 3, 3]);

        let single = Corpus::new("c", "es", vec![items[1].clone()]).unwrap();
        let dist = distribution(&single).unwrap();
        assert_eq!(dist.as_array(), [0, 1, 0]);
        assert_eq!(dist.total, 1);

        items.push(LabeledTweet::unlabeled(Tweet::new("x9", "u", "es", "text")));
        let corpus = Corpus::new("c", "es", items).unwrap();
        match distribution(&corpus).unwrap_err() {
            CorpusError::Unlabeled(id) => assert_eq!(id, "x9"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn corpus_rejects_language_mismatch() {
        let items = vec![LabeledTweet::unlabeled(Tweet::new("1", "u", "ca", "bon dia"))];
        assert!(Corpus::new("c", "es", items.clone()).is_err());
        assert!(Corpus::new("c", "mixed", items).is_ok());
    }

    #[test]
    fn escaping_handles_tabs_newlines_backslashes() {
        let raw = "a\tb\nc\\d\\t";
        assert_eq!(unescape_field(&escape_field(raw)), raw);
        assert!(!escape_field(raw).contains('\t'));
    }

    #[test]
    fn json_mirror_uses_field_names() {
        let t = LabeledTweet::new(Tweet::new("1", "u", "es", "hola"), StanceLabel::Favor, LabelSource::PropagatedUser);
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["label"], "FAVOR");
        assert_eq!(v["label_source"], "propagated-user");
        assert_eq!(v["tweet"]["author_id"], "u");
        let acc = serde_json::to_value(AccountLabel::seed("a", StanceLabel::None)).unwrap();
        assert_eq!(acc["provenance"], "seed-manual");
        assert_eq!(acc["hop"], 0);
    }
}
