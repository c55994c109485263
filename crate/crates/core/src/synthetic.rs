//! Generators with planted structure. They double as test oracles: each returns
//! the ground truth it planted next to the data.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::corpus::{AccountLabel, StanceLabel, Tweet};
use crate::propagation::{write_seeds, RetweetGraph};
use crate::topic::TopicLexicon;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedGraphConfig {
    pub nodes_per_community: usize,
    pub retweets_per_node: usize,
    /// Probability that a retweet stays inside the retweeter's community.
    pub within_probability: f64,
    pub seeds_per_community: usize,
    pub seed: u64,
}

impl Default for PlantedGraphConfig {
    fn default() -> Self {
        PlantedGraphConfig {
            nodes_per_community: 100,
            retweets_per_node: 40,
            within_probability: 0.9,
            seeds_per_community: 10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlantedGraph {
    pub graph: RetweetGraph,
    /// FAVOR community `f000..`, AGAINST community `a000..`.
    pub community: BTreeMap<String, StanceLabel>,
    pub seeds: Vec<AccountLabel>,
}

/// Two homophilous communities; every node retweets uniformly chosen members of its
/// own community with probability `within_probability`, otherwise of the other one.
pub fn planted_graph(cfg: &PlantedGraphConfig) -> PlantedGraph {
    let mut rng = crate::seeded_rng(cfg.seed);
    let groups: Vec<(StanceLabel, Vec<String>)> = [(StanceLabel::Favor, 'f'), (StanceLabel::Against, 'a')]
        .into_iter()
        .map(|(l, p)| (l, (0..cfg.nodes_per_community).map(|i| format!("{p}{i:03}")).collect()))
        .collect();
    let mut graph = RetweetGraph::default();
    let mut community = BTreeMap::new();
    for (g, (label, members)) in groups.iter().enumerate() {
        for node in members {
            community.insert(node.clone(), *label);
            graph.nodes.insert(node.clone());
            for _ in 0..cfg.retweets_per_node {
                let pool = if rng.gen_bool(cfg.within_probability) {
                    &groups[g].1
                } else {
                    &groups[1 - g].1
                };
                let target = loop {
                    let t = pool.choose(&mut rng).unwrap();
                    if t != node {
                        break t;
                    }
                };
                graph.add_retweet(node, target);
            }
        }
    }
    let mut seeds = Vec::new();
    for (label, members) in &groups {
        for node in members.choose_multiple(&mut rng, cfg.seeds_per_community) {
            seeds.push(AccountLabel::seed(node.clone(), *label));
        }
    }
    seeds.sort_by(|a, b| a.author_id.cmp(&b.author_id));
    PlantedGraph {
        graph,
        community,
        seeds,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedTopicsConfig {
    pub topics: usize,
    pub words_per_topic: usize,
    pub documents: usize,
    pub document_length: usize,
    pub seed: u64,
}

impl Default for PlantedTopicsConfig {
    fn default() -> Self {
        PlantedTopicsConfig {
            topics: 2,
            words_per_topic: 20,
            documents: 200,
            document_length: 30,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlantedTopics {
    pub documents: Vec<Vec<String>>,
    /// Topic each document was drawn from.
    pub topic_of: Vec<usize>,
    /// Disjoint vocabulary of each topic.
    pub vocabularies: Vec<Vec<String>>,
}

/// Documents drawn uniformly from one of several disjoint vocabularies
/// (topics assigned round-robin).
pub fn planted_topics(cfg: &PlantedTopicsConfig) -> PlantedTopics {
    let mut rng = crate::seeded_rng(cfg.seed);
    let vocabularies: Vec<Vec<String>> = (0..cfg.topics)
        .map(|t| (0..cfg.words_per_topic).map(|w| format!("t{t}w{w:02}")).collect())
        .collect();
    let mut documents = Vec::with_capacity(cfg.documents);
    let mut topic_of = Vec::with_capacity(cfg.documents);
    for d in 0..cfg.documents {
        let t = d % cfg.topics;
        documents.push(
            (0..cfg.document_length)
                .map(|_| vocabularies[t].choose(&mut rng).unwrap().clone())
                .collect(),
        );
        topic_of.push(t);
    }
    PlantedTopics {
        documents,
        topic_of,
        vocabularies,
    }
}

const FUNCTION_WORDS: &[&str] = &["el", "la", "de", "que", "en", "los", "por", "para", "una", "con", "las", "del"];
const TOPIC_WORDS: &[&str] = &["cataluña", "referéndum", "gobierno", "votación", "parlament", "octubre", "generalitat"];
const OFF_TOPIC_WORDS: &[&str] = &[
    "fútbol", "partido", "gol", "lluvia", "playa", "receta", "cocina", "película", "concierto", "verano", "tráfico",
    "mercado",
];
const OFF_TOPIC_TAGS: &[&str] = &["#futbol", "#verano", "#receta"];
const ENGLISH: &[&str] = &[
    "the weather is really nice today in the city",
    "we watched a great movie with friends last night",
    "traffic on the highway was terrible this morning",
];

fn stance_words(label: StanceLabel) -> &'static [&'static str] {
    match label {
        StanceLabel::Favor => &["independencia", "libertad", "democracia", "república", "urnas", "votar", "derechos", "llibertat"],
        StanceLabel::Against => &["unidad", "constitución", "ilegal", "golpe", "legalidad", "españa", "tribunal", "separatistas"],
        StanceLabel::None => &["noticias", "informe", "datos", "análisis", "comparecencia", "agenda", "rueda", "prensa"],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineFixtureConfig {
    pub tweets: usize,
    /// Accounts per stance: AGAINST, FAVOR, NONE.
    pub accounts: [usize; 3],
    pub seeds_per_stance: usize,
    pub within_probability: f64,
    pub seed: u64,
}

impl Default for PipelineFixtureConfig {
    fn default() -> Self {
        PipelineFixtureConfig {
            tweets: 2000,
            accounts: [60, 60, 30],
            seeds_per_stance: 6,
            within_probability: 0.9,
            seed: 2017,
        }
    }
}

/// Raw dump plus curator inputs and the planted truth.
#[derive(Clone, Debug)]
pub struct PipelineFixture {
    pub tweets: Vec<Tweet>,
    pub seeds: Vec<AccountLabel>,
    pub lexicon: TopicLexicon,
    pub stance_of: BTreeMap<String, StanceLabel>,
    /// Ids of original on-topic tweets and retweets of them.
    pub on_topic: BTreeSet<String>,
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    OnTopic,
    OffTopic,
    Retweet,
    Short,
    Duplicate,
    English,
}

fn timestamp(minutes: usize) -> String {
    let (day, rem) = (1 + minutes / 1440, minutes % 1440);
    format!("2017-10-{day:02}T{:02}:{:02}:00Z", rem / 60, rem % 60)
}

/// A Twitter-like dump around a polarized debate: three stance communities that
/// retweet mostly inside their community, on-topic messages (some tagged with a
/// lexicon hashtag, some not), off-topic chatter, English noise, duplicates and
/// too-short messages.
pub fn pipeline_fixture(cfg: &PipelineFixtureConfig) -> PipelineFixture {
    let mut rng = crate::seeded_rng(cfg.seed);
    let mut stance_of = BTreeMap::new();
    let mut members: [Vec<String>; 3] = Default::default();
    let mut next_author = 5000u64;
    for (label, &n) in StanceLabel::ALL.iter().zip(&cfg.accounts) {
        for _ in 0..n {
            let id = next_author.to_string();
            next_author += 7;
            stance_of.insert(id.clone(), *label);
            members[label.index()].push(id);
        }
    }
    let authors: Vec<&String> = stance_of.keys().collect();

    let lexicon = TopicLexicon::new(["1oct", "referendum", "catalunya"], ["consulta ilegal"]).unwrap();
    let tags = ["#1oct", "#Referendum", "#Catalunya"];

    let mut tweets: Vec<Tweet> = Vec::with_capacity(cfg.tweets);
    let mut on_topic = BTreeSet::new();
    // Original on-topic tweets per author, for retweeting.
    let mut originals: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for i in 0..cfg.tweets {
        let id = (1_000_000_000_000_000_000u64 + i as u64 * 13).to_string();
        let author = authors.choose(&mut rng).unwrap().as_str();
        let stance = stance_of[author];
        let roll: f64 = rng.gen();
        let mut kind = match roll {
            r if r < 0.42 => Kind::OnTopic,
            r if r < 0.57 => Kind::OffTopic,
            r if r < 0.92 => Kind::Retweet,
            r if r < 0.95 => Kind::Short,
            r if r < 0.97 => Kind::Duplicate,
            _ => Kind::English,
        };
        let mut retweeted = None;
        if kind == Kind::Retweet {
            let pool = if rng.gen_bool(cfg.within_probability) {
                &members[stance.index()]
            } else {
                let others: Vec<usize> = (0..3).filter(|&l| l != stance.index()).collect();
                &members[*others.choose(&mut rng).unwrap()]
            };
            let candidates: Vec<&String> = pool
                .iter()
                .filter(|a| a.as_str() != author && originals.contains_key(a.as_str()))
                .collect();
            match candidates.choose(&mut rng) {
                Some(a) => retweeted = Some(a.as_str()),
                None => kind = Kind::OnTopic,
            }
        }
        if kind == Kind::Duplicate && originals.is_empty() {
            kind = Kind::OnTopic;
        }
        let (text, lang) = match kind {
            Kind::OnTopic => {
                let mut words: Vec<&str> = Vec::new();
                words.extend(stance_words(stance).choose_multiple(&mut rng, 3));
                words.extend(TOPIC_WORDS.choose_multiple(&mut rng, 2));
                words.extend(FUNCTION_WORDS.choose_multiple(&mut rng, 3));
                words.shuffle(&mut rng);
                if rng.gen_bool(0.55) {
                    words.push(tags.choose(&mut rng).unwrap());
                }
                let mut text = words.join(" ");
                if rng.gen_bool(0.25) {
                    text.push_str(&format!(" https://t.co/x{i:06}"));
                }
                (text, "es")
            }
            Kind::OffTopic => {
                let mut words: Vec<&str> = OFF_TOPIC_WORDS.choose_multiple(&mut rng, 4).copied().collect();
                words.extend(FUNCTION_WORDS.choose_multiple(&mut rng, 3));
                words.shuffle(&mut rng);
                if rng.gen_bool(0.5) {
                    words.push(OFF_TOPIC_TAGS.choose(&mut rng).unwrap());
                }
                (words.join(" "), "es")
            }
            Kind::Retweet => {
                let source_author = retweeted.unwrap();
                let source = *originals[source_author].choose(&mut rng).unwrap();
                let text = format!("RT @u{source_author}: {}", tweets[source].text);
                on_topic.insert(id.clone());
                (text, "es")
            }
            Kind::Short => (stance_words(stance).choose_multiple(&mut rng, 2).copied().collect::<Vec<_>>().join(" "), "es"),
            Kind::Duplicate => {
                let all: Vec<usize> = originals.values().flatten().copied().collect();
                (tweets[*all.choose(&mut rng).unwrap()].text.clone(), "es")
            }
            Kind::English => (ENGLISH.choose(&mut rng).unwrap().to_string(), "en"),
        };
        let mut tweet = Tweet::new(id.clone(), author, lang, text);
        tweet.created_at = Some(timestamp(i));
        if let Some(src) = retweeted {
            tweet.retweet_of_author = Some(src.to_string());
        }
        if kind == Kind::OnTopic {
            on_topic.insert(id);
            originals.entry(author).or_default().push(i);
        }
        tweets.push(tweet);
    }

    let mut seeds = Vec::new();
    for (l, group) in members.iter().enumerate() {
        // Seeds are the most retweeted accounts of each stance, as a curator would pick.
        let mut by_fan_in: Vec<(usize, &String)> = group
            .iter()
            .map(|a| {
                let n = tweets
                    .iter()
                    .filter(|t| t.retweet_of_author.as_deref() == Some(a.as_str()))
                    .count();
                (n, a)
            })
            .collect();
        by_fan_in.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(y.1)));
        for (_, a) in by_fan_in.into_iter().take(cfg.seeds_per_stance) {
            seeds.push(AccountLabel::seed(a.clone(), StanceLabel::ALL[l]));
        }
    }
    seeds.sort_by(|a, b| a.author_id.cmp(&b.author_id));
    PipelineFixture {
        tweets,
        seeds,
        lexicon,
        stance_of,
        on_topic,
    }
}

/// One Twitter-style JSON object per tweet.
pub fn to_raw_json(tweet: &Tweet) -> String {
    let mut value = serde_json::json!({
        "id_str": tweet.id,
        "user": {"id_str": tweet.author_id},
        "text": tweet.text,
        "lang": tweet.language,
    });
    if let Some(ts) = &tweet.created_at {
        value["created_at"] = ts.clone().into();
    }
    if let Some(rt) = &tweet.retweet_of_author {
        value["retweeted_status"] = serde_json::json!({"user": {"id_str": rt}});
    }
    value.to_string()
}

impl PipelineFixture {
    /// Writes `tweets.jsonl`, `seeds.tsv`, `lexicon.txt` and `truth.tsv`.
    pub fn write(&self, dir: impl AsRef<Path>) -> io::Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut jsonl = String::new();
        for t in &self.tweets {
            jsonl.push_str(&to_raw_json(t));
            jsonl.push('\n');
        }
        fs::write(dir.join("tweets.jsonl"), jsonl)?;
        let mut seeds = Vec::new();
        write_seeds(&mut seeds, &self.seeds)?;
        fs::write(dir.join("seeds.tsv"), seeds)?;
        fs::write(dir.join("lexicon.txt"), self.lexicon.to_text())?;
        let mut truth = String::from("author_id\tlabel\n");
        for (a, l) in &self.stance_of {
            truth.push_str(&format!("{a}\t{l}\n"));
        }
        fs::write(dir.join("truth.tsv"), truth)?;
        Ok(())
    }
}
