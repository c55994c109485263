//! Property tests for corpus I/O, ingest, propagation, topic filtering, LDA and splitting.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use stance_corpus::corpus::{distribution, read_corpus, write_corpus, ColumnSchema, Corpus, LabelSource, LabeledTweet, StanceLabel, Tweet};
use stance_corpus::dataset::{split_proportional, split_user_disjoint, SplitSpec};
use stance_corpus::ingest::dedup_and_filter;
use stance_corpus::langid::{builtin_profiles, detect_language};
use stance_corpus::lda::{train_lda, GibbsSampler, LdaConfig};
use stance_corpus::propagation::{propagate, PropagationConfig, RetweetGraph};
use stance_corpus::topic::{filter_on_topic, match_topic, TopicLexicon};
use stance_corpus::AccountLabel;

fn label() -> impl Strategy<Value = StanceLabel> {
    prop_oneof![Just(StanceLabel::Against), Just(StanceLabel::Favor), Just(StanceLabel::None)]
}

/// Text with the characters that stress the TSV escaping.
fn raw_text() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9áéíóúñç#@ ,.!?\t\n\\\\\r😀]{1,40}".prop_filter("needs a visible character", |s| !s.trim().is_empty())
}

fn corpus_from(rows: Vec<(String, StanceLabel)>) -> Corpus {
    let items = rows
        .into_iter()
        .enumerate()
        .map(|(i, (text, l))| {
            let tweet = Tweet::new(format!("{}", 1_000_000_000_000_000_000u64 + i as u64), format!("u{}", i % 7), "es", text);
            LabeledTweet::new(tweet, l, LabelSource::PropagatedUser)
        })
        .collect();
    Corpus::new("prop", "es", items).unwrap()
}

fn save(corpus: &Corpus) -> Vec<u8> {
    let mut out = Vec::new();
    write_corpus(&mut out, corpus, &ColumnSchema::canonical()).unwrap();
    out
}

proptest! {
    #[test]
    fn corpus_tsv_round_trip(rows in prop::collection::vec((raw_text(), label()), 0..30)) {
        let corpus = corpus_from(rows);
        let bytes = save(&corpus);
        let loaded = read_corpus(&bytes[..], "prop", &ColumnSchema::canonical()).unwrap();
        prop_assert!(loaded.rejected.is_empty(), "{:?}", loaded.rejected);
        prop_assert_eq!(&loaded.corpus.items, &corpus.items);
        prop_assert_eq!(save(&loaded.corpus), bytes);
    }

    #[test]
    fn distribution_total_is_corpus_size(rows in prop::collection::vec((raw_text(), label()), 0..50)) {
        let corpus = corpus_from(rows);
        prop_assert_eq!(distribution(&corpus).unwrap().total, corpus.len());
    }

    #[test]
    fn dedup_is_idempotent_and_order_preserving(
        texts in prop::collection::vec(prop::sample::select(vec![
            "hola que tal estamos hoy", "Hola que tal  estamos hoy", "el tiempo es bueno", "corto",
            "mira esto https://t.co/abc ahora mismo", "mira esto https://t.co/xyz ahora mismo", "un dos tres cuatro",
        ]), 0..25),
        min_words in 1usize..5,
    ) {
        let tweets: Vec<Tweet> = texts.iter().enumerate().map(|(i, t)| Tweet::new(i.to_string(), "u", "es", *t)).collect();
        let (once, _) = dedup_and_filter(tweets, min_words).unwrap();
        let (twice, report) = dedup_and_filter(once.clone(), min_words).unwrap();
        prop_assert_eq!(&twice, &once);
        prop_assert_eq!(report.dropped_duplicates + report.dropped_short + report.dropped_other, 0);
        let positions: Vec<usize> = once.iter().map(|t| t.id.parse().unwrap()).collect();
        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn language_detection_is_deterministic(text in "[a-záéíóúàèòç ]{0,80}") {
        let profiles = builtin_profiles();
        prop_assert_eq!(detect_language(&text, &profiles), detect_language(&text, &profiles));
    }
}

fn graph_from(edges: &[(usize, usize)], nodes: usize) -> RetweetGraph {
    let mut g = RetweetGraph::default();
    for n in 0..nodes {
        g.nodes.insert(format!("n{n:02}"));
    }
    for &(a, b) in edges {
        g.add_retweet(&format!("n{a:02}"), &format!("n{b:02}"));
    }
    g
}

fn labels_of(accounts: &[AccountLabel]) -> BTreeMap<String, StanceLabel> {
    accounts.iter().map(|a| (a.author_id.clone(), a.label)).collect()
}

proptest! {
    /// Adding a seed at one hop: accounts that do not retweet the new seed keep their
    /// label, and accounts already carrying the new seed's label stay labeled.
    #[test]
    fn propagation_adding_a_seed_is_monotone_at_one_hop(
        edges in prop::collection::vec((0usize..14, 0usize..14), 0..60),
        seeds in prop::collection::btree_map(0usize..14, label(), 1..4),
        extra in (0usize..14, label()),
    ) {
        prop_assume!(!seeds.contains_key(&extra.0));
        let graph = graph_from(&edges, 14);
        let cfg = PropagationConfig::default();
        let mut seed_list: Vec<AccountLabel> = seeds.iter().map(|(&n, &l)| AccountLabel::seed(format!("n{n:02}"), l)).collect();
        let before = labels_of(&propagate(&graph, &seed_list, &cfg).unwrap());
        let again = labels_of(&propagate(&graph, &seed_list, &cfg).unwrap());
        prop_assert_eq!(&before, &again);

        let new_seed = format!("n{:02}", extra.0);
        seed_list.push(AccountLabel::seed(new_seed.clone(), extra.1));
        let after = labels_of(&propagate(&graph, &seed_list, &cfg).unwrap());
        for (account, label) in &before {
            let retweets_new_seed = graph.weight(account, &new_seed) > 0;
            if *account == new_seed {
                prop_assert_eq!(after.get(account), Some(&extra.1));
            } else if !retweets_new_seed {
                prop_assert_eq!(after.get(account), Some(label), "{} changed", account);
            } else if *label == extra.1 {
                prop_assert_eq!(after.get(account), Some(label), "{} lost its label", account);
            }
        }
    }
}

fn variant(text: &str, flips: &[bool]) -> String {
    text.chars()
        .zip(flips.iter().cycle())
        .map(|(c, &flip)| match (c, flip) {
            ('a', true) => 'Á',
            ('e', true) => 'é',
            ('i', true) => 'Í',
            ('o', true) => 'ó',
            ('u', true) => 'Ü',
            (c, true) => c.to_uppercase().next().unwrap(),
            (c, false) => c,
        })
        .collect()
}

fn topic_text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop::sample::select(vec!["#referendum", "#futbol", "consulta", "ilegal", "la", "votacion", "#1oct", "hoy", "playa"]),
        1..10,
    )
    .prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn topic_match_ignores_case_and_diacritics(text in topic_text(), flips in prop::collection::vec(any::<bool>(), 1..8)) {
        let lexicon = TopicLexicon::new(["referendum", "1oct"], ["consulta ilegal"]).unwrap();
        let plain = Tweet::new("1", "u", "es", text.clone());
        let varied = Tweet::new("1", "u", "es", variant(&text, &flips));
        prop_assert_eq!(match_topic(&plain, &lexicon), match_topic(&varied, &lexicon));
    }

    #[test]
    fn topic_filter_is_a_subset_and_idempotent(texts in prop::collection::vec((topic_text(), label()), 0..30)) {
        let corpus = corpus_from(texts);
        let lexicon = TopicLexicon::new(["referendum"], ["consulta ilegal"]).unwrap();
        let (kept, dist) = filter_on_topic(&corpus, &lexicon).unwrap();
        let ids: BTreeSet<&str> = corpus.iter().map(|t| t.id()).collect();
        prop_assert!(kept.iter().all(|t| ids.contains(t.id())));
        prop_assert_eq!(dist.total, kept.len());
        let (again, _) = filter_on_topic(&kept, &lexicon).unwrap();
        prop_assert_eq!(again.items, kept.items);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lda_counts_conserved_every_sweep_and_seeded(
        docs in prop::collection::vec(prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e", "f", "g"]), 1..12), 1..15),
        k in 2usize..5,
        seed in any::<u64>(),
    ) {
        let cfg = LdaConfig { iterations: 6, burn_in: 2, seed, ..LdaConfig::with_topics(k) };
        let mut sampler = GibbsSampler::new(&docs, cfg.clone()).unwrap();
        for _ in 0..cfg.iterations {
            sampler.sweep();
            prop_assert!(sampler.model().check_invariants().is_ok());
        }
        let model = sampler.into_model();
        prop_assert_eq!(train_lda(&docs, &cfg).unwrap(), model);
    }

    #[test]
    fn splits_partition_the_corpus(
        rows in prop::collection::vec((0usize..30, label()), 20..200),
        seed in any::<u64>(),
    ) {
        let items: Vec<LabeledTweet> = rows
            .iter()
            .enumerate()
            .map(|(i, &(user, l))| LabeledTweet::new(Tweet::new(format!("t{i}"), format!("u{user}"), "es", "texto de prueba"), l, LabelSource::PropagatedUser))
            .collect();
        let corpus = Corpus::new("prop", "es", items).unwrap();
        let all: BTreeSet<&str> = corpus.iter().map(|t| t.id()).collect();
        let spec = SplitSpec::with_seed(seed);

        let proportional = split_proportional(&corpus, &spec).unwrap();
        let ids: Vec<&str> = proportional.parts().iter().flat_map(|p| p.iter().map(|t| t.id())).collect();
        prop_assert_eq!(ids.len(), corpus.len());
        prop_assert_eq!(ids.into_iter().collect::<BTreeSet<_>>(), all.clone());
        prop_assert_eq!(split_proportional(&corpus, &spec).unwrap(), proportional);

        if let Ok(disjoint) = split_user_disjoint(&corpus, &spec) {
            let parts = disjoint.parts();
            let ids: Vec<&str> = parts.iter().flat_map(|p| p.iter().map(|t| t.id())).collect();
            prop_assert_eq!(ids.len(), corpus.len());
            prop_assert_eq!(ids.into_iter().collect::<BTreeSet<_>>(), all);
            let users: Vec<BTreeSet<&str>> = parts.iter().map(|p| p.iter().map(|t| t.tweet.author_id.as_str()).collect()).collect();
            for a in 0..3 {
                for b in a + 1..3 {
                    prop_assert!(users[a].is_disjoint(&users[b]));
                }
            }
            prop_assert_eq!(split_user_disjoint(&corpus, &spec).unwrap(), disjoint);
        }
    }
}
