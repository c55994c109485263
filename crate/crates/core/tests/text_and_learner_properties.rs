//! Property tests for preprocessing, feature extraction, classifiers and scoring.

use proptest::prelude::*;
use stance_corpus::corpus::{Corpus, LabelSource, LabeledTweet, StanceLabel, Tweet};
use stance_corpus::evaluation::{majority_error_set, score, upperbound, PredictionSet};
use stance_corpus::learners::{information_gain, select_positive, train_linear_softmax, SoftmaxConfig, TfidfVectorizer};
use stance_corpus::text::{preprocess, PreprocessResources, PreprocessType, MIN_TOKEN_CHARS};

fn label() -> impl Strategy<Value = StanceLabel> {
    prop_oneof![Just(StanceLabel::Against), Just(StanceLabel::Favor), Just(StanceLabel::None)]
}

#[derive(Clone, Debug)]
enum Token {
    Url(String),
    Other(String),
}

fn token() -> impl Strategy<Value = Token> {
    prop_oneof![
        "https://t\\.co/[a-zA-Z0-9]{4,10}".prop_map(Token::Url),
        "[@#]?[a-zA-ZáéíóúÁÉÍÓÚñÑüç_]{1,10}".prop_map(Token::Other),
        "[a-zA-Z]{1,6}[,.!?¿¡:;]{1,3}".prop_map(Token::Other),
        prop::sample::select(vec!["RT", "que", "el", "la", "de", "holaaaa", "sííí", "EL", "Que", "😀", "🇪🇸", "123"])
            .prop_map(|s| Token::Other(s.to_string())),
    ]
}

fn tweet_tokens() -> impl Strategy<Value = Vec<Token>> {
    prop::collection::vec(token(), 0..20)
}

fn join(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| match t {
            Token::Url(s) | Token::Other(s) => s.as_str(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(kind: PreprocessType, text: &str) -> String {
    preprocess(text, kind, &PreprocessResources::bundled(), "es").unwrap()
}

proptest! {
    #[test]
    fn preprocessing_is_idempotent(tokens in tweet_tokens()) {
        let text = join(&tokens);
        for kind in PreprocessType::ALL {
            let once = run(kind, &text);
            prop_assert_eq!(run(kind, &once), once.clone(), "{:?} on {:?}", kind, text);
        }
    }

    #[test]
    fn type_d_only_drops_markers_and_urls(tokens in tweet_tokens()) {
        let text = join(&tokens);
        let expected: String = tokens
            .iter()
            .filter_map(|t| match t {
                Token::Other(s) => Some(s.chars().filter(|c| !matches!(c, '@' | '#')).collect::<String>()),
                Token::Url(_) => None,
            })
            .collect();
        let got: String = run(PreprocessType::D, &text).chars().filter(|c| !c.is_whitespace()).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn type_a_has_no_stopwords_or_short_tokens(tokens in tweet_tokens()) {
        let res = PreprocessResources::bundled();
        let es = res.get("es").unwrap();
        for tok in run(PreprocessType::A, &join(&tokens)).split_whitespace() {
            prop_assert!(!es.is_stopword(tok), "stopword {:?}", tok);
            prop_assert!(tok.starts_with('#') || tok.chars().count() >= MIN_TOKEN_CHARS, "short token {:?}", tok);
        }
    }
}

fn vocabulary_docs() -> impl Strategy<Value = Vec<(Vec<String>, StanceLabel)>> {
    prop::collection::vec(
        (prop::collection::vec("[a-f]{1,2}", 1..8), label()),
        2..20,
    )
}

proptest! {
    #[test]
    fn tfidf_is_invariant_to_repeating_a_document(docs in vocabulary_docs(), probe in prop::collection::vec("[a-g]{1,2}", 1..6), k in 2usize..5) {
        let texts: Vec<Vec<String>> = docs.iter().map(|(d, _)| d.clone()).collect();
        let v = TfidfVectorizer::fit(&texts).unwrap();
        let once = v.transform(&probe);
        let repeated: Vec<String> = probe.iter().cycle().take(probe.len() * k).cloned().collect();
        let many = v.transform(&repeated);
        prop_assert_eq!(&once.indices, &many.indices);
        for (a, b) in once.values.iter().zip(&many.values) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn selection_never_enlarges_features(docs in vocabulary_docs()) {
        let texts: Vec<Vec<String>> = docs.iter().map(|(d, _)| d.clone()).collect();
        let labels: Vec<StanceLabel> = docs.iter().map(|(_, l)| *l).collect();
        let v = TfidfVectorizer::fit(&texts).unwrap();
        let selected = select_positive(&v, &information_gain(&texts, &labels).unwrap());
        prop_assert!(selected.feature_count() <= v.feature_count());
        let twice = select_positive(&selected, &information_gain(&texts, &labels).unwrap());
        prop_assert!(twice.feature_count() <= selected.feature_count());
        let kept = selected.selected.clone().unwrap();
        for doc in &texts {
            prop_assert!(selected.transform(doc).indices.iter().all(|i| kept.contains(i)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn softmax_probabilities_sum_to_one(docs in vocabulary_docs(), probe in prop::collection::vec("[a-h]{1,2}", 0..6), seed in any::<u64>()) {
        let texts: Vec<Vec<String>> = docs.iter().map(|(d, _)| d.clone()).collect();
        let labels: Vec<StanceLabel> = docs.iter().map(|(_, l)| *l).collect();
        let config = SoftmaxConfig { dimension: 8, epochs: 3, seed, ..SoftmaxConfig::from_scratch() };
        let model = train_linear_softmax(&texts, &labels, None, &config).unwrap();
        let p = model.predict_proba(&probe);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
    }
}

fn gold(labels: &[StanceLabel], order: &[usize]) -> Corpus {
    let items = order
        .iter()
        .map(|&i| LabeledTweet::new(Tweet::new(format!("id{i}"), "u", "es", "x"), labels[i], LabelSource::ManualUser))
        .collect();
    Corpus::new("gold", "es", items).unwrap()
}

fn predictions(name: &str, labels: &[StanceLabel]) -> PredictionSet {
    PredictionSet::from_pairs(name, labels.iter().enumerate().map(|(i, &l)| (format!("id{i}"), l)))
}

fn scored_case() -> impl Strategy<Value = (Vec<StanceLabel>, Vec<Vec<StanceLabel>>)> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(label(), n),
            prop::collection::vec(prop::collection::vec(label(), n), 2..6),
        )
    })
}

proptest! {
    #[test]
    fn score_ignores_item_order((labels, systems) in scored_case(), shuffle in any::<prop::sample::Index>()) {
        let n = labels.len();
        let identity: Vec<usize> = (0..n).collect();
        let mut permuted = identity.clone();
        permuted.rotate_left(shuffle.index(n));
        permuted.reverse();
        let pred = predictions("s", &systems[0]);
        let a = score(&gold(&labels, &identity), &pred).unwrap();
        let b = score(&gold(&labels, &permuted), &pred).unwrap();
        prop_assert_eq!(a.f1_avg, b.f1_avg);
        prop_assert_eq!(a.confusion, b.confusion);
    }

    /// The oracle falls back to the first system when every system is wrong, so it
    /// dominates that system, and dominates them all once the best system leads.
    #[test]
    fn upperbound_dominates_the_fallback_system((labels, systems) in scored_case()) {
        let g = gold(&labels, &(0..labels.len()).collect::<Vec<_>>());
        let preds: Vec<PredictionSet> = systems.iter().enumerate().map(|(i, s)| predictions(&format!("s{i}"), s)).collect();
        let scores: Vec<f64> = preds.iter().map(|p| score(&g, p).unwrap().f1_avg).collect();
        prop_assert!(upperbound(&g, &preds).unwrap().f1_avg >= scores[0] - 1e-9);

        let best = (0..scores.len()).max_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap();
        let mut led = preds.clone();
        led.swap(0, best);
        prop_assert!(upperbound(&g, &led).unwrap().f1_avg >= scores[best] - 1e-9);
    }

    #[test]
    fn majority_error_sets_shrink_with_threshold((labels, systems) in scored_case()) {
        let g = gold(&labels, &(0..labels.len()).collect::<Vec<_>>());
        let preds: Vec<PredictionSet> = systems.iter().enumerate().map(|(i, s)| predictions(&format!("s{i}"), s)).collect();
        let mut previous = majority_error_set(&g, &preds, 1).unwrap();
        for k in 2..=preds.len() {
            let current = majority_error_set(&g, &preds, k).unwrap();
            prop_assert!(current.iter().all(|e| previous.contains(e)));
            previous = current;
        }
    }
}
