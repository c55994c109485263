//! TF-IDF features with information-gain selection and an RBF SVM tuned on a dev
//! split, scored with F1_avg on the synthetic debate corpus.
//!
//! ```sh
//! cargo run --release -p stance-corpus --example tfidf_svm_baseline
//! ```

use stance_corpus::corpus::{Corpus, LabelSource, LabeledTweet};
use stance_corpus::dataset::{split_proportional, SplitSpec};
use stance_corpus::evaluation::{render_table, score_labels};
use stance_corpus::learners::{
    grid_search, information_gain, select_positive, tokenize, train_svm, GridSpec, SvmParams, TfidfVectorizer, Validation,
};
use stance_corpus::synthetic::{pipeline_fixture, PipelineFixtureConfig};
use stance_corpus::text::{preprocess, PreprocessResources, PreprocessType};

fn main() {
    let fixture = pipeline_fixture(&PipelineFixtureConfig::default());
    let items: Vec<_> = fixture
        .tweets
        .iter()
        .filter(|t| t.language == "es" && fixture.on_topic.contains(&t.id))
        .map(|t| LabeledTweet::new(t.clone(), fixture.stance_of[&t.author_id], LabelSource::PropagatedUser))
        .collect();
    let corpus = Corpus::new("synthetic", "es", items).unwrap();
    let split = split_proportional(&corpus, &SplitSpec::with_seed(3)).unwrap();

    let resources = PreprocessResources::bundled();
    let docs = |c: &Corpus| -> Vec<Vec<String>> {
        c.iter()
            .map(|i| tokenize(&preprocess(&i.tweet.text, PreprocessType::A, &resources, "es").unwrap()))
            .collect()
    };
    let (train_docs, dev_docs, test_docs) = (docs(&split.train), docs(&split.dev), docs(&split.test));
    let (train_y, dev_y, test_y) = (split.train.labels().unwrap(), split.dev.labels().unwrap(), split.test.labels().unwrap());

    let full = TfidfVectorizer::fit(&train_docs).unwrap();
    let ig = information_gain(&train_docs, &train_y).unwrap();
    let vectorizer = select_positive(&full, &ig);
    println!("{} terms, {} kept with positive information gain", full.feature_count(), vectorizer.feature_count());

    let (x, dev_x) = (vectorizer.transform_all(&train_docs), vectorizer.transform_all(&dev_docs));
    let grid = GridSpec {
        c_values: vec![10.0, 100.0, 700.0],
        gamma_values: vec![0.001, 0.1, 1.0],
    };
    let result = grid_search(&x, &train_y, Validation::Dev { x: &dev_x, y: &dev_y }, &grid, &SvmParams::rbf(1.0, 1.0)).unwrap();
    println!("best on dev: C={} gamma={} F1_avg={:.2}", result.best.c, result.best.gamma, result.best.f1_avg);

    let svm = train_svm(&x, &train_y, &SvmParams::rbf(result.best.c, result.best.gamma)).unwrap();
    let pred = svm.predict_all(&vectorizer.transform_all(&test_docs));
    print!("{}", render_table(&[score_labels("tfidf-svm", &test_y, &pred).unwrap()]));
}
