//! The linear softmax classifier over averaged word vectors, trained from scratch
//! and with frozen pretrained vectors (here: a small table written on the fly).
//!
//! ```sh
//! cargo run --release -p stance-corpus --example linear_softmax_classifier
//! ```

use stance_corpus::corpus::{Corpus, LabelSource, LabeledTweet};
use stance_corpus::dataset::{split_proportional, SplitSpec};
use stance_corpus::evaluation::{render_table, score_labels};
use stance_corpus::learners::{tokenize, train_linear_softmax, EmbeddingTable, SoftmaxConfig};
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
    let split = split_proportional(&corpus, &SplitSpec::with_seed(5)).unwrap();
    let resources = PreprocessResources::bundled();
    let docs = |c: &Corpus| -> Vec<Vec<String>> {
        c.iter()
            .map(|i| tokenize(&preprocess(&i.tweet.text, PreprocessType::B, &resources, "es").unwrap()))
            .collect()
    };
    let (train_docs, test_docs) = (docs(&split.train), docs(&split.test));
    let (train_y, test_y) = (split.train.labels().unwrap(), split.test.labels().unwrap());

    let mut reports = Vec::new();
    let scratch = SoftmaxConfig {
        dimension: 20,
        epochs: 30,
        ..SoftmaxConfig::from_scratch()
    };
    let model = train_linear_softmax(&train_docs, &train_y, None, &scratch).unwrap();
    let pred: Vec<_> = test_docs.iter().map(|d| model.predict(d)).collect();
    reports.push(score_labels("softmax-scratch", &test_y, &pred).unwrap());

    // A toy "pretrained" table: one axis per stance vocabulary.
    let mut table = EmbeddingTable::new(3);
    for (axis, words) in [
        ["unidad", "constitucion", "ilegal", "golpe", "legalidad", "espana", "tribunal", "separatista"],
        ["independencia", "libertad", "democracia", "republica", "urna", "votar", "derecho", "llibertat"],
        ["noticia", "informe", "dato", "analisis", "comparecencia", "agenda", "rueda", "prensa"],
    ]
    .iter()
    .enumerate()
    {
        for w in words {
            let mut v = vec![0.0; 3];
            v[axis] = 1.0;
            table.insert(*w, v).unwrap();
        }
    }
    let frozen = SoftmaxConfig {
        dimension: 3,
        ..SoftmaxConfig::pretrained()
    };
    let model = train_linear_softmax(&train_docs, &train_y, Some(&table), &frozen).unwrap();
    let pred: Vec<_> = test_docs.iter().map(|d| model.predict(d)).collect();
    reports.push(score_labels("softmax-pretrained", &test_y, &pred).unwrap());
    print!("{}", render_table(&reports));
}
