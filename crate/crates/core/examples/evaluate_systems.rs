//! F1_avg scoring, the majority error set and the oracle upper bound for three
//! prediction files over the same gold corpus.
//!
//! ```sh
//! cargo run -p stance-corpus --example evaluate_systems
//! ```

use stance_corpus::corpus::{Corpus, LabelSource, LabeledTweet, StanceLabel, Tweet};
use stance_corpus::evaluation::{error_confusion, majority_error_set, render_confusion, render_table, score, upperbound, PredictionSet};

fn main() {
    use StanceLabel::*;
    let gold_labels = [Favor, Favor, Against, Against, None, None, Favor, Against, None, Favor];
    let items = gold_labels
        .iter()
        .enumerate()
        .map(|(i, &l)| LabeledTweet::new(Tweet::new(format!("{i}"), format!("u{i}"), "es", "texto"), l, LabelSource::ManualUser))
        .collect();
    let gold = Corpus::new("gold", "es", items).unwrap();

    let systems = [
        ("always-favor", [Favor; 10]),
        ("system-b", [Favor, Against, Against, Against, None, Favor, Favor, Against, Against, Favor]),
        ("system-c", [Favor, Favor, Favor, Against, None, None, Against, Favor, None, None]),
    ];
    let preds: Vec<PredictionSet> = systems
        .iter()
        .map(|(name, labels)| PredictionSet::from_pairs(*name, labels.iter().enumerate().map(|(i, l)| (i.to_string(), *l))))
        .collect();

    let mut reports: Vec<_> = preds.iter().map(|p| score(&gold, p).unwrap()).collect();
    reports.push(upperbound(&gold, &preds).unwrap());
    print!("{}", render_table(&reports));

    let errors = majority_error_set(&gold, &preds, 2).unwrap();
    println!("\n{} items misclassified by at least 2 of 3 systems:", errors.len());
    print!("{}", render_confusion(&error_confusion(&errors)));
}
