//! Gibbs-sampled LDA on documents drawn from planted topics: the top words of each
//! learned topic come from one planted vocabulary, and documents can be selected
//! by accepted topic.
//!
//! ```sh
//! cargo run -p stance-corpus --example lda_topics
//! ```

use std::collections::BTreeSet;

use stance_corpus::lda::{dominant_topic, summarize, train_lda, LdaConfig};
use stance_corpus::synthetic::{planted_topics, PlantedTopicsConfig};

fn main() {
    let planted = planted_topics(&PlantedTopicsConfig {
        topics: 3,
        ..Default::default()
    });
    let cfg = LdaConfig {
        iterations: 300,
        burn_in: 100,
        seed: 11,
        ..LdaConfig::with_topics(3)
    };
    let model = train_lda(&planted.documents, &cfg).expect("valid documents");
    println!("mean log-likelihood after burn-in: {:.1}", model.mean_log_likelihood_after_burn_in().unwrap());
    for topic in summarize(&model, 6) {
        let words: Vec<&str> = topic.top_words.iter().map(|(w, _)| w.as_str()).collect();
        println!("topic {} ({} docs): {}", topic.topic, topic.documents, words.join(" "));
    }
    // Accept whichever learned topic carries planted topic 0's vocabulary.
    let vocab0: BTreeSet<&String> = planted.vocabularies[0].iter().collect();
    let accepted = summarize(&model, 1)
        .into_iter()
        .find(|t| vocab0.contains(&t.top_words[0].0))
        .map(|t| t.topic)
        .unwrap();
    let selected = (0..model.num_docs()).filter(|&d| dominant_topic(&model, d).unwrap().0 == accepted).count();
    let planted0 = planted.topic_of.iter().filter(|&&t| t == 0).count();
    println!("accepted topic {accepted}: {selected} documents selected, {planted0} planted");
}
