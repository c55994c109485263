//! Ranks the hashtags of the synthetic dump, builds a lexicon from the chosen ones
//! and keeps the on-topic tweets.
//!
//! ```sh
//! cargo run -p stance-corpus --example hashtag_lexicon
//! ```

use stance_corpus::corpus::{Corpus, LabelSource, LabeledTweet};
use stance_corpus::synthetic::{pipeline_fixture, PipelineFixtureConfig};
use stance_corpus::topic::{extract_hashtags, filter_on_topic, TopicLexicon};

fn main() {
    let fixture = pipeline_fixture(&PipelineFixtureConfig::default());
    let items = fixture
        .tweets
        .iter()
        .filter(|t| t.language == "es")
        .map(|t| LabeledTweet::new(t.clone(), fixture.stance_of[&t.author_id], LabelSource::PropagatedUser))
        .collect();
    let corpus = Corpus {
        name: "synthetic".into(),
        language: "es".into(),
        items,
    };
    println!("candidate hashtags:");
    for (tag, count) in extract_hashtags(&corpus).iter().take(8) {
        println!("  {count:>5}  #{tag}");
    }
    let lexicon = TopicLexicon::parse("#1oct\n#Referéndum\n#catalunya\nconsulta ilegal\n").unwrap();
    print!("\nlexicon:\n{}", lexicon.to_text());
    let (on_topic, dist) = filter_on_topic(&corpus, &lexicon).unwrap();
    println!("\n{} of {} tweets on topic: {dist}", on_topic.len(), corpus.len());
}
