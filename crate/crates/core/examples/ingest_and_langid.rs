//! Language identification and ingest filtering on a handful of raw tweets.
//!
//! ```sh
//! cargo run -p stance-corpus --example ingest_and_langid
//! ```

use stance_corpus::ingest::{ingest, parse_raw_tweet, split_by_language};
use stance_corpus::langid::{builtin_profiles, detect_language};

const DUMP: &str = r#"{"id_str":"1","user":{"id_str":"u1"},"text":"Mañana todos a votar en el colegio electoral #1oct"}
{"id_str":"2","user":{"id_str":"u2"},"text":"Demà tothom a votar al col·legi electoral #1oct"}
{"id_str":"3","user":{"id_str":"u3"},"text":"Tomorrow everyone goes to vote at the polling station"}
{"id_str":"4","user":{"id_str":"u4"},"text":"mañana todos a votar en el colegio electoral #1OCT"}
{"id_str":"5","user":{"id_str":"u5"},"text":"hola"}"#;

fn main() {
    let profiles = builtin_profiles();
    let tweets: Vec<_> = DUMP.lines().map(|l| parse_raw_tweet(l).expect("valid record")).collect();
    for t in &tweets {
        let (lang, confidence) = detect_language(&t.text, &profiles);
        println!("{:<3} {lang} ({confidence:.2})  {}", t.id, t.text);
    }
    let (kept, report) = ingest(tweets, &profiles, 3).expect("ingest");
    println!("\n{}", serde_json::to_string_pretty(&report).unwrap());
    for (lang, corpus) in split_by_language(&kept) {
        println!("{lang}: {} tweets", corpus.len());
    }
}
