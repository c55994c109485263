//! Balanced assembly and the two split strategies on a synthetic labeled corpus.
//!
//! ```sh
//! cargo run -p stance-corpus --example build_splits
//! ```

use stance_corpus::corpus::{Corpus, LabelSource, LabeledTweet, StanceLabel, Tweet};
use stance_corpus::dataset::{assemble_balanced, split_proportional, split_user_disjoint, verify_split, SplitSpec};

fn main() {
    // 1,200 tweets by 120 users of unequal activity; AGAINST is the majority stance.
    let mut items = Vec::new();
    for i in 0..1200usize {
        let user = (i + i * i / 600) % 120;
        let label = match user % 5 {
            0 | 1 | 2 => StanceLabel::Against,
            3 => StanceLabel::Favor,
            _ => StanceLabel::None,
        };
        let tweet = Tweet::new(format!("t{i:04}"), format!("user{user:03}"), "es", format!("mensaje numero {i} sobre el tema"));
        items.push(LabeledTweet::new(tweet, label, LabelSource::PropagatedUser));
    }
    let corpus = Corpus::new("example", "es", items).unwrap();
    println!("input: {}", stance_corpus::corpus::distribution(&corpus).unwrap());

    let balanced = assemble_balanced(&corpus, 600, 4, 7).unwrap();
    println!("balanced: {}", stance_corpus::corpus::distribution(&balanced).unwrap());

    let spec = SplitSpec::with_seed(7);
    for (mode, split) in [
        ("proportional", split_proportional(&balanced, &spec).unwrap()),
        ("user-disjoint", split_user_disjoint(&balanced, &spec).unwrap()),
    ] {
        println!("\n{mode}:");
        for entry in &split.audit.splits {
            println!("  {:<5} {:>4} items {:>3} users  {}", entry.name, entry.size, entry.user_count, entry.distribution);
        }
        let report = verify_split(&split, &spec, mode == "user-disjoint");
        println!("  clean: {}", report.is_clean());
        for v in &report.violations {
            println!("  {v:?}");
        }
    }
}
