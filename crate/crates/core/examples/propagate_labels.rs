//! Label propagation over a planted two-community retweet graph, compared with
//! the planted communities.
//!
//! ```sh
//! cargo run -p stance-corpus --example propagate_labels
//! ```

use stance_corpus::corpus::Provenance;
use stance_corpus::propagation::{propagate, PropagationConfig};
use stance_corpus::synthetic::{planted_graph, PlantedGraphConfig};

fn main() {
    let planted = planted_graph(&PlantedGraphConfig::default());
    for max_hops in 1..=3 {
        let cfg = PropagationConfig {
            max_hops,
            ..Default::default()
        };
        let accounts = propagate(&planted.graph, &planted.seeds, &cfg).expect("valid config");
        let propagated: Vec<_> = accounts.iter().filter(|a| a.provenance == Provenance::Propagated).collect();
        let agree = propagated.iter().filter(|a| planted.community[&a.author_id] == a.label).count();
        println!(
            "max_hops={max_hops}: {} seeds, {} propagated, {:.1}% agree with the planted community",
            planted.seeds.len(),
            propagated.len(),
            100.0 * agree as f64 / propagated.len().max(1) as f64
        );
    }
}
