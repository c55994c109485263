//! Writes the synthetic debate dump used by the end-to-end examples and tests.
//!
//! ```sh
//! cargo run -p stance-corpus --example generate_fixture -- fixtures/synthetic
//! ```

use std::env;

use stance_corpus::synthetic::{pipeline_fixture, PipelineFixtureConfig};

fn main() -> std::io::Result<()> {
    let dir = env::args().nth(1).unwrap_or_else(|| "fixtures/synthetic".to_string());
    let cfg = PipelineFixtureConfig::default();
    let fixture = pipeline_fixture(&cfg);
    fixture.write(&dir)?;
    println!(
        "wrote {} tweets, {} seed accounts, {} authors to {dir}",
        fixture.tweets.len(),
        fixture.seeds.len(),
        fixture.stance_of.len()
    );
    Ok(())
}
