//! Ingests the synthetic dump into a temporary workspace and serves the curation
//! API on it. Try:
//!
//! ```sh
//! cargo run -p stance-corpus-service --example curation_server
//! curl 'http://127.0.0.1:8080/api/users?limit=1'
//! curl -X POST -H 'content-type: application/json' -d '{"label":"FAVOR"}' \
//!      http://127.0.0.1:8080/api/users/<author_id>/label
//! ```

use stance_corpus::pipeline::{self, IngestStage, RunConfig};
use stance_corpus::synthetic::{pipeline_fixture, PipelineFixtureConfig};
use stance_corpus_service::{serve, ServiceConfig};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("stance-corpus-curation");
    pipeline_fixture(&PipelineFixtureConfig::default()).write(dir.join("fixture"))?;
    let mut cfg = RunConfig::empty();
    cfg.workspace = Some(dir.join("workspace"));
    cfg.resume = true;
    cfg.ingest = Some(IngestStage {
        input: dir.join("fixture/tweets.jsonl"),
        min_words: 3,
        profiles_dir: None,
    });
    pipeline::run(cfg)?;
    println!("workspace: {}", dir.join("workspace").display());
    serve(ServiceConfig::new(dir.join("workspace"))).await?;
    Ok(())
}
