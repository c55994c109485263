//! Runs every stage from a TOML config and prints the per-stage outcome and the
//! final scores. Artifacts go to the config's workspace, or a temp directory.
//! Re-running with `--resume` skips stages whose inputs are unchanged.
//!
//! ```sh
//! cargo run -p stance-corpus --example full_pipeline -- fixtures/synthetic/config.toml
//! ```

use std::env;
use std::process::ExitCode;

use stance_corpus::evaluation::render_table;
use stance_corpus::pipeline::{self, RunConfig};

fn main() -> ExitCode {
    let mut args = env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "fixtures/synthetic/config.toml".to_string());
    let resume = args.any(|a| a == "--resume");
    let result = RunConfig::load(&path).and_then(|mut cfg| {
        cfg.resume |= resume;
        cfg.workspace.get_or_insert_with(|| env::temp_dir().join("stance-corpus-run"));
        pipeline::run(cfg)
    });
    match result {
        Ok(report) => {
            for stage in &report.stages {
                println!("{:<9} {:?} {:.2}s {}", stage.stage, stage.status, stage.seconds, stage.outputs.join(","));
            }
            if let Some(score) = &report.score {
                print!("{}", render_table(std::slice::from_ref(score)));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
