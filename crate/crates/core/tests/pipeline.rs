//! End-to-end runs of the pipeline over the committed synthetic fixture.

use std::fs;
use std::path::{Path, PathBuf};

use stance_corpus::pipeline::{run, sha256_file, Manifest, PipelineError, RunConfig, StageStatus, STAGES};

fn config(workspace: &Path) -> RunConfig {
    let mut cfg = RunConfig::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic/config.toml")).unwrap();
    cfg.workspace = Some(workspace.to_path_buf());
    cfg
}

fn split_files(workspace: &Path) -> Vec<Vec<u8>> {
    ["train.tsv", "dev.tsv", "test.tsv"]
        .iter()
        .map(|f| fs::read(workspace.join("split").join(f)).unwrap())
        .collect()
}

fn statuses(report: &stance_corpus::pipeline::RunReport) -> Vec<(String, StageStatus)> {
    report.stages.iter().map(|s| (s.stage.clone(), s.status)).collect()
}

#[test]
fn clean_runs_are_byte_identical_and_fully_manifested() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run(config(a.path())).unwrap();
    run(config(b.path())).unwrap();
    assert_eq!(split_files(a.path()), split_files(b.path()));
    assert_eq!(first.stages.len(), STAGES.len());
    let f1 = first.score.expect("score stage ran").f1_avg;
    assert!(f1 > 80.0, "planted stances should be learnable, got {f1}");

    // Every file in a stage directory is listed, with its hash, in that stage's manifest.
    for stage in STAGES {
        let dir = a.path().join(stage);
        let manifest: Manifest = serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest.stage, *stage);
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            if name == "manifest.json" {
                continue;
            }
            assert_eq!(manifest.outputs.get(&name), Some(&sha256_file(&path).unwrap()), "{stage}/{name}");
        }
    }
}

#[test]
fn resume_skips_unchanged_stages_and_reruns_changed_ones() {
    let ws = tempfile::tempdir().unwrap();
    run(config(ws.path())).unwrap();
    let before = split_files(ws.path());

    let mut cfg = config(ws.path());
    cfg.resume = true;
    let report = run(cfg.clone()).unwrap();
    assert_eq!(report.executed(), 0, "{:?}", statuses(&report));
    assert_eq!(split_files(ws.path()), before);

    // A training parameter change that yields a different model reruns training and
    // scoring only; scoring is keyed on the model's content, not on its parameters.
    let train = cfg.train.as_mut().unwrap();
    train.grid = false;
    train.c = 1.0;
    train.gamma = 1.0;
    let report = run(cfg).unwrap();
    let rerun: Vec<String> = report
        .stages
        .iter()
        .filter(|s| s.status == StageStatus::Executed)
        .map(|s| s.stage.clone())
        .collect();
    assert_eq!(rerun, ["train", "score"]);
}

#[test]
fn tampered_artifact_is_reported_on_resume() {
    let ws = tempfile::tempdir().unwrap();
    run(config(ws.path())).unwrap();
    let target: PathBuf = ws.path().join("assemble/corpus.tsv");
    let mut bytes = fs::read(&target).unwrap();
    bytes.extend_from_slice(b"\n");
    fs::write(&target, bytes).unwrap();

    let mut cfg = config(ws.path());
    cfg.resume = true;
    let err = run(cfg).unwrap_err();
    assert!(matches!(err, PipelineError::ManifestMismatch { ref stage, .. } if stage == "assemble"), "{err}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn single_stages_chain_through_the_workspace() {
    let ws = tempfile::tempdir().unwrap();
    let full = config(ws.path());
    for stage in STAGES {
        let report = run(full.only(stage).unwrap()).unwrap();
        assert_eq!(statuses(&report), [(stage.to_string(), StageStatus::Executed)]);
    }
    let reference = tempfile::tempdir().unwrap();
    run(config(reference.path())).unwrap();
    assert_eq!(split_files(ws.path()), split_files(reference.path()));
}
