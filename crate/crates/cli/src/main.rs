use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use stance_corpus::corpus::{load_corpus, Corpus, LabeledTweet};
use stance_corpus::evaluation::{self, PredictionSet};
use stance_corpus::pipeline::{self, PipelineError, RunConfig, RunReport, SchemaName};
use stance_corpus::text::{self, PreprocessResources, PreprocessType};
use stance_corpus::topic;
use stance_corpus_service::{ServiceConfig, StateConfig};

/// Builds stance-annotated tweet corpora and evaluates stance classifiers.
#[derive(Debug, Parser)]
#[command(name = "stance-corpus", version)]
struct Cli {
    /// Run config (TOML). Command-line flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory holding every stage's artifacts.
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,
    /// Skip stages whose manifests match their inputs and parameters.
    #[arg(long, global = true)]
    resume: bool,
    /// Seed for every randomized stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Corpus language (ISO 639-1).
    #[arg(long, global = true)]
    language: Option<String>,
    #[arg(long, global = true, default_value = "info")]
    log_level: log::LevelFilter,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every stage configured in --config.
    Run,
    /// Language identification, deduplication and length filtering of a JSONL dump.
    Ingest(IngestArgs),
    /// Label accounts from seeds over the retweet graph and project to tweets.
    Propagate(PropagateArgs),
    /// Rank candidate hashtags; with a lexicon, keep on-topic tweets.
    Hashtags(HashtagArgs),
    /// Recover off-lexicon on-topic tweets through accepted LDA topics.
    Lda(LdaArgs),
    /// Assemble a label-balanced corpus.
    Assemble(AssembleArgs),
    /// Split into train/dev/test.
    Split(SplitArgs),
    /// Apply preprocessing type A, B, C or D to text or a corpus.
    Preprocess(PreprocessArgs),
    /// Train a stance classifier.
    Train(TrainArgs),
    /// Tune C and gamma of an RBF SVM.
    Grid(TrainArgs),
    /// Score a model on a test corpus, or prediction files against gold labels.
    Score(ScoreArgs),
    /// Items most systems get wrong, and their confusion matrix.
    Errors(ErrorsArgs),
    /// Oracle combination of several systems.
    Upperbound(UpperboundArgs),
    /// Serve the curation API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    min_words: Option<usize>,
    #[arg(long)]
    profiles_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PropagateArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    seeds: Option<PathBuf>,
    #[arg(long)]
    max_hops: Option<u32>,
    #[arg(long)]
    min_margin: Option<f64>,
    #[arg(long)]
    min_evidence: Option<u32>,
}

#[derive(Debug, Args)]
struct HashtagArgs {
    /// Corpus to rank or filter (canonical TSV); the propagated tweets by default.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    min_freq: usize,
    #[arg(long, default_value_t = 50)]
    limit: usize,
}

#[derive(Debug, Args)]
struct LdaArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    topics: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Accepted topic ids.
    #[arg(long, value_delimiter = ',')]
    accept_topics: Option<Vec<usize>>,
    /// Accept topics whose top words include one of these.
    #[arg(long, value_delimiter = ',')]
    accept_words: Option<Vec<String>>,
    #[arg(long)]
    min_share: Option<f64>,
}

#[derive(Debug, Args)]
struct AssembleArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    target_total: Option<usize>,
    #[arg(long)]
    min_words: Option<usize>,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// user-disjoint or proportional.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, value_delimiter = ',', num_args = 3)]
    ratios: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// A, B, C or D.
    #[arg(long = "type")]
    kind: PreprocessType,
    /// Text to transform; otherwise --input is read.
    #[arg(long, conflicts_with = "input")]
    text: Option<String>,
    /// Corpus TSV; one preprocessed text per item is written as `id<TAB>text`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "canonical")]
    schema: String,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Stopword and lemma files; the bundled ones otherwise.
    #[arg(long)]
    resources_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    dev: Option<PathBuf>,
    /// canonical, cic or semeval.
    #[arg(long)]
    schema: Option<String>,
    /// tfidf-svm, embedding-svm or linear-softmax.
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    preprocessing: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    grid_c: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    grid_gamma: Option<Vec<f64>>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    no_information_gain: bool,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    dimension: Option<usize>,
    #[arg(long)]
    word_ngrams: Option<usize>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    schema: Option<String>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Score these `id<TAB>label` files against --test instead of running a model.
    #[arg(long, num_args = 1..)]
    predictions: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct ErrorsArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value = "canonical")]
    schema: String,
    #[arg(long, num_args = 2.., required = true)]
    predictions: Vec<PathBuf>,
    /// Minimum number of systems that must be wrong (defaults to all).
    #[arg(long)]
    threshold: Option<usize>,
    /// Write the error items as TSV here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct UpperboundArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value = "canonical")]
    schema: String,
    #[arg(long, num_args = 2.., required = true)]
    predictions: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Static frontend served under /ui.
    #[arg(long)]
    ui_dir: Option<PathBuf>,
}

/// A failure with its exit code: 2 for configuration, 3 for stage failures.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure {
            code: e.exit_code() as u8,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 3, error }
    }
}

fn config_error(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().filter_level(cli.log_level).format_timestamp(None).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn abs(p: &Path) -> anyhow::Result<String> {
    Ok(std::path::absolute(p)?.display().to_string())
}

/// `section.key = value` for each flag that was given.
#[derive(Default)]
struct Overrides(Map<String, Value>);

impl Overrides {
    fn set(&mut self, key: &str, value: Option<impl Into<Value>>) -> &mut Self {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v.into());
        }
        self
    }

    fn path(&mut self, key: &str, value: &Option<PathBuf>) -> anyhow::Result<&mut Self> {
        if let Some(p) = value {
            self.0.insert(key.to_string(), abs(p)?.into());
        }
        Ok(self)
    }
}

fn base_overrides(cli: &Cli) -> anyhow::Result<Map<String, Value>> {
    let mut top = Overrides::default();
    top.path("workspace", &cli.workspace)?;
    top.set("seed", cli.seed);
    top.set("language", cli.language.clone());
    if cli.resume {
        top.set("resume", Some(true));
    }
    Ok(top.0)
}

fn load_config(cli: &Cli, section: Option<(&str, Overrides)>) -> Result<RunConfig, Failure> {
    let mut top = base_overrides(cli).map_err(config_error)?;
    if let Some((name, fields)) = section {
        top.insert(name.to_string(), Value::Object(fields.0));
    }
    Ok(RunConfig::from_parts(cli.config.as_deref(), Value::Object(top))?)
}

fn print_report(report: &RunReport) {
    for stage in &report.stages {
        println!("{:<9} {:<8} {:>7.2}s  {}", stage.stage, format!("{:?}", stage.status).to_lowercase(), stage.seconds, stage.outputs.join(" "));
    }
    if let Some(score) = &report.score {
        print!("{}", evaluation::render_table(std::slice::from_ref(score)));
    }
}

fn run_stage(cli: &Cli, stage: &str, fields: Overrides) -> Result<RunReport, Failure> {
    let cfg = load_config(cli, Some((stage, fields)))?.only(stage)?;
    let report = pipeline::run(cfg)?;
    print_report(&report);
    Ok(report)
}

fn schema_name(raw: &str) -> Result<SchemaName, Failure> {
    serde_json::from_value(json!(raw)).map_err(|_| config_error(anyhow::anyhow!("unknown schema {raw:?} (canonical, cic, semeval)")))
}

fn load_gold(path: &Path, schema: &str, language: &str) -> Result<Corpus, Failure> {
    let schema = schema_name(schema)?.schema(language);
    let loaded = load_corpus(path, &schema).with_context(|| format!("reading {}", path.display())).map_err(config_error)?;
    for row in &loaded.rejected {
        log::warn!("{}: line {} rejected: {}", path.display(), row.line, row.reason);
    }
    Ok(loaded.corpus)
}

fn load_predictions(paths: &[PathBuf]) -> Result<Vec<PredictionSet>, Failure> {
    paths
        .iter()
        .map(|p| PredictionSet::load(p).with_context(|| format!("reading {}", p.display())).map_err(config_error))
        .collect()
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let language = || -> Result<String, Failure> { Ok(load_config(&cli, None)?.language) };
    match &cli.command {
        Command::Run => {
            if cli.config.is_none() {
                return Err(config_error(anyhow::anyhow!("run needs --config")));
            }
            let report = pipeline::run(load_config(&cli, None)?)?;
            print_report(&report);
        }
        Command::Ingest(a) => {
            let mut o = Overrides::default();
            o.path("input", &a.input)?.path("profiles_dir", &a.profiles_dir)?.set("min_words", a.min_words);
            run_stage(&cli, "ingest", o)?;
        }
        Command::Propagate(a) => {
            let mut o = Overrides::default();
            o.path("input", &a.input)?.path("seeds", &a.seeds)?;
            o.set("max_hops", a.max_hops).set("min_margin", a.min_margin).set("min_evidence", a.min_evidence);
            run_stage(&cli, "propagate", o)?;
        }
        Command::Hashtags(a) => hashtags(&cli, a)?,
        Command::Lda(a) => {
            let mut o = Overrides::default();
            o.path("input", &a.input)?;
            o.set("num_topics", a.topics)
                .set("iterations", a.iterations)
                .set("burn_in", a.burn_in)
                .set("alpha", a.alpha)
                .set("beta", a.beta)
                .set("accepted_topics", a.accept_topics.clone())
                .set("accept_words", a.accept_words.clone())
                .set("min_share", a.min_share);
            run_stage(&cli, "lda", o)?;
        }
        Command::Assemble(a) => {
            let mut o = Overrides::default();
            o.path("input", &a.input)?.set("target_total", a.target_total).set("min_words", a.min_words);
            run_stage(&cli, "assemble", o)?;
        }
        Command::Split(a) => {
            let mut o = Overrides::default();
            o.path("input", &a.input)?.set("mode", a.mode.clone()).set("ratios", a.ratios.clone());
            let report = run_stage(&cli, "split", o)?;
            let audit = fs::read_to_string(report.workspace.join("split").join("audit.json")).context("reading audit")?;
            let audit: Value = serde_json::from_str(&audit).context("parsing audit")?;
            for s in audit["splits"].as_array().into_iter().flatten() {
                println!("{:<5} {:>6} items {:>5} users", s["name"].as_str().unwrap_or(""), s["size"], s["user_count"]);
            }
        }
        Command::Preprocess(a) => preprocess(&language()?, a)?,
        Command::Train(a) => {
            run_stage(&cli, "train", train_overrides(a, false)?)?;
        }
        Command::Grid(a) => {
            let report = run_stage(&cli, "train", train_overrides(a, true)?)?;
            let grid = fs::read_to_string(report.workspace.join("train").join("grid.json")).context("reading grid results")?;
            let grid: Value = serde_json::from_str(&grid).context("parsing grid results")?;
            println!("{:>8} {:>8} {:>8}", "C", "gamma", "F1_avg");
            for c in grid["cells"].as_array().into_iter().flatten() {
                let num = |k: &str| c[k].as_f64().unwrap_or(f64::NAN);
                println!("{:>8} {:>8} {:>8.2}", num("c"), num("gamma"), num("f1_avg"));
            }
            println!("best: C={} gamma={}", grid["best"]["c"], grid["best"]["gamma"]);
        }
        Command::Score(a) if !a.predictions.is_empty() => {
            let Some(test) = &a.test else {
                return Err(config_error(anyhow::anyhow!("--predictions needs --test")));
            };
            let gold = load_gold(test, a.schema.as_deref().unwrap_or("canonical"), &language()?)?;
            let mut reports = Vec::new();
            for set in load_predictions(&a.predictions)? {
                reports.push(evaluation::score(&gold, &set).map_err(|e| Failure::from(anyhow::Error::from(e)))?);
            }
            print!("{}", evaluation::render_table(&reports));
        }
        Command::Score(a) => {
            let mut o = Overrides::default();
            o.path("test", &a.test)?.path("model", &a.model)?.path("embeddings", &a.embeddings)?;
            o.set("schema", a.schema.clone());
            let mut top = base_overrides(&cli).map_err(config_error)?;
            top.insert("score".into(), Value::Object(o.0));
            let cfg = RunConfig::from_parts(cli.config.as_deref(), Value::Object(top))?.only("score")?;
            print_report(&pipeline::run(cfg)?);
        }
        Command::Errors(a) => {
            let gold = load_gold(&a.gold, &a.schema, &language()?)?;
            let preds = load_predictions(&a.predictions)?;
            let threshold = a.threshold.unwrap_or(preds.len());
            let errors = evaluation::majority_error_set(&gold, &preds, threshold).map_err(|e| config_error(e.into()))?;
            println!("{} of {} items misclassified by at least {threshold} systems", errors.len(), gold.len());
            print!("{}", evaluation::render_confusion(&evaluation::error_confusion(&errors)));
            if let Some(out) = &a.output {
                let mut w = io::BufWriter::new(fs::File::create(out).context("creating output")?);
                let names: Vec<&str> = preds.iter().map(|p| p.system.as_str()).collect();
                writeln!(w, "id\tgold\tvote\t{}", names.join("\t")).context("writing errors")?;
                for e in &errors {
                    let labels: Vec<&str> = e.predictions.iter().map(|l| l.as_str()).collect();
                    writeln!(w, "{}\t{}\t{}\t{}", e.id, e.gold, e.vote(), labels.join("\t")).context("writing errors")?;
                }
                w.flush().context("writing errors")?;
            }
        }
        Command::Upperbound(a) => {
            let gold = load_gold(&a.gold, &a.schema, &language()?)?;
            let preds = load_predictions(&a.predictions)?;
            let mut reports = Vec::new();
            for set in &preds {
                reports.push(evaluation::score(&gold, set).map_err(|e| Failure::from(anyhow::Error::from(e)))?);
            }
            reports.push(evaluation::upperbound(&gold, &preds).map_err(|e| config_error(e.into()))?);
            print!("{}", evaluation::render_table(&reports));
        }
        Command::Serve(a) => {
            let cfg = load_config(&cli, None)?;
            let workspace = cfg.workspace.clone().ok_or_else(|| config_error(anyhow::anyhow!("serve needs --workspace")))?;
            let mut state = StateConfig::new(workspace);
            state.language = cfg.language.clone();
            state.seed = cfg.seed;
            if let Some(p) = &cfg.propagate {
                state.propagation.min_margin = p.min_margin;
                state.propagation.min_evidence = p.min_evidence;
            }
            let service = ServiceConfig {
                state,
                addr: a.addr,
                ui_dir: a.ui_dir.clone(),
            };
            let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
            rt.block_on(stance_corpus_service::serve(service)).context("serving")?;
        }
    }
    Ok(())
}

fn train_overrides(a: &TrainArgs, grid: bool) -> anyhow::Result<Overrides> {
    let mut o = Overrides::default();
    o.path("train", &a.train)?.path("dev", &a.dev)?.path("embeddings", &a.embeddings)?;
    o.set("schema", a.schema.clone())
        .set("system", a.system.clone())
        .set("preprocessing", a.preprocessing.clone())
        .set("c", a.c)
        .set("gamma", a.gamma)
        .set("grid_c", a.grid_c.clone())
        .set("grid_gamma", a.grid_gamma.clone())
        .set("folds", a.folds)
        .set("epochs", a.epochs)
        .set("learning_rate", a.learning_rate)
        .set("dimension", a.dimension)
        .set("word_ngrams", a.word_ngrams);
    if a.no_information_gain {
        o.set("information_gain", Some(false));
    }
    if grid {
        o.set("grid", Some(true));
    }
    Ok(o)
}

fn hashtags(cli: &Cli, a: &HashtagArgs) -> Result<(), Failure> {
    let cfg = load_config(cli, None)?;
    let input = match (&a.input, &cfg.workspace) {
        (Some(p), _) => p.clone(),
        (None, Some(ws)) if ws.join("propagate/labeled.tsv").exists() => ws.join("propagate/labeled.tsv"),
        (None, Some(ws)) => ws.join("ingest/tweets.tsv"),
        (None, None) => return Err(config_error(anyhow::anyhow!("hashtags needs --input or --workspace"))),
    };
    let corpus = load_gold(&input, "canonical", &cfg.language)?;
    println!("{:>6}  hashtag", "count");
    for (tag, count) in topic::extract_hashtags(&corpus).into_iter().filter(|(_, c)| *c >= a.min_freq).take(a.limit) {
        println!("{count:>6}  #{tag}");
    }
    if a.lexicon.is_some() || cfg.topic.is_some() {
        let mut o = Overrides::default();
        o.path("lexicon", &a.lexicon)?.path("input", &Some(input))?;
        run_stage(cli, "topic", o)?;
    }
    Ok(())
}

fn preprocess(language: &str, a: &PreprocessArgs) -> Result<(), Failure> {
    let resources = match &a.resources_dir {
        Some(dir) => PreprocessResources::load_dir(dir).map_err(|e| config_error(e.into()))?,
        None => PreprocessResources::bundled(),
    };
    let mut out: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).context("creating output")?)),
        None => Box::new(io::stdout().lock()),
    };
    let items: Vec<(String, String)> = match (&a.text, &a.input) {
        (Some(t), _) => vec![(String::new(), t.clone())],
        (None, Some(path)) => load_gold(path, &a.schema, language)?
            .items
            .into_iter()
            .map(|i: LabeledTweet| (i.tweet.id, i.tweet.text))
            .collect(),
        (None, None) => {
            let mut lines = Vec::new();
            for (n, line) in BufReader::new(io::stdin()).lines().enumerate() {
                let line = line.context("reading stdin")?;
                lines.push(((n + 1).to_string(), line));
            }
            lines
        }
    };
    if a.kind.needs_resources() && resources.get(language).is_none() {
        return Err(config_error(anyhow::anyhow!("no stopwords or lemmas for language {language:?}")));
    }
    let single = a.text.is_some();
    for (id, raw) in items {
        let processed = text::preprocess(&raw, a.kind, &resources, language).map_err(|e| config_error(e.into()))?;
        let written = if single { writeln!(out, "{processed}") } else { writeln!(out, "{id}\t{processed}") };
        written.context("writing output")?;
    }
    out.flush().context("writing output")?;
    Ok(())
}
