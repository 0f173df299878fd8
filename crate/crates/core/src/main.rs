//! Command-line front end: wires configuration, cache, providers,
//! strategies, and reporting into subcommands.

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use presuppose::cache::DiskCache;
use presuppose::config::RunConfig;
use presuppose::evaldata::{
    cost_report_from_predictions, evaluate, load_dataset, mcnemar, read_predictions,
    read_tags_file, tag_errors, DatasetInstance, PredictionRecord, RunHeader,
};
use presuppose::llm::{CompletionProvider, HttpProvider, MockProvider};
use presuppose::prompts::{PromptRenderer, TemplateSet};
use presuppose::retrieval::{
    CachedPageFetcher, CachedSearchProvider, EmbeddingScorer, FixturePageFetcher,
    FixtureSearchProvider, HttpEmbeddingClient, HttpPageFetcher, HttpSearchProvider,
    LexicalScorer, PageFetcher, SearchProvider, SentenceScorer,
};
use presuppose::runner::run_dataset;
use presuppose::strategies::{
    EvidenceMode, FixtureVerifier, HttpVerifier, Pipeline, StrategyConfig, StrategyFamily,
    VerifierProvider,
};
use presuppose::types::{Corpus, InputKind, QuestionRecord, UsageRecord};
use presuppose::Session;

#[derive(Parser)]
#[command(
    name = "presuppose",
    version,
    about = "Identify and answer questions with false assumptions"
)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cache directory (also PRESUPPOSE_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Maximum questions in flight.
    #[arg(long, global = true)]
    concurrency: Option<usize>,
    /// Shortcut: use the mock provider with this script file.
    #[arg(long, global = true)]
    mock_script: Option<PathBuf>,
    /// Model identifier recorded in request fingerprints.
    #[arg(long, global = true)]
    model: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform questions into statements, one JSONL line per question.
    Transform {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "custom")]
        corpus: CorpusArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Retrieve and rank evidence sentences per question.
    Retrieve {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "custom")]
        corpus: CorpusArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Seed retrieval with the question or its statement form.
        #[arg(long, value_enum, default_value = "question")]
        query_kind: KindArg,
    },
    /// Run an identification strategy end to end, writing predictions.
    Run {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "custom")]
        corpus: CorpusArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "direct")]
        family: FamilyArg,
        #[arg(long, value_enum, default_value = "question")]
        input_kind: KindArg,
        #[arg(long, value_enum, default_value = "none")]
        evidence: EvidenceArg,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Support-probability threshold for the fact-verification family.
        #[arg(long, default_value_t = 0.5)]
        fv_threshold: f64,
        /// Reuse question-level evidence for every assumption instead of
        /// retrieving with each assumption's own text.
        #[arg(long)]
        reuse_question_evidence: bool,
    },
    /// Score a prediction file against gold labels.
    Eval {
        #[arg(long)]
        preds: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "custom")]
        corpus: CorpusArg,
        /// Also write the report as JSON.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// McNemar's test between two prediction files on the same dataset.
    Compare {
        #[arg(long)]
        preds_a: PathBuf,
        #[arg(long)]
        preds_b: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "custom")]
        corpus: CorpusArg,
    },
    /// Aggregate per-question inference cost from a prediction file.
    Cost {
        #[arg(long)]
        preds: PathBuf,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Tabulate human-tagged error categories split by FP/FN.
    TagErrors {
        #[arg(long)]
        preds: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value = "custom")]
        corpus: CorpusArg,
        /// JSON object mapping question id to category name.
        #[arg(long)]
        tags: PathBuf,
        /// Also write the tabulation as JSON.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CorpusArg {
    Qa2,
    Crepe,
    Falseqa,
    Custom,
}

impl From<CorpusArg> for Corpus {
    fn from(value: CorpusArg) -> Self {
        match value {
            CorpusArg::Qa2 => Corpus::Qa2,
            CorpusArg::Crepe => Corpus::Crepe,
            CorpusArg::Falseqa => Corpus::FalseQa,
            CorpusArg::Custom => Corpus::Custom,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Question,
    Statement,
}

impl From<KindArg> for InputKind {
    fn from(value: KindArg) -> Self {
        match value {
            KindArg::Question => InputKind::Question,
            KindArg::Statement => InputKind::Statement,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Direct,
    FactVerify,
    GeneratedEvidence,
    Atomic,
}

impl From<FamilyArg> for StrategyFamily {
    fn from(value: FamilyArg) -> Self {
        match value {
            FamilyArg::Direct => StrategyFamily::Direct,
            FamilyArg::FactVerify => StrategyFamily::FactVerify,
            FamilyArg::GeneratedEvidence => StrategyFamily::GeneratedEvidence,
            FamilyArg::Atomic => StrategyFamily::Atomic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EvidenceArg {
    None,
    Gold,
    Question,
    Statement,
}

impl From<EvidenceArg> for EvidenceMode {
    fn from(value: EvidenceArg) -> Self {
        match value {
            EvidenceArg::None => EvidenceMode::None,
            EvidenceArg::Gold => EvidenceMode::Gold,
            EvidenceArg::Question => EvidenceMode::RetrievedByQuestion,
            EvidenceArg::Statement => EvidenceMode::RetrievedByStatement,
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => {}
        Ok(failed) => {
            eprintln!("{failed} question(s) produced no output");
            std::process::exit(1);
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

/// Returns the number of instances that produced no output.
fn run(cli: Cli) -> Result<usize> {
    let mut config = RunConfig::load_or_default(cli.config.as_deref())?;
    if let Some(dir) = &cli.cache_dir {
        config.run.cache_dir = Some(dir.to_string_lossy().into_owned());
    }
    if let Some(n) = cli.concurrency {
        config.run.concurrency = n;
    }
    if let Some(script) = &cli.mock_script {
        config.llm.kind = "mock".into();
        config.llm.script = Some(script.to_string_lossy().into_owned());
    }
    if let Some(model) = &cli.model {
        config.llm.model = model.clone();
    }

    match cli.command {
        Command::Transform { dataset, corpus, out } => {
            cmd_transform(&config, &dataset, corpus.into(), &out)
        }
        Command::Retrieve { dataset, corpus, out, k, query_kind } => {
            cmd_retrieve(&config, &dataset, corpus.into(), &out, k, query_kind.into())
        }
        Command::Run {
            dataset,
            corpus,
            out,
            family,
            input_kind,
            evidence,
            k,
            fv_threshold,
            reuse_question_evidence,
        } => {
            let strategy = StrategyConfig {
                family: family.into(),
                input_kind: input_kind.into(),
                evidence_mode: evidence.into(),
                k,
                fv_threshold,
                reuse_question_evidence,
            };
            cmd_run(&config, &dataset, corpus.into(), &out, &strategy)
        }
        Command::Eval { preds, dataset, corpus, json_out } => {
            cmd_eval(&preds, &dataset, corpus.into(), json_out.as_deref())?;
            Ok(0)
        }
        Command::Compare { preds_a, preds_b, dataset, corpus } => {
            cmd_compare(&preds_a, &preds_b, &dataset, corpus.into())?;
            Ok(0)
        }
        Command::Cost { preds, json_out } => {
            cmd_cost(&preds, json_out.as_deref())?;
            Ok(0)
        }
        Command::TagErrors { preds, dataset, corpus, tags, json_out } => {
            cmd_tag_errors(&preds, &dataset, corpus.into(), &tags, json_out.as_deref())?;
            Ok(0)
        }
    }
}

fn open_cache(config: &RunConfig) -> Result<Option<Arc<DiskCache>>> {
    match &config.run.cache_dir {
        Some(dir) => {
            let cache = DiskCache::open(Path::new(dir))
                .with_context(|| format!("opening cache directory {dir}"))?;
            Ok(Some(Arc::new(cache)))
        }
        None => Ok(None),
    }
}

fn build_session(config: &RunConfig, cache: Option<Arc<DiskCache>>) -> Result<Session> {
    let provider: Arc<dyn CompletionProvider> = match config.llm.kind.as_str() {
        "mock" => {
            let script = config
                .llm
                .script
                .as_ref()
                .ok_or_else(|| anyhow!("llm.script (or --mock-script) is required for the mock provider"))?;
            Arc::new(MockProvider::from_script_file(Path::new(script))?)
        }
        "http" => {
            if config.run.deterministic {
                bail!("run.deterministic requires the mock provider");
            }
            let base = config
                .llm
                .base_url
                .as_ref()
                .ok_or_else(|| anyhow!("llm.base_url or PRESUPPOSE_API_BASE is required"))?;
            Arc::new(HttpProvider::new(base, RunConfig::llm_api_key()))
        }
        other => bail!("unknown llm.kind {other:?} (expected \"mock\" or \"http\")"),
    };
    Ok(Session::new(provider, cache))
}

fn build_renderer(config: &RunConfig) -> Result<PromptRenderer> {
    let templates = match &config.prompts.dir {
        Some(dir) => TemplateSet::from_dir(Path::new(dir))?,
        None => TemplateSet::builtin(),
    };
    Ok(PromptRenderer::new(templates, config.llm.model.clone())
        .with_zero_shot_instruction(config.llm.zero_shot_instruction.clone()))
}

fn build_scorer(config: &RunConfig, cache: Option<Arc<DiskCache>>) -> Result<Arc<dyn SentenceScorer>> {
    match config.embedding.kind.as_str() {
        "lexical" => Ok(Arc::new(LexicalScorer)),
        "http" => {
            if config.run.deterministic {
                bail!("run.deterministic requires the lexical scorer");
            }
            let base = config
                .embedding
                .base_url
                .as_ref()
                .ok_or_else(|| anyhow!("embedding.base_url is required for embedding.kind = \"http\""))?;
            let mut client =
                HttpEmbeddingClient::new(base, RunConfig::llm_api_key(), &config.embedding.model);
            if let Some(cache) = cache {
                client = client.with_cache(cache);
            }
            Ok(Arc::new(EmbeddingScorer::new(client)))
        }
        other => bail!("unknown embedding.kind {other:?} (expected \"lexical\" or \"http\")"),
    }
}

fn build_fetch(
    config: &RunConfig,
    cache: Option<Arc<DiskCache>>,
) -> Result<(Arc<dyn SearchProvider>, Arc<dyn PageFetcher>)> {
    let search: Arc<dyn SearchProvider> = match config.search.kind.as_str() {
        "fixture" => {
            let path = config
                .search
                .fixture
                .as_ref()
                .ok_or_else(|| anyhow!("search.fixture file is required for search.kind = \"fixture\""))?;
            Arc::new(FixtureSearchProvider::from_file(Path::new(path))?)
        }
        "http" => {
            if config.run.deterministic {
                bail!("run.deterministic requires fixture providers");
            }
            let base = config
                .search
                .base_url
                .as_ref()
                .ok_or_else(|| anyhow!("search.base_url is required for search.kind = \"http\""))?;
            Arc::new(HttpSearchProvider::new(base, config.search_api_key()))
        }
        other => bail!("unknown search.kind {other:?} (expected \"fixture\" or \"http\")"),
    };
    let pages: Arc<dyn PageFetcher> = match config.search.kind.as_str() {
        "fixture" => {
            let path = config
                .search
                .pages_fixture
                .as_ref()
                .ok_or_else(|| anyhow!("search.pages_fixture file is required for search.kind = \"fixture\""))?;
            Arc::new(FixturePageFetcher::from_file(Path::new(path))?)
        }
        _ => Arc::new(HttpPageFetcher::new(config.search.max_per_host)),
    };
    match cache {
        Some(cache) => Ok((
            Arc::new(CachedSearchProvider::new(search, Arc::clone(&cache))),
            Arc::new(CachedPageFetcher::new(pages, cache)),
        )),
        None => Ok((search, pages)),
    }
}

fn build_verifier(config: &RunConfig) -> Result<Arc<dyn VerifierProvider>> {
    match config.verifier.kind.as_str() {
        "fixture" => {
            let path = config
                .verifier
                .fixture
                .as_ref()
                .ok_or_else(|| anyhow!("verifier.fixture file is required for verifier.kind = \"fixture\""))?;
            Ok(Arc::new(FixtureVerifier::from_file(Path::new(path))?))
        }
        "http" => {
            let base = config
                .verifier
                .base_url
                .as_ref()
                .ok_or_else(|| anyhow!("verifier.base_url is required for verifier.kind = \"http\""))?;
            Ok(Arc::new(HttpVerifier::new(base, RunConfig::llm_api_key())))
        }
        other => bail!("unknown verifier.kind {other:?} (expected \"fixture\" or \"http\")"),
    }
}

fn build_pipeline(config: &RunConfig, strategy: Option<&StrategyConfig>) -> Result<Pipeline> {
    let cache = open_cache(config)?;
    let session = build_session(config, cache.clone())?;
    let renderer = build_renderer(config)?;
    let mut pipeline = Pipeline::new(session, renderer);
    let needs_fetch = strategy.is_none_or(|s| {
        matches!(
            s.evidence_mode,
            EvidenceMode::RetrievedByQuestion | EvidenceMode::RetrievedByStatement
        )
    });
    if needs_fetch && (config.search.fixture.is_some() || config.search.base_url.is_some()) {
        let (search, pages) = build_fetch(config, cache.clone())?;
        pipeline = pipeline.with_fetch(search, pages);
    }
    pipeline = pipeline.with_scorer(build_scorer(config, cache)?);
    if strategy.is_some_and(|s| s.family == StrategyFamily::FactVerify) {
        pipeline = pipeline.with_verifier(build_verifier(config)?);
    }
    Ok(pipeline)
}

fn make_header(
    command: &str,
    config: &RunConfig,
    strategy: Option<&StrategyConfig>,
    dataset: &Path,
    corpus: Corpus,
) -> RunHeader {
    RunHeader {
        run_config: json!({
            "command": command,
            "strategy": strategy,
            "config": config,
            "dataset": dataset.to_string_lossy(),
            "corpus": corpus.as_str(),
        }),
    }
}

/// Ids already present in an output file, for resume. Missing file means a
/// fresh run.
fn existing_ids(path: &Path) -> Result<HashSet<String>> {
    if !path.exists() {
        return Ok(HashSet::new());
    }
    let raw = std::fs::read_to_string(path)?;
    let mut ids = HashSet::new();
    for line in raw.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line)
            .with_context(|| format!("unparseable line in existing output {}", path.display()))?;
        if value.get("run_config").is_some() {
            continue;
        }
        if let Some(id) = value.get("id").and_then(|v| v.as_str()) {
            ids.insert(id.to_string());
        }
    }
    Ok(ids)
}

/// Open an output file for appending, writing the header first when the
/// file is new.
fn open_output(path: &Path, header: &RunHeader) -> Result<std::fs::File> {
    let fresh = !path.exists();
    let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "{}", serde_json::to_string(header)?)?;
    }
    Ok(file)
}

#[derive(Serialize, Deserialize)]
struct TransformLine {
    id: String,
    statement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flags: Option<Vec<String>>,
}

fn cmd_transform(config: &RunConfig, dataset: &Path, corpus: Corpus, out: &Path) -> Result<usize> {
    let instances = load_dataset(dataset, corpus)?;
    let pipeline = build_pipeline(config, Some(&StrategyConfig::default()))?;
    let done = existing_ids(out)?;
    let pending: Vec<&DatasetInstance> =
        instances.iter().filter(|i| !done.contains(&i.id)).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.concurrency.max(1))
        .build()?;
    let results: Vec<(String, Result<TransformLine>)> = pool.install(|| {
        pending
            .par_iter()
            .map(|instance| {
                let result = (|| {
                    let question =
                        QuestionRecord::new(&instance.id, &instance.question_text, corpus)?;
                    let mut usage = UsageRecord::default();
                    let mut flags = Vec::new();
                    let statement =
                        pipeline.transform_with_fallback(&question, &mut usage, &mut flags)?;
                    Ok(TransformLine {
                        id: instance.id.clone(),
                        statement: statement.text,
                        flags: if flags.is_empty() {
                            None
                        } else {
                            Some(flags.iter().map(|f| f.as_str().to_string()).collect())
                        },
                    })
                })();
                (instance.id.clone(), result)
            })
            .collect()
    });

    let header = make_header("transform", config, None, dataset, corpus);
    let mut file = open_output(out, &header)?;
    let mut failures = 0;
    for (id, result) in results {
        match result {
            Ok(line) => writeln!(file, "{}", serde_json::to_string(&line)?)?,
            Err(e) => {
                eprintln!("{id}: {e:#}");
                failures += 1;
            }
        }
    }
    println!("transform: {} statement(s) written to {}", pending.len() - failures, out.display());
    Ok(failures)
}

#[derive(Serialize)]
struct SentenceLine {
    text: String,
    score: f64,
    source_url: String,
}

#[derive(Serialize)]
struct EvidenceLine {
    id: String,
    origin: String,
    sentences: Vec<SentenceLine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flags: Option<Vec<String>>,
}

fn cmd_retrieve(
    config: &RunConfig,
    dataset: &Path,
    corpus: Corpus,
    out: &Path,
    k: usize,
    query_kind: InputKind,
) -> Result<usize> {
    let strategy = StrategyConfig {
        evidence_mode: match query_kind {
            InputKind::Question => EvidenceMode::RetrievedByQuestion,
            InputKind::Statement => EvidenceMode::RetrievedByStatement,
        },
        k,
        ..StrategyConfig::default()
    };
    strategy.validate().map_err(|e| anyhow!("{e}"))?;
    let instances = load_dataset(dataset, corpus)?;
    let pipeline = build_pipeline(config, Some(&strategy))?;
    let done = existing_ids(out)?;
    let pending: Vec<&DatasetInstance> =
        instances.iter().filter(|i| !done.contains(&i.id)).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.concurrency.max(1))
        .build()?;
    let results: Vec<(String, Result<EvidenceLine>)> = pool.install(|| {
        pending
            .par_iter()
            .map(|instance| {
                let result = (|| {
                    let question =
                        QuestionRecord::new(&instance.id, &instance.question_text, corpus)?;
                    let mut usage = UsageRecord::default();
                    let mut flags = Vec::new();
                    let query = match query_kind {
                        InputKind::Question => question.text.clone(),
                        InputKind::Statement => {
                            pipeline
                                .transform_with_fallback(&question, &mut usage, &mut flags)?
                                .text
                        }
                    };
                    let set =
                        pipeline.retrieve_evidence(&instance.id, &query, query_kind, k)?;
                    Ok(EvidenceLine {
                        id: instance.id.clone(),
                        origin: set.origin.as_str().to_string(),
                        sentences: set
                            .sentences
                            .iter()
                            .map(|s| SentenceLine {
                                text: s.text.clone(),
                                score: s.score,
                                source_url: s.source_url.clone(),
                            })
                            .collect(),
                        flags: if flags.is_empty() {
                            None
                        } else {
                            Some(flags.iter().map(|f| f.as_str().to_string()).collect())
                        },
                    })
                })();
                (instance.id.clone(), result)
            })
            .collect()
    });

    let header = make_header("retrieve", config, Some(&strategy), dataset, corpus);
    let mut file = open_output(out, &header)?;
    let mut failures = 0;
    for (id, result) in results {
        match result {
            Ok(line) => writeln!(file, "{}", serde_json::to_string(&line)?)?,
            Err(e) => {
                eprintln!("{id}: {e:#}");
                failures += 1;
            }
        }
    }
    println!("retrieve: {} evidence line(s) written to {}", pending.len() - failures, out.display());
    Ok(failures)
}

fn cmd_run(
    config: &RunConfig,
    dataset: &Path,
    corpus: Corpus,
    out: &Path,
    strategy: &StrategyConfig,
) -> Result<usize> {
    strategy.validate().map_err(|e| anyhow!("{e}"))?;
    let instances = load_dataset(dataset, corpus)?;
    let pipeline = build_pipeline(config, Some(strategy))?;
    let done = existing_ids(out)?;
    let pending: Vec<DatasetInstance> =
        instances.into_iter().filter(|i| !done.contains(&i.id)).collect();

    let outcome = run_dataset(&pipeline, strategy, &pending, config.run.concurrency);

    let header = make_header("run", config, Some(strategy), dataset, corpus);
    let mut file = open_output(out, &header)?;
    for record in &outcome.records {
        writeln!(file, "{}", serde_json::to_string(record)?)?;
    }
    for (id, error) in &outcome.failures {
        eprintln!("{id}: {error}");
    }
    let total = pipeline.session().meter().total();
    println!(
        "run: {} prediction(s) written to {} ({} llm calls, {} prompt + {} completion tokens{})",
        outcome.records.len(),
        out.display(),
        total.llm_calls,
        total.prompt_tokens,
        total.completion_tokens,
        if total.estimated { ", estimated" } else { "" },
    );
    Ok(outcome.failures.len())
}

fn prediction_pairs(records: &[PredictionRecord]) -> Vec<(String, presuppose::Label)> {
    records.iter().map(PredictionRecord::id_label).collect()
}

fn cmd_eval(preds: &Path, dataset: &Path, corpus: Corpus, json_out: Option<&Path>) -> Result<()> {
    let golds = load_dataset(dataset, corpus)?;
    let records = read_predictions(preds)?;
    let report = evaluate(&prediction_pairs(&records), &golds, corpus)?;
    print!("{}", report.human_table());
    if let Some(path) = json_out {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

fn cmd_compare(preds_a: &Path, preds_b: &Path, dataset: &Path, corpus: Corpus) -> Result<()> {
    let golds = load_dataset(dataset, corpus)?;
    let a = read_predictions(preds_a)?;
    let b = read_predictions(preds_b)?;
    let result = mcnemar(&prediction_pairs(&a), &prediction_pairs(&b), &golds)?;
    let star = if result.significant(0.05) { " *" } else { "" };
    println!(
        "mcnemar: b={} c={} p={:.6} method={}{}",
        result.b,
        result.c,
        result.p_value,
        match result.method {
            presuppose::evaldata::McNemarMethod::Exact => "exact",
            presuppose::evaldata::McNemarMethod::Chi2 => "chi2",
        },
        star
    );
    Ok(())
}

fn cmd_cost(preds: &Path, json_out: Option<&Path>) -> Result<()> {
    let records = read_predictions(preds)?;
    let report = cost_report_from_predictions(&records);
    print!("{}", report.human_table());
    if let Some(path) = json_out {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

fn cmd_tag_errors(
    preds: &Path,
    dataset: &Path,
    corpus: Corpus,
    tags: &Path,
    json_out: Option<&Path>,
) -> Result<()> {
    let golds = load_dataset(dataset, corpus)?;
    let records = read_predictions(preds)?;
    let tag_map = read_tags_file(tags)?;
    let report = tag_errors(&prediction_pairs(&records), &golds, &tag_map)?;
    print!("{}", report.human_table());
    if let Some(path) = json_out {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}
