//! Command-line surface for corpus ingestion, generation, paraphrasing,
//! evaluation, and report recomputation.
//!
//! Exit codes: 0 success, 2 bad arguments or unreadable inputs, 3 pipeline
//! or experiment failure. Diagnostics go to stderr; stdout carries only the
//! requested artifacts.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use newsgen_core::baseline::{generate_from_keywords, train_ngram, NgramModel};
use newsgen_core::corpus::{load_corpus, persist_run, reload_run, save_corpus, split_and_group};
use newsgen_core::event::{Document, EventSequence, GeneratorTag, Provenance, Sentence};
use newsgen_core::paraphrase::{
    default_transform_rules, paraphrase_document, LexicalParaphraser, Paraphraser,
    RemoteParaphraser, SynonymLexicon,
};
use newsgen_core::pipeline::{evaluate_reloaded, run_experiment, run_hybrid, ExperimentConfig};
use newsgen_core::realize::realize;
use newsgen_core::report::{render_comparison, render_csv};
use newsgen_core::template::{parse_template_set, TemplateSet};

#[derive(Parser)]
#[command(
    name = "newsgen",
    version,
    about = "Generate and evaluate short news text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a JSON Lines corpus and print a summary
    Ingest {
        /// Corpus file (JSON Lines)
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Shuffle a corpus into a train split and grouped test files
    Split {
        #[arg(long)]
        corpus: PathBuf,
        /// Fraction of records in the train split
        #[arg(long, default_value_t = 0.75)]
        train_fraction: f64,
        /// Number of test groups
        #[arg(long, default_value_t = 5)]
        groups: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Directory for train.jsonl and group_N.jsonl
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate text with one system
    Generate(GenerateArgs),
    /// Paraphrase text, one sentence per input line
    Paraphrase(ParaphraseArgs),
    /// Run the three-system experiment and print the comparison tables
    Evaluate(EvaluateArgs),
    /// Recompute metrics from a persisted run and print the CSV
    Report {
        /// Run directory written by `evaluate --out-dir`
        #[arg(long)]
        run: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Rule,
    Baseline,
    Hybrid,
}

#[derive(Args)]
struct GenerateArgs {
    /// Which generator to run
    #[arg(long, value_enum)]
    system: System,
    /// Structured events file (JSON array); rule and hybrid
    #[arg(long)]
    events: Option<PathBuf>,
    /// Template file; rule and hybrid
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Synonym lexicon (TSV); hybrid
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Saved n-gram model; baseline
    #[arg(long)]
    model: Option<PathBuf>,
    /// Corpus to train the baseline model from when no model is given
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Save the trained baseline model here
    #[arg(long)]
    save_model: Option<PathBuf>,
    /// Comma-separated keywords; baseline
    #[arg(long)]
    keywords: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Per-sentence token budget for the baseline generator
    #[arg(long, default_value_t = 12)]
    max_tokens: usize,
    /// N-gram order for ad hoc baseline training
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Per-token synonym replacement probability; hybrid
    #[arg(long, default_value_t = 0.5)]
    replace_probability: f64,
    /// Remote paraphrase endpoint; hybrid
    #[arg(long)]
    remote: Option<String>,
    #[arg(long, default_value_t = 5000)]
    remote_timeout_ms: u64,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParaphraseArgs {
    /// Input file, one sentence per line (stdin when omitted)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Synonym lexicon (TSV)
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    replace_probability: f64,
    /// Remote paraphrase endpoint
    #[arg(long)]
    remote: Option<String>,
    #[arg(long, default_value_t = 5000)]
    remote_timeout_ms: u64,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Experiment config (JSON); flags below override its fields
    #[arg(long)]
    config: PathBuf,
    /// Persist documents, CSV and manifest here
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    groups: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Concurrent record processing
    #[arg(long)]
    jobs: Option<usize>,
}

enum CliError {
    /// Unusable arguments or unreadable inputs
    Usage(String),
    /// A generation or evaluation stage failed
    Pipeline(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Pipeline(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Pipeline(m) => m,
        }
    }
}

fn usage(message: impl std::fmt::Display) -> CliError {
    CliError::Usage(message.to_string())
}

fn pipeline_err(message: impl std::fmt::Display) -> CliError {
    CliError::Pipeline(message.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("newsgen: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { corpus } => ingest(&corpus),
        Command::Split {
            corpus,
            train_fraction,
            groups,
            seed,
            out_dir,
        } => split(&corpus, train_fraction, groups, seed, &out_dir),
        Command::Generate(args) => generate(args),
        Command::Paraphrase(args) => paraphrase(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Report { run } => report(&run),
    }
}

fn read_templates(path: &Path) -> Result<TemplateSet, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read templates {}: {e}", path.display())))?;
    parse_template_set(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_events(path: &Path) -> Result<EventSequence, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read events {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_lexicon(path: Option<&PathBuf>) -> Result<SynonymLexicon, CliError> {
    match path {
        Some(path) => {
            SynonymLexicon::load(path).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        None => Ok(SynonymLexicon::empty()),
    }
}

fn build_engine(
    remote: Option<&str>,
    timeout_ms: u64,
    lexicon: SynonymLexicon,
    replace_probability: f64,
) -> Box<dyn Paraphraser + Sync> {
    match remote {
        Some(endpoint) => Box::new(RemoteParaphraser::new(
            endpoint,
            Duration::from_millis(timeout_ms),
        )),
        None => Box::new(
            LexicalParaphraser::new(lexicon, default_transform_rules())
                .with_replace_probability(replace_probability),
        ),
    }
}

fn emit(document: &Document, out: Option<&PathBuf>) -> Result<(), CliError> {
    let lines: Vec<&str> = document.sentences().iter().map(|s| s.text()).collect();
    let text = lines.join("\n");
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn ingest(corpus: &Path) -> Result<(), CliError> {
    let records = load_corpus(corpus).map_err(|e| usage(e.to_string()))?;
    let events: usize = records.iter().map(|r| r.events.len()).sum();
    println!("records: {}", records.len());
    println!("events: {events}");
    println!(
        "keywords: {}",
        records.iter().map(|r| r.keywords.len()).sum::<usize>()
    );
    Ok(())
}

fn split(
    corpus: &Path,
    train_fraction: f64,
    groups: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<(), CliError> {
    let records = load_corpus(corpus).map_err(|e| usage(e.to_string()))?;
    let grouped = split_and_group(&records, train_fraction, groups, seed)
        .map_err(|e| usage(e.to_string()))?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| usage(format!("cannot create {}: {e}", out_dir.display())))?;
    save_corpus(&grouped.train, out_dir.join("train.jsonl")).map_err(|e| usage(e.to_string()))?;
    for (i, group) in grouped.test_groups.iter().enumerate() {
        save_corpus(group, out_dir.join(format!("group_{}.jsonl", i + 1)))
            .map_err(|e| usage(e.to_string()))?;
    }
    eprintln!(
        "wrote {} train records and {} groups to {}",
        grouped.train.len(),
        grouped.test_groups.len(),
        out_dir.display()
    );
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    match args.system {
        System::Rule => {
            let events = args
                .events
                .as_ref()
                .ok_or_else(|| usage("--events is required for --system rule"))?;
            let templates = args
                .templates
                .as_ref()
                .ok_or_else(|| usage("--templates is required for --system rule"))?;
            let seq = read_events(events)?;
            let set = read_templates(templates)?;
            let document = realize(&seq, &set, args.seed)
                .map_err(|e| pipeline_err(format!("realize: {e}")))?;
            emit(&document, args.out.as_ref())
        }
        System::Hybrid => {
            let events = args
                .events
                .as_ref()
                .ok_or_else(|| usage("--events is required for --system hybrid"))?;
            let templates = args
                .templates
                .as_ref()
                .ok_or_else(|| usage("--templates is required for --system hybrid"))?;
            let seq = read_events(events)?;
            let set = read_templates(templates)?;
            let lexicon = read_lexicon(args.lexicon.as_ref())?;
            let engine = build_engine(
                args.remote.as_deref(),
                args.remote_timeout_ms,
                lexicon,
                args.replace_probability,
            );
            let run = run_hybrid(&seq, &set, engine.as_ref(), args.seed)
                .map_err(|e| pipeline_err(e.to_string()))?;
            for stage in &run.trace.stages {
                for note in &stage.notes {
                    eprintln!("{}: {note}", stage.stage.name());
                }
            }
            emit(&run.document, args.out.as_ref())
        }
        System::Baseline => {
            let keywords: Vec<String> = args
                .keywords
                .as_ref()
                .ok_or_else(|| usage("--keywords is required for --system baseline"))?
                .split(',')
                .map(|k| k.trim().to_string())
                .filter(|k| !k.is_empty())
                .collect();
            let model = match (&args.model, &args.corpus) {
                (Some(path), _) => NgramModel::load(path).map_err(|e| usage(e.to_string()))?,
                (None, Some(corpus)) => {
                    let records = load_corpus(corpus).map_err(|e| usage(e.to_string()))?;
                    let texts: Vec<String> =
                        records.into_iter().map(|r| r.reference_text).collect();
                    train_ngram(&texts, args.order)
                        .map_err(|e| pipeline_err(format!("train: {e}")))?
                }
                (None, None) => {
                    return Err(usage(
                        "--system baseline needs --model or --corpus to train from",
                    ))
                }
            };
            if let Some(path) = &args.save_model {
                model.save(path).map_err(|e| usage(e.to_string()))?;
                eprintln!("saved model to {}", path.display());
            }
            let generation = generate_from_keywords(&model, &keywords, args.max_tokens, args.seed)
                .map_err(|e| pipeline_err(format!("generate: {e}")))?;
            for warning in &generation.warnings {
                eprintln!("{warning}");
            }
            emit(&generation.document, args.out.as_ref())
        }
    }
}

fn paraphrase(args: ParaphraseArgs) -> Result<(), CliError> {
    let text = match &args.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|e| usage(format!("cannot read stdin: {e}")))?;
            buffer
        }
    };
    let mut sentences = Vec::new();
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let mut normalized = line.trim().to_string();
        if !normalized.ends_with(['.', '!', '?']) {
            normalized.push('.');
        }
        let mut chars = normalized.chars();
        if let Some(first) = chars.next() {
            if first.is_alphabetic() && first.is_lowercase() {
                normalized = first.to_uppercase().chain(chars).collect();
            }
        }
        let sentence = Sentence::new(normalized, i, Provenance::RuleRealized)
            .map_err(|e| usage(format!("line {}: {e}", i + 1)))?;
        sentences.push(sentence);
    }
    if sentences.is_empty() {
        return Err(usage("no sentences to paraphrase"));
    }
    let document = Document::new(sentences, GeneratorTag::Reference)
        .expect("indices are contiguous by construction");
    let lexicon = read_lexicon(args.lexicon.as_ref())?;
    let engine = build_engine(
        args.remote.as_deref(),
        args.remote_timeout_ms,
        lexicon,
        args.replace_probability,
    );
    let out = paraphrase_document(&document, engine.as_ref(), args.seed)
        .map_err(|e| pipeline_err(e.to_string()))?;
    for warning in &out.warnings {
        eprintln!("{warning}");
    }
    for sentence in out.document.sentences() {
        println!("{}", sentence.text());
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let mut config = ExperimentConfig::load(&args.config).map_err(|e| usage(e.to_string()))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(groups) = args.groups {
        config.group_count = groups;
    }
    if let Some(train_fraction) = args.train_fraction {
        config.train_fraction = train_fraction;
    }
    if let Some(jobs) = args.jobs {
        config.jobs = jobs;
    }
    let records = load_corpus(&args.corpus).map_err(|e| usage(e.to_string()))?;
    let templates = read_templates(&config.template_path)?;
    let lexicon = if config.lexicon_path.as_os_str().is_empty() {
        SynonymLexicon::empty()
    } else {
        read_lexicon(Some(&config.lexicon_path))?
    };
    let engine = build_engine(
        config.remote_endpoint.as_deref(),
        config.remote_timeout_ms,
        lexicon,
        config.replace_probability,
    );
    let corpus = split_and_group(
        &records,
        config.train_fraction,
        config.group_count,
        config.seed,
    )
    .map_err(|e| usage(e.to_string()))?;
    let outcome = run_experiment(&corpus, &templates, engine.as_ref(), &config)
        .map_err(|e| pipeline_err(e.to_string()))?;
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    let pairs: Vec<(GeneratorTag, &newsgen_core::metrics::HmcuReport)> = outcome
        .artifacts
        .reports
        .iter()
        .map(|(tag, report)| (*tag, report))
        .collect();
    print!("{}", render_comparison(&pairs));
    if let Some(out_dir) = &args.out_dir {
        let manifest =
            persist_run(&outcome.artifacts, out_dir).map_err(|e| pipeline_err(e.to_string()))?;
        eprintln!("wrote run to {}", manifest.display());
    }
    Ok(())
}

fn report(run_dir: &Path) -> Result<(), CliError> {
    let run = reload_run(run_dir).map_err(|e| usage(e.to_string()))?;
    let reports = evaluate_reloaded(&run);
    let pairs: Vec<(GeneratorTag, &newsgen_core::metrics::HmcuReport)> =
        reports.iter().map(|(tag, report)| (*tag, report)).collect();
    print!("{}", render_csv(&pairs));
    Ok(())
}
