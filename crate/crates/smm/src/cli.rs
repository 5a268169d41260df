//! The `smm` command line.
//!
//! Exit status is 0 on success, 1 for invalid input or arguments and 2 for
//! I/O failures. Diagnostics go to stderr; set `SMM_LOG` to raise verbosity.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use smm_core::episode::{analyze, build_history, Analysis};
use smm_core::predictor::{batch_report, PredictionReport, WeightScheme};
use smm_core::scoring::{score, ConfirmationLog, ScoreCard};
use smm_core::synth::{generate, GenConfig};
use smm_core::{LevelId, Record, Scenario, TeamId};
use thiserror::Error;

use crate::formats::{self, IngestError};
use crate::report;

#[derive(Debug, Parser)]
#[command(
    name = "smm",
    version,
    about = "Track and predict shared mental model discrepancies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count discrepancies per team and level.
    Analyze(AnalyzeArgs),
    /// Predict a level's counts from the other levels.
    Predict(PredictArgs),
    /// Score target confirmations.
    Score(ScoreArgs),
    /// Write a synthetic corpus with its plant ledger.
    Generate(GenerateArgs),
    /// Counts, predictions and scores in one document.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// One or more JSONL event streams, read in order.
    #[arg(long, num_args = 1.., required = true)]
    pub events: Vec<PathBuf>,
    /// Teams to include even if they have no events, e.g. `1,2,8`.
    #[arg(long, value_delimiter = ',')]
    pub teams: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Long `team,level,kind,count` CSV for plotting.
    #[arg(long)]
    pub long: bool,
    /// Also write every detected discrepancy as JSONL.
    #[arg(long)]
    pub discrepancies: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Level to predict; defaults to the last declared level.
    #[arg(long)]
    pub target: Option<u32>,
    /// `uniform`, or `level:weight` pairs such as `1:0.5,2:0.3,3:0.2`.
    #[arg(long, default_value = "uniform")]
    pub weights: String,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Only count confirmations made during this level.
    #[arg(long)]
    pub level: Option<u32>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub teams: Option<u32>,
    #[arg(long)]
    pub levels: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub events_per_level: Option<u32>,
    #[arg(long)]
    pub spread: Option<f64>,
    #[arg(long)]
    pub noise: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(long)]
    pub target: Option<u32>,
    #[arg(long, default_value = "uniform")]
    pub weights: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{name}: {0}", name = .0.name())]
    Ingest(#[from] IngestError),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Ingest(e) if e.is_io() => 2,
            CliError::Io { .. } => 2,
            _ => 1,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

struct Loaded {
    scenario: Scenario,
    records: Vec<Record>,
    teams: Vec<TeamId>,
}

fn load(input: &InputArgs) -> Result<Loaded, CliError> {
    let scenario = formats::load_scenario(&input.scenario)?;
    let batches: Vec<Result<Vec<Record>, IngestError>> = std::thread::scope(|s| {
        let handles: Vec<_> = input
            .events
            .iter()
            .map(|path| s.spawn(|| formats::load_events(path, &scenario)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("parser thread panicked"))
            .collect()
    });
    let mut records = Vec::new();
    for (path, batch) in input.events.iter().zip(batches) {
        let mut batch = batch?;
        debug!("{}: {} records", path.display(), batch.len());
        records.append(&mut batch);
    }
    let mut teams: Vec<TeamId> = input.teams.iter().map(|t| TeamId(*t)).collect();
    if teams.iter().any(|t| t.0 == 0) {
        return Err(invalid("team ids start at 1"));
    }
    teams.extend(records.iter().map(Record::team));
    teams.sort();
    teams.dedup();
    Ok(Loaded {
        scenario,
        records,
        teams,
    })
}

fn run_analysis(loaded: &Loaded) -> Result<Analysis, CliError> {
    analyze(
        &loaded.scenario,
        &loaded.records,
        loaded.teams.iter().copied(),
    )
    .map_err(invalid)
}

fn parse_scheme(
    text: &str,
    scenario: &Scenario,
    target: LevelId,
) -> Result<WeightScheme, CliError> {
    let scheme = if text.trim() == "uniform" {
        WeightScheme::uniform(scenario.level_ids().into_iter().filter(|l| *l != target))
    } else {
        text.parse::<WeightScheme>()
    }
    .map_err(invalid)?;
    if scheme.weight(target).is_some() {
        return Err(invalid(format!(
            "target level {target} cannot also be a predictor"
        )));
    }
    Ok(scheme)
}

fn resolve_target(target: Option<u32>, scenario: &Scenario) -> Result<LevelId, CliError> {
    let levels = scenario.level_ids();
    let target = match target {
        Some(t) => LevelId(t),
        None => *levels
            .last()
            .ok_or_else(|| invalid("scenario declares no levels"))?,
    };
    if scenario.level(target).is_none() {
        return Err(invalid(format!("unknown target level {target}")));
    }
    if levels.len() < 2 {
        return Err(invalid("prediction needs at least two levels"));
    }
    Ok(target)
}

fn run_predict(
    loaded: &Loaded,
    analysis: &Analysis,
    target: Option<u32>,
    weights: &str,
) -> Result<PredictionReport, CliError> {
    let target = resolve_target(target, &loaded.scenario)?;
    let scheme = parse_scheme(weights, &loaded.scenario, target)?;
    let histories = build_history(&analysis.counts).map_err(invalid)?;
    batch_report(&histories, target, &scheme).map_err(invalid)
}

fn run_score(loaded: &Loaded, level: Option<u32>) -> Result<Vec<ScoreCard>, CliError> {
    if let Some(l) = level {
        if loaded.scenario.level(LevelId(l)).is_none() {
            return Err(invalid(format!("unknown level {l}")));
        }
    }
    let mut logs: Vec<ConfirmationLog> = loaded
        .teams
        .iter()
        .map(|t| ConfirmationLog::new(*t))
        .collect();
    for record in &loaded.records {
        let Record::Confirmation(c) = record else {
            continue;
        };
        if level.is_some_and(|l| c.level != LevelId(l)) {
            continue;
        }
        if let Some(log) = logs.iter_mut().find(|log| log.team == c.team) {
            log.confirm(c.element_id.clone());
        }
    }
    logs.iter()
        .map(|log| score(&loaded.scenario.targets, log).map_err(invalid))
        .collect()
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &out.output {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn analyze_cmd(args: &AnalyzeArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    let analysis = run_analysis(&loaded)?;
    info!(
        "{} teams, {} discrepancies",
        loaded.teams.len(),
        analysis.records.len()
    );
    if let Some(path) = &args.discrepancies {
        let mut text = String::new();
        for d in &analysis.records {
            text.push_str(&serde_json::to_string(d).map_err(invalid)?);
            text.push('\n');
        }
        write_file(path, &text)?;
    }
    let text = if args.long {
        report::counts_long_csv(&analysis.counts)
    } else {
        match args.out.format {
            Format::Csv => report::counts_csv(&analysis.counts),
            Format::Json => report::counts_json(&analysis.counts),
            Format::Table => report::counts_table(&analysis.counts),
        }
    };
    emit(&args.out, &text)
}

fn predict_cmd(args: &PredictArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    let analysis = run_analysis(&loaded)?;
    let rep = run_predict(&loaded, &analysis, args.target, &args.weights)?;
    let text = match args.out.format {
        Format::Csv => report::predictions_csv(&rep),
        Format::Json => report::predictions_json(&rep),
        Format::Table => report::predictions_table(&rep),
    };
    emit(&args.out, &text)
}

fn score_cmd(args: &ScoreArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    let cards = run_score(&loaded, args.level)?;
    let text = match args.out.format {
        Format::Csv => report::score_csv(&cards),
        Format::Json => report::score_json(&cards),
        Format::Table => report::score_table(&cards),
    };
    emit(&args.out, &text)
}

fn generate_cmd(args: &GenerateArgs) -> Result<(), CliError> {
    let mut config = GenConfig::with_seed(args.seed);
    if let Some(t) = args.teams {
        config.teams = t;
    }
    if let Some(l) = args.levels {
        config.levels = l;
    }
    if let Some(e) = args.events_per_level {
        config.events_per_level = e;
    }
    if let Some(s) = args.spread {
        config.team_baseline_spread = s;
    }
    if let Some(n) = args.noise {
        config.noise = n;
    }
    let corpus = generate(&config).map_err(invalid)?;
    fs::create_dir_all(&args.out_dir).map_err(|source| CliError::Io {
        path: args.out_dir.clone(),
        source,
    })?;
    formats::save_scenario(&corpus.scenario, &args.out_dir.join("scenario.json"))?;
    formats::save_events(&corpus.records, &args.out_dir.join("events.jsonl"))?;
    formats::save_ledger(&corpus.ledger, &args.out_dir.join("ledger.json"))?;
    info!(
        "wrote {} records and {} plantings to {}",
        corpus.records.len(),
        corpus.ledger.planted.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn report_cmd(args: &ReportArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    let analysis = run_analysis(&loaded)?;
    let rep = run_predict(&loaded, &analysis, args.target, &args.weights)?;
    let cards = run_score(&loaded, None)?;
    let text = match args.out.format {
        Format::Json => {
            let counts: serde_json::Value =
                serde_json::from_str(&report::counts_json(&analysis.counts)).map_err(invalid)?;
            formats::to_json_document(&serde_json::json!({
                "counts": counts,
                "predictions": report::predictions_value(&rep),
                "scores": report::score_value(&cards),
            }))
        }
        Format::Csv => format!(
            "{}\n{}\n{}",
            report::counts_csv(&analysis.counts),
            report::predictions_csv(&rep),
            report::score_csv(&cards)
        ),
        Format::Table => format!(
            "{}\n{}\n{}",
            report::counts_table(&analysis.counts),
            report::predictions_table(&rep),
            report::score_table(&cards)
        ),
    };
    emit(&args.out, &text)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => analyze_cmd(a),
        Command::Predict(a) => predict_cmd(a),
        Command::Score(a) => score_cmd(a),
        Command::Generate(a) => generate_cmd(a),
        Command::Report(a) => report_cmd(a),
    }
}

/// Parses arguments, runs the command and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("SMM_LOG", "warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
