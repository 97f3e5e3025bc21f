//! The `graphgauntlet` command-line pipeline:
//! `generate` writes instance files, `run` dispatches rendered prompts to a
//! provider and logs raw responses, `score` grades the log against the
//! instance truths (after re-verifying them), and `report` renders the
//! aggregated tables.
//!
//! Exit codes: 0 success, 1 user error, 2 integrity error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::BenchConfig;
use crate::eval::{apply_overrides, read_overrides, read_scores, score_run, write_scores, ScoreRecord};
use crate::generator::{
    derive_seed, generate_with, verify_instance, OrderBand, ProblemInstance, ProblemKind,
};
use crate::prompt::{build_prompt, PromptBundle, PromptStrategy};
use crate::provider::{
    load_run_records, noise_provider, oracle_provider, prefix_corrupt_provider, refusal_provider,
    run_batch, HttpProvider, Provider, ProviderError, RunLog,
};
use crate::report::{build_tables, render_cells_csv, render_markdown};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_INTEGRITY: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable inputs, configuration problems: exit 1.
    User(String),
    /// A stored instance failed oracle re-verification: exit 2.
    Integrity(String),
}

impl CliError {
    fn user(e: impl std::fmt::Display) -> CliError {
        CliError::User(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "graphgauntlet",
    version,
    about = "Graph-traversal benchmark harness for chat LLMs"
)]
pub struct Cli {
    /// JSON config file; falls back to $GRAPHGAUNTLET_CONFIG, then defaults.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate problem instances with machine-verified ground truths.
    Generate {
        /// Problem kind (1.1 .. 3.2) or "all".
        #[arg(long)]
        problem: String,
        /// Order band: o10, o20 or o20j.
        #[arg(long)]
        order: String,
        /// Instances per kind.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Base seed for derived per-instance seeds.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory (default: the config's instances dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render prompts for stored instances and dispatch them to a provider.
    Run {
        /// Directory of instance JSON files.
        #[arg(long)]
        instances: PathBuf,
        /// Provider name from the config, or a mock: oracle, refusal,
        /// noise[:SEED], prefix:LEN.
        #[arg(long)]
        provider: String,
        /// Prompting strategy: base, cot or pathcompare.
        #[arg(long, default_value = "base")]
        strategy: String,
        /// Number of exemplars to prepend (0, 1 or 3).
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Seed for exemplar generation.
        #[arg(long = "shot-seed", default_value_t = 0)]
        shot_seed: u64,
        /// Maximum in-flight requests.
        #[arg(long, default_value_t = 4)]
        concurrency: usize,
        /// Run log path (default: derived under the config's runs dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a run log against its instances.
    Score {
        /// Run log (JSON Lines).
        #[arg(long)]
        runs: PathBuf,
        /// Directory of instance JSON files.
        #[arg(long)]
        instances: PathBuf,
        /// Optional manual-overrides CSV.
        #[arg(long)]
        overrides: Option<PathBuf>,
        /// Scores CSV path (default: scores/scores.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render aggregated report tables from a scores CSV.
    Report {
        /// Scores CSV produced by `score`.
        #[arg(long)]
        scores: PathBuf,
        /// Output directory (default: the config's reports dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// "md" writes report.md plus cells.csv; "csv" writes cells.csv only.
        #[arg(long, default_value = "md")]
        format: String,
    },
}

/// Parses argv and runs; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(CliError::User(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USER
        }
        Err(CliError::Integrity(msg)) => {
            eprintln!("integrity error: {msg}");
            EXIT_INTEGRITY
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let config = BenchConfig::resolve(cli.config.as_deref()).map_err(CliError::user)?;
    match cli.command {
        Command::Generate { problem, order, count, seed, out } => {
            cmd_generate(&config, &problem, &order, count, seed, out)
        }
        Command::Run { instances, provider, strategy, k, shot_seed, concurrency, out } => {
            cmd_run(&config, &instances, &provider, &strategy, k, shot_seed, concurrency, out)
        }
        Command::Score { runs, instances, overrides, out } => {
            cmd_score(&config, &runs, &instances, overrides.as_deref(), out)
        }
        Command::Report { scores, out, format } => {
            cmd_report(&config, &scores, out, &format)
        }
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    id: String,
    seed: u64,
    file: String,
}

#[derive(Serialize)]
struct Manifest {
    problem: String,
    band: OrderBand,
    count: usize,
    base_seed: u64,
    instances: Vec<ManifestEntry>,
}

pub fn cmd_generate(
    config: &BenchConfig,
    problem: &str,
    order: &str,
    count: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let band: OrderBand = order.parse().map_err(CliError::User)?;
    if count == 0 {
        return Err(CliError::User("--count must be >= 1".to_string()));
    }
    let kinds: Vec<ProblemKind> = if problem == "all" {
        let all: Vec<ProblemKind> = ProblemKind::ALL
            .iter()
            .copied()
            .filter(|&k| !(k == ProblemKind::EulerDecision && band != OrderBand::O10))
            .collect();
        if all.len() < ProblemKind::ALL.len() {
            eprintln!("note: skipping 3.1 at {band}; Euler instances restricted to O(10)");
        }
        all
    } else {
        let kind: ProblemKind = problem.parse().map_err(CliError::User)?;
        if kind == ProblemKind::EulerDecision && band != OrderBand::O10 {
            return Err(CliError::User("Euler instances restricted to O(10)".to_string()));
        }
        vec![kind]
    };

    let out_dir = out.unwrap_or_else(|| config.paths.instances_dir.clone());
    std::fs::create_dir_all(&out_dir).map_err(CliError::user)?;

    let mut entries = Vec::new();
    for &kind in &kinds {
        for index in 0..count {
            let instance_seed = derive_seed(seed, kind, index);
            let instance = generate_with(&config.generation, kind, band, instance_seed)
                .map_err(CliError::user)?;
            let file = instance.file_name(index);
            write_json(&out_dir.join(&file), &instance)?;
            entries.push(ManifestEntry { id: instance.id.clone(), seed: instance_seed, file });
        }
    }

    let manifest = Manifest {
        problem: problem.to_string(),
        band,
        count,
        base_seed: seed,
        instances: entries,
    };
    let manifest_name = format!("manifest_{}_{}.json", problem, band.code());
    write_json(&out_dir.join(manifest_name), &manifest)?;
    println!(
        "wrote {} instances ({} kinds x {count}) to {}",
        kinds.len() * count,
        kinds.len(),
        out_dir.display()
    );
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::user)?;
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::user)
}

/// Loads every instance file in a directory, sorted by file name.
/// Manifest files are skipped.
pub fn load_instances(dir: &Path) -> Result<Vec<ProblemInstance>, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::User(format!("cannot read instances dir {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| ext == "json")
                && !p
                    .file_name()
                    .is_some_and(|n| n.to_string_lossy().starts_with("manifest"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::User(format!("no instance files in {}", dir.display())));
    }
    let mut out = Vec::with_capacity(files.len());
    for file in files {
        let text = std::fs::read_to_string(&file)
            .map_err(|e| CliError::User(format!("cannot read {}: {e}", file.display())))?;
        let instance: ProblemInstance = serde_json::from_str(&text)
            .map_err(|e| CliError::User(format!("cannot parse {}: {e}", file.display())))?;
        out.push(instance);
    }
    Ok(out)
}

fn resolve_provider(
    name: &str,
    instances: &[ProblemInstance],
    config: &BenchConfig,
) -> Result<Box<dyn Provider>, CliError> {
    if name == "oracle" {
        return Ok(Box::new(oracle_provider(instances)));
    }
    if name == "refusal" {
        return Ok(Box::new(refusal_provider()));
    }
    if name == "noise" {
        return Ok(Box::new(noise_provider(0)));
    }
    if let Some(seed) = name.strip_prefix("noise:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| CliError::User(format!("bad noise seed in provider '{name}'")))?;
        return Ok(Box::new(noise_provider(seed)));
    }
    if let Some(len) = name.strip_prefix("prefix:") {
        let len: usize = len
            .parse()
            .map_err(|_| CliError::User(format!("bad prefix length in provider '{name}'")))?;
        return Ok(Box::new(prefix_corrupt_provider(instances, len)));
    }
    let provider_config = config.provider(name).ok_or_else(|| {
        CliError::User(format!(
            "unknown provider '{name}': not a mock (oracle, refusal, noise[:SEED], prefix:LEN) \
             and not in the config"
        ))
    })?;
    let provider = HttpProvider::from_config(provider_config).map_err(|e| match e {
        ProviderError::MissingApiKey(_) | ProviderError::InvalidConfig(_) => CliError::user(e),
        other => CliError::user(other),
    })?;
    Ok(Box::new(provider))
}

fn sanitize_file_component(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' }).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_run(
    config: &BenchConfig,
    instances_dir: &Path,
    provider_name: &str,
    strategy: &str,
    k: usize,
    shot_seed: u64,
    concurrency: usize,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if !matches!(k, 0 | 1 | 3) {
        return Err(CliError::User(format!("--k must be 0, 1 or 3 (got {k})")));
    }
    let strategy: PromptStrategy = strategy.parse().map_err(CliError::User)?;
    if concurrency == 0 {
        return Err(CliError::User("--concurrency must be >= 1".to_string()));
    }

    let instances = load_instances(instances_dir)?;
    let provider = resolve_provider(provider_name, &instances, config)?;

    let mut bundles: Vec<PromptBundle> = Vec::with_capacity(instances.len());
    for instance in &instances {
        let bundle =
            build_prompt(instance, k, strategy, shot_seed, &config.prompting, &config.generation)
                .map_err(CliError::user)?;
        bundles.push(bundle);
    }

    let out_path = out.unwrap_or_else(|| {
        config.paths.runs_dir.join(format!(
            "{}_{}_k{}.jsonl",
            sanitize_file_component(provider_name),
            strategy,
            k
        ))
    });
    let mut log = RunLog::open(&out_path).map_err(CliError::user)?;
    let already = bundles
        .iter()
        .filter(|b| log.contains(provider.name(), &b.instance_id))
        .count();
    let records = run_batch(provider.as_ref(), &bundles, concurrency, &mut log)
        .map_err(CliError::user)?;
    println!(
        "appended {} records to {} ({} already present)",
        records.len(),
        out_path.display(),
        already
    );
    Ok(())
}

pub fn cmd_score(
    config: &BenchConfig,
    runs_path: &Path,
    instances_dir: &Path,
    overrides: Option<&Path>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let instances = load_instances(instances_dir)?;
    let by_id: BTreeMap<&str, &ProblemInstance> =
        instances.iter().map(|i| (i.id.as_str(), i)).collect();
    let runs = load_run_records(runs_path).map_err(CliError::user)?;

    // referential check before anything else
    for run in &runs {
        if !by_id.contains_key(run.instance_id.as_str()) {
            return Err(CliError::User(format!(
                "run log references unknown instance '{}'",
                run.instance_id
            )));
        }
    }

    // integrity gate: every referenced instance must still verify against
    // the oracle (unique truth, consistent flags) before any scoring
    let mut verified: std::collections::BTreeSet<&str> = Default::default();
    for run in &runs {
        let id = run.instance_id.as_str();
        if verified.insert(id) {
            verify_instance(by_id[id]).map_err(|defect| CliError::Integrity(defect.to_string()))?;
        }
    }

    let mut scores: Vec<ScoreRecord> = runs
        .iter()
        .map(|run| score_run(by_id[run.instance_id.as_str()], run, &config.evaluation))
        .collect();

    let out_path = out.unwrap_or_else(|| config.paths.scores_dir.join("scores.csv"));
    if let Some(overrides_path) = overrides {
        let rows = read_overrides(overrides_path).map_err(CliError::user)?;
        if !rows.is_empty() {
            // keep the machine scores alongside the overridden ones
            let machine_path = out_path.with_extension("machine.csv");
            write_scores(&machine_path, &scores).map_err(CliError::user)?;
            apply_overrides(&mut scores, &rows).map_err(CliError::user)?;
        }
    }
    write_scores(&out_path, &scores).map_err(CliError::user)?;
    println!("wrote {} score records to {}", scores.len(), out_path.display());
    Ok(())
}

pub fn cmd_report(
    config: &BenchConfig,
    scores_path: &Path,
    out: Option<PathBuf>,
    format: &str,
) -> Result<(), CliError> {
    if !matches!(format, "md" | "csv") {
        return Err(CliError::User(format!("--format must be md or csv (got '{format}')")));
    }
    let scores = read_scores(scores_path).map_err(CliError::user)?;
    let cells = crate::eval::aggregate(&scores);
    let out_dir = out.unwrap_or_else(|| config.paths.reports_dir.clone());
    std::fs::create_dir_all(&out_dir).map_err(CliError::user)?;

    let csv_text = render_cells_csv(&cells).map_err(CliError::user)?;
    let csv_path = out_dir.join("cells.csv");
    std::fs::write(&csv_path, csv_text).map_err(CliError::user)?;
    let mut written = vec![csv_path.display().to_string()];

    if format == "md" {
        let md = render_markdown(&build_tables(&cells));
        let md_path = out_dir.join("report.md");
        std::fs::write(&md_path, md).map_err(CliError::user)?;
        written.push(md_path.display().to_string());
    }
    println!("wrote {}", written.join(" and "));
    Ok(())
}
