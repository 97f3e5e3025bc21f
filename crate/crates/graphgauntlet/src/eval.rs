//! Response parsing and scoring.
//!
//! Free-form model output is reduced to a classification (path answer,
//! True/False verdict, no-path claim, refusal, or unparseable), then scored
//! with binary accuracy and prefix partial credit against the instance's
//! verified truth. A manual-override channel mirrors hand evaluation:
//! overridden rows are flagged and the machine scores kept alongside.

use std::collections::BTreeMap;
use std::path::Path as FsPath;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{OrderBand, ProblemInstance, ProblemKind, Truth};
use crate::graph::NodeLabel;
use crate::prompt::PromptStrategy;
use crate::provider::{RunRecord, RunStatus};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unknown instance ids in overrides: {}", .0.join(", "))]
    UnknownOverrideIds(Vec<String>),
    #[error("malformed override row {row}: {message}")]
    MalformedOverride { row: usize, message: String },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What a response was recognised as. The first five variants come from
/// parsing; the last two are carried over from the run status when there
/// was no response text to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Path,
    Bool,
    NoPathClaim,
    Refusal,
    Unparseable,
    ContextOverflow,
    TransportError,
}

/// A classified response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedResponse {
    pub classification: Classification,
    pub path: Option<Vec<NodeLabel>>,
    pub bool_value: Option<bool>,
}

impl ParsedResponse {
    fn path(nodes: Vec<NodeLabel>) -> Self {
        ParsedResponse { classification: Classification::Path, path: Some(nodes), bool_value: None }
    }

    fn bare(classification: Classification) -> Self {
        ParsedResponse { classification, path: None, bool_value: None }
    }

    fn verdict(value: bool) -> Self {
        ParsedResponse {
            classification: Classification::Bool,
            path: None,
            bool_value: Some(value),
        }
    }
}

/// Which node sequence counts as the answer when a response contains
/// several (chain-of-thought output usually enumerates candidates before
/// concluding).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseMode {
    #[default]
    LastSequence,
    FirstSequence,
}

/// Phrase lists and parse mode. The defaults are intentionally small and
/// documented; they are config data precisely because no canonical list
/// exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub refusal_phrases: Vec<String>,
    pub no_path_phrases: Vec<String>,
    pub parse_mode: ParseMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            refusal_phrases: ["i'm sorry", "i am sorry", "i apologize", "cannot", "can't", "unable to"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            no_path_phrases: [
                "no valid path",
                "no path",
                "no possible path",
                "no such path",
                "not reachable",
                "no solution",
                "does not exist",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            parse_mode: ParseMode::LastSequence,
        }
    }
}

/// A node sequence is two or more single uppercase letters joined by
/// `->`, `→`, `,` or `–`; token boundaries keep letters inside words out.
static NODE_SEQUENCE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b[A-Z]\b(?:\s*(?:->|→|,|–)\s*\b[A-Z]\b)+").expect("static regex")
});

static SEPARATOR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\s*(?:->|→|,|–)\s*").expect("static regex"));

static BOOL_VERDICT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(not\s+possible|impossible|false|no|true|yes|possible)\b")
        .expect("static regex")
});

/// Extracts a path answer from free-form text.
///
/// The last maximal node sequence wins (configurable to first); with no
/// sequence present, the no-path phrase list is tried, then the refusal
/// list, and anything left is unparseable.
pub fn parse_path(response: &str, cfg: &EvalConfig) -> ParsedResponse {
    let mut matches = NODE_SEQUENCE.find_iter(response);
    let chosen = match cfg.parse_mode {
        ParseMode::LastSequence => matches.last(),
        ParseMode::FirstSequence => matches.next(),
    };
    if let Some(m) = chosen {
        let nodes: Vec<NodeLabel> = SEPARATOR
            .split(m.as_str())
            .map(|tok| tok.trim().parse().expect("regex matched single letters"))
            .collect();
        return ParsedResponse::path(nodes);
    }
    let lower = response.to_lowercase();
    if cfg.no_path_phrases.iter().any(|p| lower.contains(&p.to_lowercase())) {
        return ParsedResponse::bare(Classification::NoPathClaim);
    }
    if cfg.refusal_phrases.iter().any(|p| lower.contains(&p.to_lowercase())) {
        return ParsedResponse::bare(Classification::Refusal);
    }
    ParsedResponse::bare(Classification::Unparseable)
}

/// Extracts a True/False verdict: the last sentence containing a verdict
/// token decides; a sentence mixing both polarities (or no verdict at all)
/// is unparseable.
pub fn parse_bool(response: &str) -> ParsedResponse {
    let mut verdict: Option<bool> = None;
    for sentence in response.split(['.', '!', '?', '\n']) {
        let mut saw_true = false;
        let mut saw_false = false;
        for m in BOOL_VERDICT.find_iter(sentence) {
            let token = m.as_str().to_lowercase();
            match token.as_str() {
                "true" | "yes" | "possible" => saw_true = true,
                _ => saw_false = true,
            }
        }
        match (saw_true, saw_false) {
            (true, true) => verdict = None,
            (true, false) => verdict = Some(true),
            (false, true) => verdict = Some(false),
            (false, false) => {}
        }
    }
    match verdict {
        Some(v) => ParsedResponse::verdict(v),
        None => ParsedResponse::bare(Classification::Unparseable),
    }
}

/// Parses a response for an instance, dispatching on the problem kind.
pub fn parse_response(kind: ProblemKind, response: &str, cfg: &EvalConfig) -> ParsedResponse {
    if kind == ProblemKind::EulerDecision {
        parse_bool(response)
    } else {
        parse_path(response, cfg)
    }
}

/// Exact rational partial credit. For path problems the denominator is the
/// ground-truth path length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialCredit {
    pub num: u32,
    pub den: u32,
}

impl PartialCredit {
    pub fn value(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

/// Scoring outcome for one response against one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Grade {
    pub binary: bool,
    pub partial: PartialCredit,
    pub classification: Classification,
    /// True when the response's shape does not fit the problem kind (for
    /// example a True/False verdict for a path problem).
    pub kind_mismatch: bool,
}

fn prefix_match_len(parsed: &[NodeLabel], truth: &[NodeLabel]) -> usize {
    parsed.iter().zip(truth.iter()).take_while(|(a, b)| a == b).count()
}

/// Scores a parsed response: binary is exact-sequence (or exact-verdict)
/// equality, partial is the fraction of the truth matched as a prefix
/// before the first wrong node. Non-path truths mirror binary into partial.
pub fn score(instance: &ProblemInstance, parsed: &ParsedResponse) -> Grade {
    match &instance.truth {
        Truth::Path { path, .. } => {
            let den = path.len() as u32;
            match (&parsed.classification, &parsed.path) {
                (Classification::Path, Some(nodes)) => {
                    let binary = nodes == path.nodes();
                    let lcp = prefix_match_len(nodes, path.nodes()) as u32;
                    Grade {
                        binary,
                        partial: PartialCredit { num: lcp, den },
                        classification: Classification::Path,
                        kind_mismatch: false,
                    }
                }
                _ => Grade {
                    binary: false,
                    partial: PartialCredit { num: 0, den },
                    classification: parsed.classification,
                    kind_mismatch: matches!(
                        parsed.classification,
                        Classification::Bool | Classification::NoPathClaim
                    ),
                },
            }
        }
        Truth::NoPath => {
            let binary = parsed.classification == Classification::NoPathClaim;
            Grade {
                binary,
                partial: PartialCredit { num: u32::from(binary), den: 1 },
                classification: parsed.classification,
                kind_mismatch: parsed.classification == Classification::Bool,
            }
        }
        Truth::Bool(truth_value) => {
            let binary = parsed.classification == Classification::Bool
                && parsed.bool_value == Some(*truth_value);
            Grade {
                binary,
                partial: PartialCredit { num: u32::from(binary), den: 1 },
                classification: parsed.classification,
                kind_mismatch: matches!(
                    parsed.classification,
                    Classification::Path | Classification::NoPathClaim
                ),
            }
        }
    }
}

/// One row of the scores CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub instance_id: String,
    pub kind: ProblemKind,
    pub band: OrderBand,
    pub k: usize,
    pub strategy: PromptStrategy,
    pub model: String,
    pub binary: u8,
    pub partial: f64,
    pub classification: Classification,
    pub overridden: bool,
}

/// Scores one run record end to end: overflow/transport statuses score
/// zero with their status carried into the classification; anything with
/// response text is parsed and graded.
pub fn score_run(instance: &ProblemInstance, run: &RunRecord, cfg: &EvalConfig) -> ScoreRecord {
    let (binary, partial, classification) = match (&run.status, &run.response_text) {
        (RunStatus::ContextOverflow, _) => (false, 0.0, Classification::ContextOverflow),
        (RunStatus::TransportError, _) => (false, 0.0, Classification::TransportError),
        (_, Some(text)) => {
            let parsed = parse_response(instance.kind, text, cfg);
            let grade = score(instance, &parsed);
            (grade.binary, grade.partial.value(), grade.classification)
        }
        (_, None) => (false, 0.0, Classification::Unparseable),
    };
    ScoreRecord {
        instance_id: instance.id.clone(),
        kind: instance.kind,
        band: instance.band,
        k: run.k,
        strategy: run.strategy,
        model: run.model.clone(),
        binary: u8::from(binary),
        partial,
        classification,
        overridden: false,
    }
}

// ---------------------------------------------------------------------------
// manual overrides
// ---------------------------------------------------------------------------

/// One row of the overrides CSV: a hand evaluation replacing the machine
/// score for an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverrideRow {
    pub instance_id: String,
    pub binary: u8,
    pub partial: f64,
    pub classification: Classification,
    #[serde(default)]
    pub note: String,
}

/// The machine score retained when an override replaces it.
#[derive(Debug, Clone, PartialEq)]
pub struct RetainedScore {
    pub record: ScoreRecord,
}

/// Reads an overrides CSV, rejecting malformed rows with their line number.
pub fn read_overrides(path: impl AsRef<FsPath>) -> Result<Vec<OverrideRow>, EvalError> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<OverrideRow>().enumerate() {
        match row {
            Ok(r) => out.push(r),
            Err(e) => {
                return Err(EvalError::MalformedOverride { row: i + 2, message: e.to_string() })
            }
        }
    }
    Ok(out)
}

/// Applies overrides in place, flagging each touched row and returning the
/// original machine scores. Every referenced id must exist; `binary = 1`
/// forces `partial = 1.0`.
pub fn apply_overrides(
    scores: &mut [ScoreRecord],
    overrides: &[OverrideRow],
) -> Result<Vec<RetainedScore>, EvalError> {
    let mut unknown: Vec<String> = Vec::new();
    let mut retained = Vec::new();
    for o in overrides {
        let mut hit = false;
        for record in scores.iter_mut().filter(|r| r.instance_id == o.instance_id) {
            hit = true;
            retained.push(RetainedScore { record: record.clone() });
            record.binary = o.binary;
            record.partial = if o.binary == 1 { 1.0 } else { o.partial };
            record.classification = o.classification;
            record.overridden = true;
        }
        if !hit {
            unknown.push(o.instance_id.clone());
        }
    }
    if unknown.is_empty() {
        Ok(retained)
    } else {
        Err(EvalError::UnknownOverrideIds(unknown))
    }
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

/// Setting-level marker mirroring the table notation: `**` when refusals
/// dominate, `△` when the prompt overflowed the context window, `-` when
/// the setting does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellMarker {
    Refused,
    Overflow,
    Omitted,
}

impl CellMarker {
    pub fn symbol(self) -> &'static str {
        match self {
            CellMarker::Refused => "**",
            CellMarker::Overflow => "△",
            CellMarker::Omitted => "-",
        }
    }
}

/// Aggregated means for one (model, strategy, kind, band, k) setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingCell {
    pub model: String,
    pub strategy: PromptStrategy,
    pub kind: ProblemKind,
    pub band: OrderBand,
    pub k: usize,
    pub mean_binary: f64,
    pub mean_partial: f64,
    pub records: usize,
    pub marker: Option<CellMarker>,
}

/// Groups score records by setting and computes the cell means. A marker
/// is attached when more than half of a setting's records were refusals or
/// overflows.
pub fn aggregate(scores: &[ScoreRecord]) -> Vec<SettingCell> {
    type Key = (String, PromptStrategy, ProblemKind, OrderBand, usize);
    let mut groups: BTreeMap<Key, Vec<&ScoreRecord>> = BTreeMap::new();
    for record in scores {
        groups
            .entry((record.model.clone(), record.strategy, record.kind, record.band, record.k))
            .or_default()
            .push(record);
    }
    groups
        .into_iter()
        .map(|((model, strategy, kind, band, k), records)| {
            let n = records.len();
            let mean_binary =
                records.iter().map(|r| f64::from(r.binary)).sum::<f64>() / n as f64;
            let mean_partial = records.iter().map(|r| r.partial).sum::<f64>() / n as f64;
            let refused =
                records.iter().filter(|r| r.classification == Classification::Refusal).count();
            let overflow = records
                .iter()
                .filter(|r| r.classification == Classification::ContextOverflow)
                .count();
            let marker = if refused * 2 > n {
                Some(CellMarker::Refused)
            } else if overflow * 2 > n {
                Some(CellMarker::Overflow)
            } else {
                None
            };
            SettingCell { model, strategy, kind, band, k, mean_binary, mean_partial, records: n, marker }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// scores CSV
// ---------------------------------------------------------------------------

pub fn write_scores(path: impl AsRef<FsPath>, scores: &[ScoreRecord]) -> Result<(), EvalError> {
    if let Some(parent) = path.as_ref().parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    for record in scores {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_scores(path: impl AsRef<FsPath>) -> Result<Vec<ScoreRecord>, EvalError> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let mut out = Vec::new();
    for row in reader.deserialize::<ScoreRecord>() {
        out.push(row?);
    }
    Ok(out)
}
