//! Provider gateway: dispatches prompts to chat-completion endpoints or to
//! deterministic mock providers, and records raw responses.
//!
//! One request carries the prompt as a single user message; there is no
//! system message, so the prompt text is the entire model input. Transport
//! failures are retried with exponential backoff; provider "context length"
//! errors are classified as overflow rather than failures. API keys come
//! from the environment and never reach any persisted artifact.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path as FsPath, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use chrono::{SecondsFormat, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::generator::{mix, ProblemInstance, Truth};
use crate::graph::NodeLabel;
use crate::prompt::{render_solution, PromptBundle, PromptStrategy};

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("missing API key: environment variable {0} is not set")]
    MissingApiKey(String),
    #[error("invalid provider config: {0}")]
    InvalidConfig(String),
    #[error("http client error: {0}")]
    Http(#[from] reqwest::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("concurrency limit must be >= 1")]
    ZeroConcurrency,
}

fn default_overflow_patterns() -> Vec<String> {
    [
        "context length",
        "context window",
        "maximum context",
        "context_length_exceeded",
        "too many tokens",
        "prompt is too long",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Connection settings for one chat-completions endpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub name: String,
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    /// Name of the environment variable holding the secret. The value is
    /// read at construction time and never persisted.
    pub api_key_env: String,
    /// Per-request timeout in seconds.
    pub request_timeout: u64,
    pub max_retries: u32,
    pub max_concurrency: usize,
    /// Substrings (case-insensitive) of provider error bodies that mean the
    /// prompt exceeded the context window.
    pub context_overflow_patterns: Vec<String>,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            name: String::new(),
            endpoint: String::new(),
            model: String::new(),
            temperature: 0.0,
            max_output_tokens: 1024,
            api_key_env: String::new(),
            request_timeout: 60,
            max_retries: 2,
            max_concurrency: 4,
            context_overflow_patterns: default_overflow_patterns(),
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.temperature < 0.0 {
            return Err(ProviderError::InvalidConfig("temperature must be >= 0".into()));
        }
        if self.max_concurrency == 0 {
            return Err(ProviderError::InvalidConfig("max_concurrency must be >= 1".into()));
        }
        if self.endpoint.is_empty() {
            return Err(ProviderError::InvalidConfig(format!(
                "provider '{}' has no endpoint",
                self.name
            )));
        }
        Ok(())
    }
}

/// Outcome of one completion call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub status: RunStatus,
    pub response_text: Option<String>,
    pub attempt_count: u32,
}

impl Completion {
    pub fn ok(text: String) -> Self {
        Completion { status: RunStatus::Ok, response_text: Some(text), attempt_count: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Refused,
    ContextOverflow,
    TransportError,
}

/// One provider call, as persisted in the JSON Lines run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub prompt_text: String,
    pub provider_name: String,
    pub model: String,
    pub strategy: PromptStrategy,
    pub k: usize,
    pub response_text: Option<String>,
    pub status: RunStatus,
    pub latency_ms: u64,
    pub timestamp: String,
    pub attempt_count: u32,
}

/// Anything that can answer a prompt. Mock providers key their canned
/// answers on the instance id; live providers ignore it.
pub trait Provider: Send + Sync {
    fn name(&self) -> &str;
    fn model(&self) -> &str;
    fn complete(&self, instance_id: &str, prompt: &str) -> Completion;
}

// ---------------------------------------------------------------------------
// live HTTP provider
// ---------------------------------------------------------------------------

const BACKOFF_BASE_MS: u64 = 250;
const BACKOFF_CAP_MS: u64 = 4_000;

/// Chat-completions client over HTTP POST.
pub struct HttpProvider {
    config: ProviderConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl HttpProvider {
    /// Resolves the API key and builds the client; fails before any network
    /// call when the key is missing.
    pub fn from_config(config: &ProviderConfig) -> Result<Self, ProviderError> {
        config.validate()?;
        let api_key = std::env::var(&config.api_key_env)
            .map_err(|_| ProviderError::MissingApiKey(config.api_key_env.clone()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.request_timeout))
            .build()?;
        Ok(HttpProvider { config: config.clone(), api_key, client })
    }

    fn is_overflow(&self, body: &str) -> bool {
        let lower = body.to_lowercase();
        self.config.context_overflow_patterns.iter().any(|p| lower.contains(&p.to_lowercase()))
    }
}

impl Provider for HttpProvider {
    fn name(&self) -> &str {
        &self.config.name
    }

    fn model(&self) -> &str {
        &self.config.model
    }

    fn complete(&self, _instance_id: &str, prompt: &str) -> Completion {
        let body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_output_tokens,
        });
        let attempts = self.config.max_retries + 1;
        for attempt in 1..=attempts {
            let result = self
                .client
                .post(&self.config.endpoint)
                .bearer_auth(&self.api_key)
                .json(&body)
                .send();
            match result {
                Ok(resp) => {
                    let http_status = resp.status();
                    let text = resp.text().unwrap_or_default();
                    if http_status.is_success() {
                        let parsed: Option<String> = serde_json::from_str::<serde_json::Value>(&text)
                            .ok()
                            .and_then(|v| {
                                v["choices"][0]["message"]["content"].as_str().map(String::from)
                            });
                        if let Some(content) = parsed {
                            return Completion {
                                status: RunStatus::Ok,
                                response_text: Some(content),
                                attempt_count: attempt,
                            };
                        }
                        // malformed success body: fall through to retry
                    } else if self.is_overflow(&text) {
                        return Completion {
                            status: RunStatus::ContextOverflow,
                            response_text: None,
                            attempt_count: attempt,
                        };
                    } else if http_status.is_client_error() && http_status.as_u16() != 429 {
                        return Completion {
                            status: RunStatus::TransportError,
                            response_text: None,
                            attempt_count: attempt,
                        };
                    }
                    // 5xx / 429 / malformed body: retry
                }
                Err(_) => {
                    // connection or timeout failure: retry
                }
            }
            if attempt < attempts {
                let delay = (BACKOFF_BASE_MS << (attempt - 1)).min(BACKOFF_CAP_MS);
                std::thread::sleep(Duration::from_millis(delay));
            }
        }
        Completion { status: RunStatus::TransportError, response_text: None, attempt_count: attempts }
    }
}

// ---------------------------------------------------------------------------
// mock providers
// ---------------------------------------------------------------------------

const REFUSAL_TEXT: &str = "I'm sorry, but I cannot answer this question.";

enum MockBehavior {
    Canned(BTreeMap<String, String>),
    Refusal,
    Noise(u64),
}

/// Deterministic in-process provider used for tests and dry runs.
pub struct MockProvider {
    name: String,
    behavior: MockBehavior,
    token_window: Option<usize>,
}

impl MockProvider {
    /// Simulates a bounded context window: prompts longer than `max_tokens`
    /// whitespace tokens come back as overflow.
    pub fn with_token_window(mut self, max_tokens: usize) -> Self {
        self.token_window = Some(max_tokens);
        self
    }
}

/// Answers every instance with its exact ground-truth rendering.
pub fn oracle_provider(instances: &[ProblemInstance]) -> MockProvider {
    let map = instances.iter().map(|i| (i.id.clone(), render_solution(i))).collect();
    MockProvider { name: "oracle".to_string(), behavior: MockBehavior::Canned(map), token_window: None }
}

/// Answers with the first `correct_prefix_len` ground-truth nodes followed
/// by a deliberately wrong node; boolean truths are negated and no-path
/// truths answered with a bogus path claim.
pub fn prefix_corrupt_provider(instances: &[ProblemInstance], correct_prefix_len: usize) -> MockProvider {
    let map = instances
        .iter()
        .map(|inst| {
            let answer = match &inst.truth {
                Truth::Path { path, .. } => {
                    let keep = correct_prefix_len.min(path.len());
                    let mut nodes: Vec<NodeLabel> = path.nodes()[..keep].to_vec();
                    let next_truth = path.nodes().get(keep).copied();
                    let wrong = inst
                        .graph
                        .labels()
                        .iter()
                        .copied()
                        .find(|&l| Some(l) != next_truth && nodes.last() != Some(&l))
                        .expect("graphs have at least 5 labels");
                    nodes.push(wrong);
                    crate::graph::Path::new(nodes).arrow_string()
                }
                Truth::Bool(b) => if *b { "False" } else { "True" }.to_string(),
                Truth::NoPath => {
                    format!("{} -> {}", inst.source.letter(), inst.target.letter())
                }
            };
            (inst.id.clone(), answer)
        })
        .collect();
    MockProvider {
        name: format!("prefix:{correct_prefix_len}"),
        behavior: MockBehavior::Canned(map),
        token_window: None,
    }
}

/// Declines every prompt with a fixed apology.
pub fn refusal_provider() -> MockProvider {
    MockProvider { name: "refusal".to_string(), behavior: MockBehavior::Refusal, token_window: None }
}

/// Answers with a seeded random label chain.
pub fn noise_provider(seed: u64) -> MockProvider {
    MockProvider {
        name: format!("noise:{seed}"),
        behavior: MockBehavior::Noise(seed),
        token_window: None,
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

impl Provider for MockProvider {
    fn name(&self) -> &str {
        &self.name
    }

    fn model(&self) -> &str {
        &self.name
    }

    fn complete(&self, instance_id: &str, prompt: &str) -> Completion {
        if let Some(window) = self.token_window {
            if prompt.split_whitespace().count() > window {
                return Completion {
                    status: RunStatus::ContextOverflow,
                    response_text: None,
                    attempt_count: 1,
                };
            }
        }
        match &self.behavior {
            MockBehavior::Canned(map) => match map.get(instance_id) {
                Some(answer) => Completion::ok(answer.clone()),
                None => Completion {
                    status: RunStatus::TransportError,
                    response_text: None,
                    attempt_count: 1,
                },
            },
            MockBehavior::Refusal => Completion {
                status: RunStatus::Refused,
                response_text: Some(REFUSAL_TEXT.to_string()),
                attempt_count: 1,
            },
            MockBehavior::Noise(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(&[*seed, fnv1a(instance_id)]));
                let len = rng.gen_range(3..=8);
                let labels: Vec<String> = (0..len)
                    .map(|_| {
                        NodeLabel::from_index(rng.gen_range(0..26)).unwrap().letter().to_string()
                    })
                    .collect();
                Completion::ok(labels.join(" -> "))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// run log + batch driver
// ---------------------------------------------------------------------------

/// Append-only JSON Lines log of run records, deduplicated by
/// `(provider, instance_id)` so interrupted batches resume cleanly.
pub struct RunLog {
    path: PathBuf,
    seen: BTreeSet<(String, String)>,
    file: Option<File>,
}

impl RunLog {
    /// Opens (or prepares to create) the log and indexes existing records.
    pub fn open(path: impl Into<PathBuf>) -> Result<RunLog, ProviderError> {
        let path = path.into();
        let mut seen = BTreeSet::new();
        if path.exists() {
            for record in load_run_records(&path)? {
                seen.insert((record.provider_name, record.instance_id));
            }
        }
        Ok(RunLog { path, seen, file: None })
    }

    pub fn path(&self) -> &FsPath {
        &self.path
    }

    pub fn contains(&self, provider: &str, instance_id: &str) -> bool {
        self.seen.contains(&(provider.to_string(), instance_id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    pub fn append(&mut self, record: &RunRecord) -> Result<(), ProviderError> {
        if self.file.is_none() {
            if let Some(parent) = self.path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            self.file = Some(OpenOptions::new().create(true).append(true).open(&self.path)?);
        }
        let file = self.file.as_mut().unwrap();
        let line = serde_json::to_string(record).expect("run record serializes");
        writeln!(file, "{line}")?;
        file.flush()?;
        self.seen.insert((record.provider_name.clone(), record.instance_id.clone()));
        Ok(())
    }
}

/// Reads every record of a JSON Lines run log.
pub fn load_run_records(path: impl AsRef<FsPath>) -> Result<Vec<RunRecord>, ProviderError> {
    let file = File::open(path.as_ref())?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(&line).map_err(|e| {
            ProviderError::InvalidConfig(format!("corrupt run log line: {e}"))
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Dispatches all bundles to one provider with at most `concurrency`
/// requests in flight. Records are appended to the log in input order
/// regardless of completion order, and bundles whose `(provider, id)` pair
/// is already logged are skipped, so re-running a finished batch appends
/// nothing. Returns the records produced by this call, in input order.
pub fn run_batch(
    provider: &dyn Provider,
    bundles: &[PromptBundle],
    concurrency: usize,
    log: &mut RunLog,
) -> Result<Vec<RunRecord>, ProviderError> {
    if concurrency == 0 {
        return Err(ProviderError::ZeroConcurrency);
    }
    let jobs: Vec<&PromptBundle> = bundles
        .iter()
        .filter(|b| !log.contains(provider.name(), &b.instance_id))
        .collect();
    if jobs.is_empty() {
        return Ok(Vec::new());
    }

    let slots: Mutex<Vec<Option<RunRecord>>> = Mutex::new(vec![None; jobs.len()]);
    let ready = Condvar::new();
    let next_job = AtomicUsize::new(0);
    let workers = concurrency.min(jobs.len());

    let mut out: Vec<RunRecord> = Vec::with_capacity(jobs.len());
    let mut append_error: Option<ProviderError> = None;

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let j = next_job.fetch_add(1, Ordering::SeqCst);
                if j >= jobs.len() {
                    break;
                }
                let bundle = jobs[j];
                let started = Instant::now();
                let completion = provider.complete(&bundle.instance_id, &bundle.text);
                let record = RunRecord {
                    instance_id: bundle.instance_id.clone(),
                    prompt_text: bundle.text.clone(),
                    provider_name: provider.name().to_string(),
                    model: provider.model().to_string(),
                    strategy: bundle.strategy,
                    k: bundle.k,
                    response_text: completion.response_text,
                    status: completion.status,
                    latency_ms: started.elapsed().as_millis() as u64,
                    timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
                    attempt_count: completion.attempt_count,
                };
                let mut guard = slots.lock().unwrap();
                guard[j] = Some(record);
                ready.notify_all();
            });
        }

        // single writer: emit records in input order as they become ready
        for index in 0..jobs.len() {
            let mut guard = slots.lock().unwrap();
            while guard[index].is_none() {
                guard = ready.wait(guard).unwrap();
            }
            let record = guard[index].take().unwrap();
            drop(guard);
            if append_error.is_none() {
                if let Err(e) = log.append(&record) {
                    append_error = Some(e);
                }
            }
            out.push(record);
        }
    });

    match append_error {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Runs the batch against several providers in turn; each provider gets the
/// full bundle list with its own in-flight limit.
pub fn run_batch_multi(
    providers: &[&dyn Provider],
    bundles: &[PromptBundle],
    concurrency: usize,
    log: &mut RunLog,
) -> Result<Vec<RunRecord>, ProviderError> {
    let mut out = Vec::new();
    for provider in providers {
        out.extend(run_batch(*provider, bundles, concurrency, log)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate, OrderBand, ProblemKind};
    use crate::prompt::{build_prompt, PromptConfig};
    use crate::generator::GenConfig;

    fn bundle_for(inst: &ProblemInstance) -> PromptBundle {
        build_prompt(inst, 0, PromptStrategy::Base, 0, &PromptConfig::default(), &GenConfig::default())
            .unwrap()
    }

    #[test]
    fn oracle_mock_returns_truth_rendering() {
        let inst = generate(ProblemKind::Linear, OrderBand::O10, 4).unwrap();
        let provider = oracle_provider(std::slice::from_ref(&inst));
        let c = provider.complete(&inst.id, "ignored");
        assert_eq!(c.status, RunStatus::Ok);
        let expected = match &inst.truth {
            Truth::Path { path, .. } => path.arrow_string(),
            _ => unreachable!(),
        };
        assert_eq!(c.response_text.unwrap(), expected);
    }

    #[test]
    fn oracle_mock_on_no_path_instance() {
        let inst = generate(ProblemKind::NoPathGrid, OrderBand::O10, 4).unwrap();
        let provider = oracle_provider(std::slice::from_ref(&inst));
        let c = provider.complete(&inst.id, "ignored");
        let text = c.response_text.unwrap();
        assert!(text.starts_with("There is no valid path from "));
    }

    #[test]
    fn prefix_corrupt_breaks_at_the_right_node() {
        let inst = generate(ProblemKind::Linear, OrderBand::O10, 4).unwrap();
        let provider = prefix_corrupt_provider(std::slice::from_ref(&inst), 2);
        let c = provider.complete(&inst.id, "ignored");
        let text = c.response_text.unwrap();
        let nodes: Vec<&str> = text.split(" -> ").collect();
        assert_eq!(nodes.len(), 3);
        let Truth::Path { path, .. } = &inst.truth else { panic!() };
        assert_eq!(nodes[0], path.nodes()[0].letter().to_string());
        assert_eq!(nodes[1], path.nodes()[1].letter().to_string());
        assert_ne!(nodes[2], path.nodes()[2].letter().to_string());
    }

    #[test]
    fn refusal_and_window_mocks() {
        let p = refusal_provider();
        let c = p.complete("x", "prompt");
        assert_eq!(c.status, RunStatus::Refused);
        assert!(c.response_text.is_some());

        let inst = generate(ProblemKind::Linear, OrderBand::O10, 4).unwrap();
        let p = oracle_provider(std::slice::from_ref(&inst)).with_token_window(100);
        let long_prompt = "tok ".repeat(101);
        let c = p.complete(&inst.id, &long_prompt);
        assert_eq!(c.status, RunStatus::ContextOverflow);
        assert!(c.response_text.is_none());
    }

    #[test]
    fn noise_mock_is_deterministic_per_instance() {
        let p = noise_provider(7);
        let a = p.complete("id-1", "x");
        let b = p.complete("id-1", "x");
        let c = p.complete("id-2", "x");
        assert_eq!(a, b);
        assert_ne!(a.response_text, c.response_text);
    }

    #[test]
    fn run_batch_preserves_input_order_and_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let log_path = dir.path().join("runs.jsonl");
        let instances: Vec<ProblemInstance> =
            (0..6).map(|s| generate(ProblemKind::Linear, OrderBand::O10, s).unwrap()).collect();
        let bundles: Vec<PromptBundle> = instances.iter().map(bundle_for).collect();
        let provider = oracle_provider(&instances);

        let mut log = RunLog::open(&log_path).unwrap();
        let records = run_batch(&provider, &bundles, 4, &mut log).unwrap();
        assert_eq!(records.len(), 6);
        let got: Vec<&str> = records.iter().map(|r| r.instance_id.as_str()).collect();
        let want: Vec<&str> = bundles.iter().map(|b| b.instance_id.as_str()).collect();
        assert_eq!(got, want, "output order matches input order");

        // log order matches too
        let logged = load_run_records(&log_path).unwrap();
        let logged_ids: Vec<&str> = logged.iter().map(|r| r.instance_id.as_str()).collect();
        assert_eq!(logged_ids, want);

        // re-running the completed batch appends nothing
        let mut log = RunLog::open(&log_path).unwrap();
        let second = run_batch(&provider, &bundles, 4, &mut log).unwrap();
        assert!(second.is_empty());
        assert_eq!(load_run_records(&log_path).unwrap().len(), 6);
    }

    #[test]
    fn run_batch_empty_input() {
        let dir = tempfile::tempdir().unwrap();
        let mut log = RunLog::open(dir.path().join("r.jsonl")).unwrap();
        let provider = refusal_provider();
        let records = run_batch(&provider, &[], 4, &mut log).unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn zero_concurrency_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut log = RunLog::open(dir.path().join("r.jsonl")).unwrap();
        let provider = refusal_provider();
        assert!(matches!(
            run_batch(&provider, &[], 0, &mut log),
            Err(ProviderError::ZeroConcurrency)
        ));
    }

    #[test]
    fn missing_api_key_fails_before_any_request() {
        let cfg = ProviderConfig {
            name: "live".into(),
            endpoint: "http://127.0.0.1:1/v1/chat/completions".into(),
            model: "m".into(),
            api_key_env: "GRAPHGAUNTLET_TEST_NO_SUCH_KEY".into(),
            ..ProviderConfig::default()
        };
        assert!(matches!(
            HttpProvider::from_config(&cfg),
            Err(ProviderError::MissingApiKey(_))
        ));
    }

    #[test]
    fn record_jsonl_roundtrip() {
        let record = RunRecord {
            instance_id: "1.1_o10_0000000000000001".into(),
            prompt_text: "p".into(),
            provider_name: "oracle".into(),
            model: "oracle".into(),
            strategy: PromptStrategy::Base,
            k: 0,
            response_text: Some("A -> B".into()),
            status: RunStatus::Ok,
            latency_ms: 3,
            timestamp: "2024-01-01T00:00:00.000Z".into(),
            attempt_count: 1,
        };
        let line = serde_json::to_string(&record).unwrap();
        let back: RunRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, record);
    }
}
