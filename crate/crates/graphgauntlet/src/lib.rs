//! graphgauntlet — a graph-traversal benchmark harness for chat LLMs.
//!
//! The library generates ten classes of graph-traversal problems with
//! machine-verified unique solutions, renders them into plain-text
//! adjacency-matrix prompts (zero/one/three-shot, optionally with
//! chain-of-thought or path-comparison suffixes), dispatches the prompts to
//! pluggable providers, and scores free-form responses with binary accuracy
//! and prefix partial credit.
//!
//! ## Modules
//!
//! - [`graph`] — adjacency matrices, node labels, validation, relabelling.
//! - [`oracle`] — exact solvers and feasibility checks with deterministic
//!   tie-breaks; every generated truth is re-verifiable here.
//! - [`generator`] — seeded, rejection-sampled builders for the ten problem
//!   kinds across the O(10)/O(20)/O(20)-jumbled bands.
//! - [`prompt`] — byte-exact prompt rendering and k-shot exemplars.
//! - [`provider`] — chat-completion HTTP gateway, deterministic mocks, and
//!   the resumable batch runner.
//! - [`eval`] — response parsing, binary/partial scoring, manual overrides,
//!   and per-setting aggregation.
//! - [`report`] — markdown tables and the flat cells CSV.
//! - [`config`] / [`cli`] — the JSON config schema and the
//!   `graphgauntlet generate|run|score|report` pipeline.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example generate_instances
//! cargo run --example solve_with_oracles
//! cargo run --example render_prompts
//! cargo run --example jumble_labels
//! cargo run --example parse_and_score
//! cargo run --example mock_pipeline
//! ```

pub mod cli;
pub mod config;
pub mod eval;
pub mod generator;
pub mod graph;
pub mod oracle;
pub mod prompt;
pub mod provider;
pub mod report;
