//! Prompt rendering: plain-text adjacency matrices, the intro/question
//! sentence templates, k-shot exemplar blocks, and the CoT / PathCompare
//! strategy suffixes.
//!
//! Rendering is byte-exact and covered by golden-file tests; the CLI and
//! the mock pipeline both go through these functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{
    generate_with, mix, GenConfig, GenError, ProblemInstance, ProblemKind, Truth,
};
use crate::graph::{LabeledGraph, NodeLabel};

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("k must be 0, 1 or 3 (got {0})")]
    InvalidK(usize),
    #[error("exemplar generation failed: {0}")]
    ShotGeneration(#[from] GenError),
}

/// Prompting strategy: plain question, chain-of-thought suffix, or the
/// path-comparison suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptStrategy {
    Base,
    Cot,
    PathCompare,
}

impl PromptStrategy {
    pub const ALL: [PromptStrategy; 3] =
        [PromptStrategy::Base, PromptStrategy::Cot, PromptStrategy::PathCompare];

    pub fn code(self) -> &'static str {
        match self {
            PromptStrategy::Base => "base",
            PromptStrategy::Cot => "cot",
            PromptStrategy::PathCompare => "pathcompare",
        }
    }
}

impl fmt::Display for PromptStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for PromptStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "base" => Ok(PromptStrategy::Base),
            "cot" => Ok(PromptStrategy::Cot),
            "pathcompare" => Ok(PromptStrategy::PathCompare),
            other => Err(format!("unknown strategy '{other}' (expected base, cot or pathcompare)")),
        }
    }
}

/// Rendering options.
///
/// The transition sentence in the source material contains the typo
/// "quesiton"; the corrected spelling is emitted unless `reproduce_typo` is
/// set (bit-faithful replication matters for reproduction studies). The
/// Euler question wording and the CoT suffix have no canonical form, so
/// both are overridable and get recorded in run metadata by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptConfig {
    pub reproduce_typo: bool,
    pub cot_text: String,
    pub euler_question: String,
}

impl Default for PromptConfig {
    fn default() -> Self {
        PromptConfig {
            reproduce_typo: false,
            cot_text: "Let's think step by step.".to_string(),
            euler_question: "Does a valid Euler path starting from node {s} exist? Answer True or False."
                .to_string(),
        }
    }
}

/// A fully rendered prompt plus the metadata needed to score and rerun it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub instance_id: String,
    pub k: usize,
    pub strategy: PromptStrategy,
    pub shot_instance_ids: Vec<String>,
    pub text: String,
}

/// Plain-text matrix block: a header line with a single leading space and
/// space-separated labels, then one line per row (`label entry entry …`).
/// Lines are newline-terminated with no trailing spaces.
pub fn serialize_matrix(graph: &LabeledGraph) -> String {
    let n = graph.n();
    let mut out = String::new();
    out.push(' ');
    let header: Vec<String> = graph.labels().iter().map(|l| l.letter().to_string()).collect();
    out.push_str(&header.join(" "));
    out.push('\n');
    for i in 0..n {
        out.push(graph.label_of(i).letter());
        for j in 0..n {
            out.push(' ');
            out.push_str(&graph.matrix().entry(i, j).to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses every serialized matrix block found in `text`, in order: the
/// inverse of [`serialize_matrix`] over its image. A k-shot prompt yields
/// one block per exemplar followed by the target's.
pub fn parse_matrix_blocks(text: &str) -> Vec<(Vec<NodeLabel>, Vec<Vec<u32>>)> {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if let Some(block) = try_parse_header(line) {
            let n = block.len();
            let mut entries = Vec::with_capacity(n);
            let mut ok = true;
            for (row, header_label) in block.iter().enumerate() {
                let Some(row_line) = lines.get(i + 1 + row) else {
                    ok = false;
                    break;
                };
                let mut parts = row_line.split(' ');
                let label = parts.next().and_then(|p| p.parse::<NodeLabel>().ok());
                if label != Some(*header_label) {
                    ok = false;
                    break;
                }
                let values: Option<Vec<u32>> = parts.map(|p| p.parse::<u32>().ok()).collect();
                match values {
                    Some(v) if v.len() == n => entries.push(v),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out.push((block, entries));
                i += n + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// The last matrix block in `text` (the target's, in a rendered prompt).
pub fn parse_matrix_block(text: &str) -> Option<(Vec<NodeLabel>, Vec<Vec<u32>>)> {
    parse_matrix_blocks(text).pop()
}

fn try_parse_header(line: &str) -> Option<Vec<NodeLabel>> {
    let rest = line.strip_prefix(' ')?;
    let labels: Option<Vec<NodeLabel>> =
        rest.split(' ').map(|p| p.parse::<NodeLabel>().ok()).collect();
    let labels = labels?;
    if labels.len() >= 2 {
        Some(labels)
    } else {
        None
    }
}

fn label_span(graph: &LabeledGraph) -> (char, char) {
    let mut sorted: Vec<NodeLabel> = graph.labels().to_vec();
    sorted.sort();
    (sorted[0].letter(), sorted[sorted.len() - 1].letter())
}

/// The one-paragraph description of the matrix that opens every prompt.
pub fn render_intro(instance: &ProblemInstance) -> String {
    let m = instance.graph.matrix();
    let flavor = match (m.weighted(), m.directed()) {
        (false, false) => "unweighted undirected",
        (false, true) => "unweighted directed",
        (true, false) => "weighted undirected",
        (true, true) => "weighted directed",
    };
    let value_desc = if m.weighted() {
        "the cost of travelling between the two nodes"
    } else {
        "whether there is a connection between the two nodes"
    };
    let (first, last) = label_span(&instance.graph);
    format!(
        "Given is the adjacency matrix for a {flavor} graph containing {n} nodes labelled {first} to {last}. \
         The value corresponding to each row M and column N represents {value_desc}, where 0 means no connection.",
        n = instance.graph.n(),
    )
}

/// The task question for an instance, using the default templates.
pub fn render_question(instance: &ProblemInstance) -> String {
    render_question_with(instance, &PromptConfig::default())
}

pub fn render_question_with(instance: &ProblemInstance, cfg: &PromptConfig) -> String {
    let s = instance.source.letter();
    let t = instance.target.letter();
    match instance.kind {
        ProblemKind::EulerDecision => cfg.euler_question.replace("{s}", &s.to_string()),
        ProblemKind::Checkpoint => {
            let w = instance.checkpoint.expect("checkpoint instance").letter();
            format!(
                "What is the least cost path from node {s} to node {t} that passes through node {w}? \
                 Return the sequence of nodes in response."
            )
        }
        kind if kind.weighted() => format!(
            "What is the least cost path from node {s} to node {t}? Return the sequence of nodes in response."
        ),
        _ => format!(
            "What is the shortest path from node {s} to node {t}? Return the sequence of nodes in response."
        ),
    }
}

/// The reference answer string: an arrow chain for path problems,
/// `True`/`False` for Euler decisions, and a fixed sentence for no-path
/// instances. Used for k-shot exemplar solutions and by the oracle mock
/// provider.
pub fn render_solution(instance: &ProblemInstance) -> String {
    match &instance.truth {
        Truth::Path { path, .. } => path.arrow_string(),
        Truth::Bool(b) => if *b { "True" } else { "False" }.to_string(),
        Truth::NoPath => format!(
            "There is no valid path from {} to {}.",
            instance.source.letter(),
            instance.target.letter()
        ),
    }
}

/// Renders the full prompt for an instance.
///
/// Layout: intro; for k > 0 a "Consider some examples" header, then per
/// exemplar its question line, matrix, and `Solution:` line, then the
/// transition sentence; finally the target question and target matrix.
/// PathCompare and CoT append their suffix line after the matrix. Blocks
/// are separated by single blank lines and the text ends with one newline.
///
/// Exemplars are freshly generated instances of the same kind and band,
/// seeded from `shot_seed`, and never equal to the target.
pub fn build_prompt(
    instance: &ProblemInstance,
    k: usize,
    strategy: PromptStrategy,
    shot_seed: u64,
    prompt_cfg: &PromptConfig,
    gen_cfg: &GenConfig,
) -> Result<PromptBundle, PromptError> {
    if !matches!(k, 0 | 1 | 3) {
        return Err(PromptError::InvalidK(k));
    }

    let mut exemplars: Vec<ProblemInstance> = Vec::with_capacity(k);
    for i in 0..k {
        let mut salt = 0u64;
        let exemplar = loop {
            let seed = mix(&[shot_seed, i as u64, salt]);
            let candidate = generate_with(gen_cfg, instance.kind, instance.band, seed)?;
            let duplicate =
                candidate.id == instance.id || exemplars.iter().any(|e| e.id == candidate.id);
            if !duplicate {
                break candidate;
            }
            salt += 1;
        };
        exemplars.push(exemplar);
    }

    let mut blocks: Vec<String> = Vec::new();
    blocks.push(render_intro(instance));
    if k > 0 {
        blocks.push("Consider some examples".to_string());
        for (i, exemplar) in exemplars.iter().enumerate() {
            blocks.push(format!(
                "Example {}: {}",
                i + 1,
                render_question_with(exemplar, prompt_cfg)
            ));
            blocks.push(serialize_matrix(&exemplar.graph).trim_end().to_string());
            blocks.push(format!("Solution: {}", render_solution(exemplar)));
        }
        let noun = if prompt_cfg.reproduce_typo { "quesiton" } else { "question" };
        blocks.push(format!("Given these examples, answer the following {noun}."));
    }
    blocks.push(render_question_with(instance, prompt_cfg));
    blocks.push(serialize_matrix(&instance.graph).trim_end().to_string());
    match strategy {
        PromptStrategy::Base => {}
        PromptStrategy::Cot => blocks.push(prompt_cfg.cot_text.clone()),
        PromptStrategy::PathCompare => blocks.push(format!(
            "Let's list down all the possible paths from node {} to node {}, and compare the cost to get the answer.",
            instance.source.letter(),
            instance.target.letter()
        )),
    }

    Ok(PromptBundle {
        instance_id: instance.id.clone(),
        k,
        strategy,
        shot_instance_ids: exemplars.iter().map(|e| e.id.clone()).collect(),
        text: blocks.join("\n\n") + "\n",
    })
}
