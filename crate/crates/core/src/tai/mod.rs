//! The text boundary: instances to text-attributed instances (TAIs) and
//! model text back to solutions.
//!
//! A TAI is an instruction (objective, constraints, output format) plus an
//! input block listing every entity with a few cheap heuristic features.
//! [`encode`] produces it, [`render_prompt`] wraps it into the fine-tuning
//! template, [`format_solution`] writes a solution the way a model is
//! expected to, and [`parse`] extracts one from arbitrary text.

mod encode;
pub mod features;
mod parse;

use serde::{Deserialize, Serialize};

use crate::problems::{ProblemKind, Solution};

pub use encode::{encode, DEFAULT_FEATURE_K};
pub use parse::{format_solution, parse, FormatError};

/// Version tag of [`PROMPT_TEMPLATE`]; bump whenever its bytes change.
pub const PROMPT_TEMPLATE_VERSION: &str = "alpaca-co/1";

/// Alpaca-style fine-tuning template. `{instruction}` and `{input}` are
/// replaced by the TAI fields; the response section is left empty.
pub const PROMPT_TEMPLATE: &str = "Below is an instruction describing a combinatorial optimization problem. \
It is paired with an input that provides the data of the instance. \
\nYour task is to produce a feasible solution that optimizes (minimizes or maximizes) the given objective.\
\n\n### Instruction:\n{instruction}\n\n### Input:\n{input}\n\n### Response:\n";

/// Shape of the answer a model must produce for a problem kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputGrammar {
    /// `Route: [0, 3, 1, 0], Objective: <number>`
    Route,
    /// `Routes: [[0, 1, 0], [0, 2, 0]], Objective: <number>`
    Routes,
    /// `Set: [0, 2], Objective: <int>`
    Set,
    /// `Order: [2, 1, 3], Objective: <int>` (1-based job ids)
    Order,
    /// `Schedule: [[0, 1], [1, 0]], Objective: <int>`
    Schedule,
}

impl OutputGrammar {
    pub fn for_kind(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::Tsp | ProblemKind::Op => OutputGrammar::Route,
            ProblemKind::Cvrp => OutputGrammar::Routes,
            ProblemKind::Mis | ProblemKind::Mvc => OutputGrammar::Set,
            ProblemKind::Pfsp => OutputGrammar::Order,
            ProblemKind::Jssp => OutputGrammar::Schedule,
        }
    }

    /// Canonical label written before the solution list.
    pub fn label(self) -> &'static str {
        match self {
            OutputGrammar::Route => "Route",
            OutputGrammar::Routes => "Routes",
            OutputGrammar::Set => "Set",
            OutputGrammar::Order => "Order",
            OutputGrammar::Schedule => "Schedule",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextAttributedInstance {
    pub kind: ProblemKind,
    pub instruction: String,
    pub input: String,
    pub expected_output: OutputGrammar,
}

/// Result of reading a solution out of model text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedSolution {
    pub solution: Option<Solution>,
    pub stated_objective: Option<f64>,
    /// Whether the text contained a structurally valid answer.
    pub format_ok: bool,
}

impl ParsedSolution {
    pub fn failed() -> Self {
        Self { solution: None, stated_objective: None, format_ok: false }
    }
}

/// Fills [`PROMPT_TEMPLATE`] with the TAI fields.
pub fn render_prompt(tai: &TextAttributedInstance) -> String {
    render_prompt_parts(&tai.instruction, &tai.input)
}

pub fn render_prompt_parts(instruction: &str, input: &str) -> String {
    // Single pass so that braces inside the instruction are never re-expanded.
    let (head, rest) = PROMPT_TEMPLATE.split_once("{instruction}").expect("template has instruction slot");
    let (mid, tail) = rest.split_once("{input}").expect("template has input slot");
    let mut out = String::with_capacity(PROMPT_TEMPLATE.len() + instruction.len() + input.len());
    out.push_str(head);
    out.push_str(instruction);
    out.push_str(mid);
    out.push_str(input);
    out.push_str(tail);
    out
}
