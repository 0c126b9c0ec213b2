//! Evaluation: Best-of-N selection, metrics, endpoint and mock policies,
//! the batch harness, reports and SFT dataset export.

pub mod dataset;
pub mod endpoint;
mod harness;
pub mod metrics;
pub mod mock;
pub mod report;

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::problems::{Instance, ProblemKind, Sense};
use crate::rewards::relative_gap;
use crate::tai::{parse, ParsedSolution};
use crate::verify::{check_parsed, objective, FeasibilityReport};

pub use dataset::{export_sft_dataset, sft_record, SftRecord};
pub use endpoint::{ChatCompletionsClient, CompletionRequest, Endpoint, EndpointConfig, EndpointError, API_KEY_ENV};
pub use harness::{evaluate, load_records, EvalOptions};
pub use metrics::{metrics, MetricsSummary, SizeTier, GAP_THRESHOLDS};
pub use mock::{mock_policy, MockEndpoint, MockPolicyConfig};
pub use report::{render_summary, EvalReport};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("best-of-N selection needs at least one candidate")]
    EmptyCandidates,
    #[error("label for {instance_id} is infeasible; failed constraints: {}", failed.join(", "))]
    InfeasibleLabel { instance_id: String, failed: Vec<String> },
    #[error("label for {instance_id} states objective {stated} but recomputes to {recomputed}")]
    ObjectiveMismatch { instance_id: String, stated: f64, recomputed: f64 },
    #[error("no reference objective for instance {0}")]
    MissingReference(String),
    #[error("invalid evaluation settings: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Endpoint(#[from] EndpointError),
    #[error(transparent)]
    Format(#[from] crate::tai::FormatError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// One model answer after parsing and verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub raw_text: String,
    pub parsed: ParsedSolution,
    pub report: FeasibilityReport,
    /// Verifier-recomputed objective; present only for feasible candidates.
    pub objective: Option<f64>,
}

static REASONING_BLOCK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?s)<think>.*?</think>").expect("valid regex"));

/// Drops provider-marked reasoning (`<think>…</think>`); an unterminated
/// block swallows the rest of the text.
pub fn strip_reasoning(text: &str) -> String {
    let stripped = REASONING_BLOCK.replace_all(text, "");
    match stripped.find("<think>") {
        Some(at) => stripped[..at].to_string(),
        None => stripped.into_owned(),
    }
}

/// Parses and verifies one completion.
pub fn assess(inst: &Instance, raw_text: &str) -> Candidate {
    let parsed = parse(&strip_reasoning(raw_text), inst.kind);
    let report = check_parsed(inst, &parsed);
    let objective = match (&parsed.solution, report.feasible) {
        (Some(sol), true) => objective(inst, sol).ok().map(|o| o.value),
        _ => None,
    };
    Candidate { raw_text: raw_text.to_string(), parsed, report, objective }
}

/// Index of the best feasible candidate by objective (sense-aware, ties →
/// lowest index); `None` when no candidate is feasible.
pub fn bon_select(candidates: &[Candidate], sense: Sense) -> Result<Option<usize>, EvalError> {
    select_best(candidates.iter().map(|c| (c.report.feasible, c.objective)), sense)
}

/// [`bon_select`] over `(feasible, objective)` pairs.
pub fn select_best(items: impl IntoIterator<Item = (bool, Option<f64>)>, sense: Sense) -> Result<Option<usize>, EvalError> {
    let mut seen = false;
    let mut best: Option<(usize, f64)> = None;
    for (i, (feasible, value)) in items.into_iter().enumerate() {
        seen = true;
        let Some(v) = value.filter(|_| feasible) else { continue };
        if best.map_or(true, |(_, b)| sense.better(v, b)) {
            best = Some((i, v));
        }
    }
    if !seen {
        return Err(EvalError::EmptyCandidates);
    }
    Ok(best.map(|(i, _)| i))
}

/// Everything recorded about one instance in an evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub instance_id: String,
    pub kind: ProblemKind,
    pub tier: SizeTier,
    pub candidates: Vec<Candidate>,
    pub selected: Option<usize>,
    pub reference: f64,
    /// Relative gap of the selected candidate (0.05 = 5%).
    pub gap: Option<f64>,
    pub wall_ms: u64,
    /// Endpoint failure that left this record without candidates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EvalRecord {
    pub fn new(inst: &Instance, reference: f64, candidates: Vec<Candidate>, wall_ms: u64) -> Self {
        let sense = inst.kind.sense();
        let selected = if candidates.is_empty() { None } else { bon_select(&candidates, sense).expect("nonempty") };
        let gap = selected.and_then(|i| candidates[i].objective).map(|v| relative_gap(v, reference, sense));
        Self {
            instance_id: inst.id.clone(),
            kind: inst.kind,
            tier: SizeTier::of(inst),
            candidates,
            selected,
            reference,
            gap,
            wall_ms,
            error: None,
        }
    }

    /// Record for an instance whose requests failed outright.
    pub fn failed(inst: &Instance, reference: f64, error: String, wall_ms: u64) -> Self {
        Self { error: Some(error), ..Self::new(inst, reference, Vec::new(), wall_ms) }
    }
}

/// Stable 64-bit FNV-1a hash, used to derive per-instance seeds.
pub fn stable_hash(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn selection_examples() {
        let items = [(true, Some(10.0)), (false, Some(5.0)), (true, Some(8.0))];
        assert_eq!(select_best(items, Sense::Minimize).unwrap(), Some(2));
        assert_eq!(select_best([(false, Some(1.0)), (false, None)], Sense::Minimize).unwrap(), None);
        assert_eq!(select_best([(true, Some(3.0))], Sense::Maximize).unwrap(), Some(0));
        assert!(matches!(select_best([], Sense::Minimize), Err(EvalError::EmptyCandidates)));
        assert_eq!(select_best([(true, Some(4.0)), (true, Some(4.0))], Sense::Maximize).unwrap(), Some(0));
    }

    #[test]
    fn reasoning_is_stripped() {
        assert_eq!(strip_reasoning("<think>Route: [9]</think>Route: [0, 1, 0]"), "Route: [0, 1, 0]");
        assert_eq!(strip_reasoning("Set: [1] <think>unfinished Set: [2]"), "Set: [1] ");
    }

    #[test]
    fn stable_hash_is_fnv1a() {
        assert_eq!(stable_hash(""), 0xcbf29ce484222325);
        assert_eq!(stable_hash("a"), 0xaf63dc4c8601ec8c);
    }

    proptest! {
        #[test]
        fn selection_is_feasible_and_optimal(items in prop::collection::vec((any::<bool>(), prop::option::of(-100.0f64..100.0)), 1..12), maximize in any::<bool>()) {
            let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
            let pick = select_best(items.clone(), sense).unwrap();
            let feasible: Vec<f64> = items.iter().filter_map(|&(f, v)| v.filter(|_| f)).collect();
            match pick {
                None => prop_assert!(feasible.is_empty()),
                Some(i) => {
                    prop_assert!(items[i].0);
                    let v = items[i].1.unwrap();
                    prop_assert!(feasible.iter().all(|&o| !sense.better(o, v)));
                }
            }
        }
    }
}
