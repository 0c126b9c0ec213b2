//! Reading solutions out of model text, and writing them back.

use std::sync::LazyLock;

use regex::Regex;

use super::{OutputGrammar, ParsedSolution};
use crate::problems::{ProblemKind, Solution};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("solution variant `{variant}` does not belong to {kind}")]
    VariantMismatch { variant: &'static str, kind: ProblemKind },
    #[error("objective {0} is not finite")]
    NonFiniteObjective(f64),
}

const INT_LIST: &str = r"\[\s*(?:\d+\s*(?:,\s*\d+\s*)*)?\]";
const NUMBER: &str = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?";

fn grammar_regex(label: &str, nested: bool) -> Regex {
    let list = if nested {
        format!(r"\[\s*(?:{INT_LIST}\s*(?:,\s*{INT_LIST}\s*)*)?\]")
    } else {
        INT_LIST.to_string()
    };
    Regex::new(&format!(r"(?:{label}):\s*(?P<list>{list})(?:\s*,?\s*Objective:\s*(?P<obj>{NUMBER}))?"))
        .expect("valid solution regex")
}

static ROUTE: LazyLock<Regex> = LazyLock::new(|| grammar_regex("Routes?", false));
static ROUTES: LazyLock<Regex> = LazyLock::new(|| grammar_regex("Routes?", true));
static SET: LazyLock<Regex> = LazyLock::new(|| grammar_regex("Set", false));
static ORDER: LazyLock<Regex> = LazyLock::new(|| grammar_regex("Order", false));
static SCHEDULE: LazyLock<Regex> = LazyLock::new(|| grammar_regex("Schedule", true));
static INNER_LIST: LazyLock<Regex> = LazyLock::new(|| Regex::new(INT_LIST).expect("valid list regex"));

fn regex_for(grammar: OutputGrammar) -> &'static Regex {
    match grammar {
        OutputGrammar::Route => &ROUTE,
        OutputGrammar::Routes => &ROUTES,
        OutputGrammar::Set => &SET,
        OutputGrammar::Order => &ORDER,
        OutputGrammar::Schedule => &SCHEDULE,
    }
}

fn ints(list: &str) -> Option<Vec<usize>> {
    list.trim_matches(|c: char| c == '[' || c == ']' || c.is_whitespace())
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().ok())
        .collect()
}

fn nested_ints(list: &str) -> Option<Vec<Vec<usize>>> {
    // Skip the outer bracket so the inner lists are found one by one.
    INNER_LIST.find_iter(&list[1..]).map(|m| ints(m.as_str())).collect()
}

/// Extracts the last solution of the expected shape from `text`.
///
/// Never fails: malformed or missing answers yield `format_ok = false`.
/// PFSP orders are read as 1-based job ids and shifted to 0-based; a `0`
/// in a PFSP order is a format failure.
pub fn parse(text: &str, kind: ProblemKind) -> ParsedSolution {
    let grammar = OutputGrammar::for_kind(kind);
    let Some(caps) = regex_for(grammar).captures_iter(text).last() else {
        return ParsedSolution::failed();
    };
    let list = caps.name("list").expect("list group always participates").as_str();
    let stated_objective = caps
        .name("obj")
        .and_then(|m| m.as_str().parse::<f64>().ok())
        .filter(|v| v.is_finite());

    let solution = match grammar {
        OutputGrammar::Route => ints(list).map(Solution::Route),
        OutputGrammar::Routes => nested_ints(list).map(Solution::RouteSet),
        OutputGrammar::Set => ints(list).map(|v| Solution::VertexSet(v.into_iter().collect())),
        OutputGrammar::Order => ints(list).and_then(|v| {
            v.into_iter()
                .map(|j| j.checked_sub(1))
                .collect::<Option<Vec<_>>>()
                .map(Solution::JobOrder)
        }),
        OutputGrammar::Schedule => nested_ints(list).map(Solution::MachineSchedules),
    };
    match solution {
        Some(solution) => ParsedSolution { solution: Some(solution), stated_objective, format_ok: true },
        None => ParsedSolution::failed(),
    }
}

fn list_text(items: &[usize], offset: usize) -> String {
    let parts: Vec<String> = items.iter().map(|v| (v + offset).to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn nested_text(lists: &[Vec<usize>]) -> String {
    let parts: Vec<String> = lists.iter().map(|l| list_text(l, 0)).collect();
    format!("[{}]", parts.join(", "))
}

/// Writes `sol` in the answer format of `kind`. Routing objectives get two
/// decimals; set sizes and makespans are printed as integers.
pub fn format_solution(sol: &Solution, objective: f64, kind: ProblemKind) -> Result<String, FormatError> {
    if !sol.matches(kind) {
        return Err(FormatError::VariantMismatch { variant: sol.variant_name(), kind });
    }
    if !objective.is_finite() {
        return Err(FormatError::NonFiniteObjective(objective));
    }
    let label = OutputGrammar::for_kind(kind).label();
    let body = match sol {
        Solution::Route(r) => list_text(r, 0),
        Solution::RouteSet(rs) => nested_text(rs),
        Solution::VertexSet(s) => list_text(&s.iter().copied().collect::<Vec<_>>(), 0),
        Solution::JobOrder(o) => list_text(o, 1),
        Solution::MachineSchedules(ms) => nested_text(ms),
    };
    let obj = if kind.is_routing() {
        format!("{objective:.2}")
    } else {
        format!("{}", objective.round() as i64)
    };
    Ok(format!("{label}: {body}, Objective: {obj}"))
}
