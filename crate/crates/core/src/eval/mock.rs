//! A scripted policy for exercising the pipeline without a model.
//!
//! The mock starts from a reference solution and, per sample, either
//! emits unparseable prose, a deliberately infeasible corruption, or the
//! reference degraded by a few feasibility-preserving moves. Sample `i`
//! of a request is a pure function of `(config seed, request seed + i)`,
//! so the first `N` samples of a larger request equal a request for `N`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::endpoint::{CompletionRequest, Endpoint, EndpointError};
use crate::heuristics::stream_rng;
use crate::problems::{Instance, ProblemKind, Solution};
use crate::tai::format_solution;
use crate::verify::{check, objective};

/// Text emitted for a format failure; it contains no parseable answer.
pub const FORMAT_FAILURE_TEXT: &str = "I was unable to determine an answer for this instance.";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockPolicyConfig {
    /// Probability that a sample is a corrupted, infeasible solution.
    pub infeasible_prob: f64,
    /// Feasibility-preserving moves applied to the reference per sample.
    pub swap_count: usize,
    /// Probability that a sample contains no parseable answer.
    pub format_fail_prob: f64,
    pub seed: u64,
}

impl Default for MockPolicyConfig {
    fn default() -> Self {
        Self::echo()
    }
}

impl MockPolicyConfig {
    /// The policy that always returns the formatted reference.
    pub fn echo() -> Self {
        Self { infeasible_prob: 0.0, swap_count: 0, format_fail_prob: 0.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<(), EndpointError> {
        let p = self.infeasible_prob + self.format_fail_prob;
        if !(0.0..=1.0).contains(&self.infeasible_prob) || !(0.0..=1.0).contains(&self.format_fail_prob) || p > 1.0 {
            return Err(EndpointError::InvalidConfig(format!(
                "mock probabilities {} + {} must lie in [0, 1]",
                self.infeasible_prob, self.format_fail_prob
            )));
        }
        Ok(())
    }
}

/// One mock completion for `inst`, derived from `reference`.
pub fn mock_policy(inst: &Instance, reference: &Solution, cfg: &MockPolicyConfig, sample_seed: u64) -> String {
    let mut rng = stream_rng(cfg.seed, sample_seed);
    let u: f64 = if cfg.format_fail_prob > 0.0 || cfg.infeasible_prob > 0.0 { rng.gen() } else { 1.0 };
    if u < cfg.format_fail_prob {
        return FORMAT_FAILURE_TEXT.to_string();
    }
    let solution = if u < cfg.format_fail_prob + cfg.infeasible_prob {
        corrupt(inst, reference, &mut rng)
    } else {
        perturb(inst, reference, cfg.swap_count, &mut rng)
    };
    let stated = objective(inst, &solution)
        .or_else(|_| objective(inst, reference))
        .map(|o| o.value)
        .unwrap_or(0.0);
    format_solution(&solution, stated, inst.kind).unwrap_or_else(|_| FORMAT_FAILURE_TEXT.to_string())
}

/// Applies up to `moves` random moves, keeping only those that leave the
/// solution feasible.
fn perturb(inst: &Instance, reference: &Solution, moves: usize, rng: &mut impl Rng) -> Solution {
    let mut sol = reference.clone();
    for _ in 0..moves {
        if let Some(next) = propose(inst, &sol, rng) {
            if check(inst, &next).feasible {
                sol = next;
            }
        }
    }
    sol
}

fn swap_two<T>(items: &mut [T], lo: usize, hi: usize, rng: &mut impl Rng) -> bool {
    if hi < lo + 2 {
        return false;
    }
    let i = rng.gen_range(lo..hi);
    let j = rng.gen_range(lo..hi);
    items.swap(i, j);
    i != j
}

fn propose(inst: &Instance, sol: &Solution, rng: &mut impl Rng) -> Option<Solution> {
    let mut next = sol.clone();
    let changed = match (&mut next, inst.kind) {
        (Solution::Route(r), ProblemKind::Tsp) => {
            let end = r.len().saturating_sub(1);
            swap_two(r, 1, end, rng)
        }
        (Solution::Route(r), _) => {
            // Dropping a stop never lengthens a Euclidean path.
            if r.len() < 2 {
                return None;
            }
            r.remove(rng.gen_range(1..r.len()));
            true
        }
        (Solution::RouteSet(routes), _) => {
            let slots: Vec<(usize, usize)> = routes
                .iter()
                .enumerate()
                .flat_map(|(k, rt)| (1..rt.len().saturating_sub(1)).map(move |p| (k, p)))
                .collect();
            if slots.len() < 2 {
                return None;
            }
            let (a, b) = (*slots.choose(rng)?, *slots.choose(rng)?);
            let tmp = routes[a.0][a.1];
            routes[a.0][a.1] = routes[b.0][b.1];
            routes[b.0][b.1] = tmp;
            a != b
        }
        (Solution::VertexSet(set), ProblemKind::Mis) => {
            let v = *set.iter().copied().collect::<Vec<_>>().choose(rng)?;
            set.remove(&v)
        }
        (Solution::VertexSet(set), _) => {
            let n = inst.graph()?.n;
            let outside: Vec<usize> = (0..n).filter(|v| !set.contains(v)).collect();
            set.insert(*outside.choose(rng)?)
        }
        (Solution::JobOrder(order), _) => {
            let len = order.len();
            swap_two(order, 0, len, rng)
        }
        (Solution::MachineSchedules(rows), _) => {
            let row = rng.gen_range(0..rows.len().max(1));
            let row = rows.get_mut(row)?;
            if row.len() < 2 {
                return None;
            }
            let p = rng.gen_range(0..row.len() - 1);
            row.swap(p, p + 1);
            true
        }
    };
    changed.then_some(next)
}

/// A variant of `reference` that fails at least one constraint.
fn corrupt(inst: &Instance, reference: &Solution, rng: &mut impl Rng) -> Solution {
    let mut sol = reference.clone();
    match (&mut sol, inst.kind) {
        (Solution::Route(r), ProblemKind::Tsp) if r.len() >= 3 => {
            r.remove(rng.gen_range(1..r.len() - 1));
        }
        (Solution::Route(r), ProblemKind::Tsp) => r.clear(),
        (Solution::Route(r), _) => {
            // Without its leading depot the path no longer starts at node 0.
            if r.first() == Some(&0) {
                r.remove(0);
            } else {
                r.insert(0, 1);
            }
        }
        (Solution::RouteSet(routes), _) => {
            let slots: Vec<(usize, usize)> = routes
                .iter()
                .enumerate()
                .flat_map(|(k, rt)| (1..rt.len().saturating_sub(1)).map(move |p| (k, p)))
                .collect();
            match slots.choose(rng) {
                Some(&(k, p)) => {
                    routes[k].remove(p);
                }
                None => routes.push(vec![1, 0]),
            }
        }
        (Solution::VertexSet(set), ProblemKind::Mis) => {
            let g = inst.graph().expect("graph kind");
            let adj = g.adjacency();
            let options: Vec<usize> = set.iter().flat_map(|&v| adj[v].iter().copied()).collect();
            set.insert(options.choose(rng).copied().unwrap_or(g.n));
        }
        (Solution::VertexSet(set), _) => {
            let g = inst.graph().expect("graph kind");
            let adj = g.adjacency();
            let options: Vec<usize> = set.iter().copied().filter(|&v| adj[v].iter().any(|u| !set.contains(u))).collect();
            match options.choose(rng) {
                Some(v) => {
                    set.remove(v);
                }
                None => {
                    set.insert(g.n);
                }
            }
        }
        (Solution::JobOrder(order), _) => {
            if order.is_empty() {
                order.push(0);
            } else {
                order.remove(rng.gen_range(0..order.len()));
            }
        }
        (Solution::MachineSchedules(rows), _) => match rows.iter().position(|r| !r.is_empty()) {
            Some(first) => {
                let nonempty: Vec<usize> = (first..rows.len()).filter(|&m| !rows[m].is_empty()).collect();
                let m = *nonempty.choose(rng).expect("nonempty");
                let p = rng.gen_range(0..rows[m].len());
                rows[m].remove(p);
            }
            None => rows.push(vec![0]),
        },
    }
    debug_assert!(!check(inst, &sol).feasible, "corruption must be infeasible");
    sol
}

/// An [`Endpoint`] backed by [`mock_policy`], looking instances up by id.
pub struct MockEndpoint {
    cfg: MockPolicyConfig,
    entries: BTreeMap<String, (Instance, Solution)>,
}

impl MockEndpoint {
    pub fn new(cfg: MockPolicyConfig, entries: impl IntoIterator<Item = (Instance, Solution)>) -> Result<Self, EndpointError> {
        cfg.validate()?;
        let entries = entries.into_iter().map(|(inst, sol)| (inst.id.clone(), (inst, sol))).collect();
        Ok(Self { cfg, entries })
    }
}

impl Endpoint for MockEndpoint {
    fn complete(&self, req: &CompletionRequest) -> Result<Vec<String>, EndpointError> {
        let (inst, reference) = self
            .entries
            .get(&req.instance_id)
            .ok_or_else(|| EndpointError::Malformed(format!("mock has no instance `{}`", req.instance_id)))?;
        Ok((0..req.n as u64).map(|i| mock_policy(inst, reference, &self.cfg, req.seed.wrapping_add(i))).collect())
    }
}
