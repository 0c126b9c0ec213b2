//! Baseline solvers and exhaustive oracles.
//!
//! Every method constructs feasible solutions by design and is
//! deterministic given its seed. [`brute_force`] proves optimality on small
//! instances and refuses anything over its [`Budget`]; [`reference`] holds
//! the exact and best-known solvers used beyond that budget.

pub mod aco;
mod brute;
mod cvrp;
mod flowshop;
mod graph;
mod jobshop;
mod op;
pub mod reference;
mod tsp;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::problems::{Instance, ProblemKind, RoutingInstance, Solution};

pub use aco::{aco_solve, AcoConfig};
pub use brute::{brute_force, Budget};
pub use cvrp::{parallel_savings, sweep};
pub use flowshop::{neh, palmer};
pub use graph::{approx_matching, degree_add, degree_removal, greedy_max_degree, greedy_min_degree};
pub use jobshop::{dispatch, DispatchRule};
pub use op::{op_greedy, op_greedy_insertion, tsili, DEFAULT_TSILI_SAMPLES};
pub use tsp::{farthest_insertion, nearest_neighbor, two_opt};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum HeuristicError {
    #[error("method `{method}` does not apply to {kind}")]
    MethodMismatch { method: String, kind: ProblemKind },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{kind} instance of size {size} exceeds the exhaustive-search budget ({limit})")]
    BudgetExceeded { kind: ProblemKind, size: String, limit: String },
    #[error("instance admits no feasible solution: {0}")]
    NoFeasibleSolution(String),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
}

/// A baseline method. Each variant belongs to exactly the kinds listed in
/// [`HeuristicMethod::kinds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeuristicMethod {
    /// TSP nearest neighbor from node 0.
    Nn,
    /// TSP farthest insertion followed by 2-opt.
    Fi,
    /// Ant colony optimization (TSP, OP, CVRP).
    Aco { ants: usize, iterations: usize },
    /// OP: append the reachable node with the best prize per distance.
    Greedy,
    /// OP: cheapest insertion by prize per added distance.
    GreedyInsertion,
    /// OP: randomized best-of-`samples` construction.
    Tsili { samples: usize },
    /// CVRP: polar sweep around the depot.
    Sweep,
    /// CVRP: Clarke–Wright parallel savings.
    ParallelSavings,
    /// MIS: repeatedly take a minimum residual-degree vertex.
    GreedyMinDegree,
    /// MIS: scan by ascending static degree.
    DegreeAdd,
    /// MVC: both endpoints of a maximal matching.
    ApproxMatching,
    /// MVC: repeatedly take a maximum residual-degree vertex.
    GreedyMaxDegree,
    /// MVC: complement of the DegreeAdd independent set.
    DegreeRemoval,
    /// PFSP slope index.
    Palmer,
    /// PFSP Nawaz–Enscore–Ham insertion.
    Neh,
    /// JSSP dispatching, shortest processing time first.
    Spt,
    /// JSSP dispatching, first in first out.
    Fifo,
    /// JSSP dispatching, apparent tardiness cost.
    Atc,
}

impl HeuristicMethod {
    pub fn name(&self) -> &'static str {
        match self {
            HeuristicMethod::Nn => "nn",
            HeuristicMethod::Fi => "fi",
            HeuristicMethod::Aco { .. } => "aco",
            HeuristicMethod::Greedy => "greedy",
            HeuristicMethod::GreedyInsertion => "greedy-insertion",
            HeuristicMethod::Tsili { .. } => "tsili",
            HeuristicMethod::Sweep => "sweep",
            HeuristicMethod::ParallelSavings => "savings",
            HeuristicMethod::GreedyMinDegree => "min-degree",
            HeuristicMethod::DegreeAdd => "degree-add",
            HeuristicMethod::ApproxMatching => "approx-matching",
            HeuristicMethod::GreedyMaxDegree => "max-degree",
            HeuristicMethod::DegreeRemoval => "degree-removal",
            HeuristicMethod::Palmer => "palmer",
            HeuristicMethod::Neh => "neh",
            HeuristicMethod::Spt => "spt",
            HeuristicMethod::Fifo => "fifo",
            HeuristicMethod::Atc => "atc",
        }
    }

    pub fn kinds(&self) -> &'static [ProblemKind] {
        use ProblemKind::*;
        match self {
            HeuristicMethod::Nn | HeuristicMethod::Fi => &[Tsp],
            HeuristicMethod::Aco { .. } => &[Tsp, Op, Cvrp],
            HeuristicMethod::Greedy | HeuristicMethod::GreedyInsertion | HeuristicMethod::Tsili { .. } => &[Op],
            HeuristicMethod::Sweep | HeuristicMethod::ParallelSavings => &[Cvrp],
            HeuristicMethod::GreedyMinDegree | HeuristicMethod::DegreeAdd => &[Mis],
            HeuristicMethod::ApproxMatching | HeuristicMethod::GreedyMaxDegree | HeuristicMethod::DegreeRemoval => &[Mvc],
            HeuristicMethod::Palmer | HeuristicMethod::Neh => &[Pfsp],
            HeuristicMethod::Spt | HeuristicMethod::Fifo | HeuristicMethod::Atc => &[Jssp],
        }
    }

    pub fn applies_to(&self, kind: ProblemKind) -> bool {
        self.kinds().contains(&kind)
    }

    /// All methods for `kind`, with default parameters.
    pub fn all_for(kind: ProblemKind) -> Vec<HeuristicMethod> {
        use HeuristicMethod::*;
        let aco = {
            let cfg = AcoConfig::default_for(kind, 0);
            Aco { ants: cfg.ants, iterations: cfg.iterations }
        };
        match kind {
            ProblemKind::Tsp => vec![Nn, Fi, aco],
            ProblemKind::Op => vec![Greedy, GreedyInsertion, Tsili { samples: DEFAULT_TSILI_SAMPLES }, aco],
            ProblemKind::Cvrp => vec![Sweep, ParallelSavings, aco],
            ProblemKind::Mis => vec![GreedyMinDegree, DegreeAdd],
            ProblemKind::Mvc => vec![ApproxMatching, GreedyMaxDegree, DegreeRemoval],
            ProblemKind::Pfsp => vec![Palmer, Neh],
            ProblemKind::Jssp => vec![Spt, Fifo, Atc],
        }
    }

    /// Parses a method name, filling kind-specific defaults (ACO sizes,
    /// Tsili samples) for `kind`.
    pub fn parse_for(name: &str, kind: ProblemKind) -> Result<Self, HeuristicError> {
        let method = HeuristicMethod::all_for(kind)
            .into_iter()
            .find(|m| m.name() == name)
            .or_else(|| name.parse().ok())
            .ok_or_else(|| HeuristicError::UnknownMethod(name.to_string()))?;
        if method.applies_to(kind) {
            Ok(method)
        } else {
            Err(HeuristicError::MethodMismatch { method: name.to_string(), kind })
        }
    }
}

impl fmt::Display for HeuristicMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicMethod {
    type Err = HeuristicError;

    /// Parses a method name; ACO takes the TSP defaults.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemKind::ALL
            .iter()
            .flat_map(|&k| HeuristicMethod::all_for(k))
            .find(|m| m.name() == s)
            .ok_or_else(|| HeuristicError::UnknownMethod(s.to_string()))
    }
}

impl Serialize for HeuristicMethod {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for HeuristicMethod {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Runs `method` on `inst`. Deterministic given `seed`; only the
/// stochastic methods (ACO, Tsili) consume it.
pub fn solve(inst: &Instance, method: HeuristicMethod, seed: u64) -> Result<Solution, HeuristicError> {
    let kind = inst.kind;
    if !method.applies_to(kind) {
        return Err(HeuristicError::MethodMismatch { method: method.name().to_string(), kind });
    }
    let sol = match method {
        HeuristicMethod::Nn => Solution::Route(nearest_neighbor(routing(inst))),
        HeuristicMethod::Fi => Solution::Route(farthest_insertion(routing(inst))),
        HeuristicMethod::Aco { ants, iterations } => {
            let cfg = AcoConfig { ants, iterations, ..AcoConfig::default_for(kind, seed) };
            return aco_solve(inst, &cfg);
        }
        HeuristicMethod::Greedy => Solution::Route(op_greedy(routing(inst))),
        HeuristicMethod::GreedyInsertion => Solution::Route(op_greedy_insertion(routing(inst))),
        HeuristicMethod::Tsili { samples } => {
            if samples == 0 {
                return Err(HeuristicError::InvalidConfig("tsili needs at least one sample".into()));
            }
            Solution::Route(tsili(routing(inst), samples, seed))
        }
        HeuristicMethod::Sweep => Solution::RouteSet(sweep(routing(inst))?),
        HeuristicMethod::ParallelSavings => Solution::RouteSet(parallel_savings(routing(inst))?),
        HeuristicMethod::GreedyMinDegree => Solution::VertexSet(greedy_min_degree(graph_of(inst))),
        HeuristicMethod::DegreeAdd => Solution::VertexSet(degree_add(graph_of(inst))),
        HeuristicMethod::ApproxMatching => Solution::VertexSet(approx_matching(graph_of(inst))),
        HeuristicMethod::GreedyMaxDegree => Solution::VertexSet(greedy_max_degree(graph_of(inst))),
        HeuristicMethod::DegreeRemoval => Solution::VertexSet(degree_removal(graph_of(inst))),
        HeuristicMethod::Palmer => Solution::JobOrder(palmer(scheduling(inst))),
        HeuristicMethod::Neh => Solution::JobOrder(neh(scheduling(inst))),
        HeuristicMethod::Spt => Solution::MachineSchedules(dispatch(scheduling(inst), DispatchRule::Spt)),
        HeuristicMethod::Fifo => Solution::MachineSchedules(dispatch(scheduling(inst), DispatchRule::Fifo)),
        HeuristicMethod::Atc => Solution::MachineSchedules(dispatch(scheduling(inst), DispatchRule::Atc)),
    };
    Ok(sol)
}

fn routing(inst: &Instance) -> &RoutingInstance {
    inst.routing().expect("routing kind carries a routing payload")
}

fn graph_of(inst: &Instance) -> &crate::problems::GraphInstance {
    inst.graph().expect("graph kind carries a graph payload")
}

fn scheduling(inst: &Instance) -> &crate::problems::SchedulingInstance {
    inst.scheduling().expect("scheduling kind carries a scheduling payload")
}

/// Dense row-major distance matrix.
pub(crate) struct Dist {
    n: usize,
    d: Vec<f64>,
}

impl Dist {
    pub(crate) fn new(r: &RoutingInstance) -> Self {
        let n = r.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = r.dist(i, j);
            }
        }
        Self { n, d }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }
}

/// Independent random stream `stream` under `seed`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Index of the first maximum under `key` (ties → lowest index).
pub(crate) fn argmax_by<T>(items: impl IntoIterator<Item = T>, mut key: impl FnMut(&T) -> f64) -> Option<T> {
    let mut best: Option<(T, f64)> = None;
    for item in items {
        let k = key(&item);
        if best.as_ref().map_or(true, |(_, bk)| k > *bk) {
            best = Some((item, k));
        }
    }
    best.map(|(item, _)| item)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_instance, GenConfig};
    use crate::verify::check;

    #[test]
    fn names_round_trip() {
        for kind in ProblemKind::ALL {
            for m in HeuristicMethod::all_for(kind) {
                assert_eq!(HeuristicMethod::parse_for(m.name(), kind).unwrap(), m);
                assert!(m.applies_to(kind));
            }
        }
        assert!(matches!(HeuristicMethod::parse_for("neh", ProblemKind::Tsp), Err(HeuristicError::MethodMismatch { .. })));
        assert!(matches!("lkh".parse::<HeuristicMethod>(), Err(HeuristicError::UnknownMethod(_))));
    }

    #[test]
    fn mismatch_is_rejected() {
        let inst = gen_instance(ProblemKind::Tsp, &GenConfig::default_for(ProblemKind::Tsp, 1)).unwrap();
        assert!(solve(&inst, HeuristicMethod::Neh, 0).is_err());
    }

    #[test]
    fn every_method_is_feasible_on_a_few_instances() {
        for kind in ProblemKind::ALL {
            for seed in 0..5 {
                let cfg = GenConfig::default_for(kind, seed).with_size(8, 30);
                let inst = gen_instance(kind, &cfg).unwrap();
                for m in HeuristicMethod::all_for(kind) {
                    let m = match m {
                        HeuristicMethod::Aco { .. } => HeuristicMethod::Aco { ants: 5, iterations: 5 },
                        HeuristicMethod::Tsili { .. } => HeuristicMethod::Tsili { samples: 16 },
                        other => other,
                    };
                    let sol = solve(&inst, m, seed).unwrap();
                    let report = check(&inst, &sol);
                    assert!(report.feasible, "{kind} {m} seed {seed}: {:?}", report.failed());
                }
            }
        }
    }
}
