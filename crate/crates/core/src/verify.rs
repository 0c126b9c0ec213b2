//! Ground-truth feasibility, objectives and constraint margins.
//!
//! Every kind has a fixed, ordered constraint list (see [`constraint_names`]);
//! the order indexes the reward weights, so it must never change silently.
//! Out-of-range indices make the relevant constraint fail instead of
//! panicking.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::problems::{GraphInstance, Instance, ProblemKind, RoutingInstance, SchedulingInstance, Sense, Solution};
use crate::tai::ParsedSolution;

/// Absolute slack allowed on the OP distance limit.
pub const DISTANCE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum VerifyError {
    #[error("solution variant `{variant}` does not belong to {kind}")]
    VariantMismatch { variant: &'static str, kind: ProblemKind },
    #[error("index {index} out of range (size {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("constraint margins are only defined for OP and CVRP, not {0}")]
    Unsupported(ProblemKind),
    #[error("schedule cannot be decoded: {0}")]
    Undecodable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintResult {
    pub name: String,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    pub value: f64,
}

/// Outcome of checking one candidate against the constraints of its kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// Whether a structurally valid solution was available at all.
    pub zeta: bool,
    pub constraints: Vec<ConstraintResult>,
    pub feasible: bool,
    pub margins: Vec<Margin>,
}

impl FeasibilityReport {
    fn new(kind: ProblemKind, flags: &[bool], margins: Vec<Margin>) -> Self {
        let names = constraint_names(kind);
        debug_assert_eq!(names.len(), flags.len());
        let constraints: Vec<ConstraintResult> = names
            .iter()
            .zip(flags)
            .map(|(name, &satisfied)| ConstraintResult { name: (*name).to_string(), satisfied })
            .collect();
        Self {
            zeta: true,
            feasible: flags.iter().all(|&s| s),
            constraints,
            margins,
        }
    }

    /// Report for text without an extractable answer: ζ = 0, nothing holds.
    pub fn format_failure(kind: ProblemKind) -> Self {
        Self {
            zeta: false,
            constraints: constraint_names(kind)
                .iter()
                .map(|name| ConstraintResult { name: (*name).to_string(), satisfied: false })
                .collect(),
            feasible: false,
            margins: Vec::new(),
        }
    }

    /// Constraint indicators in canonical order.
    pub fn satisfied(&self) -> Vec<bool> {
        self.constraints.iter().map(|c| c.satisfied).collect()
    }

    /// Names of the constraints that do not hold.
    pub fn failed(&self) -> Vec<&str> {
        self.constraints.iter().filter(|c| !c.satisfied).map(|c| c.name.as_str()).collect()
    }
}

/// Objective value with its optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub value: f64,
    pub sense: Sense,
}

/// Canonical constraint order per kind.
pub fn constraint_names(kind: ProblemKind) -> &'static [&'static str] {
    match kind {
        ProblemKind::Tsp => &["all_nodes_once", "returns_to_start"],
        ProblemKind::Op => &["starts_at_depot", "each_node_at_most_once", "within_distance_limit"],
        ProblemKind::Cvrp => &["routes_start_end_at_depot", "all_customers_once", "within_capacity"],
        ProblemKind::Mis => &["independent"],
        ProblemKind::Mvc => &["covers_all_edges"],
        ProblemKind::Pfsp => &["job_permutation"],
        ProblemKind::Jssp => &["all_jobs_scheduled", "no_machine_conflict", "precedence_respected"],
    }
}

/// Checks `sol` against every constraint of `inst`'s kind.
///
/// A solution of the wrong variant yields the ζ = 0 report.
pub fn check(inst: &Instance, sol: &Solution) -> FeasibilityReport {
    let kind = inst.kind;
    match (sol, kind) {
        (Solution::Route(r), ProblemKind::Tsp) => check_tsp(inst.routing().expect("validated"), r),
        (Solution::Route(r), ProblemKind::Op) => check_op(inst.routing().expect("validated"), r),
        (Solution::RouteSet(rs), ProblemKind::Cvrp) => check_cvrp(inst.routing().expect("validated"), rs),
        (Solution::VertexSet(s), ProblemKind::Mis) => {
            FeasibilityReport::new(kind, &[is_independent(inst.graph().expect("validated"), s)], Vec::new())
        }
        (Solution::VertexSet(s), ProblemKind::Mvc) => {
            FeasibilityReport::new(kind, &[is_cover(inst.graph().expect("validated"), s)], Vec::new())
        }
        (Solution::JobOrder(o), ProblemKind::Pfsp) => {
            let s = inst.scheduling().expect("validated");
            FeasibilityReport::new(kind, &[is_permutation(o, s.num_jobs)], Vec::new())
        }
        (Solution::MachineSchedules(ms), ProblemKind::Jssp) => check_jssp(inst.scheduling().expect("validated"), ms),
        _ => FeasibilityReport::format_failure(kind),
    }
}

/// [`check`] for parser output; a failed parse yields the ζ = 0 report.
pub fn check_parsed(inst: &Instance, parsed: &ParsedSolution) -> FeasibilityReport {
    match (&parsed.solution, parsed.format_ok) {
        (Some(sol), true) => check(inst, sol),
        _ => FeasibilityReport::format_failure(inst.kind),
    }
}

fn is_permutation(seq: &[usize], n: usize) -> bool {
    if seq.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    seq.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
}

/// Splits off a closing repeat of the first node.
fn open_tour(route: &[usize]) -> &[usize] {
    match route {
        [first, .., last] if first == last => &route[..route.len() - 1],
        _ => route,
    }
}

fn check_tsp(r: &RoutingInstance, route: &[usize]) -> FeasibilityReport {
    let visits = open_tour(route);
    let c1 = is_permutation(visits, r.len());
    // The start-node convention is folded into the return constraint.
    let c2 = route.len() >= 2 && route[0] == r.depot && route.last() == Some(&r.depot);
    FeasibilityReport::new(ProblemKind::Tsp, &[c1, c2], Vec::new())
}

fn check_op(r: &RoutingInstance, route: &[usize]) -> FeasibilityReport {
    let n = r.len();
    let in_range = route.iter().all(|&v| v < n);
    let c1 = route.first() == Some(&r.depot);
    let body = match route {
        [first, .., last] if *first == r.depot && *last == r.depot => &route[..route.len() - 1],
        _ => route,
    };
    let mut seen = vec![false; n];
    let c2 = in_range && body.iter().all(|&v| !std::mem::replace(&mut seen[v], true));
    let limit = r.distance_limit.unwrap_or(f64::INFINITY);
    let (c3, margins) = if in_range {
        let slack = limit - r.path_length(route);
        (slack >= -DISTANCE_TOLERANCE, vec![Margin { name: "distance_limit".into(), value: slack }])
    } else {
        (false, Vec::new())
    };
    FeasibilityReport::new(ProblemKind::Op, &[c1, c2, c3], margins)
}

fn nonempty_routes(routes: &[Vec<usize>]) -> impl Iterator<Item = &Vec<usize>> {
    routes.iter().filter(|r| !r.is_empty())
}

fn check_cvrp(r: &RoutingInstance, routes: &[Vec<usize>]) -> FeasibilityReport {
    let n = r.len();
    let depot = r.depot;
    let in_range = routes.iter().flatten().all(|&v| v < n);
    let c1 = nonempty_routes(routes).all(|route| route[0] == depot && route[route.len() - 1] == depot);
    let mut count = vec![0usize; n];
    for &v in routes.iter().flatten() {
        if v < n {
            count[v] += 1;
        }
    }
    let c2 = in_range && (0..n).filter(|&v| v != depot).all(|v| count[v] == 1);
    let capacity = r.capacity.unwrap_or(u32::MAX) as f64;
    let (c3, margins) = if in_range {
        let min_slack = nonempty_routes(routes)
            .map(|route| capacity - route.iter().map(|&v| r.demand(v) as f64).sum::<f64>())
            .reduce(f64::min);
        match min_slack {
            Some(slack) => (slack >= 0.0, vec![Margin { name: "capacity".into(), value: slack }]),
            None => (true, Vec::new()),
        }
    } else {
        (false, Vec::new())
    };
    FeasibilityReport::new(ProblemKind::Cvrp, &[c1, c2, c3], margins)
}

fn is_independent(g: &GraphInstance, set: &BTreeSet<usize>) -> bool {
    set.iter().all(|&v| v < g.n) && g.edges.iter().all(|(a, b)| !(set.contains(a) && set.contains(b)))
}

fn is_cover(g: &GraphInstance, set: &BTreeSet<usize>) -> bool {
    set.iter().all(|&v| v < g.n) && g.edges.iter().all(|(a, b)| set.contains(a) || set.contains(b))
}

/// Operation id of job `j`'s `o`-th operation.
fn op_id(s: &SchedulingInstance, j: usize, o: usize) -> usize {
    j * s.num_machines + o
}

/// For every (job, machine), the index of the operation of that job which
/// runs on that machine.
fn operation_index(s: &SchedulingInstance) -> Vec<Vec<usize>> {
    let order = s.machine_order.as_ref().expect("validated JSSP instance has a machine order");
    order
        .iter()
        .map(|row| {
            let mut at = vec![0; s.num_machines];
            for (o, &m) in row.iter().enumerate() {
                at[m] = o;
            }
            at
        })
        .collect()
}

/// Precedence graph of job chains plus consecutive machine-sequence arcs.
/// Rows beyond the machine count, out-of-range jobs and repeated jobs are
/// skipped so that the graph is always well defined.
fn precedence_graph(s: &SchedulingInstance, rows: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let (jobs, machines) = (s.num_jobs, s.num_machines);
    let op_on = operation_index(s);
    let mut succ = vec![Vec::new(); jobs * machines];
    for j in 0..jobs {
        for o in 1..machines {
            succ[op_id(s, j, o - 1)].push(op_id(s, j, o));
        }
    }
    for (m, row) in rows.iter().enumerate().take(machines) {
        let mut seen = vec![false; jobs];
        let seq: Vec<usize> = row.iter().copied().filter(|&j| j < jobs && !std::mem::replace(&mut seen[j], true)).collect();
        for w in seq.windows(2) {
            succ[op_id(s, w[0], op_on[w[0]][m])].push(op_id(s, w[1], op_on[w[1]][m]));
        }
    }
    succ
}

/// Kahn's algorithm; `None` when the graph has a cycle.
fn topological_order(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; succ.len()];
    for targets in succ {
        for &t in targets {
            indeg[t] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..succ.len()).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(succ.len());
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &t in &succ[v] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push_back(t);
            }
        }
    }
    (order.len() == succ.len()).then_some(order)
}

fn check_jssp(s: &SchedulingInstance, rows: &[Vec<usize>]) -> FeasibilityReport {
    let jobs = s.num_jobs;
    let c1 = rows.len() == s.num_machines
        && rows.iter().all(|row| {
            let present: BTreeSet<usize> = row.iter().copied().filter(|&j| j < jobs).collect();
            present.len() == jobs
        });
    let c2 = rows.iter().all(|row| {
        let mut seen = vec![false; jobs];
        row.iter().all(|&j| j < jobs && !std::mem::replace(&mut seen[j], true))
    });
    let c3 = topological_order(&precedence_graph(s, rows)).is_some();
    FeasibilityReport::new(ProblemKind::Jssp, &[c1, c2, c3], Vec::new())
}

fn ensure_in_range<'a>(items: impl IntoIterator<Item = &'a usize>, bound: usize) -> Result<(), VerifyError> {
    match items.into_iter().find(|&&v| v >= bound) {
        Some(&index) => Err(VerifyError::IndexOutOfRange { index, bound }),
        None => Ok(()),
    }
}

/// Objective of `sol`. Feasibility is not required, only valid indices.
///
/// TSP tours are measured as closed cycles over the visit sequence; OP
/// counts each distinct visited prize once; CVRP sums route lengths as
/// written; JSSP needs a complete, deadlock-free schedule.
pub fn objective(inst: &Instance, sol: &Solution) -> Result<ObjectiveValue, VerifyError> {
    let kind = inst.kind;
    let value = match (sol, kind) {
        (Solution::Route(route), ProblemKind::Tsp) => {
            let r = inst.routing().expect("validated");
            ensure_in_range(route, r.len())?;
            tour_length(r, open_tour(route))
        }
        (Solution::Route(route), ProblemKind::Op) => {
            let r = inst.routing().expect("validated");
            ensure_in_range(route, r.len())?;
            let distinct: BTreeSet<usize> = route.iter().copied().collect();
            distinct.iter().map(|&v| r.prize(v) as f64).sum()
        }
        (Solution::RouteSet(routes), ProblemKind::Cvrp) => {
            let r = inst.routing().expect("validated");
            ensure_in_range(routes.iter().flatten(), r.len())?;
            routes.iter().map(|route| r.path_length(route)).sum()
        }
        (Solution::VertexSet(set), ProblemKind::Mis | ProblemKind::Mvc) => {
            ensure_in_range(set, inst.graph().expect("validated").n)?;
            set.len() as f64
        }
        (Solution::JobOrder(order), ProblemKind::Pfsp) => {
            let s = inst.scheduling().expect("validated");
            ensure_in_range(order, s.num_jobs)?;
            pfsp_makespan(s, order) as f64
        }
        (Solution::MachineSchedules(rows), ProblemKind::Jssp) => jssp_makespan(inst.scheduling().expect("validated"), rows)? as f64,
        _ => return Err(VerifyError::VariantMismatch { variant: sol.variant_name(), kind }),
    };
    Ok(ObjectiveValue { value, sense: kind.sense() })
}

/// Length of the closed cycle through `visits`.
pub fn tour_length(r: &RoutingInstance, visits: &[usize]) -> f64 {
    match visits {
        [] | [_] => 0.0,
        [first, .., last] => r.path_length(visits) + r.dist(*last, *first),
    }
}

/// Makespan of a job sequence in a permutation flow shop, via
/// `C[i][k] = max(C[i][k-1], C[i-1][k]) + p`.
pub fn pfsp_makespan(s: &SchedulingInstance, order: &[usize]) -> u64 {
    let mut completion = vec![0u64; s.num_machines];
    for &j in order {
        let mut prev = 0u64;
        for (m, c) in completion.iter_mut().enumerate() {
            *c = (*c).max(prev) + s.ptimes[j][m] as u64;
            prev = *c;
        }
    }
    completion.last().copied().unwrap_or(0)
}

/// Start times of every operation (`starts[j][o]`) in the semi-active
/// schedule realizing the given machine sequences.
pub fn jssp_start_times(s: &SchedulingInstance, rows: &[Vec<usize>]) -> Result<Vec<Vec<u64>>, VerifyError> {
    let report = check_jssp(s, rows);
    if !report.constraints[0].satisfied || !report.constraints[1].satisfied {
        return Err(VerifyError::Undecodable("every machine must list every job exactly once".into()));
    }
    let succ = precedence_graph(s, rows);
    let order = topological_order(&succ).ok_or_else(|| VerifyError::Undecodable("machine sequences deadlock".into()))?;
    let machines = s.num_machines;
    let mut ready = vec![0u64; succ.len()];
    let mut starts = vec![vec![0u64; machines]; s.num_jobs];
    for v in order {
        let (j, o) = (v / machines, v % machines);
        starts[j][o] = ready[v];
        let end = ready[v] + s.ptimes[j][o] as u64;
        for &t in &succ[v] {
            ready[t] = ready[t].max(end);
        }
    }
    Ok(starts)
}

/// Makespan of the semi-active schedule realizing the machine sequences.
pub fn jssp_makespan(s: &SchedulingInstance, rows: &[Vec<usize>]) -> Result<u64, VerifyError> {
    let starts = jssp_start_times(s, rows)?;
    Ok(starts
        .iter()
        .zip(&s.ptimes)
        .flat_map(|(st, pt)| st.iter().zip(pt).map(|(&a, &p)| a + p as u64))
        .max()
        .unwrap_or(0))
}

/// Signed slack of the inequality constraints: `B − length` for OP and
/// the minimum `Q − load` over non-empty routes for CVRP.
pub fn constraint_margin(inst: &Instance, sol: &Solution) -> Result<Vec<Margin>, VerifyError> {
    match inst.kind {
        ProblemKind::Op | ProblemKind::Cvrp => {
            if !sol.matches(inst.kind) {
                return Err(VerifyError::VariantMismatch { variant: sol.variant_name(), kind: inst.kind });
            }
            let n = inst.size();
            match sol {
                Solution::Route(r) => ensure_in_range(r, n)?,
                Solution::RouteSet(rs) => ensure_in_range(rs.iter().flatten(), n)?,
                _ => unreachable!("variant matched above"),
            }
            Ok(check(inst, sol).margins)
        }
        kind => Err(VerifyError::Unsupported(kind)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_instance, GenConfig, Payload, Point};
    use proptest::prelude::*;

    fn routing(kind: ProblemKind, r: RoutingInstance) -> Instance {
        Instance::new(kind, "r", Payload::Routing(r)).unwrap()
    }

    fn triangle() -> Instance {
        routing(
            ProblemKind::Tsp,
            RoutingInstance::tsp(vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(0.0, 4.0)]),
        )
    }

    fn pfsp_2x2() -> SchedulingInstance {
        // Machine 0 times [1, 3], machine 1 times [2, 1] (columns are machines).
        SchedulingInstance { num_jobs: 2, num_machines: 2, ptimes: vec![vec![1, 2], vec![3, 1]], machine_order: None }
    }

    fn jssp(ptimes: Vec<Vec<u32>>, order: Vec<Vec<usize>>) -> Instance {
        let s = SchedulingInstance { num_jobs: ptimes.len(), num_machines: ptimes[0].len(), ptimes, machine_order: Some(order) };
        Instance::new(ProblemKind::Jssp, "j", Payload::Scheduling(s)).unwrap()
    }

    #[test]
    fn tsp_triangle() {
        let inst = triangle();
        let sol = Solution::Route(vec![0, 1, 2, 0]);
        assert!(check(&inst, &sol).feasible);
        assert_eq!(objective(&inst, &sol).unwrap().value, 12.0);
    }

    #[test]
    fn tsp_missing_node_fails_c1() {
        let report = check(&triangle(), &Solution::Route(vec![0, 1, 0]));
        assert_eq!(report.satisfied(), vec![false, true]);
        assert_eq!(report.failed(), vec!["all_nodes_once"]);
    }

    #[test]
    fn tsp_open_or_shifted_start_fails_c2() {
        let inst = triangle();
        assert_eq!(check(&inst, &Solution::Route(vec![0, 1, 2])).satisfied(), vec![true, false]);
        assert_eq!(check(&inst, &Solution::Route(vec![1, 2, 0, 1])).satisfied(), vec![true, false]);
    }

    #[test]
    fn out_of_range_is_a_failed_constraint() {
        let inst = triangle();
        let report = check(&inst, &Solution::Route(vec![0, 7, 2, 0]));
        assert!(!report.feasible && report.zeta);
        assert!(matches!(objective(&inst, &Solution::Route(vec![0, 7])), Err(VerifyError::IndexOutOfRange { index: 7, bound: 3 })));
    }

    #[test]
    fn wrong_variant_is_format_failure() {
        let report = check(&triangle(), &Solution::JobOrder(vec![0]));
        assert!(!report.zeta && !report.feasible);
        assert_eq!(report.constraints.len(), 2);
    }

    fn op_instance(limit: f64) -> Instance {
        let mut r = RoutingInstance::tsp(vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(3.0, 4.0), Point::new(0.0, 4.0)]);
        r.prizes = Some(vec![0, 5, 10, 6]);
        r.distance_limit = Some(limit);
        routing(ProblemKind::Op, r)
    }

    #[test]
    fn op_prizes_and_margin() {
        let inst = op_instance(10.0);
        let sol = Solution::Route(vec![0, 1, 2, 3]);
        let report = check(&inst, &sol);
        assert!(report.feasible);
        assert_eq!(objective(&inst, &sol).unwrap().value, 21.0);
        assert!((report.margins[0].value - 0.0).abs() < 1e-12);
        let closed = Solution::Route(vec![0, 1, 2, 3, 0]);
        let report = check(&inst, &closed);
        assert_eq!(report.satisfied(), vec![true, true, false]);
        assert!((constraint_margin(&inst, &closed).unwrap()[0].value + 4.0).abs() < 1e-12);
    }

    #[test]
    fn op_margin_example() {
        // Path of length 9.2 against B = 10.
        let mut r = RoutingInstance::tsp(vec![Point::new(0.0, 0.0), Point::new(9.2, 0.0)]);
        r.prizes = Some(vec![0, 1]);
        r.distance_limit = Some(10.0);
        let inst = routing(ProblemKind::Op, r);
        let m = constraint_margin(&inst, &Solution::Route(vec![0, 1])).unwrap();
        assert!((m[0].value - 0.8).abs() < 1e-9);
    }

    #[test]
    fn op_repeat_and_start() {
        let inst = op_instance(100.0);
        assert_eq!(check(&inst, &Solution::Route(vec![0, 1, 1])).satisfied(), vec![true, false, true]);
        assert_eq!(check(&inst, &Solution::Route(vec![1, 0])).satisfied(), vec![false, true, true]);
        assert!(check(&inst, &Solution::Route(vec![0])).feasible);
    }

    fn cvrp_instance() -> Instance {
        let mut r = RoutingInstance::tsp(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 1.0)]);
        r.demands = Some(vec![0, 9, 5, 6]);
        r.capacity = Some(10);
        routing(ProblemKind::Cvrp, r)
    }

    #[test]
    fn cvrp_min_margin() {
        let inst = cvrp_instance();
        let sol = Solution::RouteSet(vec![vec![0, 1, 0], vec![0, 2, 3, 0]]);
        let report = check(&inst, &sol);
        assert_eq!(report.satisfied(), vec![true, true, false]);
        assert_eq!(report.margins[0].value, -1.0);
        assert_eq!(constraint_margin(&inst, &sol).unwrap()[0].value, -1.0);
    }

    #[test]
    fn cvrp_feasible_with_empty_route() {
        let inst = cvrp_instance();
        let sol = Solution::RouteSet(vec![vec![0, 1, 0], vec![], vec![0, 2, 0], vec![0, 3, 0]]);
        let report = check(&inst, &sol);
        assert!(report.feasible);
        assert_eq!(report.margins[0].value, 1.0);
        assert!((objective(&inst, &sol).unwrap().value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cvrp_duplicate_customer() {
        let sol = Solution::RouteSet(vec![vec![0, 1, 0], vec![0, 1, 2, 3, 0]]);
        assert!(!check(&cvrp_instance(), &sol).constraints[1].satisfied);
    }

    #[test]
    fn margins_unsupported_elsewhere() {
        assert_eq!(constraint_margin(&triangle(), &Solution::Route(vec![0, 1, 2, 0])), Err(VerifyError::Unsupported(ProblemKind::Tsp)));
    }

    #[test]
    fn graph_constraints() {
        let g = GraphInstance::new(3, [(0, 1), (1, 2)]).unwrap();
        let mis = Instance::new(ProblemKind::Mis, "g", Payload::Graph(g.clone())).unwrap();
        let mvc = Instance::new(ProblemKind::Mvc, "g", Payload::Graph(g)).unwrap();
        let set = |v: &[usize]| Solution::VertexSet(v.iter().copied().collect());
        assert!(check(&mis, &set(&[0, 2])).feasible);
        assert!(!check(&mis, &set(&[0, 1])).feasible);
        assert!(!check(&mis, &set(&[0, 5])).feasible);
        assert!(check(&mvc, &set(&[1])).feasible);
        assert!(!check(&mvc, &set(&[0])).feasible);
        assert_eq!(objective(&mis, &set(&[0, 2])).unwrap(), ObjectiveValue { value: 2.0, sense: Sense::Maximize });
    }

    #[test]
    fn pfsp_two_by_two() {
        let s = pfsp_2x2();
        assert_eq!(pfsp_makespan(&s, &[0, 1]), 5);
        assert_eq!(pfsp_makespan(&s, &[1, 0]), 6);
        let inst = Instance::new(ProblemKind::Pfsp, "p", Payload::Scheduling(s)).unwrap();
        assert!(check(&inst, &Solution::JobOrder(vec![1, 0])).feasible);
        assert!(!check(&inst, &Solution::JobOrder(vec![1, 1])).feasible);
        assert!(!check(&inst, &Solution::JobOrder(vec![1])).feasible);
    }

    #[test]
    fn jssp_decoding() {
        // Job 0: M0 (3) then M1 (2); job 1: M1 (2) then M0 (4).
        let inst = jssp(vec![vec![3, 2], vec![2, 4]], vec![vec![0, 1], vec![1, 0]]);
        let good = Solution::MachineSchedules(vec![vec![0, 1], vec![1, 0]]);
        assert!(check(&inst, &good).feasible);
        assert_eq!(objective(&inst, &good).unwrap().value, 7.0);
        // Job 1 first on M0 but job 0 first on M1: each waits on the other.
        let deadlock = Solution::MachineSchedules(vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(check(&inst, &deadlock).satisfied(), vec![true, true, false]);
        assert!(matches!(objective(&inst, &deadlock), Err(VerifyError::Undecodable(_))));
        let partial = Solution::MachineSchedules(vec![vec![0], vec![1, 0]]);
        assert_eq!(check(&inst, &partial).satisfied(), vec![false, true, true]);
        let repeated = Solution::MachineSchedules(vec![vec![0, 1, 0], vec![1, 0]]);
        assert_eq!(check(&inst, &repeated).satisfied(), vec![true, false, true]);
    }

    #[test]
    fn format_failure_has_all_constraints_false() {
        for kind in ProblemKind::ALL {
            let r = FeasibilityReport::format_failure(kind);
            assert_eq!(r.constraints.len(), constraint_names(kind).len());
            assert!(r.satisfied().iter().all(|s| !s));
        }
    }

    fn jssp_instance(seed: u64) -> Instance {
        gen_instance(ProblemKind::Jssp, &GenConfig::default_for(ProblemKind::Jssp, seed).with_size(3, 6).with_machines(2, 5)).unwrap()
    }

    proptest! {
        #[test]
        fn tsp_reversal_preserves_length(seed in any::<u64>()) {
            let inst = gen_instance(ProblemKind::Tsp, &GenConfig::default_for(ProblemKind::Tsp, seed).with_size(5, 30)).unwrap();
            let n = inst.size();
            let mut route: Vec<usize> = (0..n).collect();
            route.push(0);
            let forward = objective(&inst, &Solution::Route(route.clone())).unwrap().value;
            route.reverse();
            let backward = objective(&inst, &Solution::Route(route)).unwrap().value;
            prop_assert!((forward - backward).abs() < 1e-6);
        }

        #[test]
        fn jssp_machine_relabeling_and_lower_bound(seed in any::<u64>(), perm_seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let inst = jssp_instance(seed);
            let s = inst.scheduling().unwrap().clone();
            // Dispatch operations in job-round-robin order: always acyclic.
            let mut rows = vec![Vec::new(); s.num_machines];
            let order = s.machine_order.clone().unwrap();
            for o in 0..s.num_machines {
                for j in 0..s.num_jobs {
                    rows[order[j][o]].push(j);
                }
            }
            let makespan = jssp_makespan(&s, &rows).unwrap();
            let job_bound = s.ptimes.iter().map(|r| r.iter().map(|&p| p as u64).sum::<u64>()).max().unwrap();
            let mut machine_load = vec![0u64; s.num_machines];
            for j in 0..s.num_jobs {
                for o in 0..s.num_machines {
                    machine_load[order[j][o]] += s.ptimes[j][o] as u64;
                }
            }
            prop_assert!(makespan >= job_bound.max(*machine_load.iter().max().unwrap()));

            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed);
            let mut relabel: Vec<usize> = (0..s.num_machines).collect();
            relabel.shuffle(&mut rng);
            let mut s2 = s.clone();
            s2.machine_order = Some(order.iter().map(|row| row.iter().map(|&m| relabel[m]).collect()).collect());
            let mut rows2 = vec![Vec::new(); s.num_machines];
            for (m, row) in rows.iter().enumerate() {
                rows2[relabel[m]] = row.clone();
            }
            prop_assert_eq!(jssp_makespan(&s2, &rows2).unwrap(), makespan);
        }

        #[test]
        fn feasible_implies_nonnegative_margins(seed in any::<u64>(), cut in 1usize..20) {
            let inst = gen_instance(ProblemKind::Op, &GenConfig::default_for(ProblemKind::Op, seed).with_size(5, 20)).unwrap();
            let route: Vec<usize> = (0..inst.size().min(cut)).collect();
            let report = check(&inst, &Solution::Route(route));
            let negative = report.margins.iter().any(|m| m.value < -DISTANCE_TOLERANCE);
            prop_assert_eq!(report.feasible, !negative);
        }
    }
}
