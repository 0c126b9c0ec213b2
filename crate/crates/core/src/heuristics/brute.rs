//! Exhaustive oracles. Each refuses instances beyond its budget rather
//! than silently degrading to a heuristic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Dist, HeuristicError};
use crate::problems::{GraphInstance, Instance, ProblemKind, RoutingInstance, SchedulingInstance, Solution};
use crate::verify::{jssp_makespan, objective, pfsp_makespan, ObjectiveValue};

/// Largest instances the exhaustive oracles accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub tsp_nodes: usize,
    pub op_nodes: usize,
    pub cvrp_customers: usize,
    pub graph_nodes: usize,
    pub pfsp_jobs: usize,
    pub jssp_jobs: usize,
    pub jssp_machines: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { tsp_nodes: 11, op_nodes: 10, cvrp_customers: 8, graph_nodes: 24, pfsp_jobs: 8, jssp_jobs: 3, jssp_machines: 3 }
    }
}

impl Budget {
    /// `Err` describing the violated limit when `inst` is too large.
    pub fn admit(&self, inst: &Instance) -> Result<(), HeuristicError> {
        let kind = inst.kind;
        let refuse = |size: String, limit: String| Err(HeuristicError::BudgetExceeded { kind, size, limit });
        match kind {
            ProblemKind::Tsp if inst.size() > self.tsp_nodes => {
                refuse(format!("{} nodes", inst.size()), format!("at most {} nodes", self.tsp_nodes))
            }
            ProblemKind::Op if inst.size() > self.op_nodes => {
                refuse(format!("{} nodes", inst.size()), format!("at most {} nodes", self.op_nodes))
            }
            ProblemKind::Cvrp if inst.size() - 1 > self.cvrp_customers => refuse(
                format!("{} customers", inst.size() - 1),
                format!("at most {} customers", self.cvrp_customers),
            ),
            ProblemKind::Mis | ProblemKind::Mvc if inst.size() > self.graph_nodes => {
                refuse(format!("{} nodes", inst.size()), format!("at most {} nodes", self.graph_nodes))
            }
            ProblemKind::Pfsp if inst.size() > self.pfsp_jobs => {
                refuse(format!("{} jobs", inst.size()), format!("at most {} jobs", self.pfsp_jobs))
            }
            ProblemKind::Jssp => {
                let s = inst.scheduling().expect("scheduling payload");
                if s.num_jobs > self.jssp_jobs || s.num_machines > self.jssp_machines {
                    refuse(
                        format!("{}x{}", s.num_jobs, s.num_machines),
                        format!("at most {}x{}", self.jssp_jobs, self.jssp_machines),
                    )
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Provably optimal solution of `inst`, or a refusal when it exceeds
/// `budget`.
pub fn brute_force(inst: &Instance, budget: &Budget) -> Result<(Solution, ObjectiveValue), HeuristicError> {
    budget.admit(inst)?;
    let sol = match inst.kind {
        ProblemKind::Tsp => Solution::Route(tsp(inst.routing().expect("routing"))),
        ProblemKind::Op => Solution::Route(op(inst.routing().expect("routing"))),
        ProblemKind::Cvrp => Solution::RouteSet(cvrp(inst.routing().expect("routing"))?),
        ProblemKind::Mis => Solution::VertexSet(max_independent_set(inst.graph().expect("graph"))),
        ProblemKind::Mvc => {
            let g = inst.graph().expect("graph");
            let independent = max_independent_set(g);
            Solution::VertexSet((0..g.n).filter(|v| !independent.contains(v)).collect())
        }
        ProblemKind::Pfsp => Solution::JobOrder(pfsp(inst.scheduling().expect("scheduling"))),
        ProblemKind::Jssp => Solution::MachineSchedules(jssp(inst.scheduling().expect("scheduling"))),
    };
    let value = objective(inst, &sol).expect("oracle solutions are structurally valid");
    Ok((sol, value))
}

/// Depth-first search over tours from node 0, pruning partial tours that
/// are already no shorter than the best.
fn tsp(r: &RoutingInstance) -> Vec<usize> {
    struct Search<'a> {
        d: &'a Dist,
        best: f64,
        best_tour: Vec<usize>,
    }
    fn go(s: &mut Search, path: &mut Vec<usize>, used: &mut [bool], len: f64) {
        let n = used.len();
        if len >= s.best {
            return;
        }
        if path.len() == n {
            let total = len + s.d.get(*path.last().expect("nonempty"), 0);
            if total < s.best {
                s.best = total;
                s.best_tour = path.clone();
            }
            return;
        }
        let last = *path.last().expect("nonempty");
        for j in 1..n {
            if !used[j] {
                used[j] = true;
                path.push(j);
                go(s, path, used, len + s.d.get(last, j));
                path.pop();
                used[j] = false;
            }
        }
    }
    let d = Dist::new(r);
    let n = r.len();
    let mut s = Search { d: &d, best: f64::INFINITY, best_tour: Vec::new() };
    let mut used = vec![false; n];
    used[0] = true;
    go(&mut s, &mut vec![0], &mut used, 0.0);
    let mut tour = s.best_tour;
    tour.push(0);
    tour
}

/// Enumerates every simple path from the depot within the distance limit.
fn op(r: &RoutingInstance) -> Vec<usize> {
    struct Search<'a> {
        r: &'a RoutingInstance,
        d: &'a Dist,
        limit: f64,
        best: u64,
        best_path: Vec<usize>,
    }
    fn go(s: &mut Search, path: &mut Vec<usize>, used: &mut [bool], len: f64, prize: u64, remaining: u64) {
        if prize > s.best {
            s.best = prize;
            s.best_path = path.clone();
        }
        if prize + remaining <= s.best {
            return;
        }
        let last = *path.last().expect("nonempty");
        for j in 1..used.len() {
            let p = s.r.prize(j) as u64;
            if used[j] || p == 0 || len + s.d.get(last, j) > s.limit {
                continue;
            }
            used[j] = true;
            path.push(j);
            go(s, path, used, len + s.d.get(last, j), prize + p, remaining - p);
            path.pop();
            used[j] = false;
        }
    }
    let d = Dist::new(r);
    let total: u64 = (1..r.len()).map(|j| r.prize(j) as u64).sum();
    let mut s = Search { r, d: &d, limit: r.distance_limit.unwrap_or(f64::INFINITY), best: 0, best_path: vec![0] };
    let mut used = vec![false; r.len()];
    used[0] = true;
    go(&mut s, &mut vec![0], &mut used, 0.0, 0, total);
    s.best_path
}

/// Held–Karp over every customer subset, then an optimal partition of the
/// customers into capacity-feasible subsets.
fn cvrp(r: &RoutingInstance) -> Result<Vec<Vec<usize>>, HeuristicError> {
    let d = Dist::new(r);
    let k = r.len() - 1;
    let full = (1usize << k) - 1;
    let q = r.capacity.unwrap_or(u32::MAX) as u64;
    let customer = |bit: usize| bit + 1;

    // path[mask][last]: shortest depot-started path through `mask` ending at `last`.
    let mut path = vec![vec![f64::INFINITY; k]; full + 1];
    let mut parent = vec![vec![usize::MAX; k]; full + 1];
    for b in 0..k {
        path[1 << b][b] = d.get(0, customer(b));
    }
    for mask in 1..=full {
        for last in 0..k {
            let cur = path[mask][last];
            if mask & (1 << last) == 0 || !cur.is_finite() {
                continue;
            }
            for next in 0..k {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nm = mask | (1 << next);
                let cand = cur + d.get(customer(last), customer(next));
                if cand < path[nm][next] {
                    path[nm][next] = cand;
                    parent[nm][next] = last;
                }
            }
        }
    }
    let load = |mask: usize| -> u64 { (0..k).filter(|b| mask & (1 << b) != 0).map(|b| r.demand(customer(b)) as u64).sum() };
    let mut route_cost = vec![f64::INFINITY; full + 1];
    let mut route_last = vec![usize::MAX; full + 1];
    for mask in 1..=full {
        if load(mask) > q {
            continue;
        }
        for last in 0..k {
            let c = path[mask][last] + d.get(customer(last), 0);
            if c < route_cost[mask] {
                route_cost[mask] = c;
                route_last[mask] = last;
            }
        }
    }
    let mut best = vec![f64::INFINITY; full + 1];
    let mut choice = vec![0usize; full + 1];
    best[0] = 0.0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let s = sub | low;
            let c = route_cost[s] + best[mask ^ s];
            if c < best[mask] {
                best[mask] = c;
                choice[mask] = s;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    if !best[full].is_finite() {
        return Err(HeuristicError::NoFeasibleSolution("a customer exceeds vehicle capacity".into()));
    }
    let mut routes = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let s = choice[mask];
        let mut seq = Vec::new();
        let (mut m, mut last) = (s, route_last[s]);
        while last != usize::MAX {
            seq.push(customer(last));
            let prev = parent[m][last];
            m ^= 1 << last;
            last = prev;
        }
        seq.push(0);
        seq.reverse();
        seq.push(0);
        routes.push(seq);
        mask ^= s;
    }
    Ok(routes)
}

/// Enumerates independent sets by include/exclude branching over vertices
/// in id order, with the trivial size bound.
pub(crate) fn max_independent_set(g: &GraphInstance) -> BTreeSet<usize> {
    assert!(g.n <= 64, "bitmask enumeration supports at most 64 vertices");
    let adj: Vec<u64> = g.adjacency().iter().map(|nb| nb.iter().fold(0u64, |m, &v| m | 1 << v)).collect();
    fn go(adj: &[u64], v: usize, chosen: u64, blocked: u64, best: &mut (u32, u64)) {
        let n = adj.len();
        let size = chosen.count_ones();
        if size + (n - v) as u32 <= best.0 {
            return;
        }
        if v == n {
            *best = (size, chosen);
            return;
        }
        if blocked & (1 << v) == 0 {
            go(adj, v + 1, chosen | 1 << v, blocked | adj[v], best);
        }
        go(adj, v + 1, chosen, blocked, best);
    }
    let mut best = (0u32, 0u64);
    go(&adj, 0, 0, 0, &mut best);
    (0..g.n).filter(|&v| best.1 & (1 << v) != 0).collect()
}

/// Every job permutation in lexicographic order; the first optimum wins.
fn pfsp(s: &SchedulingInstance) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..s.num_jobs).collect();
    let mut best = (pfsp_makespan(s, &perm), perm.clone());
    while next_permutation(&mut perm) {
        let c = pfsp_makespan(s, &perm);
        if c < best.0 {
            best = (c, perm.clone());
        }
    }
    best.1
}

/// Every combination of per-machine job sequences; deadlocked
/// combinations are skipped.
fn jssp(s: &SchedulingInstance) -> Vec<Vec<usize>> {
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..s.num_jobs).collect();
    loop {
        perms.push(p.clone());
        if !next_permutation(&mut p) {
            break;
        }
    }
    let m = s.num_machines;
    let mut idx = vec![0usize; m];
    let mut best: Option<(u64, Vec<Vec<usize>>)> = None;
    loop {
        let rows: Vec<Vec<usize>> = idx.iter().map(|&i| perms[i].clone()).collect();
        if let Ok(c) = jssp_makespan(s, &rows) {
            if best.as_ref().map_or(true, |(bc, _)| c < *bc) {
                best = Some((c, rows));
            }
        }
        // Odometer increment, last machine fastest.
        let mut k = m;
        loop {
            if k == 0 {
                return best.expect("semi-active job-by-job order is always decodable").1;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < perms.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Advances to the next lexicographic permutation; false after the last.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
