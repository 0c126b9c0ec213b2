//! Reference solutions beyond the exhaustive budget.
//!
//! Exact branch-and-bound solvers cover MIS/MVC up to 64 vertices and
//! PFSP up to [`PFSP_EXACT_JOBS`] jobs. For every other kind the best of
//! several strong heuristics is used and labelled as such; gaps measured
//! against it are relative to a best-known value, not a proven optimum.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use super::brute::{brute_force, Budget};
use super::tsp::{nn_order, two_opt_with, IMPROVEMENT_EPS};
use super::{aco_solve, dispatch, neh, parallel_savings, stream_rng, sweep, tsili, AcoConfig, Dist, DispatchRule, HeuristicError};
use crate::problems::{GraphInstance, Instance, ProblemKind, RoutingInstance, SchedulingInstance, Solution, SolutionSource};
use crate::verify::{check, objective, pfsp_makespan, ObjectiveValue};

/// Largest PFSP instance handed to the exact branch and bound.
pub const PFSP_EXACT_JOBS: usize = 12;
/// Largest graph handed to the exact independent-set search.
pub const GRAPH_EXACT_NODES: usize = 64;
/// Random restarts of the TSP local search.
pub const TSP_RESTARTS: usize = 24;

/// Maximum independent set by branch and bound over 64-bit vertex masks:
/// vertices of residual degree ≤ 1 are taken greedily (always safe), other
/// branches split on a maximum-degree vertex.
pub fn exact_mis(g: &GraphInstance) -> Result<BTreeSet<usize>, HeuristicError> {
    if g.n > GRAPH_EXACT_NODES {
        return Err(HeuristicError::BudgetExceeded {
            kind: ProblemKind::Mis,
            size: format!("{} nodes", g.n),
            limit: format!("at most {GRAPH_EXACT_NODES} nodes"),
        });
    }
    let adj: Vec<u64> = g.adjacency().iter().map(|nb| nb.iter().fold(0u64, |m, &v| m | 1 << v)).collect();
    fn go(adj: &[u64], cand: u64, chosen: u64, best: &mut (u32, u64)) {
        if cand == 0 {
            if chosen.count_ones() > best.0 {
                *best = (chosen.count_ones(), chosen);
            }
            return;
        }
        if chosen.count_ones() + cand.count_ones() <= best.0 {
            return;
        }
        let degree = |v: usize| (adj[v] & cand).count_ones();
        let verts = || (0..64).filter(move |&v| cand & (1u64 << v) != 0);
        let low = verts().min_by_key(|&v| (degree(v), v)).expect("cand nonempty");
        if degree(low) <= 1 {
            go(adj, cand & !(adj[low] | 1 << low), chosen | 1 << low, best);
            return;
        }
        let high = verts().max_by_key(|&v| (degree(v), std::cmp::Reverse(v))).expect("cand nonempty");
        go(adj, cand & !(adj[high] | 1 << high), chosen | 1 << high, best);
        go(adj, cand & !(1 << high), chosen, best);
    }
    let all = if g.n == 64 { u64::MAX } else { (1u64 << g.n) - 1 };
    let mut best = (0, 0);
    go(&adj, all, 0, &mut best);
    Ok((0..g.n).filter(|&v| best.1 & (1 << v) != 0).collect())
}

/// Optimal PFSP order by depth-first branch and bound, seeded with NEH.
/// The bound for a prefix is, over machines, the prefix completion time
/// plus the remaining work on that machine plus the smallest remaining
/// tail after it.
pub fn exact_pfsp(s: &SchedulingInstance) -> Result<Vec<usize>, HeuristicError> {
    if s.num_jobs > PFSP_EXACT_JOBS {
        return Err(HeuristicError::BudgetExceeded {
            kind: ProblemKind::Pfsp,
            size: format!("{} jobs", s.num_jobs),
            limit: format!("at most {PFSP_EXACT_JOBS} jobs"),
        });
    }
    let m = s.num_machines;
    // tail[j][k]: work of job j on machines after k.
    let tail: Vec<Vec<u64>> = s
        .ptimes
        .iter()
        .map(|row| (0..m).map(|k| row[k + 1..].iter().map(|&p| p as u64).sum()).collect())
        .collect();
    struct Search<'a> {
        s: &'a SchedulingInstance,
        tail: &'a [Vec<u64>],
        best: u64,
        best_seq: Vec<usize>,
    }
    fn go(st: &mut Search, seq: &mut Vec<usize>, used: &mut [bool], completion: &[u64]) {
        let (jobs, m) = (st.s.num_jobs, st.s.num_machines);
        if seq.len() == jobs {
            let c = completion[m - 1];
            if c < st.best {
                st.best = c;
                st.best_seq = seq.clone();
            }
            return;
        }
        let bound = (0..m)
            .map(|k| {
                let rest = (0..jobs).filter(|&j| !used[j]);
                let work: u64 = rest.clone().map(|j| st.s.ptimes[j][k] as u64).sum();
                let min_tail = rest.map(|j| st.tail[j][k]).min().unwrap_or(0);
                completion[k] + work + min_tail
            })
            .max()
            .unwrap_or(0);
        if bound >= st.best {
            return;
        }
        for j in 0..jobs {
            if used[j] {
                continue;
            }
            let mut next = completion.to_vec();
            let mut prev = 0;
            for (k, c) in next.iter_mut().enumerate() {
                *c = (*c).max(prev) + st.s.ptimes[j][k] as u64;
                prev = *c;
            }
            used[j] = true;
            seq.push(j);
            go(st, seq, used, &next);
            seq.pop();
            used[j] = false;
        }
    }
    let start = neh(s);
    let mut st = Search { s, tail: &tail, best: pfsp_makespan(s, &start), best_seq: start };
    go(&mut st, &mut Vec::new(), &mut vec![false; s.num_jobs], &vec![0; m]);
    Ok(st.best_seq)
}

/// Or-opt: relocate segments of one to three nodes (either orientation)
/// while that shortens the cycle. Node `tour[0]` stays first.
fn or_opt(d: &Dist, tour: &mut Vec<usize>) -> bool {
    let mut any = false;
    'restart: loop {
        let n = tour.len();
        for seg in 1..=3usize {
            if n < seg + 3 {
                continue;
            }
            for i in 1..=n - seg {
                let (prev, first, last) = (tour[i - 1], tour[i], tour[i + seg - 1]);
                let next = tour[(i + seg) % n];
                let removal = d.get(prev, first) + d.get(last, next) - d.get(prev, next);
                let mut rest: Vec<usize> = tour[..i].to_vec();
                rest.extend_from_slice(&tour[i + seg..]);
                let m = rest.len();
                for p in 0..m {
                    let (a, b) = (rest[p], rest[(p + 1) % m]);
                    if a == prev && b == next {
                        continue;
                    }
                    let forward = d.get(a, first) + d.get(last, b) - d.get(a, b);
                    let backward = d.get(a, last) + d.get(first, b) - d.get(a, b);
                    let (cost, reversed) = if backward < forward { (backward, true) } else { (forward, false) };
                    if cost - removal < -IMPROVEMENT_EPS {
                        let mut segment = tour[i..i + seg].to_vec();
                        if reversed {
                            segment.reverse();
                        }
                        rest.splice(p + 1..p + 1, segment);
                        *tour = rest;
                        any = true;
                        continue 'restart;
                    }
                }
            }
        }
        return any;
    }
}

fn local_search(d: &Dist, tour: &mut Vec<usize>) {
    loop {
        two_opt_with(d, tour);
        if !or_opt(d, tour) {
            return;
        }
    }
}

/// Best of 2-opt + Or-opt local optima from nearest-neighbor, farthest
/// insertion and `restarts` random starts. Returns a closed tour.
pub fn best_known_tsp(r: &RoutingInstance, restarts: usize, seed: u64) -> Vec<usize> {
    let d = Dist::new(r);
    let n = r.len();
    let mut starts = vec![nn_order(&d, 0, (1..n).collect()), {
        let mut fi = super::farthest_insertion(r);
        fi.pop();
        fi
    }];
    let mut rng = stream_rng(seed, 0);
    for _ in 0..restarts {
        let mut rest: Vec<usize> = (1..n).collect();
        rest.shuffle(&mut rng);
        let mut t = vec![0];
        t.extend(rest);
        starts.push(t);
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for mut t in starts {
        local_search(&d, &mut t);
        t.push(0);
        let len = r.path_length(&t);
        if best.as_ref().map_or(true, |(b, _)| len < *b - IMPROVEMENT_EPS) {
            best = Some((len, t));
        }
    }
    best.expect("at least two starts").1
}

/// Reference solution used for optimality gaps: the exhaustive oracle when
/// the instance fits its budget, an exact solver where one exists, and
/// otherwise the best of strong heuristics.
pub fn best_reference(inst: &Instance, seed: u64) -> Result<(Solution, ObjectiveValue, SolutionSource), HeuristicError> {
    if let Ok((sol, value)) = brute_force(inst, &Budget::default()) {
        return Ok((sol, value, SolutionSource::Oracle));
    }
    let kind = inst.kind;
    let (sol, source) = match kind {
        ProblemKind::Mis | ProblemKind::Mvc if inst.size() <= GRAPH_EXACT_NODES => {
            let g = inst.graph().expect("graph");
            let mis = exact_mis(g)?;
            let set = if kind == ProblemKind::Mis { mis } else { (0..g.n).filter(|v| !mis.contains(v)).collect() };
            (Solution::VertexSet(set), SolutionSource::Oracle)
        }
        ProblemKind::Pfsp if inst.size() <= PFSP_EXACT_JOBS => {
            (Solution::JobOrder(exact_pfsp(inst.scheduling().expect("scheduling"))?), SolutionSource::Oracle)
        }
        _ => {
            let candidates = heuristic_pool(inst, seed)?;
            let best = candidates
                .into_iter()
                .filter(|(s, _)| check(inst, s).feasible)
                .map(|(s, name)| {
                    let v = objective(inst, &s).expect("feasible solutions have objectives").value;
                    (s, name, v)
                })
                .reduce(|a, b| if kind.sense().better(b.2, a.2) { b } else { a })
                .ok_or_else(|| HeuristicError::NoFeasibleSolution("no heuristic produced a feasible solution".into()))?;
            (best.0, SolutionSource::Heuristic(format!("best-of:{}", best.1)))
        }
    };
    let value = objective(inst, &sol).expect("reference solutions are structurally valid");
    Ok((sol, value, source))
}

fn heuristic_pool(inst: &Instance, seed: u64) -> Result<Vec<(Solution, &'static str)>, HeuristicError> {
    let kind = inst.kind;
    let aco = || aco_solve(inst, &AcoConfig::default_for(kind, seed));
    Ok(match (kind, &inst.payload) {
        (ProblemKind::Tsp, _) => {
            vec![(Solution::Route(best_known_tsp(inst.routing().expect("routing"), TSP_RESTARTS, seed)), "local-search")]
        }
        (ProblemKind::Op, _) => vec![
            (Solution::Route(tsili(inst.routing().expect("routing"), super::DEFAULT_TSILI_SAMPLES, seed)), "tsili"),
            (aco()?, "aco"),
        ],
        (ProblemKind::Cvrp, _) => {
            let r = inst.routing().expect("routing");
            vec![(Solution::RouteSet(parallel_savings(r)?), "savings"), (Solution::RouteSet(sweep(r)?), "sweep"), (aco()?, "aco")]
        }
        (ProblemKind::Mis, _) => vec![(Solution::VertexSet(super::greedy_min_degree(inst.graph().expect("graph"))), "min-degree")],
        (ProblemKind::Mvc, _) => vec![(Solution::VertexSet(super::greedy_max_degree(inst.graph().expect("graph"))), "max-degree")],
        (ProblemKind::Pfsp, _) => vec![(Solution::JobOrder(neh(inst.scheduling().expect("scheduling"))), "neh")],
        (ProblemKind::Jssp, _) => {
            let s = inst.scheduling().expect("scheduling");
            vec![
                (Solution::MachineSchedules(dispatch(s, DispatchRule::Spt)), "spt"),
                (Solution::MachineSchedules(dispatch(s, DispatchRule::Fifo)), "fifo"),
            ]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_instance, GenConfig};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_mis_matches_enumeration(seed in any::<u64>()) {
            let inst = gen_instance(ProblemKind::Mis, &GenConfig::default_for(ProblemKind::Mis, seed).with_size(2, 22)).unwrap();
            let g = inst.graph().unwrap();
            let bb = exact_mis(g).unwrap();
            prop_assert!(check(&inst, &Solution::VertexSet(bb.clone())).feasible);
            prop_assert_eq!(bb.len(), super::super::brute::max_independent_set(g).len());
        }

        #[test]
        fn exact_pfsp_matches_enumeration(seed in any::<u64>()) {
            let inst = gen_instance(ProblemKind::Pfsp, &GenConfig::default_for(ProblemKind::Pfsp, seed).with_size(2, 7)).unwrap();
            let s = inst.scheduling().unwrap();
            let (_, opt) = brute_force(&inst, &Budget::default()).unwrap();
            prop_assert_eq!(pfsp_makespan(s, &exact_pfsp(s).unwrap()) as f64, opt.value);
        }

        #[test]
        fn best_known_tsp_reaches_small_optima(seed in any::<u64>()) {
            let inst = gen_instance(ProblemKind::Tsp, &GenConfig::default_for(ProblemKind::Tsp, seed).with_size(5, 9)).unwrap();
            let (_, opt) = brute_force(&inst, &Budget::default()).unwrap();
            let tour = best_known_tsp(inst.routing().unwrap(), 8, seed);
            let v = objective(&inst, &Solution::Route(tour)).unwrap().value;
            prop_assert!(v >= opt.value - 1e-9);
            prop_assert!(v <= opt.value * 1.02 + 1e-9);
        }
    }

    #[test]
    fn references_are_feasible_for_every_kind() {
        for kind in ProblemKind::ALL {
            let inst = gen_instance(kind, &GenConfig::default_for(kind, 5).with_size(14, 20)).unwrap();
            let (sol, value, _) = best_reference(&inst, 5).unwrap();
            assert!(check(&inst, &sol).feasible, "{kind}");
            assert_eq!(objective(&inst, &sol).unwrap(), value);
        }
    }
}
