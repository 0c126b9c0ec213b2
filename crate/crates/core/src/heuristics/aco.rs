//! Ant colony optimization for the routing kinds.
//!
//! Ant-system construction with `τ^α·η^β` transition weights (η = 1/d for
//! TSP and CVRP, prize/d for OP), global evaporation, and an elitist update
//! in which only the best-so-far solution deposits. OP and CVRP ants only
//! ever choose moves that keep the partial solution feasible.
//!
//! Ants of one iteration run in parallel; each draws from its own random
//! stream derived from `(seed, iteration, ant)` and results are reduced in
//! ant order, so the outcome does not depend on thread scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::op::op_greedy;
use super::tsp::nearest_neighbor;
use super::{stream_rng, Dist, HeuristicError};
use crate::problems::{Instance, ProblemKind, RoutingInstance, Solution};

const MIN_DIST: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcoConfig {
    pub ants: usize,
    pub iterations: usize,
    pub alpha: f64,
    pub beta: f64,
    pub evaporation: f64,
    pub seed: u64,
}

impl AcoConfig {
    /// 100 ants × 500 iterations for TSP, 50 × 100 for OP and CVRP.
    pub fn default_for(kind: ProblemKind, seed: u64) -> Self {
        let (ants, iterations) = if kind == ProblemKind::Tsp { (100, 500) } else { (50, 100) };
        Self { ants, iterations, alpha: 1.0, beta: 2.0, evaporation: 0.1, seed }
    }

    pub fn validate(&self) -> Result<(), HeuristicError> {
        if self.ants == 0 || self.iterations == 0 {
            return Err(HeuristicError::InvalidConfig("ACO needs at least one ant and one iteration".into()));
        }
        if !(self.evaporation > 0.0 && self.evaporation < 1.0) {
            return Err(HeuristicError::InvalidConfig(format!("evaporation {} outside (0, 1)", self.evaporation)));
        }
        if !(self.alpha.is_finite() && self.beta.is_finite() && self.alpha >= 0.0 && self.beta >= 0.0) {
            return Err(HeuristicError::InvalidConfig("alpha and beta must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// A constructed solution and its quality (larger is better).
struct Candidate {
    solution: Solution,
    quality: f64,
    edges: Vec<(usize, usize)>,
}

fn edges_of(path: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    path.windows(2).map(|w| (w[0], w[1]))
}

/// Roulette-wheel choice among `options` weighted by `weight[cur][j]`;
/// falls back to the first option if every weight vanishes.
fn choose(rng: &mut impl Rng, weights: &[f64], n: usize, cur: usize, options: &[usize]) -> usize {
    let row = &weights[cur * n..(cur + 1) * n];
    let total: f64 = options.iter().map(|&j| row[j]).sum();
    if !(total.is_finite() && total > 0.0) {
        return options[0];
    }
    let mut x = rng.gen::<f64>() * total;
    for &j in options {
        if x < row[j] {
            return j;
        }
        x -= row[j];
    }
    options[options.len() - 1]
}

struct Colony<'a> {
    kind: ProblemKind,
    r: &'a RoutingInstance,
    d: Dist,
    heuristic: Vec<f64>,
}

impl Colony<'_> {
    fn construct(&self, weights: &[f64], rng: &mut impl Rng) -> Candidate {
        let n = self.d.len();
        let mut visited = vec![false; n];
        visited[0] = true;
        match self.kind {
            ProblemKind::Tsp => {
                let mut tour = vec![0];
                let mut cur = 0;
                let mut options: Vec<usize> = (1..n).collect();
                while !options.is_empty() {
                    let j = choose(rng, weights, n, cur, &options);
                    options.retain(|&v| v != j);
                    tour.push(j);
                    cur = j;
                }
                tour.push(0);
                let len = self.r.path_length(&tour);
                let edges = edges_of(&tour).collect();
                Candidate { solution: Solution::Route(tour), quality: -len, edges }
            }
            ProblemKind::Op => {
                let b = self.r.distance_limit.unwrap_or(f64::INFINITY);
                let mut path = vec![0];
                let (mut cur, mut len, mut prize) = (0, 0.0, 0u64);
                loop {
                    let options: Vec<usize> = (1..n)
                        .filter(|&j| !visited[j] && self.r.prize(j) > 0 && len + self.d.get(cur, j) <= b)
                        .collect();
                    if options.is_empty() {
                        break;
                    }
                    let j = choose(rng, weights, n, cur, &options);
                    len += self.d.get(cur, j);
                    prize += self.r.prize(j) as u64;
                    visited[j] = true;
                    path.push(j);
                    cur = j;
                }
                let edges = edges_of(&path).collect();
                Candidate { solution: Solution::Route(path), quality: prize as f64, edges }
            }
            _ => {
                let q = self.r.capacity.unwrap_or(u32::MAX) as u64;
                let mut routes: Vec<Vec<usize>> = Vec::new();
                let mut route = vec![0];
                let (mut cur, mut load, mut left) = (0, 0u64, n - 1);
                while left > 0 {
                    let options: Vec<usize> =
                        (1..n).filter(|&j| !visited[j] && load + self.r.demand(j) as u64 <= q).collect();
                    if options.is_empty() {
                        route.push(0);
                        routes.push(std::mem::replace(&mut route, vec![0]));
                        cur = 0;
                        load = 0;
                        continue;
                    }
                    let j = choose(rng, weights, n, cur, &options);
                    visited[j] = true;
                    load += self.r.demand(j) as u64;
                    left -= 1;
                    route.push(j);
                    cur = j;
                }
                if route.len() > 1 {
                    route.push(0);
                    routes.push(route);
                }
                let len: f64 = routes.iter().map(|rt| self.r.path_length(rt)).sum();
                let edges = routes.iter().flat_map(|rt| edges_of(rt)).collect();
                Candidate { solution: Solution::RouteSet(routes), quality: -len, edges }
            }
        }
    }

    /// Quality scale used to normalize deposits to the unit scale of the
    /// initial pheromone.
    fn reference_scale(&self) -> f64 {
        let scale = match self.kind {
            ProblemKind::Tsp | ProblemKind::Cvrp => self.r.path_length(&nearest_neighbor(self.r)),
            _ => op_greedy(self.r).iter().map(|&v| self.r.prize(v) as f64).sum(),
        };
        if scale > 0.0 {
            scale
        } else {
            1.0
        }
    }
}

/// Runs the colony and returns the best solution found.
pub fn aco_solve(inst: &Instance, cfg: &AcoConfig) -> Result<Solution, HeuristicError> {
    cfg.validate()?;
    let kind = inst.kind;
    let r = inst
        .routing()
        .ok_or_else(|| HeuristicError::MethodMismatch { method: "aco".into(), kind })?;
    if kind == ProblemKind::Cvrp {
        let q = r.capacity.unwrap_or(u32::MAX);
        if let Some(c) = (1..r.len()).find(|&c| r.demand(c) > q) {
            return Err(HeuristicError::NoFeasibleSolution(format!("customer {c} exceeds vehicle capacity")));
        }
    }
    let n = r.len();
    let d = Dist::new(r);
    let mut heuristic = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let dist = d.get(i, j).max(MIN_DIST);
            heuristic[i * n + j] = if kind == ProblemKind::Op { r.prize(j) as f64 / dist } else { 1.0 / dist };
        }
    }
    let colony = Colony { kind, r, d, heuristic };
    let scale = colony.reference_scale();

    let mut pheromone = vec![1.0f64; n * n];
    let mut weights = vec![0.0; n * n];
    let mut best: Option<Candidate> = None;
    for iter in 0..cfg.iterations {
        for (w, (&tau, &eta)) in weights.iter_mut().zip(pheromone.iter().zip(&colony.heuristic)) {
            *w = tau.powf(cfg.alpha) * eta.powf(cfg.beta);
        }
        let candidates: Vec<Candidate> = (0..cfg.ants)
            .into_par_iter()
            .map(|ant| {
                let mut rng = stream_rng(cfg.seed, (iter as u64) << 32 | ant as u64);
                colony.construct(&weights, &mut rng)
            })
            .collect();
        for c in candidates {
            if best.as_ref().map_or(true, |b| c.quality > b.quality) {
                best = Some(c);
            }
        }
        let elite = best.as_ref().expect("at least one ant");
        let deposit = match kind {
            ProblemKind::Op => elite.quality / scale,
            _ => scale / (-elite.quality).max(MIN_DIST),
        };
        pheromone.iter_mut().for_each(|t| *t *= 1.0 - cfg.evaporation);
        for &(a, b) in &elite.edges {
            pheromone[a * n + b] += deposit;
            pheromone[b * n + a] += deposit;
        }
    }
    Ok(best.expect("iterations ≥ 1").solution)
}
