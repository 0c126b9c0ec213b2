//! Orienteering constructions. Paths start at the depot and do not
//! return; every step keeps the path length within the limit.

use rand::Rng;

use super::{argmax_by, stream_rng, Dist};
use crate::problems::RoutingInstance;

/// Rollouts per Tsili run.
pub const DEFAULT_TSILI_SAMPLES: usize = 1280;
/// Tsili draws among this many best-ratio candidates.
const TSILI_CANDIDATES: usize = 4;
/// Exponent applied to the prize/distance ratio in Tsili's draw.
const TSILI_EXPONENT: i32 = 4;
/// Distances below this are treated as this, so ratios stay finite.
const MIN_DIST: f64 = 1e-9;

fn limit(r: &RoutingInstance) -> f64 {
    r.distance_limit.unwrap_or(f64::INFINITY)
}

fn ratio(prize: u32, dist: f64) -> f64 {
    prize as f64 / dist.max(MIN_DIST)
}

/// Unvisited nodes with a positive prize that can be appended after `cur`.
fn reachable<'a>(
    r: &'a RoutingInstance,
    d: &'a Dist,
    visited: &'a [bool],
    cur: usize,
    len: f64,
) -> impl Iterator<Item = usize> + 'a {
    let b = limit(r);
    (1..r.len()).filter(move |&j| !visited[j] && r.prize(j) > 0 && len + d.get(cur, j) <= b)
}

/// Appends the reachable node with the best prize/distance ratio until
/// nothing more fits.
pub fn op_greedy(r: &RoutingInstance) -> Vec<usize> {
    let d = Dist::new(r);
    let mut visited = vec![false; r.len()];
    visited[0] = true;
    let (mut path, mut len, mut cur) = (vec![0], 0.0, 0);
    while let Some(j) = argmax_by(reachable(r, &d, &visited, cur, len), |&j| ratio(r.prize(j), d.get(cur, j))) {
        len += d.get(cur, j);
        visited[j] = true;
        path.push(j);
        cur = j;
    }
    path
}

/// Inserts, anywhere in the path, the node with the best prize per added
/// distance until no insertion fits. Ties go to the lower node, then the
/// earlier position.
pub fn op_greedy_insertion(r: &RoutingInstance) -> Vec<usize> {
    let d = Dist::new(r);
    let b = limit(r);
    let mut visited = vec![false; r.len()];
    visited[0] = true;
    let mut path = vec![0];
    let mut len = 0.0;
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for j in (1..r.len()).filter(|&j| !visited[j] && r.prize(j) > 0) {
            for pos in 1..=path.len() {
                let added = if pos == path.len() {
                    d.get(path[pos - 1], j)
                } else {
                    d.get(path[pos - 1], j) + d.get(j, path[pos]) - d.get(path[pos - 1], path[pos])
                };
                if len + added > b {
                    continue;
                }
                let score = ratio(r.prize(j), added);
                if best.map_or(true, |(s, _, _)| score > s) {
                    best = Some((score, j, pos));
                }
            }
        }
        let Some((_, j, pos)) = best else { break };
        path.insert(pos, j);
        visited[j] = true;
        let exact = r.path_length(&path);
        if exact > b {
            // Rounding pushed the recomputed length over the limit.
            path.remove(pos);
            break;
        }
        len = exact;
    }
    path
}

/// Randomized construction: each step draws among the four reachable
/// nodes with the best prize/distance ratio, with probability
/// proportional to ratio⁴. Returns the best of `samples` rollouts (first
/// found on ties).
pub fn tsili(r: &RoutingInstance, samples: usize, seed: u64) -> Vec<usize> {
    let d = Dist::new(r);
    let mut rng = stream_rng(seed, 0);
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut visited = vec![false; r.len()];
    let mut top: Vec<(f64, usize)> = Vec::with_capacity(TSILI_CANDIDATES + 1);
    for _ in 0..samples {
        visited.iter_mut().for_each(|v| *v = false);
        visited[0] = true;
        let (mut path, mut len, mut cur, mut prize) = (vec![0], 0.0, 0, 0u64);
        loop {
            top.clear();
            for j in reachable(r, &d, &visited, cur, len) {
                let q = ratio(r.prize(j), d.get(cur, j));
                // Keep the best four, ordered by ratio then lower id.
                let at = top.iter().position(|&(tq, _)| q > tq).unwrap_or(top.len());
                if at < TSILI_CANDIDATES {
                    top.insert(at, (q, j));
                    top.truncate(TSILI_CANDIDATES);
                }
            }
            if top.is_empty() {
                break;
            }
            let weights: Vec<f64> = top.iter().map(|&(q, _)| q.powi(TSILI_EXPONENT)).collect();
            let total: f64 = weights.iter().sum();
            let j = if total.is_finite() && total > 0.0 {
                let mut x = rng.gen::<f64>() * total;
                let mut pick = top[top.len() - 1].1;
                for (w, &(_, id)) in weights.iter().zip(&top) {
                    if x < *w {
                        pick = id;
                        break;
                    }
                    x -= w;
                }
                pick
            } else {
                top[0].1
            };
            len += d.get(cur, j);
            visited[j] = true;
            prize += r.prize(j) as u64;
            path.push(j);
            cur = j;
        }
        if best.as_ref().map_or(true, |(p, _)| prize > *p) {
            best = Some((prize, path));
        }
    }
    best.map(|(_, p)| p).unwrap_or_else(|| vec![0])
}
