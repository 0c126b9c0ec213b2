//! TSP construction heuristics and 2-opt.

use super::{argmax_by, Dist};
use crate::problems::RoutingInstance;

/// Moves must improve by more than this to be applied, so local search
/// always terminates.
pub(crate) const IMPROVEMENT_EPS: f64 = 1e-9;

/// Nearest-neighbor tour from node 0, closed (`[0, …, 0]`). Ties go to the
/// lower node id.
pub fn nearest_neighbor(r: &RoutingInstance) -> Vec<usize> {
    let d = Dist::new(r);
    let mut tour = nn_order(&d, 0, (1..r.len()).collect());
    tour.push(0);
    tour
}

/// Greedy nearest-neighbor order starting at `start` over `rest`.
pub(crate) fn nn_order(d: &Dist, start: usize, mut rest: Vec<usize>) -> Vec<usize> {
    let mut tour = Vec::with_capacity(rest.len() + 1);
    tour.push(start);
    let mut cur = start;
    while !rest.is_empty() {
        let idx = argmax_by(0..rest.len(), |&k| -d.get(cur, rest[k])).expect("nonempty");
        cur = rest.remove(idx);
        tour.push(cur);
    }
    tour
}

/// Farthest insertion followed by first-improvement 2-opt to a local
/// optimum. Returns a closed tour starting at node 0.
pub fn farthest_insertion(r: &RoutingInstance) -> Vec<usize> {
    let d = Dist::new(r);
    let n = r.len();
    let far = argmax_by(1..n, |&j| d.get(0, j)).expect("at least two nodes");
    let mut tour = vec![0, far];
    let mut in_tour = vec![false; n];
    in_tour[0] = true;
    in_tour[far] = true;
    let mut min_d: Vec<f64> = (0..n).map(|j| d.get(0, j).min(d.get(far, j))).collect();
    while tour.len() < n {
        let j = argmax_by((0..n).filter(|&j| !in_tour[j]), |&j| min_d[j]).expect("unvisited node left");
        let m = tour.len();
        let pos = argmax_by(0..m, |&p| {
            let (a, b) = (tour[p], tour[(p + 1) % m]);
            -(d.get(a, j) + d.get(j, b) - d.get(a, b))
        })
        .expect("nonempty tour");
        tour.insert(pos + 1, j);
        in_tour[j] = true;
        for k in 0..n {
            min_d[k] = min_d[k].min(d.get(j, k));
        }
    }
    two_opt_with(&d, &mut tour);
    tour.push(0);
    tour
}

/// First-improvement 2-opt on a closed tour (`[0, …, 0]` or open cycle);
/// the first node stays in place.
pub fn two_opt(r: &RoutingInstance, tour: &mut Vec<usize>) {
    let closed = tour.len() > 1 && tour.first() == tour.last();
    if closed {
        tour.pop();
    }
    two_opt_with(&Dist::new(r), tour);
    if closed {
        tour.push(tour[0]);
    }
}

/// 2-opt on an open cycle representation (no closing repeat).
pub(crate) fn two_opt_with(d: &Dist, tour: &mut [usize]) -> bool {
    let n = tour.len();
    let mut any = false;
    if n < 4 {
        return false;
    }
    loop {
        let mut improved = false;
        for i in 0..n - 2 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b, c, e) = (tour[i], tour[i + 1], tour[j], tour[(j + 1) % n]);
                let delta = d.get(a, c) + d.get(b, e) - d.get(a, b) - d.get(c, e);
                if delta < -IMPROVEMENT_EPS {
                    tour[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            return any;
        }
        any = true;
    }
}
