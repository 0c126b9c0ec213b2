//! CVRP constructions: polar sweep and Clarke–Wright parallel savings.

use super::tsp::{nn_order, two_opt_with};
use super::{Dist, HeuristicError};
use crate::problems::RoutingInstance;

fn capacity_check(r: &RoutingInstance) -> Result<u64, HeuristicError> {
    let q = r.capacity.unwrap_or(u32::MAX);
    match (1..r.len()).find(|&c| r.demand(c) > q) {
        Some(c) => Err(HeuristicError::NoFeasibleSolution(format!(
            "customer {c} demands {} but vehicle capacity is {q}",
            r.demand(c)
        ))),
        None => Ok(q as u64),
    }
}

/// Sorts customers by polar angle around the depot (ties → lower id),
/// fills vehicles in that order, then orders each route by nearest
/// neighbor plus 2-opt.
pub fn sweep(r: &RoutingInstance) -> Result<Vec<Vec<usize>>, HeuristicError> {
    let q = capacity_check(r)?;
    let d = Dist::new(r);
    let depot = r.coords[r.depot];
    let mut customers: Vec<usize> = (1..r.len()).collect();
    let angle = |c: usize| (r.coords[c].y - depot.y).atan2(r.coords[c].x - depot.x);
    customers.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)).then(a.cmp(&b)));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut load = 0u64;
    for c in customers {
        let dem = r.demand(c) as u64;
        if groups.is_empty() || load + dem > q {
            groups.push(Vec::new());
            load = 0;
        }
        groups.last_mut().expect("just pushed").push(c);
        load += dem;
    }
    Ok(groups
        .into_iter()
        .map(|g| {
            let mut route = nn_order(&d, 0, g);
            two_opt_with(&d, &mut route);
            route.push(0);
            route
        })
        .collect())
}

/// Clarke–Wright parallel savings: start from one route per customer and
/// merge route ends in decreasing order of `d(0,i) + d(0,j) − d(i,j)`
/// (ties → lower `(i, j)`) whenever the merged load fits.
pub fn parallel_savings(r: &RoutingInstance) -> Result<Vec<Vec<usize>>, HeuristicError> {
    let q = capacity_check(r)?;
    let d = Dist::new(r);
    let n = r.len();
    let mut routes: Vec<Vec<usize>> = (0..n).map(|c| if c == 0 { Vec::new() } else { vec![c] }).collect();
    let mut route_of: Vec<usize> = (0..n).collect();
    let mut load: Vec<u64> = (0..n).map(|c| r.demand(c) as u64).collect();

    let mut savings: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n / 2);
    for i in 1..n {
        for j in i + 1..n {
            savings.push((d.get(0, i) + d.get(0, j) - d.get(i, j), i, j));
        }
    }
    savings.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    for (_, i, j) in savings {
        let (ri, rj) = (route_of[i], route_of[j]);
        if ri == rj || load[ri] + load[rj] > q {
            continue;
        }
        let is_end = |route: &[usize], v: usize| route.first() == Some(&v) || route.last() == Some(&v);
        if !is_end(&routes[ri], i) || !is_end(&routes[rj], j) {
            continue;
        }
        let mut left = std::mem::take(&mut routes[ri]);
        let mut right = std::mem::take(&mut routes[rj]);
        if left.last() != Some(&i) {
            left.reverse();
        }
        if right.first() != Some(&j) {
            right.reverse();
        }
        for &c in &right {
            route_of[c] = ri;
        }
        left.extend(right);
        routes[ri] = left;
        load[ri] += load[rj];
        load[rj] = 0;
    }
    Ok(routes
        .into_iter()
        .filter(|route| !route.is_empty())
        .map(|route| {
            let mut full = Vec::with_capacity(route.len() + 2);
            full.push(0);
            full.extend(route);
            full.push(0);
            full
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_instance, GenConfig, Instance, Payload, Point, ProblemKind, Solution};
    use crate::verify::check;

    fn line_instance(capacity: u32) -> RoutingInstance {
        let mut r = RoutingInstance::tsp(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0), Point::new(3.0, 0.0)]);
        r.demands = Some(vec![0, 4, 4, 4]);
        r.capacity = Some(capacity);
        r
    }

    #[test]
    fn savings_merges_collinear_customers() {
        let routes = parallel_savings(&line_instance(12)).unwrap();
        assert_eq!(routes.len(), 1);
        assert_eq!(routes[0].len(), 5);
        let routes = parallel_savings(&line_instance(4)).unwrap();
        assert_eq!(routes.len(), 3);
    }

    #[test]
    fn oversized_demand_is_reported() {
        let mut r = line_instance(3);
        r.capacity = Some(3);
        assert!(matches!(sweep(&r), Err(HeuristicError::NoFeasibleSolution(_))));
    }

    #[test]
    fn both_methods_feasible() {
        for seed in 0..20 {
            let inst = gen_instance(ProblemKind::Cvrp, &GenConfig::default_for(ProblemKind::Cvrp, seed).with_size(5, 60)).unwrap();
            let r = inst.routing().unwrap();
            for routes in [sweep(r).unwrap(), parallel_savings(r).unwrap()] {
                let report = check(&inst, &Solution::RouteSet(routes));
                assert!(report.feasible, "{:?}", report.failed());
            }
        }
        let inst = Instance::new(ProblemKind::Cvrp, "line", Payload::Routing(line_instance(8))).unwrap();
        assert!(check(&inst, &Solution::RouteSet(sweep(inst.routing().unwrap()).unwrap())).feasible);
    }
}
