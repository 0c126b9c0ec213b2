//! Independent-set and vertex-cover heuristics. Ties always go to the
//! lower vertex id.

use std::collections::BTreeSet;

use crate::problems::GraphInstance;

/// Repeatedly takes a vertex of minimum residual degree and deletes it
/// together with its neighbors.
pub fn greedy_min_degree(g: &GraphInstance) -> BTreeSet<usize> {
    let adj = g.adjacency();
    let mut deg = g.degrees();
    let mut alive = vec![true; g.n];
    let mut set = BTreeSet::new();
    while let Some(v) = (0..g.n).filter(|&v| alive[v]).min_by_key(|&v| (deg[v], v)) {
        set.insert(v);
        let mut removed = vec![v];
        removed.extend(adj[v].iter().copied().filter(|&u| alive[u]));
        for &u in &removed {
            alive[u] = false;
        }
        for &u in &removed {
            for &w in &adj[u] {
                if alive[w] {
                    deg[w] -= 1;
                }
            }
        }
    }
    set
}

/// Scans vertices by ascending static degree and adds each one that has
/// no neighbor in the set yet.
pub fn degree_add(g: &GraphInstance) -> BTreeSet<usize> {
    let adj = g.adjacency();
    let deg = g.degrees();
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by_key(|&v| (deg[v], v));
    let mut taken = vec![false; g.n];
    for v in order {
        if adj[v].iter().all(|&u| !taken[u]) {
            taken[v] = true;
        }
    }
    (0..g.n).filter(|&v| taken[v]).collect()
}

/// Both endpoints of a greedy maximal matching (edges in sorted order);
/// at most twice the minimum cover.
pub fn approx_matching(g: &GraphInstance) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    for &(a, b) in &g.edges {
        if !set.contains(&a) && !set.contains(&b) {
            set.insert(a);
            set.insert(b);
        }
    }
    set
}

/// Repeatedly takes a vertex of maximum residual degree until every edge
/// is covered.
pub fn greedy_max_degree(g: &GraphInstance) -> BTreeSet<usize> {
    let adj = g.adjacency();
    let mut deg = g.degrees();
    let mut set = BTreeSet::new();
    loop {
        let Some(v) = (0..g.n).filter(|&v| deg[v] > 0).max_by_key(|&v| (deg[v], std::cmp::Reverse(v))) else {
            return set;
        };
        set.insert(v);
        deg[v] = 0;
        for &u in &adj[v] {
            if !set.contains(&u) {
                deg[u] -= 1;
            }
        }
    }
}

/// Complement of [`degree_add`]: removing a maximal independent set
/// leaves a vertex cover.
pub fn degree_removal(g: &GraphInstance) -> BTreeSet<usize> {
    let independent = degree_add(g);
    (0..g.n).filter(|v| !independent.contains(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_instance, GenConfig, GraphFamily, Instance, Payload, ProblemKind, Solution};
    use crate::verify::check;
    use proptest::prelude::*;

    #[test]
    fn single_edge_matching_takes_both() {
        let g = GraphInstance::new(2, [(0, 1)]).unwrap();
        assert_eq!(approx_matching(&g).len(), 2);
        assert_eq!(greedy_max_degree(&g).len(), 1);
    }

    #[test]
    fn star_graph() {
        let g = GraphInstance::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(greedy_min_degree(&g), [1, 2, 3, 4].into_iter().collect());
        assert_eq!(degree_add(&g), [1, 2, 3, 4].into_iter().collect());
        assert_eq!(greedy_max_degree(&g), [0].into_iter().collect());
        assert_eq!(degree_removal(&g), [0].into_iter().collect());
    }

    proptest! {
        #[test]
        fn all_outputs_feasible(seed in any::<u64>(), ba in any::<bool>()) {
            let family = if ba { GraphFamily::DEFAULT_BA } else { GraphFamily::DEFAULT_ER };
            let cfg = GenConfig::default_for(ProblemKind::Mis, seed).with_size(2, 60).with_graph_family(family);
            let mis = gen_instance(ProblemKind::Mis, &cfg).unwrap();
            let g = mis.graph().unwrap().clone();
            let mvc = Instance::new(ProblemKind::Mvc, "g", Payload::Graph(g.clone())).unwrap();
            for s in [greedy_min_degree(&g), degree_add(&g)] {
                prop_assert!(check(&mis, &Solution::VertexSet(s)).feasible);
            }
            for s in [approx_matching(&g), greedy_max_degree(&g), degree_removal(&g)] {
                prop_assert!(check(&mvc, &Solution::VertexSet(s)).feasible);
            }
        }
    }
}
