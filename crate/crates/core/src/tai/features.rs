//! Heuristic features rendered into instance text.
//!
//! Routing: the `k` nearest neighbors of every node. Scheduling: the `k`
//! cheapest jobs per machine (PFSP) or operations per job (JSSP). Graphs:
//! the `k` highest-degree neighbors of every node.
//!
//! All orderings break ties by the lower id, which is what makes the k-d
//! tree path and the exhaustive scan produce identical lists.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::problems::{GraphInstance, Point};

/// Above this node count neighbor lists come from the k-d tree.
pub const SPATIAL_INDEX_THRESHOLD: usize = 64;

/// `(squared distance, id)` with a total order.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    d2: f64,
    id: usize,
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2.total_cmp(&other.d2).then(self.id.cmp(&other.id))
    }
}

/// `k` nearest neighbors of every node as `(id, distance)`, ascending.
pub fn nearest_neighbors(coords: &[Point], k: usize) -> Vec<Vec<(usize, f64)>> {
    if coords.len() > SPATIAL_INDEX_THRESHOLD {
        let tree = KdTree::build(coords);
        (0..coords.len()).map(|i| tree.nearest(i, k)).collect()
    } else {
        nearest_neighbors_exhaustive(coords, k)
    }
}

pub fn nearest_neighbors_exhaustive(coords: &[Point], k: usize) -> Vec<Vec<(usize, f64)>> {
    (0..coords.len())
        .map(|i| {
            let mut keys: Vec<Key> = (0..coords.len())
                .filter(|&j| j != i)
                .map(|j| Key { d2: coords[i].dist_sq(&coords[j]), id: j })
                .collect();
            keys.sort_unstable();
            keys.truncate(k);
            keys.into_iter().map(|key| (key.id, coords[i].dist(&coords[key.id]))).collect()
        })
        .collect()
}

/// Static 2-d tree over point indices.
pub struct KdTree<'a> {
    coords: &'a [Point],
    /// Point ids laid out so that every subtree is a contiguous slice with
    /// its splitting point in the middle.
    order: Vec<usize>,
}

impl<'a> KdTree<'a> {
    pub fn build(coords: &'a [Point]) -> Self {
        let mut order: Vec<usize> = (0..coords.len()).collect();
        Self::build_rec(coords, &mut order, 0);
        Self { coords, order }
    }

    fn build_rec(coords: &[Point], ids: &mut [usize], depth: usize) {
        if ids.len() <= 1 {
            return;
        }
        let mid = ids.len() / 2;
        let axis = depth % 2;
        ids.select_nth_unstable_by(mid, |&a, &b| axis_of(&coords[a], axis).total_cmp(&axis_of(&coords[b], axis)).then(a.cmp(&b)));
        let (left, right) = ids.split_at_mut(mid);
        Self::build_rec(coords, left, depth + 1);
        Self::build_rec(coords, &mut right[1..], depth + 1);
    }

    /// `k` nearest neighbors of node `query`, excluding itself.
    pub fn nearest(&self, query: usize, k: usize) -> Vec<(usize, f64)> {
        if k == 0 {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.search(&self.order, 0, query, k, &mut heap);
        let mut keys = heap.into_sorted_vec();
        keys.truncate(k);
        let q = self.coords[query];
        keys.into_iter().map(|key| (key.id, q.dist(&self.coords[key.id]))).collect()
    }

    fn search(&self, ids: &[usize], depth: usize, query: usize, k: usize, heap: &mut BinaryHeap<Key>) {
        if ids.is_empty() {
            return;
        }
        let mid = ids.len() / 2;
        let node = ids[mid];
        let q = self.coords[query];
        if node != query {
            let key = Key { d2: q.dist_sq(&self.coords[node]), id: node };
            if heap.len() < k {
                heap.push(key);
            } else if key < *heap.peek().expect("heap is full") {
                heap.pop();
                heap.push(key);
            }
        }
        let axis = depth % 2;
        let diff = axis_of(&q, axis) - axis_of(&self.coords[node], axis);
        let (near, far) = if diff < 0.0 { (&ids[..mid], &ids[mid + 1..]) } else { (&ids[mid + 1..], &ids[..mid]) };
        self.search(near, depth + 1, query, k, heap);
        // Equal plane distance can still hide a lower-id tie, so only a
        // strictly larger gap prunes.
        if heap.len() < k || diff * diff <= heap.peek().expect("heap is full").d2 {
            self.search(far, depth + 1, query, k, heap);
        }
    }
}

fn axis_of(p: &Point, axis: usize) -> f64 {
    if axis == 0 {
        p.x
    } else {
        p.y
    }
}

/// Indices of the `k` smallest values, ascending by value then index.
pub fn lowest_k(values: &[u32], k: usize) -> Vec<(usize, u32)> {
    let mut idx: Vec<(usize, u32)> = values.iter().copied().enumerate().collect();
    idx.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    idx.truncate(k);
    idx
}

/// For every node, its `k` neighbors with the largest degree (descending,
/// ties to the lower id), paired with that degree.
pub fn top_degree_neighbors(graph: &GraphInstance, k: usize) -> Vec<Vec<(usize, usize)>> {
    let deg = graph.degrees();
    graph
        .adjacency()
        .into_iter()
        .map(|nbrs| {
            let mut ranked: Vec<(usize, usize)> = nbrs.into_iter().map(|v| (v, deg[v])).collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            ranked.truncate(k);
            ranked
        })
        .collect()
}
