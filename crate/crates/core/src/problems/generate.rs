//! Seeded instance generators.
//!
//! Every generator draws from a `ChaCha8Rng` seeded with `GenConfig::seed`,
//! so a given `(kind, cfg)` always yields the same instance.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use super::{
    GraphInstance, Instance, Payload, Point, ProblemError, ProblemKind, RoutingInstance,
    SchedulingInstance,
};

const COORD_MIN: f64 = 1.0;
const COORD_MAX: f64 = 1000.0;
const CLUSTER_CENTROIDS: usize = 7;
const CLUSTER_SIGMA: f64 = 0.1;

/// Spatial distribution of routing nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Distribution {
    Uniform,
    /// Gaussian mixture with `clusters` centers and scale `scale`.
    Gm { clusters: u32, scale: u32 },
    /// Seven centroids with normal offsets (sigma 0.1 of the span).
    Clustered,
    /// First half uniform, second half clustered.
    Mixed,
}

impl Distribution {
    pub fn label(&self) -> String {
        match self {
            Distribution::Uniform => "uniform".into(),
            Distribution::Gm { clusters, scale } => format!("gm(c={clusters},l={scale})"),
            Distribution::Clustered => "clustered".into(),
            Distribution::Mixed => "mixed".into(),
        }
    }
}

/// Random graph family for MIS/MVC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum GraphFamily {
    /// Erdos-Renyi, edge probability drawn uniformly from `[p_min, p_max]`.
    Er { p_min: f64, p_max: f64 },
    /// Barabasi-Albert, attachment count drawn uniformly from `[m_min, m_max]`.
    Ba { m_min: usize, m_max: usize },
}

impl GraphFamily {
    pub const DEFAULT_ER: GraphFamily = GraphFamily::Er { p_min: 0.1, p_max: 0.4 };
    pub const DEFAULT_BA: GraphFamily = GraphFamily::Ba { m_min: 1, m_max: 4 };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Inclusive node-count range, or job-count range for scheduling.
    pub size_range: (usize, usize),
    /// Machine-count range for scheduling; falls back to `size_range`.
    #[serde(default)]
    pub machine_range: Option<(usize, usize)>,
    pub distribution: Distribution,
    pub seed: u64,
    /// `None` picks ER or BA with equal probability per instance.
    #[serde(default)]
    pub graph_family: Option<GraphFamily>,
    /// CVRP vehicle capacity; `None` applies the default capacity rule.
    #[serde(default)]
    pub capacity: Option<u32>,
}

impl GenConfig {
    /// Default sizes: 10..=100 nodes, or 5..=20 jobs and machines.
    pub fn default_for(kind: ProblemKind, seed: u64) -> Self {
        let size_range = if kind.is_scheduling() { (5, 20) } else { (10, 100) };
        Self {
            size_range,
            machine_range: None,
            distribution: Distribution::Uniform,
            seed,
            graph_family: None,
            capacity: None,
        }
    }

    pub fn with_size(mut self, lo: usize, hi: usize) -> Self {
        self.size_range = (lo, hi);
        self
    }

    pub fn with_distribution(mut self, d: Distribution) -> Self {
        self.distribution = d;
        self
    }

    pub fn with_graph_family(mut self, f: GraphFamily) -> Self {
        self.graph_family = Some(f);
        self
    }

    pub fn with_machines(mut self, lo: usize, hi: usize) -> Self {
        self.machine_range = Some((lo, hi));
        self
    }

    fn validate(&self, kind: ProblemKind) -> Result<(), ProblemError> {
        let invalid = |m: String| Err(ProblemError::InvalidConfig(m));
        let (lo, hi) = self.size_range;
        if lo > hi {
            return invalid(format!("empty size range [{lo}, {hi}]"));
        }
        if kind.is_scheduling() {
            let (mlo, mhi) = self.machine_range.unwrap_or(self.size_range);
            if lo == 0 || mlo == 0 || mlo > mhi {
                return invalid("scheduling instances need non-empty job and machine ranges starting at 1".into());
            }
        } else {
            if lo < 2 || hi > 1000 {
                return invalid(format!("node range [{lo}, {hi}] outside [2, 1000]"));
            }
        }
        if !kind.is_routing() && self.distribution != Distribution::Uniform {
            return invalid(format!(
                "distribution {} is only defined for routing problems",
                self.distribution.label()
            ));
        }
        if let Distribution::Gm { clusters, scale } = self.distribution {
            if clusters == 0 || scale == 0 {
                return invalid("gaussian mixture needs clusters >= 1 and scale >= 1".into());
            }
        }
        match self.graph_family {
            Some(GraphFamily::Er { p_min, p_max }) if !(0.0 <= p_min && p_min <= p_max && p_max <= 1.0) => {
                invalid(format!("ER probability range [{p_min}, {p_max}] invalid"))
            }
            Some(GraphFamily::Ba { m_min, m_max }) if m_min == 0 || m_min > m_max => {
                invalid(format!("BA attachment range [{m_min}, {m_max}] invalid"))
            }
            _ => Ok(()),
        }
    }
}

/// Generates one instance. Deterministic for a given `(kind, cfg)`.
pub fn gen_instance(kind: ProblemKind, cfg: &GenConfig) -> Result<Instance, ProblemError> {
    cfg.validate(kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut meta = BTreeMap::new();
    meta.insert("generator".to_string(), "cobench".to_string());
    meta.insert("distribution".to_string(), cfg.distribution.label());

    let payload = match kind {
        ProblemKind::Tsp | ProblemKind::Op | ProblemKind::Cvrp => {
            let n = rng.gen_range(cfg.size_range.0..=cfg.size_range.1);
            let coords = sample_points(&mut rng, n, cfg.distribution);
            let mut inst = RoutingInstance::tsp(coords);
            match kind {
                ProblemKind::Op => {
                    let mut prizes: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=10)).collect();
                    prizes[0] = 0;
                    inst.prizes = Some(prizes);
                    let limit = op_distance_limit(&inst, &mut rng)?;
                    meta.insert("distance_limit_ratio".into(), format!("{:.6}", limit / nearest_neighbor_tour_length(&inst)));
                    inst.distance_limit = Some(limit);
                }
                ProblemKind::Cvrp => {
                    let mut demands: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=10)).collect();
                    demands[0] = 0;
                    let capacity = cfg.capacity.unwrap_or_else(|| default_capacity(&demands));
                    meta.insert(
                        "capacity_rule".into(),
                        if cfg.capacity.is_some() { "explicit" } else { "max(30, round(mean_demand * customers / 4))" }.into(),
                    );
                    inst.demands = Some(demands);
                    inst.capacity = Some(capacity);
                }
                _ => {}
            }
            Payload::Routing(inst)
        }
        ProblemKind::Mis | ProblemKind::Mvc => {
            let n = rng.gen_range(cfg.size_range.0..=cfg.size_range.1);
            let family = cfg.graph_family.unwrap_or_else(|| {
                if rng.gen_bool(0.5) {
                    GraphFamily::DEFAULT_ER
                } else {
                    GraphFamily::DEFAULT_BA
                }
            });
            let graph = match family {
                GraphFamily::Er { p_min, p_max } => {
                    let p = if p_min == p_max { p_min } else { rng.gen_range(p_min..=p_max) };
                    meta.insert("graph".into(), "er".into());
                    meta.insert("edge_probability".into(), format!("{p:.6}"));
                    erdos_renyi(&mut rng, n, p)
                }
                GraphFamily::Ba { m_min, m_max } => {
                    let m = rng.gen_range(m_min..=m_max);
                    meta.insert("graph".into(), "ba".into());
                    meta.insert("attachment".into(), m.to_string());
                    barabasi_albert(&mut rng, n, m)
                }
            };
            Payload::Graph(graph)
        }
        ProblemKind::Pfsp | ProblemKind::Jssp => {
            let jobs = rng.gen_range(cfg.size_range.0..=cfg.size_range.1);
            let (mlo, mhi) = cfg.machine_range.unwrap_or(cfg.size_range);
            let machines = rng.gen_range(mlo..=mhi);
            let ptimes: Vec<Vec<u32>> = (0..jobs)
                .map(|_| (0..machines).map(|_| rng.gen_range(1..=100)).collect())
                .collect();
            let machine_order = (kind == ProblemKind::Jssp).then(|| {
                (0..jobs)
                    .map(|_| {
                        let mut row: Vec<usize> = (0..machines).collect();
                        row.shuffle(&mut rng);
                        row
                    })
                    .collect()
            });
            Payload::Scheduling(SchedulingInstance {
                num_jobs: jobs,
                num_machines: machines,
                ptimes,
                machine_order,
            })
        }
    };

    let size = match &payload {
        Payload::Routing(r) => r.len().to_string(),
        Payload::Graph(g) => g.n.to_string(),
        Payload::Scheduling(s) => format!("{}x{}", s.num_jobs, s.num_machines),
    };
    let inst = Instance {
        kind,
        id: format!("{kind}-{size}-{}", cfg.seed),
        seed: Some(cfg.seed),
        meta,
        payload,
    };
    inst.validate()?;
    Ok(inst)
}

/// `max(30, round(mean customer demand * customers / 4))`.
fn default_capacity(demands: &[u32]) -> u32 {
    let customers = &demands[1..];
    if customers.is_empty() {
        return 30;
    }
    let mean = customers.iter().map(|&d| d as f64).sum::<f64>() / customers.len() as f64;
    30.max((mean * customers.len() as f64 / 4.0).round() as u32)
}

fn sample_points(rng: &mut ChaCha8Rng, n: usize, dist: Distribution) -> Vec<Point> {
    match dist {
        Distribution::Uniform => (0..n).map(|_| uniform_point(rng)).collect(),
        Distribution::Gm { clusters, scale } => {
            let centers: Vec<(f64, f64)> = (0..clusters)
                .map(|_| (rng.gen_range(COORD_MIN..=COORD_MAX), rng.gen_range(COORD_MIN..=COORD_MAX)))
                .collect();
            let normal = Normal::new(0.0, COORD_MAX / (2.0 * scale as f64)).expect("positive sigma");
            (0..n)
                .map(|_| {
                    let (cx, cy) = centers[rng.gen_range(0..centers.len())];
                    let x = cx + normal.sample(rng);
                    let y = cy + normal.sample(rng);
                    Point::new(snap(x), snap(y))
                })
                .collect()
        }
        Distribution::Clustered => clustered_points(rng, n).0,
        Distribution::Mixed => {
            let uniform = n.div_ceil(2);
            let mut pts: Vec<Point> = (0..uniform).map(|_| uniform_point(rng)).collect();
            pts.extend(clustered_points(rng, n - uniform).0);
            pts
        }
    }
}

fn uniform_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(rng.gen_range(1..=1000) as f64, rng.gen_range(1..=1000) as f64)
}

fn snap(v: f64) -> f64 {
    v.clamp(COORD_MIN, COORD_MAX).round()
}

/// Unit-square value to the integer grid `[1, 1000]`.
fn scale_unit(v: f64) -> f64 {
    snap(COORD_MIN + v.clamp(0.0, 1.0) * (COORD_MAX - COORD_MIN))
}

/// Clustered points together with their centroids (already scaled to the
/// coordinate grid, unrounded).
pub(crate) fn clustered_points(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Point>, Vec<Point>) {
    let centroids: Vec<(f64, f64)> = (0..CLUSTER_CENTROIDS)
        .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();
    let normal = Normal::new(0.0, CLUSTER_SIGMA).expect("positive sigma");
    let pts = (0..n)
        .map(|_| {
            let (cx, cy) = centroids[rng.gen_range(0..CLUSTER_CENTROIDS)];
            Point::new(scale_unit(cx + normal.sample(rng)), scale_unit(cy + normal.sample(rng)))
        })
        .collect();
    let scaled = centroids
        .into_iter()
        .map(|(x, y)| Point::new(COORD_MIN + x * (COORD_MAX - COORD_MIN), COORD_MIN + y * (COORD_MAX - COORD_MIN)))
        .collect();
    (pts, scaled)
}

fn erdos_renyi(rng: &mut ChaCha8Rng, n: usize, p: f64) -> GraphInstance {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if p > 0.0 && rng.gen::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    GraphInstance { n, edges }
}

/// Preferential attachment: a star on `m + 1` nodes, then every new node
/// links to `m` distinct existing nodes drawn proportionally to degree.
fn barabasi_albert(rng: &mut ChaCha8Rng, n: usize, m: usize) -> GraphInstance {
    let m = m.min(n.saturating_sub(1)).max(1);
    let mut edges = Vec::new();
    let mut repeated: Vec<usize> = Vec::new();
    for v in 1..=m.min(n - 1) {
        edges.push((0, v));
        repeated.extend([0, v]);
    }
    for v in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = repeated[rng.gen_range(0..repeated.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t.min(v), t.max(v)));
            repeated.extend([t, v]);
        }
    }
    edges.sort_unstable();
    GraphInstance { n, edges }
}

/// Closed nearest-neighbor tour length from the depot, ties to the lower id.
pub fn nearest_neighbor_tour_length(inst: &RoutingInstance) -> f64 {
    let n = inst.len();
    let mut visited = vec![false; n];
    let mut cur = inst.depot;
    visited[cur] = true;
    let mut total = 0.0;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !visited[j])
            .min_by(|&a, &b| inst.dist(cur, a).total_cmp(&inst.dist(cur, b)).then(a.cmp(&b)))
            .expect("unvisited node remains");
        total += inst.dist(cur, next);
        visited[next] = true;
        cur = next;
    }
    total + inst.dist(cur, inst.depot)
}

/// OP distance limit `u * L_T` with `u ~ U[0.5, 0.7]` and `L_T` the
/// nearest-neighbor tour length.
pub fn op_distance_limit<R: Rng + ?Sized>(inst: &RoutingInstance, rng: &mut R) -> Result<f64, ProblemError> {
    let u = rng.gen_range(0.5..=0.7);
    op_distance_limit_with(inst, u)
}

/// Same as [`op_distance_limit`] with the ratio `u` supplied.
pub fn op_distance_limit_with(inst: &RoutingInstance, u: f64) -> Result<f64, ProblemError> {
    if inst.len() < 2 {
        return Err(ProblemError::InvalidInstance("distance limit needs at least 2 nodes".into()));
    }
    Ok(u * nearest_neighbor_tour_length(inst))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> RoutingInstance {
        RoutingInstance::tsp(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(3.0, 0.0)])
    }

    #[test]
    fn op_limit_on_collinear_nodes() {
        let inst = line();
        assert_eq!(nearest_neighbor_tour_length(&inst), 6.0);
        assert_eq!(op_distance_limit_with(&inst, 0.5).unwrap(), 3.0);
        assert!((op_distance_limit_with(&inst, 0.7).unwrap() - 4.2).abs() < 1e-12);
    }

    #[test]
    fn op_limit_needs_two_nodes() {
        let inst = RoutingInstance::tsp(vec![Point::new(0.0, 0.0)]);
        assert!(op_distance_limit_with(&inst, 0.5).is_err());
    }

    #[test]
    fn op_limit_range_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..200 {
            let inst = gen_instance(ProblemKind::Tsp, &GenConfig::default_for(ProblemKind::Tsp, seed)).unwrap();
            let r = inst.routing().unwrap();
            let lt = nearest_neighbor_tour_length(r);
            let b = op_distance_limit(r, &mut rng).unwrap();
            assert!(b >= 0.5 * lt - 1e-9 && b <= 0.7 * lt + 1e-9);
        }
    }

    #[test]
    fn seeded_determinism() {
        let cfg = GenConfig::default_for(ProblemKind::Tsp, 42).with_size(10, 10);
        let a = serde_json::to_string(&gen_instance(ProblemKind::Tsp, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&gen_instance(ProblemKind::Tsp, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_probability_er_has_no_edges() {
        let cfg = GenConfig::default_for(ProblemKind::Mis, 1)
            .with_size(10, 10)
            .with_graph_family(GraphFamily::Er { p_min: 0.0, p_max: 0.0 });
        let inst = gen_instance(ProblemKind::Mis, &cfg).unwrap();
        assert_eq!(inst.graph().unwrap().n, 10);
        assert!(inst.graph().unwrap().edges.is_empty());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = GenConfig::default_for(ProblemKind::Tsp, 0).with_size(20, 10);
        assert!(matches!(gen_instance(ProblemKind::Tsp, &cfg), Err(ProblemError::InvalidConfig(_))));
        let cfg = GenConfig::default_for(ProblemKind::Pfsp, 0).with_distribution(Distribution::Clustered);
        assert!(gen_instance(ProblemKind::Pfsp, &cfg).is_err());
        let cfg = GenConfig::default_for(ProblemKind::Mis, 0).with_graph_family(GraphFamily::Ba { m_min: 0, m_max: 2 });
        assert!(gen_instance(ProblemKind::Mis, &cfg).is_err());
    }

    #[test]
    fn clustered_nodes_stay_near_centroids() {
        // sigma is 0.1 of the unit square, i.e. 99.9 grid units after scaling.
        let sigma = CLUSTER_SIGMA * (COORD_MAX - COORD_MIN);
        let (mut near, mut total) = (0usize, 0usize);
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (pts, centroids) = clustered_points(&mut rng, 50);
            assert_eq!(centroids.len(), 7);
            for p in &pts {
                total += 1;
                if centroids.iter().any(|c| c.dist(p) <= 3.5 * sigma) {
                    near += 1;
                }
            }
        }
        assert!(near as f64 >= 0.99 * total as f64, "{near}/{total}");
    }

    #[test]
    fn mixed_distribution_shape() {
        let cfg = GenConfig::default_for(ProblemKind::Tsp, 9)
            .with_size(31, 31)
            .with_distribution(Distribution::Mixed);
        let inst = gen_instance(ProblemKind::Tsp, &cfg).unwrap();
        assert_eq!(inst.routing().unwrap().len(), 31);
    }

    #[test]
    fn capacity_rule() {
        // ten customers of demand 5 → round(5 * 10 / 4) = 13 → floor at 30
        let mut d = vec![5; 11];
        d[0] = 0;
        assert_eq!(default_capacity(&d), 30);
        let mut d = vec![6; 46];
        d[0] = 0;
        assert_eq!(default_capacity(&d), 68);
    }

    #[test]
    fn ba_attachment_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = barabasi_albert(&mut rng, 30, 3);
        // star of 4 nodes (3 edges) then 26 nodes x 3 edges
        assert_eq!(g.edges.len(), 3 + 26 * 3);
        assert!(GraphInstance::new(g.n, g.edges.iter().copied()).is_ok());
    }
}
