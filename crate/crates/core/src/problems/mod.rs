//! Problem kinds, instance and solution types for the seven supported
//! combinatorial optimization problems.
//!
//! Node and job ids are 0-based everywhere. For routing problems with a
//! depot (OP, CVRP) the depot is node 0.

mod generate;
mod io;
mod taillard;
mod tsplib;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use generate::{
    gen_instance, nearest_neighbor_tour_length, op_distance_limit, op_distance_limit_with,
    Distribution, GenConfig, GraphFamily,
};
pub use io::{
    read_instance, write_instance, InstanceFile, ReferenceSolution, SolutionSource,
    INSTANCE_SCHEMA_VERSION,
};
pub use taillard::{parse_taillard, write_taillard};
pub use tsplib::parse_tsplib;

/// Errors raised while building, generating or parsing instances.
#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed input at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("dimension mismatch: header says {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown problem kind `{0}`")]
    UnknownKind(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Tsp,
    Op,
    Cvrp,
    Mis,
    Mvc,
    Pfsp,
    Jssp,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 7] = [
        ProblemKind::Tsp,
        ProblemKind::Op,
        ProblemKind::Cvrp,
        ProblemKind::Mis,
        ProblemKind::Mvc,
        ProblemKind::Pfsp,
        ProblemKind::Jssp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Tsp => "tsp",
            ProblemKind::Op => "op",
            ProblemKind::Cvrp => "cvrp",
            ProblemKind::Mis => "mis",
            ProblemKind::Mvc => "mvc",
            ProblemKind::Pfsp => "pfsp",
            ProblemKind::Jssp => "jssp",
        }
    }

    pub fn is_routing(self) -> bool {
        matches!(self, ProblemKind::Tsp | ProblemKind::Op | ProblemKind::Cvrp)
    }

    pub fn is_graph(self) -> bool {
        matches!(self, ProblemKind::Mis | ProblemKind::Mvc)
    }

    pub fn is_scheduling(self) -> bool {
        matches!(self, ProblemKind::Pfsp | ProblemKind::Jssp)
    }

    /// OP and MIS are maximization problems, everything else minimizes.
    pub fn sense(self) -> Sense {
        match self {
            ProblemKind::Op | ProblemKind::Mis => Sense::Maximize,
            _ => Sense::Minimize,
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ProblemError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

/// A point in the plane. Generated instances use integral coordinates in
/// `[1, 1000]`; TSPLIB files may carry fractional ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Euclidean distance between nodes `i` and `j`, full double precision.
pub fn euclid(coords: &[Point], i: usize, j: usize) -> f64 {
    coords[i].dist(&coords[j])
}

/// Coordinates plus the optional per-problem attributes of TSP, OP and CVRP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingInstance {
    pub coords: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prizes: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demands: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_limit: Option<f64>,
    #[serde(default)]
    pub depot: usize,
}

impl RoutingInstance {
    pub fn tsp(coords: Vec<Point>) -> Self {
        Self {
            coords,
            prizes: None,
            demands: None,
            capacity: None,
            distance_limit: None,
            depot: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        euclid(&self.coords, i, j)
    }

    /// Dense distance matrix, row-major.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.dist(i, j)).collect())
            .collect()
    }

    /// Length of a node sequence, summing consecutive legs.
    pub fn path_length(&self, path: &[usize]) -> f64 {
        path.windows(2).map(|w| self.dist(w[0], w[1])).sum()
    }

    pub fn prize(&self, i: usize) -> u32 {
        self.prizes.as_ref().map_or(0, |p| p[i])
    }

    pub fn demand(&self, i: usize) -> u32 {
        self.demands.as_ref().map_or(0, |d| d[i])
    }
}

/// Undirected simple graph. Edges are stored normalized (`a < b`) and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphInstance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphInstance {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ends.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ProblemError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(ProblemError::InvalidInstance(format!("self-loop on node {a}")));
            }
            if a >= n || b >= n {
                return Err(ProblemError::InvalidInstance(format!(
                    "edge ({a},{b}) out of range for {n} nodes"
                )));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(ProblemError::InvalidInstance(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(Self {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }
}

/// Processing-time matrix for flow shops and job shops.
///
/// For PFSP `ptimes[j][m]` is the time of job `j` on machine `m`. For JSSP
/// `ptimes[j][o]` is the duration of the `o`-th operation of job `j`, which
/// runs on machine `machine_order[j][o]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulingInstance {
    pub num_jobs: usize,
    pub num_machines: usize,
    pub ptimes: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub machine_order: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    Routing(RoutingInstance),
    Graph(GraphInstance),
    Scheduling(SchedulingInstance),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub kind: ProblemKind,
    pub id: String,
    pub seed: Option<u64>,
    pub meta: BTreeMap<String, String>,
    pub payload: Payload,
}

impl Instance {
    pub fn new(kind: ProblemKind, id: impl Into<String>, payload: Payload) -> Result<Self, ProblemError> {
        let inst = Self {
            kind,
            id: id.into(),
            seed: None,
            meta: BTreeMap::new(),
            payload,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn routing(&self) -> Option<&RoutingInstance> {
        match &self.payload {
            Payload::Routing(r) => Some(r),
            _ => None,
        }
    }

    pub fn graph(&self) -> Option<&GraphInstance> {
        match &self.payload {
            Payload::Graph(g) => Some(g),
            _ => None,
        }
    }

    pub fn scheduling(&self) -> Option<&SchedulingInstance> {
        match &self.payload {
            Payload::Scheduling(s) => Some(s),
            _ => None,
        }
    }

    /// Number of nodes (routing, graph) or jobs (scheduling).
    pub fn size(&self) -> usize {
        match &self.payload {
            Payload::Routing(r) => r.len(),
            Payload::Graph(g) => g.n,
            Payload::Scheduling(s) => s.num_jobs,
        }
    }

    /// Checks the structural invariants tying payload to kind.
    pub fn validate(&self) -> Result<(), ProblemError> {
        let bad = |msg: String| Err(ProblemError::InvalidInstance(msg));
        match (&self.payload, self.kind) {
            (Payload::Routing(r), kind @ (ProblemKind::Tsp | ProblemKind::Op | ProblemKind::Cvrp)) => {
                let n = r.len();
                if !(2..=1000).contains(&n) {
                    return bad(format!("routing instances need 2..=1000 nodes, got {n}"));
                }
                if r.depot != 0 {
                    return bad("depot must be node 0".into());
                }
                let is_op = kind == ProblemKind::Op;
                let is_cvrp = kind == ProblemKind::Cvrp;
                match (&r.prizes, is_op) {
                    (Some(p), true) if p.len() != n => return bad("prize list length differs from node count".into()),
                    (Some(p), true) if p[0] != 0 => return bad("depot prize must be 0".into()),
                    (None, true) => return bad("OP instance without prizes".into()),
                    (Some(_), false) => return bad("prizes only allowed for OP".into()),
                    _ => {}
                }
                match (r.distance_limit, is_op) {
                    (Some(b), true) if !(b > 0.0) => return bad("distance limit must be positive".into()),
                    (None, true) => return bad("OP instance without distance limit".into()),
                    (Some(_), false) => return bad("distance limit only allowed for OP".into()),
                    _ => {}
                }
                match (&r.demands, r.capacity, is_cvrp) {
                    (Some(d), Some(_), true) if d.len() != n => return bad("demand list length differs from node count".into()),
                    (Some(d), Some(_), true) if d[0] != 0 => return bad("depot demand must be 0".into()),
                    (Some(_), Some(_), true) => {}
                    (_, _, true) => return bad("CVRP instance needs demands and capacity".into()),
                    (None, None, false) => {}
                    _ => return bad("demands/capacity only allowed for CVRP".into()),
                }
                Ok(())
            }
            (Payload::Graph(g), ProblemKind::Mis | ProblemKind::Mvc) => {
                GraphInstance::new(g.n, g.edges.iter().copied())?;
                Ok(())
            }
            (Payload::Scheduling(s), kind @ (ProblemKind::Pfsp | ProblemKind::Jssp)) => {
                if s.num_jobs == 0 || s.num_machines == 0 {
                    return bad("scheduling instance needs at least one job and machine".into());
                }
                if s.ptimes.len() != s.num_jobs || s.ptimes.iter().any(|row| row.len() != s.num_machines) {
                    return bad("processing-time matrix shape differs from J x M".into());
                }
                match (&s.machine_order, kind) {
                    (Some(order), ProblemKind::Jssp) => {
                        if order.len() != s.num_jobs {
                            return bad("machine order needs one row per job".into());
                        }
                        for (j, row) in order.iter().enumerate() {
                            let mut seen = vec![false; s.num_machines];
                            if row.len() != s.num_machines {
                                return bad(format!("machine order row {j} has wrong length"));
                            }
                            for &m in row {
                                if m >= s.num_machines || std::mem::replace(&mut seen[m], true) {
                                    return bad(format!("machine order row {j} is not a permutation"));
                                }
                            }
                        }
                        Ok(())
                    }
                    (None, ProblemKind::Jssp) => bad("JSSP instance without machine order".into()),
                    (Some(_), _) => bad("machine order only allowed for JSSP".into()),
                    (None, _) => Ok(()),
                }
            }
            (_, kind) => bad(format!("payload variant does not match kind {kind}")),
        }
    }
}

/// A candidate solution. Index validity is checked by the verifier, not here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Solution {
    /// TSP tour or OP path.
    Route(Vec<usize>),
    /// CVRP routes, one per vehicle.
    RouteSet(Vec<Vec<usize>>),
    /// MIS or MVC vertex set.
    VertexSet(BTreeSet<usize>),
    /// PFSP job permutation.
    JobOrder(Vec<usize>),
    /// JSSP job sequence for each machine.
    MachineSchedules(Vec<Vec<usize>>),
}

impl Solution {
    /// Whether this variant is the one used by `kind`.
    pub fn matches(&self, kind: ProblemKind) -> bool {
        matches!(
            (self, kind),
            (Solution::Route(_), ProblemKind::Tsp | ProblemKind::Op)
                | (Solution::RouteSet(_), ProblemKind::Cvrp)
                | (Solution::VertexSet(_), ProblemKind::Mis | ProblemKind::Mvc)
                | (Solution::JobOrder(_), ProblemKind::Pfsp)
                | (Solution::MachineSchedules(_), ProblemKind::Jssp)
        )
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Solution::Route(_) => "route",
            Solution::RouteSet(_) => "route_set",
            Solution::VertexSet(_) => "vertex_set",
            Solution::JobOrder(_) => "job_order",
            Solution::MachineSchedules(_) => "machine_schedules",
        }
    }
}
