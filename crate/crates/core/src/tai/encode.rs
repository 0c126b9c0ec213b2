use std::fmt::Write as _;

use super::features::{lowest_k, nearest_neighbors, top_degree_neighbors};
use super::{OutputGrammar, TextAttributedInstance};
use crate::problems::{GraphInstance, Instance, Payload, ProblemKind, RoutingInstance, SchedulingInstance};

pub const DEFAULT_FEATURE_K: usize = 2;

/// Renders an instance as a text-attributed instance with `k` features per
/// entity.
pub fn encode(inst: &Instance, k: usize) -> TextAttributedInstance {
    let (instruction, input) = match (&inst.payload, inst.kind) {
        (Payload::Routing(r), kind) => (routing_instruction(r, kind, k), routing_input(r, kind, k)),
        (Payload::Graph(g), kind) => (graph_instruction(g, kind, k), graph_input(g, k)),
        (Payload::Scheduling(s), ProblemKind::Pfsp) => (pfsp_instruction(s), pfsp_input(s, k)),
        (Payload::Scheduling(s), _) => (jssp_instruction(s), jssp_input(s, k)),
    };
    TextAttributedInstance {
        kind: inst.kind,
        instruction,
        input,
        expected_output: OutputGrammar::for_kind(inst.kind),
    }
}

const NEIGHBOR_NOTE: &str = "The input includes city coordinates, the {k} nearest neighbors for each city, and their respective distances.";

fn routing_instruction(r: &RoutingInstance, kind: ProblemKind, k: usize) -> String {
    let n = r.len();
    let note = NEIGHBOR_NOTE.replace("{k}", &k.to_string());
    match kind {
        ProblemKind::Tsp => format!(
            "Solve the Traveling Salesman Problem (TSP) for the given list of {n} cities. \
             Each city is represented as a node with coordinates (x, y). \
             Identify the shortest route that visits every city exactly once and returns to the starting city. \
             {note} \
             Provide the solution in the following format: 1. Route: List the nodes in the order they are visited. \
             2. Objective: The objective value (total travel distance)."
        ),
        ProblemKind::Op => format!(
            "Solve the Orienteering Problem with {n} nodes. \
             Each node has (x, y) coordinates and a prize for visiting it. \
             You must plan a route that starts at depot 0, collecting the maximum total prize possible, \
             subject to a maximum route length T = {limit:.1}. \
             You may visit a subset of nodes, but the total distance traveled must not exceed T. \
             {note} \
             Provide the solution in the following format: 1. Route: The ordered list of visited nodes. \
             2. Objective: The objective value (summation of the collecting prizes).",
            limit = r.distance_limit.unwrap_or_default()
        ),
        _ => format!(
            "Solve the Capacitated Vehicle Routing Problem (CVRP) with {customers} customers and 1 depot (node 0). \
             Each customer node has a demand. All vehicles have the same capacity of {capacity}. \
             You must assign each customer to exactly one route and ensure that the sum of demands on each route \
             does not exceed the vehicle capacity. Minimize the total distance traveled. \
             {note} \
             Provide the solution in the following format: 1. Route: A list of routes, each route as an ordered list \
             of visited nodes (start/end at the depot). 2. Objective: The total distance of all routes.",
            customers = n - 1,
            capacity = r.capacity.unwrap_or_default()
        ),
    }
}

fn routing_input(r: &RoutingInstance, kind: ProblemKind, k: usize) -> String {
    let neighbors = nearest_neighbors(&r.coords, k);
    let entries: Vec<String> = r
        .coords
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut s = format!("Node {i}, coordinates: [{}, {}]", p.x, p.y);
            match kind {
                ProblemKind::Op => {
                    let _ = write!(s, ", prize: {}", r.prize(i));
                }
                ProblemKind::Cvrp => {
                    let _ = write!(s, ", demand: {}", r.demand(i));
                }
                _ => {}
            }
            let feats: Vec<String> = neighbors[i].iter().map(|(j, d)| format!("{j}: {d:.1}")).collect();
            let _ = write!(s, ", neighbors: [{}]", feats.join(", "));
            s
        })
        .collect();
    entries.join("; ")
}

fn graph_instruction(g: &GraphInstance, kind: ProblemKind, k: usize) -> String {
    let n = g.n;
    let last = n.saturating_sub(1);
    let format_note = format!(
        "The input includes the edges of the graph and the top-{k} neighbors for each node in the format N[a,b,#c,#d], \
         where a and b are the top-{k} neighbors, #c is the degree of a, and #d is the degree of b."
    );
    if kind == ProblemKind::Mis {
        format!(
            "Given an undirected graph with {n} nodes (0..{last}) and edges specified below. \
             For each node, we also provide up to {k} neighbors connected to it. \
             Find a maximum independent set: the largest set of vertices where no two vertices share an edge. \
             {format_note} \
             Output format: 1. Set: The list of vertices in the maximum independent set. 2. Objective: The size of that set."
        )
    } else {
        format!(
            "Given an undirected graph with {n} nodes (0..{last}) and edges specified below. \
             For each node, we also provide up to {k} neighbors with the largest degrees. \
             Find a minimum vertex cover: a smallest set of vertices such that every edge has at least one endpoint in this set. \
             {format_note} \
             Output format: 1. Set: The list of vertices in the minimum vertex cover. 2. Objective: The size of that set."
        )
    }
}

fn graph_input(g: &GraphInstance, k: usize) -> String {
    let edges: Vec<String> = g.edges.iter().map(|(a, b)| format!("({a},{b})")).collect();
    let nodes: Vec<String> = top_degree_neighbors(g, k)
        .into_iter()
        .enumerate()
        .map(|(i, top)| {
            let mut parts: Vec<String> = top.iter().map(|(v, _)| v.to_string()).collect();
            parts.extend(top.iter().map(|(_, d)| format!("#{d}")));
            format!("N{i}:[{}]", parts.join(","))
        })
        .collect();
    format!("Edges: [{}]\n\n{}", edges.join(","), nodes.join("; "))
}

fn pfsp_instruction(s: &SchedulingInstance) -> String {
    format!(
        "Solve the Permutation Flowshop Scheduling Problem (PFSP) with {j} jobs and {m} machines. \
         Each machine can process only one job at a time, and each job can be processed by only one machine at a time. \
         Jobs must be processed on each machine in the same order. \
         Identify the job order that minimizes the maximum completing time. \
         The input includes the processing times of each machine on every job, the jobs with the lowest processing time \
         for each machine, and their respective processing times. \
         Provide the solution in the following format: 1. Order: List the order that jobs are processed on each machine. \
         2. Objective: The objective value (maximum completing time).",
        j = s.num_jobs,
        m = s.num_machines
    )
}

fn pfsp_input(s: &SchedulingInstance, k: usize) -> String {
    let entries: Vec<String> = (0..s.num_machines)
        .map(|m| {
            let column: Vec<u32> = s.ptimes.iter().map(|row| row[m]).collect();
            let times: Vec<String> = column.iter().map(u32::to_string).collect();
            let low: Vec<String> = lowest_k(&column, k).into_iter().map(|(j, t)| format!("{j}: {t}")).collect();
            format!(
                "Machine {m}, processing times: [{}], jobs with lowest processing time: [{}]",
                times.join(", "),
                low.join(", ")
            )
        })
        .collect();
    format!("{}.", entries.join("; "))
}

fn jssp_instruction(s: &SchedulingInstance) -> String {
    format!(
        "Solve the Job Shop Scheduling Problem (JSSP) with {j} jobs and {m} machines. \
         Each job consists of {m} operations which need to be sequentially processed on specific machines. \
         Each machine can process only one job at a time, and each job can be processed by only one machine at a time. \
         Identify the schedule that minimizes the maximum completion time (makespan). \
         The input includes the information of operations for each job, including their specific machine and processing time, \
         as well as the operators with the lowest processing time and their respective machines and processing times. \
         Provide the solution in the following format: 1. Schedule: List the order that jobs are processed on each machine. \
         2. Objective: The makespan of the schedule.",
        j = s.num_jobs,
        m = s.num_machines
    )
}

fn jssp_input(s: &SchedulingInstance, k: usize) -> String {
    let order = s.machine_order.as_ref().expect("validated JSSP instance has a machine order");
    let entries: Vec<String> = (0..s.num_jobs)
        .map(|j| {
            let ops: Vec<String> = order[j]
                .iter()
                .zip(&s.ptimes[j])
                .map(|(m, t)| format!("({m}, {t})"))
                .collect();
            let low: Vec<String> = lowest_k(&s.ptimes[j], k)
                .into_iter()
                .map(|(o, t)| format!("{o}: ({}, {t})", order[j][o]))
                .collect();
            format!(
                "Job {j}, machines and processing times for operations: [{}], operators with lowest processing time: [{}]",
                ops.join(", "),
                low.join(", ")
            )
        })
        .collect();
    entries.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_instance, GenConfig, Point};

    fn graph(n: usize, edges: &[(usize, usize)], kind: ProblemKind) -> Instance {
        Instance::new(kind, "g", Payload::Graph(GraphInstance::new(n, edges.iter().copied()).unwrap())).unwrap()
    }

    #[test]
    fn three_node_tsp_features() {
        let r = RoutingInstance::tsp(vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(0.0, 4.0)]);
        let inst = Instance::new(ProblemKind::Tsp, "t", Payload::Routing(r)).unwrap();
        let tai = encode(&inst, 2);
        assert!(tai.input.starts_with("Node 0, coordinates: [0, 0], neighbors: [1: 3.0, 2: 4.0]; "));
        assert!(tai.instruction.contains("for the given list of 3 cities"));
        assert_eq!(tai.expected_output, OutputGrammar::Route);
    }

    #[test]
    fn op_instruction_has_limit_to_one_decimal() {
        let mut inst = gen_instance(ProblemKind::Op, &GenConfig::default_for(ProblemKind::Op, 11).with_size(23, 23)).unwrap();
        if let Payload::Routing(r) = &mut inst.payload {
            r.distance_limit = Some(2682.4999);
        }
        let tai = encode(&inst, 2);
        assert!(tai.instruction.contains("maximum route length T = 2682.5."), "{}", tai.instruction);
        assert!(tai.input.starts_with("Node 0, coordinates: ["));
        assert!(tai.input.contains(", prize: 0, neighbors: ["));
    }

    #[test]
    fn isolated_node_renders_empty_list() {
        let inst = graph(3, &[(0, 1)], ProblemKind::Mis);
        let tai = encode(&inst, 2);
        assert!(tai.input.ends_with("N0:[1,#1]; N1:[0,#1]; N2:[]"), "{}", tai.input);
    }

    #[test]
    fn encode_is_deterministic() {
        for kind in ProblemKind::ALL {
            let inst = gen_instance(kind, &GenConfig::default_for(kind, 77)).unwrap();
            assert_eq!(encode(&inst, 2), encode(&inst, 2));
        }
    }

    #[test]
    fn cvrp_counts_customers() {
        let inst = gen_instance(ProblemKind::Cvrp, &GenConfig::default_for(ProblemKind::Cvrp, 3).with_size(46, 46)).unwrap();
        let tai = encode(&inst, 2);
        assert!(tai.instruction.contains("with 45 customers and 1 depot (node 0)"));
        assert!(tai.input.starts_with("Node 0, coordinates: ["));
        assert!(tai.input.contains("demand: 0, neighbors"));
        assert_eq!(tai.expected_output, OutputGrammar::Routes);
    }
}
