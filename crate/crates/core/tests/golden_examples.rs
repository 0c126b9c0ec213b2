//! Golden tests on the published example instances and outputs.

use std::collections::BTreeSet;

use cobench::heuristics::{brute_force, Budget};
use cobench::problems::{GraphInstance, Instance, ProblemKind, Solution};
use cobench::tai::{encode, format_solution, parse};
use cobench::verify::{check, objective};

fn load(name: &str) -> Instance {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    Instance::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn mis_example_is_feasible_and_optimal() {
    let inst = load("mis_example.json");
    let parsed = parse("Set: [0, 2, 3, 5, 7, 8], Objective: 6", ProblemKind::Mis);
    let sol = parsed.solution.unwrap();
    assert!(check(&inst, &sol).feasible);
    assert_eq!(objective(&inst, &sol).unwrap().value, 6.0);
    assert_eq!(brute_force(&inst, &Budget::default()).unwrap().1.value, 6.0);
}

#[test]
fn mis_example_features_match_published_input() {
    let tai = encode(&load("mis_example.json"), 2);
    let expected = "Edges: [(0,9),(1,2),(1,3),(1,6),(1,9),(2,6),(3,4),(4,5),(5,9),(6,9)]\n\n\
        N0:[9,#4]; N1:[9,6,#4,#3]; N2:[1,6,#4,#3]; N3:[1,4,#4,#2]; N4:[3,5,#2,#2]; N5:[9,4,#4,#2]; \
        N6:[1,9,#4,#4]; N7:[]; N8:[]; N9:[1,6,#4,#3]";
    assert_eq!(tai.input, expected);
    assert!(tai.instruction.starts_with("Given an undirected graph with 10 nodes (0..9)"));
}

#[test]
fn mvc_example_is_feasible_and_optimal() {
    let inst = load("mvc_example.json");
    let sol = parse("Set: [0, 3, 4, 5, 7], Objective: 5", ProblemKind::Mvc).solution.unwrap();
    assert!(check(&inst, &sol).feasible);
    assert_eq!(objective(&inst, &sol).unwrap().value, 5.0);
    assert_eq!(brute_force(&inst, &Budget::default()).unwrap().1.value, 5.0);
}

#[test]
fn mvc_example_features_match_published_input() {
    let tai = encode(&load("mvc_example.json"), 2);
    let expected = "N0:[3,5,#5,#4]; N1:[0,3,#9,#5]; N2:[0,7,#9,#2]; N3:[0,5,#9,#4]; N4:[0,1,#9,#3]; \
        N5:[0,3,#9,#5]; N6:[0,4,#9,#3]; N7:[5,2,#4,#2]; N8:[0,3,#9,#5]; N9:[0,3,#9,#5]; N10:[0,5,#9,#4]";
    assert!(tai.input.ends_with(expected), "{}", tai.input);
}

/// Flow-shop makespan by the textbook completion-time recurrence.
fn makespan(p: &[Vec<u32>], order: &[usize]) -> u32 {
    let mut done = vec![0u32; p[0].len()];
    for &j in order {
        for m in 0..done.len() {
            let ready = if m == 0 { 0 } else { done[m - 1] };
            done[m] = done[m].max(ready) + p[j][m];
        }
    }
    *done.last().unwrap()
}

#[test]
fn pfsp_example_order_has_makespan_471() {
    let inst = load("pfsp_example.json");
    let sol = parse("Order: [6, 1, 2, 5, 3, 4], Objective: 471", ProblemKind::Pfsp).solution.unwrap();
    assert_eq!(sol, Solution::JobOrder(vec![5, 0, 1, 4, 2, 3]));
    assert!(check(&inst, &sol).feasible);
    let p = &inst.scheduling().unwrap().ptimes;
    assert_eq!(makespan(p, &[5, 0, 1, 4, 2, 3]), 471);
    assert_eq!(objective(&inst, &sol).unwrap().value, 471.0);
    assert_eq!(brute_force(&inst, &Budget::default()).unwrap().1.value, 471.0);
}

#[test]
fn pfsp_example_features_match_published_input() {
    let tai = encode(&load("pfsp_example.json"), 2);
    assert_eq!(
        tai.input,
        "Machine 0, processing times: [32, 22, 26, 49, 44, 14], jobs with lowest processing time: [5: 14, 1: 22]; \
         Machine 1, processing times: [49, 87, 91, 98, 13, 3], jobs with lowest processing time: [5: 3, 4: 13]; \
         Machine 2, processing times: [56, 46, 96, 10, 46, 23], jobs with lowest processing time: [3: 10, 5: 23]; \
         Machine 3, processing times: [99, 21, 6, 65, 4, 76], jobs with lowest processing time: [4: 4, 2: 6]; \
         Machine 4, processing times: [56, 27, 59, 9, 70, 64], jobs with lowest processing time: [3: 9, 1: 27]."
    );
}

const TSP_OUTPUT: &str = "Route: [0, 27, 57, 60, 63, 26, 56, 17, 25, 40, 59, 44, 31, 67, 77, 70, 52, 75, 6, 58, 35, 38, 14, 10, 15, 24, 65, 39, 61, 18, 41, 72, 54, 55, 7, 2, 49, 28, 74, 29, 66, 62, 11, 42, 30, 9, 71, 48, 73, 19, 47, 46, 1, 43, 37, 78, 4, 68, 12, 53, 79, 22, 80, 51, 23, 8, 32, 13, 76, 20, 64, 50, 45, 33, 36, 3, 21, 5, 16, 34, 69, 0], Objective: 6833.347";
const OP_OUTPUT: &str = "Route: [0, 2, 6, 8, 11, 19, 22, 18, 16, 14, 10, 13, 12, 9, 1, 5], Objective: 98.00";
const CVRP_OUTPUT: &str = "Routes: [[0, 6, 35, 1, 15, 17, 12, 7, 10, 3, 8, 27, 45, 9, 28, 23, 2, 32, 39, 41, 0], [0, 5, 37, 19, 22, 21, 40, 4, 20, 24, 25, 0], [0, 43, 44, 29, 26, 42, 38, 34, 11, 16, 13, 33, 31, 30, 36, 18, 14, 0]], Objective: 6643.76";
const JSSP_OUTPUT: &str = "Schedule: [[2, 0, 5, 1, 3, 4], [2, 4, 1, 3, 0, 5], [0, 2, 3, 1, 4, 5], [1, 2, 5, 0, 4, 3], [1, 0, 5, 3, 4, 2], [5, 2, 4, 3, 1, 0]], Objective: 466";

#[test]
fn published_outputs_parse_and_round_trip() {
    let cases = [
        (ProblemKind::Tsp, TSP_OUTPUT, 6833.347),
        (ProblemKind::Op, OP_OUTPUT, 98.0),
        (ProblemKind::Cvrp, CVRP_OUTPUT, 6643.76),
        (ProblemKind::Mis, "Set: [0, 2, 3, 5, 7, 8], Objective: 6", 6.0),
        (ProblemKind::Mvc, "Set: [0, 3, 4, 5, 7], Objective: 5", 5.0),
        (ProblemKind::Pfsp, "Order: [6, 1, 2, 5, 3, 4], Objective: 471", 471.0),
        (ProblemKind::Jssp, JSSP_OUTPUT, 466.0),
    ];
    for (kind, text, stated) in cases {
        let parsed = parse(text, kind);
        assert!(parsed.format_ok, "{kind}");
        assert_eq!(parsed.stated_objective, Some(stated), "{kind}");
        let sol = parsed.solution.unwrap();
        let again = parse(&format_solution(&sol, stated, kind).unwrap(), kind);
        assert_eq!(again.solution, Some(sol), "{kind}");
    }
}

#[test]
fn published_routes_have_expected_shape() {
    let Some(Solution::Route(tour)) = parse(TSP_OUTPUT, ProblemKind::Tsp).solution else { panic!() };
    assert_eq!(tour.len(), 82);
    assert_eq!(tour.iter().copied().collect::<BTreeSet<_>>(), (0..81).collect());
    let Some(Solution::RouteSet(routes)) = parse(CVRP_OUTPUT, ProblemKind::Cvrp).solution else { panic!() };
    let customers: BTreeSet<usize> = routes.iter().flatten().copied().filter(|&v| v != 0).collect();
    assert_eq!(customers, (1..=45).collect());
    let Some(Solution::MachineSchedules(rows)) = parse(JSSP_OUTPUT, ProblemKind::Jssp).solution else { panic!() };
    assert!(rows.iter().all(|r| r.iter().copied().collect::<BTreeSet<_>>() == (0..6).collect()));
}

#[test]
fn example_graph_matches_published_edge_count() {
    let inst = load("mvc_example.json");
    let g: &GraphInstance = inst.graph().unwrap();
    assert_eq!((g.n, g.edges.len()), (11, 18));
}
