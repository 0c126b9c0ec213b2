//! Loading public benchmark files and solving them end to end.

use cobench::heuristics::reference::best_known_tsp;
use cobench::heuristics::{solve, HeuristicMethod};
use cobench::problems::{parse_taillard, parse_tsplib, write_taillard, ProblemKind};
use cobench::verify::{check, objective};

/// Known optimal tour length of berlin52 (TSPLIB, EUC_2D).
const BERLIN52_OPTIMUM: f64 = 7542.0;

fn berlin52() -> cobench::problems::Instance {
    let path = format!("{}/tests/data/berlin52.tsp", env!("CARGO_MANIFEST_DIR"));
    parse_tsplib(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn berlin52_loads() {
    let inst = berlin52();
    assert_eq!(inst.kind, ProblemKind::Tsp);
    assert_eq!(inst.size(), 52);
    let first = inst.routing().unwrap().coords[0];
    assert_eq!((first.x, first.y), (565.0, 575.0));
}

#[test]
fn berlin52_heuristics_bracket_the_optimum() {
    let inst = berlin52();
    let gap = |sol| (objective(&inst, sol).unwrap().value - BERLIN52_OPTIMUM) / BERLIN52_OPTIMUM;
    let nn = solve(&inst, HeuristicMethod::Nn, 0).unwrap();
    let fi = solve(&inst, HeuristicMethod::Fi, 0).unwrap();
    assert!(check(&inst, &nn).feasible && check(&inst, &fi).feasible);
    // Unrounded Euclidean lengths can undercut the rounded optimum by a hair.
    assert!(gap(&fi) > -0.001 && gap(&fi) < 0.10, "fi gap {}", gap(&fi));
    assert!(gap(&nn) > gap(&fi));
    let best = cobench::problems::Solution::Route(best_known_tsp(inst.routing().unwrap(), 8, 1));
    assert!(gap(&best) < 0.05, "local search gap {}", gap(&best));
}

#[test]
fn taillard_style_job_shop_round_trips() {
    let text = "3 3\nTimes\n5 3 2\n4 6 1\n2 7 3\nMachines\n1 2 3\n2 1 3\n3 2 1\n";
    let inst = parse_taillard(text).unwrap();
    assert_eq!(inst.kind, ProblemKind::Jssp);
    let s = inst.scheduling().unwrap();
    assert_eq!(parse_taillard(&write_taillard(s).unwrap()).unwrap().payload, inst.payload);
    for method in HeuristicMethod::all_for(ProblemKind::Jssp) {
        assert!(check(&inst, &solve(&inst, method, 0).unwrap()).feasible);
    }
}
