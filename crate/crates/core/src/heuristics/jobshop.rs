//! Non-delay dispatching for the job shop.
//!
//! At every step the machine that can start an operation earliest is
//! chosen (ties → lower machine); among the operations that could start
//! there at that time the rule picks one (ties → lower job).

use crate::problems::SchedulingInstance;

/// Look-ahead parameter of the apparent-tardiness-cost index.
pub const ATC_LOOKAHEAD: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispatchRule {
    /// Shortest processing time.
    Spt,
    /// Earliest arrival in the machine queue.
    Fifo,
    /// Apparent tardiness cost with unit weights and due dates 0. With
    /// zero due dates the slack term vanishes and the index reduces to
    /// `1/p`, so the ordering coincides with SPT.
    Atc,
}

/// Apparent-tardiness-cost priority of an operation (larger is better).
pub fn atc_index(weight: f64, ptime: f64, due: f64, now: f64, mean_ptime: f64) -> f64 {
    let slack = (due - ptime - now).max(0.0);
    weight / ptime.max(f64::MIN_POSITIVE) * (-slack / (ATC_LOOKAHEAD * mean_ptime.max(f64::MIN_POSITIVE))).exp()
}

/// Builds per-machine job sequences by non-delay dispatching under `rule`.
pub fn dispatch(s: &SchedulingInstance, rule: DispatchRule) -> Vec<Vec<usize>> {
    let order = s.machine_order.as_ref().expect("JSSP instance has a machine order");
    let (jobs, machines) = (s.num_jobs, s.num_machines);
    let mut next = vec![0usize; jobs];
    let mut job_ready = vec![0u64; jobs];
    let mut machine_ready = vec![0u64; machines];
    let mut rows = vec![Vec::with_capacity(jobs); machines];
    for _ in 0..jobs * machines {
        let est = |j: usize| job_ready[j].max(machine_ready[order[j][next[j]]]);
        let open = || (0..jobs).filter(|&j| next[j] < machines);
        let t = open().map(est).min().expect("operations remain");
        let machine = open().filter(|&j| est(j) == t).map(|j| order[j][next[j]]).min().expect("some op starts at t");
        let conflict: Vec<usize> = open().filter(|&j| order[j][next[j]] == machine && est(j) == t).collect();
        let p = |j: usize| s.ptimes[j][next[j]] as f64;
        let mean_p = conflict.iter().map(|&j| p(j)).sum::<f64>() / conflict.len() as f64;
        let score = |j: usize| -> f64 {
            match rule {
                DispatchRule::Spt => -p(j),
                DispatchRule::Fifo => -(job_ready[j] as f64),
                DispatchRule::Atc => atc_index(1.0, p(j), 0.0, t as f64, mean_p),
            }
        };
        let j = super::argmax_by(conflict.iter().copied(), |&j| score(j)).expect("conflict set nonempty");
        let end = t + s.ptimes[j][next[j]] as u64;
        job_ready[j] = end;
        machine_ready[machine] = end;
        rows[machine].push(j);
        next[j] += 1;
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_instance, GenConfig, ProblemKind, Solution};
    use crate::verify::{check, jssp_makespan};

    #[test]
    fn atc_with_zero_due_dates_matches_spt() {
        for seed in 0..30 {
            let inst = gen_instance(ProblemKind::Jssp, &GenConfig::default_for(ProblemKind::Jssp, seed)).unwrap();
            let s = inst.scheduling().unwrap();
            assert_eq!(dispatch(s, DispatchRule::Atc), dispatch(s, DispatchRule::Spt));
        }
    }

    #[test]
    fn atc_index_prefers_short_and_urgent() {
        assert!(atc_index(1.0, 2.0, 0.0, 0.0, 3.0) > atc_index(1.0, 4.0, 0.0, 0.0, 3.0));
        assert!(atc_index(1.0, 2.0, 5.0, 0.0, 3.0) < atc_index(1.0, 2.0, 0.0, 0.0, 3.0));
    }

    #[test]
    fn dispatch_is_feasible_and_non_delay() {
        for seed in 0..30 {
            let inst = gen_instance(ProblemKind::Jssp, &GenConfig::default_for(ProblemKind::Jssp, seed)).unwrap();
            let s = inst.scheduling().unwrap();
            for rule in [DispatchRule::Spt, DispatchRule::Fifo, DispatchRule::Atc] {
                let rows = dispatch(s, rule);
                assert!(check(&inst, &Solution::MachineSchedules(rows.clone())).feasible);
                let total: u64 = s.ptimes.iter().flatten().map(|&p| p as u64).sum();
                assert!(jssp_makespan(s, &rows).unwrap() <= total);
            }
        }
    }
}
