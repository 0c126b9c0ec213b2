//! Permutation flow shop heuristics.

use crate::problems::SchedulingInstance;
use crate::verify::pfsp_makespan;

/// Palmer's slope index: jobs sorted by decreasing
/// `Σ_k (2k − M − 1)·p[j][k]` (k = 1..M), ties → lower job.
pub fn palmer(s: &SchedulingInstance) -> Vec<usize> {
    let m = s.num_machines as i64;
    let slope = |j: usize| -> i64 {
        s.ptimes[j].iter().enumerate().map(|(k, &p)| (2 * (k as i64 + 1) - m - 1) * p as i64).sum()
    };
    let mut order: Vec<usize> = (0..s.num_jobs).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(slope(j)), j));
    order
}

/// NEH: jobs by decreasing total processing time (ties → lower job), each
/// inserted at the position giving the smallest partial makespan (ties →
/// earliest position).
pub fn neh(s: &SchedulingInstance) -> Vec<usize> {
    let total = |j: usize| -> u64 { s.ptimes[j].iter().map(|&p| p as u64).sum() };
    let mut jobs: Vec<usize> = (0..s.num_jobs).collect();
    jobs.sort_by_key(|&j| (std::cmp::Reverse(total(j)), j));
    let mut seq: Vec<usize> = Vec::with_capacity(s.num_jobs);
    for j in jobs {
        let mut best: Option<(u64, usize)> = None;
        for pos in 0..=seq.len() {
            seq.insert(pos, j);
            let c = pfsp_makespan(s, &seq);
            seq.remove(pos);
            if best.map_or(true, |(bc, _)| c < bc) {
                best = Some((c, pos));
            }
        }
        seq.insert(best.expect("at least one position").1, j);
    }
    seq
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> SchedulingInstance {
        SchedulingInstance { num_jobs: 2, num_machines: 2, ptimes: vec![vec![1, 2], vec![3, 1]], machine_order: None }
    }

    #[test]
    fn neh_on_two_jobs() {
        let s = two_by_two();
        let order = neh(&s);
        assert_eq!(order, vec![0, 1]);
        assert_eq!(pfsp_makespan(&s, &order), 5);
    }

    #[test]
    fn palmer_prefers_late_heavy_jobs_first() {
        // Job 0 is heavy on the last machine, job 1 on the first.
        let s = SchedulingInstance { num_jobs: 2, num_machines: 2, ptimes: vec![vec![1, 9], vec![9, 1]], machine_order: None };
        assert_eq!(palmer(&s), vec![0, 1]);
        assert_eq!(palmer(&two_by_two()), vec![0, 1]);
    }
}
