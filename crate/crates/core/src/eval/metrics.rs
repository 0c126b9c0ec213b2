//! Feasibility rate, mean optimality gap and Gap@K.

use serde::{Deserialize, Serialize};

use super::EvalRecord;
use crate::problems::{Instance, Payload};

/// Gap@K thresholds in percent.
pub const GAP_THRESHOLDS: [f64; 3] = [1.0, 5.0, 10.0];

/// Instance size class. Routing and graph instances: ≤ 35 nodes small,
/// ≤ 65 medium, larger is large. Scheduling instances by
/// `max(jobs, machines)`: ≤ 10 small, ≤ 15 medium, larger is large.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeTier {
    Small,
    Medium,
    Large,
}

impl SizeTier {
    pub const ALL: [SizeTier; 3] = [SizeTier::Small, SizeTier::Medium, SizeTier::Large];

    pub fn of(inst: &Instance) -> Self {
        let (size, small, medium) = match &inst.payload {
            Payload::Scheduling(s) => (s.num_jobs.max(s.num_machines), 10, 15),
            _ => (inst.size(), 35, 65),
        };
        if size <= small {
            SizeTier::Small
        } else if size <= medium {
            SizeTier::Medium
        } else {
            SizeTier::Large
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SizeTier::Small => "small",
            SizeTier::Medium => "medium",
            SizeTier::Large => "large",
        }
    }
}

/// Share of all records whose selected gap is strictly below `k` percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapAtK {
    pub k: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub instances: usize,
    pub feasible: usize,
    /// M_f: fraction of records with a selected (feasible) candidate.
    pub feasibility_rate: f64,
    /// M_o: mean relative gap over selected records; absent when none.
    pub mean_gap: Option<f64>,
    pub gap_std: Option<f64>,
    pub gap_at: Vec<GapAtK>,
    pub mean_wall_ms: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tiers: Vec<(SizeTier, MetricsSummary)>,
}

fn summarize(records: &[&EvalRecord], with_tiers: bool) -> MetricsSummary {
    let n = records.len();
    let gaps: Vec<f64> = records.iter().filter(|r| r.selected.is_some()).filter_map(|r| r.gap).collect();
    let rate = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
    let mean_gap = (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64);
    let gap_std = mean_gap.map(|m| (gaps.iter().map(|g| (g - m).powi(2)).sum::<f64>() / gaps.len() as f64).sqrt());
    let gap_at = GAP_THRESHOLDS
        .iter()
        .map(|&k| GapAtK { k, rate: rate(gaps.iter().filter(|&&g| g < k / 100.0).count()) })
        .collect();
    let tiers = if with_tiers {
        SizeTier::ALL
            .iter()
            .filter_map(|&t| {
                let subset: Vec<&EvalRecord> = records.iter().copied().filter(|r| r.tier == t).collect();
                (!subset.is_empty()).then(|| (t, summarize(&subset, false)))
            })
            .collect()
    } else {
        Vec::new()
    };
    MetricsSummary {
        instances: n,
        feasible: gaps.len(),
        feasibility_rate: rate(gaps.len()),
        mean_gap,
        gap_std,
        gap_at,
        mean_wall_ms: if n == 0 { 0.0 } else { records.iter().map(|r| r.wall_ms as f64).sum::<f64>() / n as f64 },
        tiers,
    }
}

/// Aggregates records into M_f, M_o, gap spread, Gap@K and a per-tier
/// breakdown.
pub fn metrics(records: &[EvalRecord]) -> MetricsSummary {
    summarize(&records.iter().collect::<Vec<_>>(), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemKind;

    fn record(gap: Option<f64>) -> EvalRecord {
        EvalRecord {
            instance_id: "x".into(),
            kind: ProblemKind::Tsp,
            tier: SizeTier::Small,
            candidates: vec![],
            selected: gap.map(|_| 0),
            reference: 1.0,
            gap,
            wall_ms: 0,
            error: None,
        }
    }

    #[test]
    fn gap_at_k_counts() {
        let m = metrics(&[record(Some(0.005)), record(Some(0.03)), record(Some(0.12))]);
        let rates: Vec<f64> = m.gap_at.iter().map(|g| g.rate).collect();
        assert!((rates[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((rates[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((rates[2] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.feasibility_rate, 1.0);
    }

    #[test]
    fn no_feasible_records() {
        let m = metrics(&[record(None), record(None)]);
        assert_eq!(m.feasibility_rate, 0.0);
        assert_eq!(m.mean_gap, None);
    }

    #[test]
    fn half_feasible() {
        let m = metrics(&[record(Some(0.0)), record(None)]);
        assert_eq!(m.feasibility_rate, 0.5);
        assert_eq!(m.mean_gap, Some(0.0));
        assert_eq!(m.gap_at[0].rate, 0.5);
    }

    #[test]
    fn tier_boundaries() {
        use crate::problems::{gen_instance, GenConfig};
        let tier = |kind, lo, hi, machines: Option<usize>| {
            let mut cfg = GenConfig::default_for(kind, 1).with_size(lo, hi);
            if let Some(m) = machines {
                cfg = cfg.with_machines(m, m);
            }
            SizeTier::of(&gen_instance(kind, &cfg).unwrap())
        };
        assert_eq!(tier(ProblemKind::Tsp, 30, 30, None), SizeTier::Small);
        assert_eq!(tier(ProblemKind::Tsp, 50, 50, None), SizeTier::Medium);
        assert_eq!(tier(ProblemKind::Mis, 90, 90, None), SizeTier::Large);
        assert_eq!(tier(ProblemKind::Jssp, 10, 10, Some(10)), SizeTier::Small);
        assert_eq!(tier(ProblemKind::Pfsp, 15, 15, Some(12)), SizeTier::Medium);
        assert_eq!(tier(ProblemKind::Jssp, 20, 20, Some(15)), SizeTier::Large);
    }
}
