//! Evaluation reports: a JSON document with the metrics and every record,
//! plus a plain-text rendering of the metrics.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::metrics::{metrics, MetricsSummary};
use super::EvalRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Tool version, command line and seed of the producing run.
    pub provenance: BTreeMap<String, String>,
    pub summary: MetricsSummary,
    pub per_kind: BTreeMap<String, MetricsSummary>,
    pub records: Vec<EvalRecord>,
}

impl EvalReport {
    pub fn new(records: Vec<EvalRecord>, provenance: BTreeMap<String, String>) -> Self {
        let mut by_kind: BTreeMap<String, Vec<EvalRecord>> = BTreeMap::new();
        for r in &records {
            by_kind.entry(r.kind.to_string()).or_default().push(r.clone());
        }
        let per_kind = by_kind.into_iter().map(|(k, rs)| (k, metrics(&rs))).collect();
        Self { provenance, summary: metrics(&records), per_kind, records }
    }

    /// Plain-text table: overall metrics, then one block per kind.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&render_summary("all", &self.summary));
        if self.per_kind.len() > 1 {
            for (kind, s) in &self.per_kind {
                out.push_str(&render_summary(kind, s));
            }
        }
        out
    }
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

/// Renders one summary block, including the per-tier lines.
pub fn render_summary(label: &str, s: &MetricsSummary) -> String {
    let mut out = String::new();
    let line = |out: &mut String, name: &str, s: &MetricsSummary| {
        let gap = s.mean_gap.map_or_else(|| "n/a".to_string(), pct);
        let std = s.gap_std.map_or_else(|| "n/a".to_string(), pct);
        let gaps: Vec<String> = s.gap_at.iter().map(|g| format!("Gap@{}={}", g.k, pct(g.rate))).collect();
        let _ = writeln!(
            out,
            "{name:<8} instances={} feasible={} M_f={} M_o={} std={} {} time={:.0}ms",
            s.instances,
            s.feasible,
            pct(s.feasibility_rate),
            gap,
            std,
            gaps.join(" "),
            s.mean_wall_ms
        );
    };
    line(&mut out, label, s);
    for (tier, t) in &s.tiers {
        line(&mut out, &format!("  {}", tier.as_str()), t);
    }
    out
}
