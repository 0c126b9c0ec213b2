//! Feasibility/optimality rewards, group-relative advantages and the
//! clipped policy-gradient surrogate, as pure arithmetic.
//!
//! The feasibility reward is `ω₀ + Σ ωᵢ·cᵢ` when an answer could be
//! extracted and 0 otherwise. The optimality reward is `α/(1 + gap)` for
//! minimization kinds and `α·value/reference` for OP and MIS; it is 0
//! unless the candidate is fully feasible.

use serde::{Deserialize, Serialize};

use crate::problems::{ProblemKind, Sense};
use crate::verify::FeasibilityReport;

/// The weight tables shipped as a standalone file for other trainers.
pub const REWARD_WEIGHTS_JSON: &str = include_str!("../reward_weights.json");

/// Ratio-form optimality rewards are clamped to this multiple of α.
pub const RATIO_CLAMP: f64 = 1.05;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RewardError {
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("no reference objective available")]
    MissingReference,
    #[error("reference objective {0} must be positive for the ratio form")]
    NonPositiveReference(f64),
    #[error("group of {0} rewards is too small (need at least 2)")]
    GroupTooSmall(usize),
    #[error("probability ratio {0} must be positive")]
    NonPositiveRatio(f64),
    #[error("KL term {0} must be non-negative")]
    NegativeKl(f64),
    #[error("invalid reward configuration: {0}")]
    InvalidConfig(String),
}

/// `[ω₀, ω₁, …]`: format weight followed by one weight per constraint in
/// the verifier's canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub omega: Vec<f64>,
}

impl RewardWeights {
    pub fn for_kind(kind: ProblemKind) -> Self {
        let omega: &[f64] = match kind {
            ProblemKind::Tsp => &[0.2, 0.5, 0.3],
            ProblemKind::Op => &[0.2, 0.1, 0.2, 0.5],
            ProblemKind::Cvrp => &[0.2, 0.1, 0.1, 0.6],
            ProblemKind::Mis => &[0.2, 0.8],
            ProblemKind::Mvc => &[0.2, 0.8],
            ProblemKind::Pfsp => &[0.2, 0.8],
            ProblemKind::Jssp => &[0.2, 0.2, 0.2, 0.4],
        };
        Self { omega: omega.to_vec() }
    }

    pub fn validate(&self) -> Result<(), RewardError> {
        if self.omega.is_empty() || self.omega.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(RewardError::InvalidConfig("weights must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.omega.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub alpha: f64,
    pub epsilon_clip: f64,
    pub beta_kl: f64,
    pub group_size: usize,
    pub std_floor: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self { alpha: 1.0, epsilon_clip: 0.1, beta_kl: 0.05, group_size: 8, std_floor: 1e-8 }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        let bad = |m: &str| Err(RewardError::InvalidConfig(m.into()));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.epsilon_clip > 0.0 && self.epsilon_clip < 1.0) {
            return bad("epsilon_clip must lie in (0, 1)");
        }
        if !(self.beta_kl >= 0.0 && self.beta_kl.is_finite()) {
            return bad("beta_kl must be non-negative");
        }
        if self.group_size < 2 {
            return bad("group_size must be at least 2");
        }
        if !(self.std_floor >= 0.0) {
            return bad("std_floor must be non-negative");
        }
        Ok(())
    }
}

/// `ω₀ + Σ ωᵢ·cᵢ` when ζ = 1, else 0.
pub fn feasibility_reward(report: &FeasibilityReport, w: &RewardWeights) -> Result<f64, RewardError> {
    if report.constraints.len() + 1 != w.omega.len() {
        return Err(RewardError::LengthMismatch { expected: w.omega.len() - 1, found: report.constraints.len() });
    }
    if !report.zeta {
        return Ok(0.0);
    }
    Ok(w.omega[0]
        + report
            .constraints
            .iter()
            .zip(&w.omega[1..])
            .map(|(c, w)| if c.satisfied { *w } else { 0.0 })
            .sum::<f64>())
}

/// Relative optimality gap, positive when `value` is worse than
/// `reference`. A zero reference falls back to the absolute difference.
pub fn relative_gap(value: f64, reference: f64, sense: Sense) -> f64 {
    let diff = match sense {
        Sense::Minimize => value - reference,
        Sense::Maximize => reference - value,
    };
    if reference == 0.0 {
        diff
    } else {
        diff / reference.abs()
    }
}

/// Optimality reward of a feasible candidate: `α/(1 + gap)` for
/// minimization kinds, `α·value/reference` (clamped to `[0, 1.05α]`) for
/// OP and MIS.
pub fn optimality_reward(value: f64, reference: f64, kind: ProblemKind, cfg: &RewardConfig) -> Result<f64, RewardError> {
    if !reference.is_finite() {
        return Err(RewardError::MissingReference);
    }
    match kind {
        ProblemKind::Op | ProblemKind::Mis => {
            if reference < 0.0 || (reference == 0.0 && value < 0.0) {
                return Err(RewardError::NonPositiveReference(reference));
            }
            let raw = if reference == 0.0 {
                // Nothing was collectable; matching it is optimal.
                if value == 0.0 { cfg.alpha } else { f64::INFINITY }
            } else {
                cfg.alpha * value / reference
            };
            let cap = RATIO_CLAMP * cfg.alpha;
            if raw > cap || raw < 0.0 {
                log::warn!("{kind} optimality reward {raw} outside [0, {cap}] (reference {reference}, value {value}); clamping");
            }
            Ok(raw.clamp(0.0, cap))
        }
        _ => {
            let gap = relative_gap(value, reference, Sense::Minimize);
            if gap <= -1.0 {
                return Err(RewardError::NonPositiveReference(reference));
            }
            Ok(cfg.alpha / (1.0 + gap))
        }
    }
}

/// Both reward terms and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub feasibility: f64,
    pub optimality: f64,
    pub total: f64,
}

/// `R_f + R_o`, where `R_o = 0` unless the report is fully feasible.
/// `value` should be the verifier-recomputed objective.
pub fn total_reward(
    report: &FeasibilityReport,
    value: Option<f64>,
    reference: Option<f64>,
    kind: ProblemKind,
    w: &RewardWeights,
    cfg: &RewardConfig,
) -> Result<RewardBreakdown, RewardError> {
    let feasibility = feasibility_reward(report, w)?;
    let optimality = if report.feasible {
        let reference = reference.ok_or(RewardError::MissingReference)?;
        let value = value.ok_or(RewardError::MissingReference)?;
        optimality_reward(value, reference, kind, cfg)?
    } else {
        0.0
    };
    Ok(RewardBreakdown { feasibility, optimality, total: feasibility + optimality })
}

/// `(Rᵢ − mean)/std` with the population standard deviation; all zeros
/// when the std falls below `std_floor`.
pub fn group_advantages(rewards: &[f64], std_floor: f64) -> Result<Vec<f64>, RewardError> {
    if rewards.len() < 2 {
        return Err(RewardError::GroupTooSmall(rewards.len()));
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < std_floor || std == 0.0 {
        return Ok(vec![0.0; rewards.len()]);
    }
    Ok(rewards.iter().map(|r| (r - mean) / std).collect())
}

/// `(1/S)·Σ min(rᵢ·Aᵢ, clip(rᵢ, 1−ε, 1+ε)·Aᵢ) − β·kl`.
pub fn grpo_surrogate(ratios: &[f64], advantages: &[f64], kl: f64, cfg: &RewardConfig) -> Result<f64, RewardError> {
    if ratios.len() != advantages.len() {
        return Err(RewardError::LengthMismatch { expected: ratios.len(), found: advantages.len() });
    }
    if ratios.is_empty() {
        return Err(RewardError::GroupTooSmall(0));
    }
    if let Some(&r) = ratios.iter().find(|&&r| !(r > 0.0)) {
        return Err(RewardError::NonPositiveRatio(r));
    }
    if !(kl >= 0.0) {
        return Err(RewardError::NegativeKl(kl));
    }
    let eps = cfg.epsilon_clip;
    let sum: f64 = ratios
        .iter()
        .zip(advantages)
        .map(|(&r, &a)| (r * a).min(r.clamp(1.0 - eps, 1.0 + eps) * a))
        .sum();
    Ok(sum / ratios.len() as f64 - cfg.beta_kl * kl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{constraint_names, ConstraintResult};
    use proptest::prelude::*;

    fn report(kind: ProblemKind, flags: &[bool]) -> FeasibilityReport {
        FeasibilityReport {
            zeta: true,
            constraints: constraint_names(kind)
                .iter()
                .zip(flags)
                .map(|(n, &s)| ConstraintResult { name: (*n).into(), satisfied: s })
                .collect(),
            feasible: flags.iter().all(|&s| s),
            margins: vec![],
        }
    }

    #[test]
    fn weight_tables() {
        let expected: [(ProblemKind, &[f64]); 7] = [
            (ProblemKind::Tsp, &[0.2, 0.5, 0.3]),
            (ProblemKind::Op, &[0.2, 0.1, 0.2, 0.5]),
            (ProblemKind::Cvrp, &[0.2, 0.1, 0.1, 0.6]),
            (ProblemKind::Mis, &[0.2, 0.8]),
            (ProblemKind::Mvc, &[0.2, 0.8]),
            (ProblemKind::Pfsp, &[0.2, 0.8]),
            (ProblemKind::Jssp, &[0.2, 0.2, 0.2, 0.4]),
        ];
        for (kind, omega) in expected {
            let w = RewardWeights::for_kind(kind);
            assert_eq!(w.omega, omega, "{kind}");
            assert_eq!(w.omega.len(), constraint_names(kind).len() + 1);
            assert!((w.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exported_file_matches_tables() {
        let doc: serde_json::Value = serde_json::from_str(REWARD_WEIGHTS_JSON).unwrap();
        for kind in ProblemKind::ALL {
            let entry = &doc["kinds"][kind.as_str()];
            let omega: Vec<f64> = serde_json::from_value(entry["omega"].clone()).unwrap();
            let names: Vec<String> = serde_json::from_value(entry["constraints"].clone()).unwrap();
            assert_eq!(omega, RewardWeights::for_kind(kind).omega);
            assert_eq!(names, constraint_names(kind));
        }
    }

    #[test]
    fn feasibility_examples() {
        let tsp = RewardWeights::for_kind(ProblemKind::Tsp);
        assert!((feasibility_reward(&report(ProblemKind::Tsp, &[true, true]), &tsp).unwrap() - 1.0).abs() < 1e-12);
        let cvrp = RewardWeights::for_kind(ProblemKind::Cvrp);
        assert!((feasibility_reward(&report(ProblemKind::Cvrp, &[true, true, false]), &cvrp).unwrap() - 0.4).abs() < 1e-12);
        for kind in ProblemKind::ALL {
            let r = FeasibilityReport::format_failure(kind);
            assert_eq!(feasibility_reward(&r, &RewardWeights::for_kind(kind)).unwrap(), 0.0);
        }
        assert!(matches!(feasibility_reward(&report(ProblemKind::Tsp, &[true, true]), &cvrp), Err(RewardError::LengthMismatch { .. })));
    }

    #[test]
    fn optimality_examples() {
        let cfg = RewardConfig::default();
        assert_eq!(optimality_reward(10.0, 10.0, ProblemKind::Tsp, &cfg).unwrap(), 1.0);
        assert!((optimality_reward(12.5, 10.0, ProblemKind::Tsp, &cfg).unwrap() - 0.8).abs() < 1e-12);
        assert!((optimality_reward(98.0, 100.0, ProblemKind::Op, &cfg).unwrap() - 0.98).abs() < 1e-12);
        assert_eq!(optimality_reward(120.0, 100.0, ProblemKind::Op, &cfg).unwrap(), 1.05);
        assert_eq!(optimality_reward(0.0, 0.0, ProblemKind::Op, &cfg).unwrap(), 1.0);
        assert_eq!(optimality_reward(1.0, f64::NAN, ProblemKind::Tsp, &cfg), Err(RewardError::MissingReference));
    }

    #[test]
    fn total_examples() {
        let (cfg, w) = (RewardConfig::default(), RewardWeights::for_kind(ProblemKind::Tsp));
        let ok = report(ProblemKind::Tsp, &[true, true]);
        assert!((total_reward(&ok, Some(10.0), Some(10.0), ProblemKind::Tsp, &w, &cfg).unwrap().total - 2.0).abs() < 1e-12);
        assert!((total_reward(&ok, Some(20.0), Some(10.0), ProblemKind::Tsp, &w, &cfg).unwrap().total - 1.5).abs() < 1e-12);
        let fail = FeasibilityReport::format_failure(ProblemKind::Tsp);
        assert_eq!(total_reward(&fail, None, Some(10.0), ProblemKind::Tsp, &w, &cfg).unwrap().total, 0.0);
        // Parsed but infeasible: only the feasibility term counts.
        let partial = report(ProblemKind::Tsp, &[false, true]);
        let b = total_reward(&partial, Some(5.0), Some(10.0), ProblemKind::Tsp, &w, &cfg).unwrap();
        assert_eq!(b.optimality, 0.0);
        assert!((b.total - 0.5).abs() < 1e-12);
    }

    #[test]
    fn advantage_examples() {
        let a = group_advantages(&[1.8, 1.0, 0.2, 1.0], 1e-8).unwrap();
        let expected = [2f64.sqrt(), 0.0, -(2f64.sqrt()), 0.0];
        for (x, e) in a.iter().zip(expected) {
            assert!((x - e).abs() < 1e-4);
        }
        assert_eq!(group_advantages(&[0.7; 8], 1e-8).unwrap(), vec![0.0; 8]);
        assert_eq!(group_advantages(&[1.0], 1e-8), Err(RewardError::GroupTooSmall(1)));
    }

    #[test]
    fn surrogate_examples() {
        let cfg = RewardConfig::default();
        assert!((grpo_surrogate(&[1.3], &[1.0], 0.0, &cfg).unwrap() - 1.1).abs() < 1e-12);
        assert!((grpo_surrogate(&[0.5], &[-1.0], 0.0, &cfg).unwrap() + 0.9).abs() < 1e-12);
        let adv = [0.3, -1.2, 2.0];
        let mean = adv.iter().sum::<f64>() / 3.0;
        assert!((grpo_surrogate(&[1.0; 3], &adv, 0.0, &cfg).unwrap() - mean).abs() < 1e-12);
        assert!(matches!(grpo_surrogate(&[0.0], &[1.0], 0.0, &cfg), Err(RewardError::NonPositiveRatio(_))));
        assert!(matches!(grpo_surrogate(&[1.0, 1.0], &[1.0], 0.0, &cfg), Err(RewardError::LengthMismatch { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(RewardConfig::default().validate().is_ok());
        assert!(RewardConfig { epsilon_clip: 1.0, ..Default::default() }.validate().is_err());
        assert!(RewardConfig { group_size: 1, ..Default::default() }.validate().is_err());
        assert!(RewardConfig { alpha: 0.0, ..Default::default() }.validate().is_err());
    }

    proptest! {
        #[test]
        fn standardized_advantages(rewards in prop::collection::vec(-5.0f64..5.0, 2..16)) {
            let a = group_advantages(&rewards, 1e-8).unwrap();
            let n = a.len() as f64;
            let mean = a.iter().sum::<f64>() / n;
            let var = a.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            if a.iter().any(|&x| x != 0.0) {
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((var - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn feasibility_monotone_and_bounded(kind_idx in 0usize..7, bits in any::<u8>(), flip in 0usize..3) {
            let kind = ProblemKind::ALL[kind_idx];
            let m = constraint_names(kind).len();
            let flags: Vec<bool> = (0..m).map(|i| bits & (1 << i) != 0).collect();
            let w = RewardWeights::for_kind(kind);
            let base = feasibility_reward(&report(kind, &flags), &w).unwrap();
            prop_assert!(base >= 0.0 && base <= w.total() + 1e-12);
            let mut more = flags.clone();
            more[flip % m] = true;
            prop_assert!(feasibility_reward(&report(kind, &more), &w).unwrap() >= base);
        }

        #[test]
        fn optimality_monotone_in_gap(reference in 1.0f64..1e4, g1 in 0.0f64..3.0, g2 in 0.0f64..3.0) {
            let cfg = RewardConfig::default();
            let (lo, hi) = if g1 < g2 { (g1, g2) } else { (g2, g1) };
            let r_lo = optimality_reward(reference * (1.0 + lo), reference, ProblemKind::Tsp, &cfg).unwrap();
            let r_hi = optimality_reward(reference * (1.0 + hi), reference, ProblemKind::Tsp, &cfg).unwrap();
            prop_assert!(r_lo >= r_hi - 1e-12);
            prop_assert!(r_lo <= cfg.alpha + 1e-12 && r_hi > 0.0);
        }

        #[test]
        fn surrogate_unclipped_region_and_kl_slope(
            pairs in prop::collection::vec((0.9f64..=1.1, -3.0f64..3.0), 1..16),
            kl in 0.0f64..2.0,
        ) {
            let cfg = RewardConfig::default();
            let (r, a): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let base = grpo_surrogate(&r, &a, 0.0, &cfg).unwrap();
            let plain = r.iter().zip(&a).map(|(r, a)| r * a).sum::<f64>() / r.len() as f64;
            prop_assert!((base - plain).abs() < 1e-12);
            let with_kl = grpo_surrogate(&r, &a, kl, &cfg).unwrap();
            prop_assert!((base - with_kl - cfg.beta_kl * kl).abs() < 1e-12);
        }
    }
}
