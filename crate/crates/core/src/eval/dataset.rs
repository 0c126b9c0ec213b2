//! Supervised fine-tuning export: one JSON object per line with the TAI
//! instruction and input and the formatted, verified label.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::problems::{Instance, ProblemKind, Solution};
use crate::tai::{encode, format_solution};
use crate::verify::{check, objective};

/// Relative tolerance between a stated label objective and the recomputed one.
pub const OBJECTIVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftRecord {
    pub instruction: String,
    pub input: String,
    pub output: String,
    pub kind: ProblemKind,
    pub instance_id: String,
}

/// Builds one record. The label must be feasible, and `stated_objective`,
/// when given, must agree with the recomputed objective.
pub fn sft_record(inst: &Instance, label: &Solution, stated_objective: Option<f64>, feature_k: usize) -> Result<SftRecord, EvalError> {
    let report = check(inst, label);
    if !report.feasible {
        return Err(EvalError::InfeasibleLabel {
            instance_id: inst.id.clone(),
            failed: report.failed().into_iter().map(str::to_string).collect(),
        });
    }
    let recomputed = objective(inst, label)
        .map_err(|e| EvalError::InvalidConfig(format!("label for {}: {e}", inst.id)))?
        .value;
    if let Some(stated) = stated_objective {
        if (stated - recomputed).abs() > OBJECTIVE_TOLERANCE * recomputed.abs().max(1.0) {
            return Err(EvalError::ObjectiveMismatch { instance_id: inst.id.clone(), stated, recomputed });
        }
    }
    let tai = encode(inst, feature_k);
    Ok(SftRecord {
        instruction: tai.instruction,
        input: tai.input,
        output: format_solution(label, recomputed, inst.kind)?,
        kind: inst.kind,
        instance_id: inst.id.clone(),
    })
}

/// Writes records as JSON lines and returns how many were written. Stops
/// at the first invalid label.
pub fn export_sft_dataset<'a, W: Write>(
    labelled: impl IntoIterator<Item = (&'a Instance, &'a Solution, Option<f64>)>,
    feature_k: usize,
    mut out: W,
) -> Result<usize, EvalError> {
    let mut count = 0;
    for (inst, label, stated) in labelled {
        let record = sft_record(inst, label, stated, feature_k)?;
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
        count += 1;
    }
    out.flush()?;
    Ok(count)
}
