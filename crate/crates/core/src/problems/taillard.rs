//! Reader and writer for Taillard-style job shop files.
//!
//! The layout is a header line starting with the job and machine counts,
//! followed by a `J x M` block of processing times and a `J x M` block of
//! machine ids (1-based in the published benchmark files). Label lines such
//! as `Times` or `Machines` and extra header fields (seeds, bounds) are
//! tolerated.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Instance, Payload, ProblemError, ProblemKind, SchedulingInstance};

pub fn parse_taillard(text: &str) -> Result<Instance, ProblemError> {
    let mut rows: Vec<(usize, Vec<u64>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let nums: Option<Vec<u64>> = tokens.iter().map(|t| t.parse::<u64>().ok()).collect();
        match nums {
            Some(nums) => rows.push((idx + 1, nums)),
            // Label lines ("Times", "Nb of jobs, ...") carry no data.
            None if tokens.iter().all(|t| t.parse::<f64>().is_err()) => continue,
            None => {
                return Err(ProblemError::Malformed {
                    line: idx + 1,
                    message: format!("non-integer value in `{}`", line.trim()),
                })
            }
        }
    }

    let Some((header_line, header)) = rows.first() else {
        return Err(ProblemError::Malformed { line: 0, message: "empty file".into() });
    };
    if header.len() < 2 {
        return Err(ProblemError::Malformed { line: *header_line, message: "header needs job and machine counts".into() });
    }
    let (jobs, machines) = (header[0] as usize, header[1] as usize);
    if jobs == 0 || machines == 0 {
        return Err(ProblemError::Malformed { line: *header_line, message: "zero jobs or machines".into() });
    }

    let body = &rows[1..];
    if body.len() != 2 * jobs {
        return Err(ProblemError::Malformed {
            line: body.last().map_or(*header_line, |r| r.0),
            message: format!("expected {} data rows (times + machines), found {}", 2 * jobs, body.len()),
        });
    }
    for (line, row) in body {
        if row.len() != machines {
            return Err(ProblemError::Malformed {
                line: *line,
                message: format!("expected {machines} values, found {}", row.len()),
            });
        }
    }

    let ptimes: Vec<Vec<u32>> = body[..jobs]
        .iter()
        .map(|(_, row)| row.iter().map(|&v| v as u32).collect())
        .collect();
    let raw_order = &body[jobs..];
    let one_based = raw_order.iter().all(|(_, row)| row.iter().all(|&m| m >= 1));
    let machine_order: Vec<Vec<usize>> = raw_order
        .iter()
        .map(|(_, row)| row.iter().map(|&m| m as usize - usize::from(one_based)).collect())
        .collect();

    let mut meta = BTreeMap::new();
    meta.insert("source".to_string(), "taillard".to_string());
    meta.insert("machine_ids".to_string(), if one_based { "1-based" } else { "0-based" }.to_string());
    let inst = Instance {
        kind: ProblemKind::Jssp,
        id: format!("taillard-{jobs}x{machines}"),
        seed: None,
        meta,
        payload: Payload::Scheduling(SchedulingInstance {
            num_jobs: jobs,
            num_machines: machines,
            ptimes,
            machine_order: Some(machine_order),
        }),
    };
    inst.validate()?;
    Ok(inst)
}

/// Writes a JSSP instance in the same layout, with 1-based machine ids.
pub fn write_taillard(inst: &SchedulingInstance) -> Result<String, ProblemError> {
    let order = inst
        .machine_order
        .as_ref()
        .ok_or_else(|| ProblemError::InvalidInstance("JSSP instance without machine order".into()))?;
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", inst.num_jobs, inst.num_machines);
    let _ = writeln!(out, "Times");
    for row in &inst.ptimes {
        let _ = writeln!(out, "{}", join(row.iter().map(|v| v.to_string())));
    }
    let _ = writeln!(out, "Machines");
    for row in order {
        let _ = writeln!(out, "{}", join(row.iter().map(|m| (m + 1).to_string())));
    }
    Ok(out)
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(" ")
}
