//! Reader for the symmetric EUC_2D subset of the TSPLIB format.

use std::collections::BTreeMap;

use super::{Instance, Payload, Point, ProblemError, ProblemKind, RoutingInstance};

const MAX_NODES: usize = 1000;

/// Parses a TSPLIB `.tsp` file with `EDGE_WEIGHT_TYPE: EUC_2D`.
///
/// Node ids in the file are 1-based; the resulting coordinates are stored
/// 0-based in file order.
pub fn parse_tsplib(text: &str) -> Result<Instance, ProblemError> {
    let mut name = None;
    let mut dimension = None;
    let mut weight_type = None;
    let mut coords = Vec::new();
    let mut in_coords = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_coords {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() == 3 && fields[0].parse::<usize>().is_ok() {
                let x = parse_num(fields[1], lineno)?;
                let y = parse_num(fields[2], lineno)?;
                coords.push(Point::new(x, y));
                continue;
            }
            // A new keyword section ends the coordinate block.
            in_coords = false;
        }
        if line.starts_with("NODE_COORD_SECTION") {
            if weight_type.as_deref() != Some("EUC_2D") {
                return Err(ProblemError::Unsupported(format!(
                    "edge weight type {} (only EUC_2D is supported)",
                    weight_type.as_deref().unwrap_or("<missing>")
                )));
            }
            in_coords = true;
            continue;
        }
        if line.ends_with("_SECTION") {
            return Err(ProblemError::Unsupported(format!("section {line}")));
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(ProblemError::Malformed {
                line: lineno,
                message: format!("expected `KEY: value`, got `{line}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "NAME" => name = Some(value.to_string()),
            "TYPE" if value != "TSP" => {
                return Err(ProblemError::Unsupported(format!("problem type {value}")));
            }
            "DIMENSION" => {
                dimension = Some(value.parse::<usize>().map_err(|_| ProblemError::Malformed {
                    line: lineno,
                    message: format!("bad dimension `{value}`"),
                })?)
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" {
                    return Err(ProblemError::Unsupported(format!(
                        "edge weight type {value} (only EUC_2D is supported)"
                    )));
                }
                weight_type = Some(value.to_string());
            }
            _ => {}
        }
    }

    let Some(dimension) = dimension else {
        return Err(ProblemError::Malformed { line: 0, message: "missing DIMENSION".into() });
    };
    if coords.len() != dimension {
        return Err(ProblemError::DimensionMismatch { expected: dimension, found: coords.len() });
    }
    if !(2..=MAX_NODES).contains(&dimension) {
        return Err(ProblemError::Unsupported(format!("{dimension} nodes (supported: 2..={MAX_NODES})")));
    }

    let name = name.unwrap_or_else(|| "tsplib".to_string());
    let mut meta = BTreeMap::new();
    meta.insert("source".to_string(), "tsplib".to_string());
    meta.insert("name".to_string(), name.clone());
    let inst = Instance {
        kind: ProblemKind::Tsp,
        id: name,
        seed: None,
        meta,
        payload: Payload::Routing(RoutingInstance::tsp(coords)),
    };
    inst.validate()?;
    Ok(inst)
}

fn parse_num(s: &str, line: usize) -> Result<f64, ProblemError> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ProblemError::Malformed { line, message: format!("bad coordinate `{s}`") })
}
