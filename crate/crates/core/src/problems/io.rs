//! On-disk documents: instance files and reference-solution files.
//!
//! Both are pretty-printed JSON with a fixed field order, so two runs that
//! produce the same values produce the same bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Instance, Payload, ProblemError, ProblemKind, Solution};

pub const INSTANCE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub kind: ProblemKind,
    pub id: String,
    pub seed: Option<u64>,
    pub meta: BTreeMap<String, String>,
    pub payload: Payload,
}

impl From<Instance> for InstanceFile {
    fn from(inst: Instance) -> Self {
        Self {
            schema_version: INSTANCE_SCHEMA_VERSION,
            kind: inst.kind,
            id: inst.id,
            seed: inst.seed,
            meta: inst.meta,
            payload: inst.payload,
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = ProblemError;

    fn try_from(f: InstanceFile) -> Result<Self, Self::Error> {
        if f.schema_version != INSTANCE_SCHEMA_VERSION {
            return Err(ProblemError::Unsupported(format!("instance schema version {}", f.schema_version)));
        }
        let inst = Instance {
            kind: f.kind,
            id: f.id,
            seed: f.seed,
            meta: f.meta,
            payload: f.payload,
        };
        inst.validate()?;
        Ok(inst)
    }
}

impl Instance {
    pub fn to_json(&self) -> String {
        let file = InstanceFile::from(self.clone());
        let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<(), ProblemError> {
    std::fs::write(path, inst.to_json())?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<Instance, ProblemError> {
    Instance::from_json(&std::fs::read_to_string(path)?)
}

/// Where a reference solution came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SolutionSource {
    /// Proven optimal by exhaustive search.
    Oracle,
    /// Read from an external solver's output.
    Imported,
    /// Produced by a named heuristic.
    Heuristic(String),
}

impl fmt::Display for SolutionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionSource::Oracle => f.write_str("oracle"),
            SolutionSource::Imported => f.write_str("imported"),
            SolutionSource::Heuristic(name) => write!(f, "heuristic:{name}"),
        }
    }
}

impl FromStr for SolutionSource {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(SolutionSource::Oracle),
            "imported" => Ok(SolutionSource::Imported),
            other => match other.strip_prefix("heuristic:") {
                Some(name) if !name.is_empty() => Ok(SolutionSource::Heuristic(name.to_string())),
                _ => Err(ProblemError::Unsupported(format!("solution source `{other}`"))),
            },
        }
    }
}

impl Serialize for SolutionSource {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SolutionSource {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A solution stored next to its instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub instance_id: String,
    pub solution: Solution,
    pub objective: f64,
    pub source: SolutionSource,
    /// Tool version, command line and seed of the producing run.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub provenance: BTreeMap<String, String>,
}

impl ReferenceSolution {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_instance, GenConfig};

    #[test]
    fn instance_file_field_order_is_canonical() {
        let inst = gen_instance(ProblemKind::Op, &GenConfig::default_for(ProblemKind::Op, 5).with_size(10, 10)).unwrap();
        let json = inst.to_json();
        let keys = ["\"schema_version\"", "\"kind\"", "\"id\"", "\"seed\"", "\"meta\"", "\"payload\""];
        let positions: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert_eq!(Instance::from_json(&json).unwrap(), inst);
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let inst = gen_instance(ProblemKind::Tsp, &GenConfig::default_for(ProblemKind::Tsp, 5)).unwrap();
        let json = inst.to_json().replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(Instance::from_json(&json).is_err());
    }

    #[test]
    fn source_strings() {
        for s in ["oracle", "imported", "heuristic:nn"] {
            assert_eq!(s.parse::<SolutionSource>().unwrap().to_string(), s);
        }
        assert!("heuristic:".parse::<SolutionSource>().is_err());
        assert!("lkh".parse::<SolutionSource>().is_err());
    }

    #[test]
    fn reference_solution_document() {
        let r = ReferenceSolution {
            instance_id: "mis-10-1".into(),
            solution: Solution::VertexSet([0, 2, 3].into_iter().collect()),
            objective: 3.0,
            source: SolutionSource::Oracle,
            provenance: BTreeMap::new(),
        };
        let json = r.to_json();
        assert!(json.contains("\"source\": \"oracle\""));
        assert_eq!(ReferenceSolution::from_json(&json).unwrap(), r);
    }
}
