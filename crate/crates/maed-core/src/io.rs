//! Instance, solution and report files. Everything is JSON; convergence
//! traces are CSV (see [`crate::trace::RunTrace::write_csv`]).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Area, DecisionVector, EvaluationReport, Generator, ProblemInstance, TieLine,
    validate_instance,
};

/// Current instance-file schema version.
pub const INSTANCE_FILE_VERSION: u32 = 1;

/// On-disk form of a problem instance: the domain data plus a schema version
/// and a free-text provenance note describing where the coefficients come
/// from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub name: String,
    pub provenance: String,
    pub areas: Vec<Area>,
    pub generators: Vec<Generator>,
    pub tie_lines: Vec<TieLine>,
}

impl InstanceFile {
    pub fn from_instance(instance: &ProblemInstance, provenance: impl Into<String>) -> Self {
        Self {
            version: INSTANCE_FILE_VERSION,
            name: instance.name.clone(),
            provenance: provenance.into(),
            areas: instance.areas.clone(),
            generators: instance.generators.clone(),
            tie_lines: instance.tie_lines.clone(),
        }
    }

    pub fn into_instance(self) -> ProblemInstance {
        ProblemInstance {
            name: self.name,
            areas: self.areas,
            generators: self.generators,
            tie_lines: self.tie_lines,
        }
    }
}

/// A bare decision vector on disk, used as solver input for re-evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    /// Generator outputs (MW), instance order.
    pub p: Vec<f64>,
    /// Tie-line flows (MW), instance order.
    pub t: Vec<f64>,
    /// Optional free-text note.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl From<SolutionFile> for DecisionVector {
    fn from(s: SolutionFile) -> Self {
        DecisionVector::new(s.p, s.t)
    }
}

/// Solution report written by the solve and evaluate commands: the shape of
/// a per-unit dispatch table plus the full evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub instance: String,
    pub algo: String,
    pub seed: Option<u64>,
    /// Reported vector, re-usable as a `SolutionFile`.
    pub p: Vec<f64>,
    pub t: Vec<f64>,
    pub generation: Vec<GenerationRow>,
    pub tie_flows: Vec<TieFlowRow>,
    pub cost: f64,
    pub area_losses: Vec<f64>,
    pub balance_residual: Vec<f64>,
    pub bound_violation: f64,
    pub poz_violation: f64,
    pub tie_violation: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRow {
    pub id: String,
    pub area: String,
    pub mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieFlowRow {
    pub from: String,
    pub to: String,
    pub mw: f64,
    pub capacity: f64,
}

impl ReportFile {
    pub fn new(
        instance: &ProblemInstance,
        algo: &str,
        seed: Option<u64>,
        dv: &DecisionVector,
        report: &EvaluationReport,
    ) -> Self {
        let generation = instance
            .generators
            .iter()
            .zip(&dv.p)
            .map(|(g, &mw)| GenerationRow {
                id: g.id.clone(),
                area: instance.areas[g.area].id.clone(),
                mw,
            })
            .collect();
        let tie_flows = instance
            .tie_lines
            .iter()
            .zip(&dv.t)
            .map(|(line, &mw)| TieFlowRow {
                from: instance.areas[line.from_area].id.clone(),
                to: instance.areas[line.to_area].id.clone(),
                mw,
                capacity: line.capacity,
            })
            .collect();
        Self {
            instance: instance.name.clone(),
            algo: algo.to_string(),
            seed,
            p: dv.p.clone(),
            t: dv.t.clone(),
            generation,
            tie_flows,
            cost: report.cost,
            area_losses: report.area_losses.clone(),
            balance_residual: report.balance_residual.clone(),
            bound_violation: report.bound_violation,
            poz_violation: report.poz_violation,
            tie_violation: report.tie_violation,
            feasible: report.feasible,
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read `{path}`: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write `{path}`: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse `{path}`: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("`{path}` uses schema version {got}, expected {want}")]
    Version { path: String, got: u32, want: u32 },
    #[error("instance `{path}` failed validation:\n  {}", .issues.join("\n  "))]
    Invalid { path: String, issues: Vec<String> },
}

/// Loads and validates an instance file. Parse failures carry the JSON
/// line/column context; validation failures are aggregated.
pub fn load_instance(path: impl AsRef<Path>) -> Result<ProblemInstance, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    if file.version != INSTANCE_FILE_VERSION {
        return Err(IoError::Version {
            path: path.display().to_string(),
            got: file.version,
            want: INSTANCE_FILE_VERSION,
        });
    }
    let instance = file.into_instance();
    let issues = validate_instance(&instance);
    if !issues.is_empty() {
        return Err(IoError::Invalid {
            path: path.display().to_string(),
            issues,
        });
    }
    Ok(instance)
}

/// Serializes an instance (with its provenance note) as pretty JSON.
pub fn save_instance(
    path: impl AsRef<Path>,
    instance: &ProblemInstance,
    provenance: &str,
) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = InstanceFile::from_instance(instance, provenance);
    let text = serde_json::to_string_pretty(&file).expect("instance serializes");
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_solution(path: impl AsRef<Path>) -> Result<SolutionFile, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a file atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: impl AsRef<Path>, contents: &str) -> Result<(), IoError> {
    let path = path.as_ref();
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().map_or("out".into(), |n| n.to_string_lossy()),
        std::process::id()
    ));
    let write_err = |source| IoError::Write {
        path: path.display().to_string(),
        source,
    };
    fs::write(&tmp, contents).map_err(write_err)?;
    fs::rename(&tmp, path).map_err(write_err)
}
