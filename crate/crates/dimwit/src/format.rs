//! JSON files: configurations, experiment records and search results.

use std::path::Path;

use dimwit_core::extremal::{strategy_prob_matrix, EffectClass};
use dimwit_core::sampler::{CellCount, JobRecord, CIRCUITS};
use dimwit_core::{ConfigSet, ExperimentRecord, Field, SearchResult};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;

/// Angle set as stored on disk. Angles are kept exactly as written so a
/// file survives a read/write cycle byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub id: String,
    /// `[α, β]` for each of the five preparations.
    pub preparations: [[f64; 2]; 5],
    /// `[θ, φ]` for each of the four measurements.
    pub measurements: [[f64; 2]; 4],
}

impl ConfigFile {
    pub fn from_config(config: &ConfigSet) -> Self {
        let (preparations, measurements) = config.radians();
        ConfigFile {
            id: config.id().to_owned(),
            preparations,
            measurements,
        }
    }

    pub fn to_config(&self) -> Result<ConfigSet> {
        Ok(ConfigSet::from_radians(
            self.id.clone(),
            self.preparations,
            self.measurements,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobFile {
    pub job_id: String,
    pub shots: u64,
    pub repetitions: usize,
    /// Per repetition, `[ones, shots]` for the 20 circuits in row-major
    /// `(k, j)` order.
    pub counts: Vec<[[u64; 2]; CIRCUITS]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordFile {
    pub config_id: String,
    pub device: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub jobs: Vec<JobFile>,
}

impl From<&ExperimentRecord> for RecordFile {
    fn from(r: &ExperimentRecord) -> Self {
        RecordFile {
            config_id: r.config_id.clone(),
            device: r.device.clone(),
            timestamp: r.timestamp.clone(),
            jobs: r
                .jobs
                .iter()
                .map(|j| JobFile {
                    job_id: j.job_id.clone(),
                    shots: j.shots,
                    repetitions: j.repetitions,
                    counts: j.counts.iter().map(|rep| rep.map(|c| [c.ones, c.shots])).collect(),
                })
                .collect(),
        }
    }
}

impl From<&RecordFile> for ExperimentRecord {
    fn from(r: &RecordFile) -> Self {
        ExperimentRecord {
            config_id: r.config_id.clone(),
            device: r.device.clone(),
            timestamp: r.timestamp.clone(),
            jobs: r
                .jobs
                .iter()
                .map(|j| JobRecord {
                    job_id: j.job_id.clone(),
                    shots: j.shots,
                    repetitions: j.repetitions,
                    counts: j
                        .counts
                        .iter()
                        .map(|rep| rep.map(|[ones, shots]| CellCount { ones, shots }))
                        .collect(),
                })
                .collect(),
        }
    }
}

fn parse<T: DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        Error::Schema {
            path: path.into(),
            field,
            message: e.into_inner().to_string(),
        }
    })
}

/// Reads a configuration file. Any problem with its content is a usage
/// error, reported with the offending field.
pub fn read_config(path: &Path) -> Result<(ConfigFile, ConfigSet)> {
    let bytes = fsutil::read(path)?;
    let file: ConfigFile = parse(path, &bytes).map_err(|e| match e {
        Error::Schema { path, field, message } => Error::Usage(format!("{}: {field}: {message}", path.display())),
        other => other,
    })?;
    let config = file
        .to_config()
        .map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
    Ok((file, config))
}

pub fn config_json(file: &ConfigFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("config serializes");
    s.push('\n');
    s
}

/// Reads and validates a record file.
pub fn read_record(path: &Path) -> Result<ExperimentRecord> {
    let bytes = fsutil::read(path)?;
    let file: RecordFile = parse(path, &bytes)?;
    let record = ExperimentRecord::from(&file);
    record.validate().map_err(|e| {
        let text = match e {
            dimwit_core::Error::Domain(msg) => msg,
            other => other.to_string(),
        };
        let (field, message) = text.split_once(": ").unwrap_or(("", &text));
        Error::Schema {
            path: path.into(),
            field: field.to_owned(),
            message: message.to_owned(),
        }
    })?;
    Ok(record)
}

pub fn record_json(record: &ExperimentRecord) -> String {
    let mut s = serde_json::to_string(&RecordFile::from(record)).expect("record serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchExport {
    pub dim: usize,
    pub field: String,
    pub effect_class: String,
    pub seed: u64,
    pub restarts: usize,
    pub best_w: f64,
    pub best_restart: usize,
    pub converged: bool,
    pub converged_restarts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// Probability matrix of the best strategy, last row all ones.
    pub prob_matrix: [[f64; 5]; 5],
    /// State amplitudes as `[re, im]` pairs.
    pub preparations: Vec<Vec<[f64; 2]>>,
    /// Effects as row-major `[re, im]` matrices.
    pub effects: Vec<Vec<Vec<[f64; 2]>>>,
    pub restart_values: Vec<f64>,
}

pub fn field_name(field: Field) -> &'static str {
    match field {
        Field::Real => "real",
        Field::Complex => "complex",
    }
}

pub fn effect_class_name(class: EffectClass) -> &'static str {
    match class {
        EffectClass::Projective => "projective",
        EffectClass::General => "general",
    }
}

impl SearchExport {
    pub fn new(problem: &dimwit_core::ExtremalProblem, seed: u64, result: &SearchResult) -> Result<Self> {
        let point = &result.best_point;
        let d = point.dim();
        Ok(SearchExport {
            dim: problem.d,
            field: field_name(problem.field).into(),
            effect_class: effect_class_name(problem.effect_class).into(),
            seed,
            restarts: result.restarts,
            best_w: result.best_w,
            best_restart: result.best_restart,
            converged: result.converged,
            converged_restarts: result.converged_restarts,
            target: problem.known_maximum(),
            prob_matrix: *strategy_prob_matrix(point)?.as_array(),
            preparations: point
                .preparations
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            effects: point
                .effects
                .iter()
                .map(|m| {
                    (0..d)
                        .map(|i| (0..d).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
                        .collect()
                })
                .collect(),
            restart_values: result.restart_values.clone(),
        })
    }
}

pub fn search_json(export: &SearchExport) -> String {
    let mut s = serde_json::to_string_pretty(export).expect("search result serializes");
    s.push('\n');
    s
}
