//! On-disk layout of an experiment directory:
//!
//! ```text
//! out/manifest.json
//! out/runs/<run_id>.events.jsonl     one restart event per line
//! out/runs/<run_id>.trajectory.csv   evaluation_index,best_f
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::repelling::{RestartEvent, TrajectoryPoint};
use crate::restart::StrategyKind;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RUNS_DIR: &str = "runs";
pub const MANIFEST_VERSION: u32 = 1;
const TRAJECTORY_HEADER: [&str; 2] = ["evaluation_index", "best_f"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub run_id: String,
    pub problem: String,
    pub dim: usize,
    pub instance: u64,
    pub strategy: StrategyKind,
    pub label: String,
    pub coverage: Option<f64>,
    pub gamma: f64,
    pub sigma0: f64,
    pub budget: usize,
    pub seed: u64,
    pub total_evals: usize,
    pub tail_evals: usize,
    pub best_f: f64,
    pub events_file: String,
    pub trajectory_file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub config: ExperimentConfig,
    pub runs: Vec<RunEntry>,
}

pub fn events_file_name(run_id: &str) -> String {
    format!("{RUNS_DIR}/{run_id}.events.jsonl")
}

pub fn trajectory_file_name(run_id: &str) -> String {
    format!("{RUNS_DIR}/{run_id}.trajectory.csv")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn encode_events(events: &[RestartEvent]) -> Result<String> {
    let mut out = String::new();
    for e in events {
        if !e.f_mean.is_finite() || e.mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "restart {} of {} has a non-finite mean or value",
                e.restart_index, e.run_id
            )));
        }
        out.push_str(&serde_json::to_string(e).map_err(|err| Error::Parse(err.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_events(path: &Path, events: &[RestartEvent]) -> Result<()> {
    write_file(path, encode_events(events)?.as_bytes())
}

pub fn parse_event_line(line: &str) -> Result<RestartEvent> {
    serde_json::from_str(line).map_err(|e| Error::Parse(format!("event line: {e}")))
}

/// Parses a whole JSONL document; blank lines are skipped.
pub fn parse_events(text: &str) -> Result<Vec<RestartEvent>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_event_line)
        .collect()
}

pub fn read_events(path: &Path) -> Result<Vec<RestartEvent>> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))?;
    parse_events(&text)
}

pub fn encode_trajectory(points: &[TrajectoryPoint]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRAJECTORY_HEADER)
        .map_err(|e| Error::Parse(e.to_string()))?;
    for p in points {
        w.write_record([p.evaluation.to_string(), p.best_f.to_string()])
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_trajectory(path: &Path, points: &[TrajectoryPoint]) -> Result<()> {
    write_file(path, &encode_trajectory(points)?)
}

pub fn parse_trajectory(bytes: &[u8]) -> Result<Vec<TrajectoryPoint>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = r.headers().map_err(|e| Error::Parse(format!("trajectory header: {e}")))?;
    if header.iter().collect::<Vec<_>>() != TRAJECTORY_HEADER {
        return Err(Error::Parse("trajectory header must be `evaluation_index,best_f`".into()));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("trajectory row {}: {e}", i + 1)))?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("trajectory row {} has {} fields", i + 1, rec.len())));
        }
        let evaluation = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("trajectory row {}: bad evaluation index", i + 1)))?;
        let best_f = rec[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("trajectory row {}: bad value", i + 1)))?;
        out.push(TrajectoryPoint { evaluation, best_f });
    }
    Ok(out)
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryPoint>> {
    parse_trajectory(&read_file(path)?)
}

pub fn encode_manifest(m: &Manifest) -> Result<String> {
    let mut s = serde_json::to_string_pretty(m).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    write_file(&dir.join(MANIFEST_FILE), encode_manifest(m)?.as_bytes())
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let m: Manifest = serde_json::from_str(text).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
    if m.version != MANIFEST_VERSION {
        return Err(Error::Parse(format!("unsupported manifest version {}", m.version)));
    }
    Ok(m)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let bytes = read_file(&path)?;
    let text = String::from_utf8(bytes).map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))?;
    parse_manifest(&text)
}
