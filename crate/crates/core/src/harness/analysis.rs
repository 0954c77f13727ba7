//! Offline analysis of experiment directories: per-run RRF with grouped
//! summaries, and fixed-target ECDF curves.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::logs::{read_events, read_manifest, read_trajectory, RunEntry};
use crate::benchmarks::make_problem;
use crate::error::{Error, Result};
use crate::hill_valley::HvConfig;
use crate::redundancy::{classify, rrf, RestartRecord, RunLedger};
use crate::repelling::{RestartEvent, TrajectoryPoint};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RrfRow {
    pub run_id: String,
    pub function: String,
    pub dimension: usize,
    pub instance: u64,
    pub strategy: String,
    pub rrf: f64,
    pub n_restarts: usize,
    pub n_redundant: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RrfSummary {
    pub function: String,
    pub dimension: usize,
    pub strategy: String,
    pub runs: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RrfReport {
    pub rows: Vec<RrfRow>,
    pub summary: Vec<RrfSummary>,
}

/// Rebuilds a run's ledger from its restart events, checking that the
/// recorded evaluations add up to the run's total.
pub fn ledger_from_events(entry: &RunEntry, events: &[RestartEvent], x_star: Vec<f64>, f_star: f64) -> Result<RunLedger> {
    let mut ledger = RunLedger::new(x_star, f_star);
    ledger.total_evals = entry.total_evals;
    ledger.tail_evals = entry.tail_evals;
    for e in events {
        if e.mean.len() != entry.dim {
            return Err(Error::Dimension {
                expected: entry.dim,
                got: e.mean.len(),
            });
        }
        ledger.records.push(RestartRecord {
            index: e.restart_index,
            x: e.mean.clone(),
            f: e.f_mean,
            evals: e.evals_used,
            redundant: None,
        });
    }
    let spent: usize = ledger.records.iter().map(|r| r.evals).sum::<usize>() + ledger.tail_evals;
    if spent != ledger.total_evals {
        return Err(Error::Report(format!(
            "{}: restarts account for {spent} evaluations, run reports {}",
            entry.run_id, ledger.total_evals
        )));
    }
    Ok(ledger)
}

pub fn rrf_for_run(dir: &Path, entry: &RunEntry, hv: HvConfig) -> Result<RrfRow> {
    let events = read_events(&dir.join(&entry.events_file))?;
    let problem = make_problem(&entry.problem, entry.dim, entry.instance)?;
    let mut ledger = ledger_from_events(entry, &events, problem.x_star.clone(), problem.f_star)?;
    classify(&mut ledger, |x| problem.evaluate(x), hv);
    Ok(RrfRow {
        run_id: entry.run_id.clone(),
        function: entry.problem.clone(),
        dimension: entry.dim,
        instance: entry.instance,
        strategy: entry.label.clone(),
        rrf: rrf(&ledger)?,
        n_restarts: ledger.records.len(),
        n_redundant: ledger.n_redundant(),
    })
}

fn load_entries(dirs: &[PathBuf]) -> Result<Vec<(PathBuf, RunEntry)>> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for dir in dirs {
        let manifest = read_manifest(dir)?;
        for entry in manifest.runs {
            if !seen.insert(entry.run_id.clone()) {
                return Err(Error::Report(format!("run id {} appears twice", entry.run_id)));
            }
            out.push((dir.clone(), entry));
        }
    }
    Ok(out)
}

/// Per-run RRF for every run in `dirs`, plus a summary per
/// (function, dimension, strategy). Runs whose logs are missing or
/// inconsistent are collected into a single error.
pub fn aggregate_rrf(dirs: &[PathBuf], hv: HvConfig) -> Result<RrfReport> {
    let entries = load_entries(dirs)?;
    let results: Vec<Result<RrfRow>> = entries
        .par_iter()
        .map(|(dir, entry)| rrf_for_run(dir, entry, hv))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for ((_, entry), res) in entries.iter().zip(results) {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(format!("{} ({e})", entry.run_id)),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Report(format!(
            "{} run(s) could not be analysed: {}",
            failures.len(),
            failures.join("; ")
        )));
    }
    let summary = summarize(&rows);
    Ok(RrfReport { rows, summary })
}

pub fn summarize(rows: &[RrfRow]) -> Vec<RrfSummary> {
    let mut groups: BTreeMap<(String, usize, String), Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.function.clone(), r.dimension, r.strategy.clone()))
            .or_default()
            .push(r.rrf);
    }
    groups
        .into_iter()
        .map(|((function, dimension, strategy), mut v)| {
            v.sort_by(f64::total_cmp);
            RrfSummary {
                function,
                dimension,
                strategy,
                runs: v.len(),
                mean: v.iter().sum::<f64>() / v.len() as f64,
                median: quantile(&v, 0.5),
                q1: quantile(&v, 0.25),
                q3: quantile(&v, 0.75),
            }
        })
        .collect()
}

/// Linear-interpolation quantile of sorted data (R's type 7).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Report(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Report(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `rrf_runs.csv` and `rrf_summary.csv` into `out`.
pub fn write_rrf_report(report: &RrfReport, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_rows(&out.join("rrf_runs.csv"), &report.rows)?;
    write_rows(&out.join("rrf_summary.csv"), &report.summary)
}

pub const ECDF_TARGET_COUNT: usize = 51;

/// Targets `10², …, 10⁻⁸`, log-spaced, both ends included.
pub fn ecdf_targets() -> Vec<f64> {
    (0..ECDF_TARGET_COUNT)
        .map(|k| 10f64.powf(2.0 - 10.0 * k as f64 / (ECDF_TARGET_COUNT - 1) as f64))
        .collect()
}

/// Log-spaced evaluation counts from 1 to `max_evals` (20 per decade).
pub fn evaluation_grid(max_evals: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut j = 0;
    loop {
        let e = 10f64.powf(j as f64 / 20.0).round() as usize;
        if e >= max_evals {
            break;
        }
        if grid.last() != Some(&e) {
            grid.push(e);
        }
        j += 1;
    }
    grid.push(max_evals.max(1));
    grid
}

/// Best value reached within `evals` evaluations, `+∞` before the first one.
pub fn best_at(trajectory: &[TrajectoryPoint], evals: usize) -> f64 {
    let idx = trajectory.partition_point(|p| p.evaluation <= evals);
    if idx == 0 {
        f64::INFINITY
    } else {
        trajectory[idx - 1].best_f
    }
}

/// Fraction of (run, target) pairs solved at each grid point. Each run is a
/// trajectory paired with its problem's optimal value.
pub fn ecdf_curve(runs: &[(&[TrajectoryPoint], f64)], grid: &[usize], targets: &[f64]) -> Vec<f64> {
    let total = (runs.len() * targets.len()) as f64;
    grid.iter()
        .map(|&e| {
            let hit: usize = runs
                .iter()
                .map(|(traj, f_star)| {
                    let precision = (best_at(traj, e) - f_star).max(0.0);
                    targets.iter().filter(|&&t| precision <= t).count()
                })
                .sum();
            if total == 0.0 {
                0.0
            } else {
                hit as f64 / total
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EcdfPoint {
    pub function: String,
    pub dimension: usize,
    pub strategy: String,
    pub evaluations: usize,
    pub fraction: f64,
}

/// ECDF per (function, dimension, strategy) over all runs in `dirs`.
pub fn compute_ecdf(dirs: &[PathBuf]) -> Result<Vec<EcdfPoint>> {
    let entries = load_entries(dirs)?;
    // (trajectory, optimal value, budget) per group
    type Runs = Vec<(Vec<TrajectoryPoint>, f64, usize)>;
    let mut groups: BTreeMap<(String, usize, String), Runs> = BTreeMap::new();
    for (dir, entry) in &entries {
        let traj = read_trajectory(&dir.join(&entry.trajectory_file))?;
        let problem = make_problem(&entry.problem, entry.dim, entry.instance)?;
        groups
            .entry((entry.problem.clone(), entry.dim, entry.label.clone()))
            .or_default()
            .push((traj, problem.f_star, entry.budget));
    }
    let targets = ecdf_targets();
    let mut out = Vec::new();
    for ((function, dimension, strategy), runs) in groups {
        let max_evals = runs.iter().map(|r| r.2).max().unwrap_or(1);
        let grid = evaluation_grid(max_evals);
        let pairs: Vec<(&[TrajectoryPoint], f64)> = runs.iter().map(|r| (r.0.as_slice(), r.1)).collect();
        let curve = ecdf_curve(&pairs, &grid, &targets);
        for (e, fraction) in grid.into_iter().zip(curve) {
            out.push(EcdfPoint {
                function: function.clone(),
                dimension,
                strategy: strategy.clone(),
                evaluations: e,
                fraction,
            });
        }
    }
    Ok(out)
}

/// Writes `ecdf.csv` into `out`.
pub fn write_ecdf(points: &[EcdfPoint], out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_rows(&out.join("ecdf.csv"), points)
}
