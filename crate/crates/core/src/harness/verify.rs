//! Replays an experiment directory and checks the logged invariants.

use std::path::Path;

use super::logs::{read_events, read_manifest, read_trajectory, RunEntry};
use crate::error::Result;
use crate::repelling::{RestartEvent, TrajectoryPoint};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub runs: usize,
    pub restarts: usize,
    pub violations: Vec<String>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Problems with one run's events; empty when consistent.
pub fn check_events(entry: &RunEntry, events: &[RestartEvent]) -> Vec<String> {
    let mut bad = Vec::new();
    let id = &entry.run_id;
    let mut spent = 0usize;
    let mut updates = 0usize;
    let mut last_size = 0usize;
    for (k, e) in events.iter().enumerate() {
        if e.run_id != *id {
            bad.push(format!("{id}: event {} names run {}", k + 1, e.run_id));
        }
        if e.restart_index != k + 1 {
            bad.push(format!("{id}: event {} has restart index {}", k + 1, e.restart_index));
        }
        spent += e.evals_used;
        if e.evals_at_restart != spent {
            bad.push(format!(
                "{id}: restart {} ends at {} evaluations, expected {spent}",
                e.restart_index, e.evals_at_restart
            ));
        }
        if e.archive_updated {
            updates += 1;
        }
        if e.archive_hits != updates {
            bad.push(format!(
                "{id}: restart {} archive holds {} hits after {updates} updates",
                e.restart_index, e.archive_hits
            ));
        }
        if e.archive_size > e.archive_hits || e.archive_size < last_size {
            bad.push(format!("{id}: restart {} archive size {} is inconsistent", e.restart_index, e.archive_size));
        }
        last_size = e.archive_size;
        if entry.coverage.is_none() && (e.archive_updated || e.archive_size > 0) {
            bad.push(format!("{id}: archive used without repelling"));
        }
    }
    if spent + entry.tail_evals != entry.total_evals {
        bad.push(format!(
            "{id}: restarts and tail account for {} of {} evaluations",
            spent + entry.tail_evals,
            entry.total_evals
        ));
    }
    if entry.total_evals > entry.budget {
        bad.push(format!("{id}: {} evaluations exceed the budget {}", entry.total_evals, entry.budget));
    }
    bad
}

/// Problems with one run's trajectory; empty when consistent.
pub fn check_trajectory(entry: &RunEntry, traj: &[TrajectoryPoint]) -> Vec<String> {
    let mut bad = Vec::new();
    let id = &entry.run_id;
    for w in traj.windows(2) {
        if w[1].evaluation <= w[0].evaluation {
            bad.push(format!("{id}: trajectory evaluation index not increasing at {}", w[1].evaluation));
        }
        if w[1].best_f > w[0].best_f {
            bad.push(format!("{id}: best value increases at evaluation {}", w[1].evaluation));
        }
    }
    match traj.last() {
        Some(last) => {
            if last.evaluation != entry.total_evals {
                bad.push(format!("{id}: trajectory ends at {} of {} evaluations", last.evaluation, entry.total_evals));
            }
            if last.best_f != entry.best_f {
                bad.push(format!("{id}: trajectory ends at {} but the run reports {}", last.best_f, entry.best_f));
            }
        }
        None if entry.total_evals > 0 => bad.push(format!("{id}: empty trajectory")),
        None => {}
    }
    bad
}

pub fn verify_dir(dir: &Path) -> Result<VerifyReport> {
    let manifest = read_manifest(dir)?;
    let mut report = VerifyReport::default();
    for entry in &manifest.runs {
        report.runs += 1;
        match read_events(&dir.join(&entry.events_file)) {
            Ok(events) => {
                report.restarts += events.len();
                report.violations.extend(check_events(entry, &events));
            }
            Err(e) => report.violations.push(format!("{}: {e}", entry.run_id)),
        }
        match read_trajectory(&dir.join(&entry.trajectory_file)) {
            Ok(traj) => report.violations.extend(check_trajectory(entry, &traj)),
            Err(e) => report.violations.push(format!("{}: {e}", entry.run_id)),
        }
    }
    Ok(report)
}
