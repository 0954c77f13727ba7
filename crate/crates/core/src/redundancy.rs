//! Redundant-restart classification and the restarts' redundancy factor
//! (RRF): the share of the spent budget consumed by restarts that converged
//! to an already visited, non-global basin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill_valley::{hv_test, HvConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    /// 1-based restart index.
    pub index: usize,
    /// Final center of mass.
    pub x: Vec<f64>,
    pub f: f64,
    /// Evaluations consumed by this restart.
    pub evals: usize,
    pub redundant: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunLedger {
    pub records: Vec<RestartRecord>,
    /// Total evaluations spent, `B`.
    pub total_evals: usize,
    /// Evaluations after the last record that belong to no record.
    pub tail_evals: usize,
    pub x_star: Vec<f64>,
    pub f_star: f64,
}

impl RunLedger {
    pub fn new(x_star: Vec<f64>, f_star: f64) -> Self {
        RunLedger {
            records: Vec::new(),
            total_evals: 0,
            tail_evals: 0,
            x_star,
            f_star,
        }
    }

    pub fn n_redundant(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.redundant == Some(true))
            .count()
    }
}

/// Whether record `r` (1-based) is redundant: outside the global basin and
/// in the basin of some earlier record. Returns the verdict and the number
/// of Hill-Valley evaluations spent.
pub fn is_redundant<F>(r: usize, ledger: &RunLedger, mut f: F, hv: HvConfig) -> (bool, usize)
where
    F: FnMut(&[f64]) -> f64,
{
    let current = &ledger.records[r - 1];
    let mut spent = 0;
    let global = hv_test(&ledger.x_star, ledger.f_star, &current.x, current.f, &mut f, hv);
    spent += global.evals;
    if global.same_basin {
        return (false, spent);
    }
    for earlier in &ledger.records[..r - 1] {
        let out = hv_test(&earlier.x, earlier.f, &current.x, current.f, &mut f, hv);
        spent += out.evals;
        if out.same_basin {
            return (true, spent);
        }
    }
    (false, spent)
}

/// Resolves `redundant` for every record; returns the analysis evaluations
/// spent, which are not part of the run's budget.
pub fn classify<F>(ledger: &mut RunLedger, mut f: F, hv: HvConfig) -> usize
where
    F: FnMut(&[f64]) -> f64,
{
    let mut spent = 0;
    for r in 1..=ledger.records.len() {
        let (red, evals) = is_redundant(r, ledger, &mut f, hv);
        ledger.records[r - 1].redundant = Some(red);
        spent += evals;
    }
    spent
}

/// `Σ red(x_r) b_r / B`.
pub fn rrf(ledger: &RunLedger) -> Result<f64> {
    if ledger.total_evals == 0 {
        return Err(Error::config("budget", "no evaluations were spent"));
    }
    let mut wasted = 0usize;
    for rec in &ledger.records {
        match rec.redundant {
            Some(true) => wasted += rec.evals,
            Some(false) => {}
            None => {
                return Err(Error::Report(format!(
                    "restart {} has not been classified",
                    rec.index
                )))
            }
        }
    }
    Ok(wasted as f64 / ledger.total_evals as f64)
}
