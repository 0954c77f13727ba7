//! Runs every (problem, dimension, instance, strategy, variant, run)
//! combination of a config in parallel and writes the experiment directory.
//! Output is byte-identical for identical configs.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::config::{strategy_label, ExperimentConfig};
use super::logs::{
    events_file_name, trajectory_file_name, write_events, write_manifest, write_trajectory, Manifest, RunEntry,
    MANIFEST_VERSION,
};
use crate::benchmarks::make_problem;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::numerics::{derive_seed, name_key};
use crate::repelling::{run_rr_cmaes, RepellingConfig, RunSpec};
use crate::restart::StrategyKind;

#[derive(Clone, Debug, PartialEq)]
pub struct RunJob {
    pub problem: String,
    pub dim: usize,
    pub instance: u64,
    pub strategy: StrategyKind,
    pub coverage: Option<f64>,
    pub run: usize,
}

impl RunJob {
    pub fn label(&self) -> String {
        strategy_label(self.strategy, self.coverage)
    }

    pub fn run_id(&self) -> String {
        format!(
            "{}_d{}_i{}_{}_r{:03}",
            self.problem,
            self.dim,
            self.instance,
            self.label(),
            self.run
        )
    }
}

/// Seed of one run. It ignores the strategy and the repelling variant, so
/// variants of the same run index share their random streams.
pub fn run_seed(base: u64, problem: &str, dim: usize, instance: u64, run: usize) -> u64 {
    derive_seed(base, &[name_key(problem), dim as u64, instance, run as u64])
}

/// A fifth of the mean box width.
pub fn default_sigma0(bounds: &Bounds) -> f64 {
    let width: f64 = bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(l, u)| u - l)
        .sum::<f64>()
        / bounds.dim() as f64;
    0.2 * width
}

pub fn plan_runs(cfg: &ExperimentConfig) -> Vec<RunJob> {
    let mut jobs = Vec::new();
    for problem in &cfg.problems {
        for &dim in &cfg.dims {
            for &instance in &cfg.instances {
                for &strategy in &cfg.strategies {
                    for coverage in cfg.variants() {
                        for run in 0..cfg.runs {
                            jobs.push(RunJob {
                                problem: problem.clone(),
                                dim,
                                instance,
                                strategy,
                                coverage,
                                run,
                            });
                        }
                    }
                }
            }
        }
    }
    jobs
}

/// Runs one job and writes its event and trajectory files under `dir`.
pub fn execute_job(cfg: &ExperimentConfig, job: &RunJob, dir: &Path) -> Result<RunEntry> {
    let problem = make_problem(&job.problem, job.dim, job.instance)?;
    let sigma0 = cfg.sigma0.unwrap_or_else(|| default_sigma0(&problem.bounds));
    let seed = run_seed(cfg.seed, &job.problem, job.dim, job.instance, job.run);
    let budget = cfg.budget_for(job.dim);
    let mut spec = RunSpec::new(job.strategy, sigma0, budget, seed);
    if let Some(c) = job.coverage {
        spec = spec.with_repelling(RepellingConfig::new(c, cfg.gamma, sigma0)?);
    }
    let run_id = job.run_id();
    let out = run_rr_cmaes(&problem, &spec, &run_id)?;

    let events_file = events_file_name(&run_id);
    let trajectory_file = trajectory_file_name(&run_id);
    write_events(&dir.join(&events_file), &out.events)?;
    write_trajectory(&dir.join(&trajectory_file), &out.trajectory)?;

    Ok(RunEntry {
        run_id,
        problem: job.problem.clone(),
        dim: job.dim,
        instance: job.instance,
        strategy: job.strategy,
        label: job.label(),
        coverage: job.coverage,
        gamma: cfg.gamma,
        sigma0,
        budget,
        seed,
        total_evals: out.ledger.total_evals,
        tail_evals: out.ledger.tail_evals,
        best_f: out.best_f,
        events_file,
        trajectory_file,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Manifest> {
    cfg.validate()?;
    let dir = cfg.out.as_path();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let jobs = plan_runs(cfg);
    let runs = jobs
        .par_iter()
        .map(|job| execute_job(cfg, job, dir))
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        config: cfg.clone(),
        runs,
    };
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}
