//! CMA-ES with repelling restarts.
//!
//! Every finished restart leaves a tabu point behind. Later restarts reject
//! offspring that fall inside the tabu points' regions, measured with the
//! current search distribution's Mahalanobis metric. Region sizes are set
//! so that all regions together cover `1/c` of the box (normalized by the
//! base step size), split in proportion to how often each point was hit.
//! With repelling disabled the same runner is the plain restart CMA-ES.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::benchmarks::Problem;
use crate::cma::{check_restart, default_lambda, CmaParams, CmaState, FitnessHistory};
use crate::error::{Error, Result};
use crate::hill_valley::{hv_test, HvConfig};
use crate::numerics::{gamma_function, Eigen, Matrix, RngStream, Vector};
use crate::redundancy::{RestartRecord, RunLedger};
use crate::restart::{next_restart_params, StrategyKind, StrategyState};

pub const DEFAULT_GAMMA: f64 = 0.995;
/// Coverage factors of the standard sweep.
pub const COVERAGE_PRESETS: [f64; 4] = [2.0, 10.0, 100.0, 1000.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabuPoint {
    pub x: Vec<f64>,
    pub f: f64,
    /// Number of restarts that converged here.
    pub hits: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepellingConfig {
    /// Coverage factor `c`.
    pub coverage: f64,
    /// Shrinkage factor `γ` applied per rejection.
    pub gamma: f64,
    /// Base step size the volumes are normalized by.
    pub sigma0: f64,
    /// Rejections per generation after which samples are accepted
    /// unconditionally; `None` means `50 λ`.
    pub max_reject: Option<usize>,
}

impl RepellingConfig {
    pub fn new(coverage: f64, gamma: f64, sigma0: f64) -> Result<Self> {
        if !(coverage > 0.0) || !coverage.is_finite() {
            return Err(Error::config("coverage-c", format!("must be positive, got {coverage}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::config("gamma", format!("must lie in (0, 1), got {gamma}")));
        }
        if !(sigma0 > 0.0) || !sigma0.is_finite() {
            return Err(Error::config("sigma0", format!("must be positive, got {sigma0}")));
        }
        Ok(RepellingConfig {
            coverage,
            gamma,
            sigma0,
            max_reject: None,
        })
    }

    pub fn max_reject_for(&self, lambda: usize) -> usize {
        self.max_reject.unwrap_or(50 * lambda)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    pub points: Vec<TabuPoint>,
    /// Restarts folded into the archive, `R`.
    pub restarts: usize,
    /// Box volume `S`.
    pub volume: f64,
}

impl Archive {
    pub fn new(volume: f64) -> Self {
        Archive {
            points: Vec::new(),
            restarts: 0,
            volume,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_hits(&self) -> usize {
        self.points.iter().map(|p| p.hits).sum()
    }

    /// Rejection radius of every tabu point under `cfg`.
    pub fn radii(&self, cfg: &RepellingConfig, dim: usize) -> Vec<f64> {
        self.points
            .iter()
            .map(|t| rejection_radius(tabu_volume(t, self, cfg), dim))
            .collect()
    }
}

/// `V(T) = n_T S / (c σ0 R)`
pub fn tabu_volume(tabu: &TabuPoint, archive: &Archive, cfg: &RepellingConfig) -> f64 {
    debug_assert!(archive.restarts >= 1);
    tabu.hits as f64 * archive.volume / (cfg.coverage * cfg.sigma0 * archive.restarts as f64)
}

/// Radius of the `dim`-ball of volume `volume`:
/// `V^(1/d) Γ(d/2 + 1)^(1/d) / √π`.
pub fn rejection_radius(volume: f64, dim: usize) -> f64 {
    let d = dim as f64;
    let gamma = gamma_function(d / 2.0 + 1.0).expect("d/2 + 1 is positive");
    volume.powf(1.0 / d) * gamma.powf(1.0 / d) / PI.sqrt()
}

/// True when `x` falls strictly inside the shrunken region of `tabu`:
/// `d_m(x, x_T, C⁻¹) / σ < γ^n_rej δ(T)`.
pub fn rejects(
    x: &Vector,
    tabu: &TabuPoint,
    delta: f64,
    gamma: f64,
    n_rej: usize,
    metric: &Eigen,
    sigma: f64,
) -> bool {
    let center = Vector::from_column_slice(&tabu.x);
    let distance = metric.mahalanobis(x, &center) / sigma;
    distance < shrunken_threshold(delta, gamma, n_rej)
}

pub fn shrunken_threshold(delta: f64, gamma: f64, n_rej: usize) -> f64 {
    gamma.powi(n_rej.min(i32::MAX as usize) as i32) * delta
}

#[derive(Clone, Debug, PartialEq)]
pub struct Accepted {
    pub x: Vector,
    /// Rejection count in force when `x` was accepted.
    pub n_rej: usize,
    /// Accepted only because the rejection cap was exceeded.
    pub forced: bool,
}

/// Draws offspring until one is outside every tabu region. `n_rej` is the
/// generation's shared rejection counter and is incremented per rejection.
pub fn sample_accepted(
    state: &CmaState,
    archive: &Archive,
    radii: &[f64],
    cfg: &RepellingConfig,
    max_reject: usize,
    n_rej: &mut usize,
    rng: &mut RngStream,
) -> Accepted {
    loop {
        let x = state.sample(rng);
        if archive.is_empty() {
            return Accepted { x, n_rej: *n_rej, forced: false };
        }
        if *n_rej > max_reject {
            return Accepted { x, n_rej: *n_rej, forced: true };
        }
        let hit = archive
            .points
            .iter()
            .zip(radii)
            .any(|(t, &delta)| rejects(&x, t, delta, cfg.gamma, *n_rej, state.eigen(), state.sigma));
        if !hit {
            return Accepted { x, n_rej: *n_rej, forced: false };
        }
        *n_rej += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArchiveUpdate {
    /// Archive index of the tabu point the mean merged into, if any.
    pub matched: Option<usize>,
    pub evals: usize,
}

/// Folds a converged mean into the archive: merged into the first tabu point
/// sharing its basin (improving its location when `f_m` is better), or
/// appended as a new point.
pub fn archive_update<F>(archive: &mut Archive, m: &[f64], f_m: f64, mut f: F, hv: HvConfig) -> ArchiveUpdate
where
    F: FnMut(&[f64]) -> f64,
{
    let mut evals = 0;
    let mut matched = None;
    for (i, t) in archive.points.iter().enumerate() {
        let out = hv_test(m, f_m, &t.x, t.f, &mut f, hv);
        evals += out.evals;
        if out.same_basin {
            matched = Some(i);
            break;
        }
    }
    match matched {
        Some(i) => {
            let t = &mut archive.points[i];
            t.hits += 1;
            if f_m < t.f {
                t.x = m.to_vec();
                t.f = f_m;
            }
        }
        None => archive.points.push(TabuPoint {
            x: m.to_vec(),
            f: f_m,
            hits: 1,
        }),
    }
    archive.restarts += 1;
    ArchiveUpdate { matched, evals }
}

/// What ended a restart segment.
pub const BUDGET_CRITERION: &str = "budget";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartEvent {
    pub run_id: String,
    pub restart_index: usize,
    /// Evaluations spent in the run when the restart ended.
    pub evals_at_restart: usize,
    /// Evaluations consumed by this restart.
    pub evals_used: usize,
    pub mean: Vec<f64>,
    pub f_mean: f64,
    pub criterion: String,
    pub lambda: usize,
    pub sigma0: f64,
    pub archive_size: usize,
    pub archive_hits: usize,
    /// Whether this restart was folded into the archive.
    pub archive_updated: bool,
    pub redundant_online: bool,
    pub saturated_rejections: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub evaluation: usize,
    pub best_f: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcceptedSample {
    pub x: Vec<f64>,
    pub n_rej: usize,
    pub forced: bool,
}

/// Everything needed to replay the rejection checks of one generation.
#[derive(Clone, Debug)]
pub struct GenerationAudit {
    pub sigma: f64,
    pub covariance: Matrix,
    pub gamma: f64,
    pub tabu: Vec<(Vec<f64>, f64)>,
    pub accepted: Vec<AcceptedSample>,
}

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub strategy: StrategyKind,
    pub sigma0: f64,
    pub budget: usize,
    pub repelling: Option<RepellingConfig>,
    pub hv: HvConfig,
    pub seed: u64,
    pub audit: bool,
}

impl RunSpec {
    pub fn new(strategy: StrategyKind, sigma0: f64, budget: usize, seed: u64) -> Self {
        RunSpec {
            strategy,
            sigma0,
            budget,
            repelling: None,
            hv: HvConfig::default(),
            seed,
            audit: false,
        }
    }

    pub fn with_repelling(mut self, cfg: RepellingConfig) -> Self {
        self.repelling = Some(cfg);
        self
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub ledger: RunLedger,
    pub events: Vec<RestartEvent>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub archive: Archive,
    pub audit: Vec<GenerationAudit>,
}

struct Evaluator<'a> {
    problem: &'a Problem,
    budget: usize,
    used: usize,
    best_x: Vec<f64>,
    best_f: f64,
    trajectory: Vec<TrajectoryPoint>,
}

impl<'a> Evaluator<'a> {
    fn new(problem: &'a Problem, budget: usize) -> Self {
        Evaluator {
            problem,
            budget,
            used: 0,
            best_x: Vec::new(),
            best_f: f64::INFINITY,
            trajectory: Vec::new(),
        }
    }

    fn remaining(&self) -> usize {
        self.budget - self.used
    }

    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.budget {
            return None;
        }
        let f = self.problem.evaluate(x);
        self.used += 1;
        if f < self.best_f || self.trajectory.is_empty() {
            if f < self.best_f {
                self.best_f = f;
                self.best_x = x.to_vec();
            }
            self.trajectory.push(TrajectoryPoint {
                evaluation: self.used,
                best_f: self.best_f,
            });
        }
        Some(f)
    }

    fn finish(mut self) -> (Vec<TrajectoryPoint>, Vec<f64>, f64, usize) {
        if let Some(last) = self.trajectory.last() {
            if last.evaluation != self.used {
                self.trajectory.push(TrajectoryPoint {
                    evaluation: self.used,
                    best_f: self.best_f,
                });
            }
        }
        (self.trajectory, self.best_x, self.best_f, self.used)
    }
}

const STRATEGY_STREAM: u64 = u64::MAX;

/// Restart CMA-ES on `problem` until the budget is spent, repelling from
/// earlier restarts when `spec.repelling` is set.
pub fn run_rr_cmaes(problem: &Problem, spec: &RunSpec, run_id: &str) -> Result<RunOutput> {
    let dim = problem.dim();
    let bounds = &problem.bounds;
    if spec.budget == 0 {
        return Err(Error::config("budget", "must be at least 1"));
    }
    if let Some(cfg) = &spec.repelling {
        RepellingConfig::new(cfg.coverage, cfg.gamma, cfg.sigma0)?;
    }

    let run_rng = RngStream::new(spec.seed);
    let mut strategy_rng = run_rng.substream(&[STRATEGY_STREAM]);
    let mut strategy = StrategyState::new(default_lambda(dim));
    let mut archive = Archive::new(bounds.volume());
    let mut ev = Evaluator::new(problem, spec.budget);
    let mut ledger = RunLedger::new(problem.x_star.clone(), problem.f_star);
    let mut events = Vec::new();
    let mut audit = Vec::new();
    let mut restart_index = 0usize;

    while ev.remaining() > 0 {
        restart_index += 1;
        let rp = next_restart_params(spec.strategy, &mut strategy, spec.sigma0, &mut strategy_rng);
        let params = CmaParams::with_lambda(dim, rp.lambda)?;
        let mut rng = run_rng.substream(&[restart_index as u64]);
        let mut state = CmaState::init(&params, bounds, rp.sigma0, &mut rng)?;
        let mut history = FitnessHistory::new();
        let segment_start = ev.used;
        let radii = match &spec.repelling {
            Some(cfg) if !archive.is_empty() => archive.radii(cfg, dim),
            _ => Vec::new(),
        };
        let max_reject = spec
            .repelling
            .map(|c| c.max_reject_for(params.lambda))
            .unwrap_or(usize::MAX);
        let mut saturated = 0usize;

        let criterion = loop {
            let mut n_rej = 0usize;
            let mut xs = Vec::with_capacity(params.lambda);
            let mut gen_audit = spec.audit.then(|| GenerationAudit {
                sigma: state.sigma,
                covariance: state.covariance().clone(),
                gamma: spec.repelling.map(|c| c.gamma).unwrap_or(1.0),
                tabu: archive
                    .points
                    .iter()
                    .zip(&radii)
                    .map(|(t, d)| (t.x.clone(), *d))
                    .collect(),
                accepted: Vec::new(),
            });
            while xs.len() < params.lambda {
                let acc = match &spec.repelling {
                    Some(cfg) => sample_accepted(&state, &archive, &radii, cfg, max_reject, &mut n_rej, &mut rng),
                    None => Accepted {
                        x: state.sample(&mut rng),
                        n_rej: 0,
                        forced: false,
                    },
                };
                if acc.forced {
                    saturated += 1;
                }
                if let Some(a) = gen_audit.as_mut() {
                    a.accepted.push(AcceptedSample {
                        x: acc.x.as_slice().to_vec(),
                        n_rej: acc.n_rej,
                        forced: acc.forced,
                    });
                }
                xs.push(acc.x);
            }
            if let Some(a) = gen_audit {
                audit.push(a);
            }

            let mut fs = Vec::with_capacity(params.lambda);
            for x in &xs {
                let clamped = bounds.saturate(x);
                match ev.eval(clamped.as_slice()) {
                    Some(f) => {
                        state.observe(&clamped, f);
                        fs.push(f);
                    }
                    None => break,
                }
            }
            if fs.len() < params.lambda {
                break None;
            }
            state.tell(&params, &xs, &fs)?;
            history.record(&fs);
            if ev.remaining() == 0 {
                break None;
            }
            if let Some(c) = check_restart(&state, &params, &history) {
                break Some(c);
            }
        };

        if state.generation == 0 {
            // no distribution update happened; nothing converged
            ledger.tail_evals = ev.used - segment_start;
            break;
        }

        let mean = bounds.saturate(&state.mean).as_slice().to_vec();
        let mut archive_updated = false;
        let (f_mean, redundant_online) = match criterion {
            Some(_) => {
                let f_mean = ev.eval(&mean).unwrap_or_else(|| problem.evaluate(&mean));
                let mut merged = false;
                if spec.repelling.is_some() && ev.remaining() > 0 {
                    let update = archive_update(
                        &mut archive,
                        &mean,
                        f_mean,
                        |x| ev.eval(x).unwrap_or(f64::INFINITY),
                        spec.hv,
                    );
                    merged = update.matched.is_some();
                    archive_updated = true;
                }
                (f_mean, merged)
            }
            None => (problem.evaluate(&mean), false),
        };

        let evals_used = ev.used - segment_start;
        strategy.record_segment(rp.regime, evals_used);
        ledger.records.push(RestartRecord {
            index: restart_index,
            x: mean.clone(),
            f: f_mean,
            evals: evals_used,
            redundant: None,
        });
        events.push(RestartEvent {
            run_id: run_id.to_string(),
            restart_index,
            evals_at_restart: ev.used,
            evals_used,
            mean,
            f_mean,
            criterion: criterion
                .map(|c| c.as_str().to_string())
                .unwrap_or_else(|| BUDGET_CRITERION.to_string()),
            lambda: params.lambda,
            sigma0: rp.sigma0,
            archive_size: archive.points.len(),
            archive_hits: archive.total_hits(),
            archive_updated,
            redundant_online,
            saturated_rejections: saturated,
        });
    }

    let (trajectory, best_x, best_f, used) = ev.finish();
    ledger.total_evals = used;
    Ok(RunOutput {
        ledger,
        events,
        trajectory,
        best_x,
        best_f,
        archive,
        audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::make_problem;
    use crate::bounds::Bounds;

    fn cfg(c: f64) -> RepellingConfig {
        RepellingConfig::new(c, 0.5, 1.0).unwrap()
    }

    #[test]
    fn volume_formula() {
        let archive = Archive {
            points: vec![TabuPoint { x: vec![0.0], f: 0.0, hits: 1 }],
            restarts: 1,
            volume: 100.0,
        };
        let c = RepellingConfig::new(10.0, 0.5, 1.0).unwrap();
        assert_eq!(tabu_volume(&archive.points[0], &archive, &c), 10.0);
        let c2 = RepellingConfig::new(20.0, 0.5, 1.0).unwrap();
        assert_eq!(tabu_volume(&archive.points[0], &archive, &c2), 5.0);

        let full = Archive {
            points: vec![TabuPoint { x: vec![0.0], f: 0.0, hits: 4 }],
            restarts: 4,
            volume: 100.0,
        };
        let c3 = RepellingConfig::new(5.0, 0.5, 2.0).unwrap();
        assert_eq!(tabu_volume(&full.points[0], &full, &c3), 10.0);
    }

    #[test]
    fn radius_identities() {
        assert!((rejection_radius(PI, 2) - 1.0).abs() < 1e-12);
        assert!((rejection_radius(3.0, 1) - 1.5).abs() < 1e-12);
        assert!((rejection_radius(4.0 * PI / 3.0, 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radius_grows_with_hits() {
        let c = cfg(10.0);
        let mut prev = 0.0;
        for hits in 1..10 {
            let archive = Archive {
                points: vec![TabuPoint { x: vec![0.0, 0.0], f: 0.0, hits }],
                restarts: 10,
                volume: 100.0,
            };
            let r = archive.radii(&c, 2)[0];
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn rejection_and_shrinkage() {
        let t = TabuPoint { x: vec![0.0, 0.0], f: 0.0, hits: 1 };
        let id = Eigen::identity(2);
        let x = Vector::from_vec(vec![0.6, 0.0]);
        assert!(rejects(&Vector::zeros(2), &t, 1.0, 0.5, 0, &id, 1.0));
        assert!(rejects(&x, &t, 1.0, 0.5, 0, &id, 1.0));
        assert!(!rejects(&x, &t, 1.0, 0.5, 1, &id, 1.0));
        // boundary is accepted: strict inequality
        let edge = Vector::from_vec(vec![1.0, 0.0]);
        assert!(!rejects(&edge, &t, 1.0, 0.5, 0, &id, 1.0));
    }

    fn state_at(mean: &[f64], sigma: f64) -> CmaState {
        let b = Bounds::uniform(mean.len(), -5.0, 5.0).unwrap();
        let mut s = CmaState::with_mean(Vector::from_column_slice(mean), sigma, &b);
        s.sigma = sigma;
        s
    }

    #[test]
    fn empty_archive_takes_first_sample() {
        let s = state_at(&[0.0, 0.0], 1.0);
        let archive = Archive::new(100.0);
        let mut n_rej = 0;
        let mut a = RngStream::new(8);
        let mut b = RngStream::new(8);
        let acc = sample_accepted(&s, &archive, &[], &cfg(2.0), 100, &mut n_rej, &mut a);
        assert_eq!(acc.x, s.sample(&mut b));
        assert_eq!(n_rej, 0);
    }

    #[test]
    fn mean_inside_tabu_region_eventually_accepts() {
        let s = state_at(&[0.0, 0.0], 1.0);
        let archive = Archive {
            points: vec![TabuPoint { x: vec![0.0, 0.0], f: 0.0, hits: 1 }],
            restarts: 1,
            volume: 100.0,
        };
        let radii = vec![50.0];
        let mut rng = RngStream::new(3);
        let mut n_rej = 0;
        let acc = sample_accepted(&s, &archive, &radii, &cfg(2.0), usize::MAX, &mut n_rej, &mut rng);
        assert!(!acc.forced);
        assert!(n_rej > 0 && n_rej < 100, "{n_rej}");
        let d = acc.x.norm();
        assert!(d >= 0.5f64.powi(n_rej as i32) * 50.0);
    }

    #[test]
    fn rejection_cap_forces_acceptance() {
        let s = state_at(&[0.0, 0.0], 1.0);
        let archive = Archive {
            points: vec![TabuPoint { x: vec![0.0, 0.0], f: 0.0, hits: 1 }],
            restarts: 1,
            volume: 100.0,
        };
        let c = RepellingConfig::new(2.0, 0.999_999, 1.0).unwrap();
        let mut n_rej = 0;
        let acc = sample_accepted(&s, &archive, &[1e6], &c, 10, &mut n_rej, &mut RngStream::new(0));
        assert!(acc.forced);
        assert_eq!(n_rej, 11);
    }

    #[test]
    fn far_tabu_region_never_rejects() {
        let s = state_at(&[0.0, 0.0], 0.1);
        let archive = Archive {
            points: vec![TabuPoint { x: vec![4.0, 4.0], f: 0.0, hits: 1 }],
            restarts: 1,
            volume: 100.0,
        };
        let mut first_try = 0;
        for seed in 0..1000 {
            let mut n_rej = 0;
            sample_accepted(&s, &archive, &[1.0], &cfg(2.0), 1000, &mut n_rej, &mut RngStream::new(seed));
            if n_rej == 0 {
                first_try += 1;
            }
        }
        assert_eq!(first_try, 1000);
    }

    fn two_basins(x: &[f64]) -> f64 {
        // minima at −1 (f=0) and +1 (f=0.5), ridge at 0
        let v = x[0];
        if v < 0.0 {
            (v + 1.0).powi(2)
        } else {
            (v - 1.0).powi(2) + 0.5
        }
    }

    #[test]
    fn archive_update_appends_then_merges() {
        let mut archive = Archive::new(4.0);
        let hv = HvConfig::default();
        let u = archive_update(&mut archive, &[-1.0], 0.0, two_basins, hv);
        assert_eq!(u, ArchiveUpdate { matched: None, evals: 0 });
        assert_eq!(archive.restarts, 1);

        let u = archive_update(&mut archive, &[1.0], 0.5, two_basins, hv);
        assert_eq!(u.matched, None);
        assert!(u.evals >= 1);
        assert_eq!(archive.points.len(), 2);

        // worse point in the right basin: only the hit count moves
        let x = [1.2];
        let u = archive_update(&mut archive, &x, two_basins(&x), two_basins, hv);
        assert_eq!(u.matched, Some(1));
        assert_eq!(archive.points[1], TabuPoint { x: vec![1.0], f: 0.5, hits: 2 });

        // better point in the left basin replaces the location
        archive.points[0] = TabuPoint { x: vec![-1.1], f: two_basins(&[-1.1]), hits: 1 };
        let u = archive_update(&mut archive, &[-1.0], 0.0, two_basins, hv);
        assert_eq!(u.matched, Some(0));
        assert_eq!(archive.points[0], TabuPoint { x: vec![-1.0], f: 0.0, hits: 2 });
        assert_eq!(archive.total_hits(), archive.restarts);
    }

    #[test]
    fn tiny_budget_has_no_restarts() {
        let p = make_problem("sphere", 2, 0).unwrap();
        let spec = RunSpec::new(StrategyKind::Naive, 2.0, 4, 1);
        let out = run_rr_cmaes(&p, &spec, "t").unwrap();
        assert!(out.ledger.records.is_empty());
        assert_eq!(out.ledger.total_evals, 4);
        assert_eq!(out.ledger.tail_evals, 4);
        assert_eq!(out.trajectory.last().unwrap().evaluation, 4);
    }

    #[test]
    fn ledger_accounts_for_every_evaluation() {
        let p = make_problem("himmelblau", 2, 0).unwrap();
        for repelling in [false, true] {
            let mut spec = RunSpec::new(StrategyKind::Naive, 2.0, 5000, 9);
            if repelling {
                spec = spec.with_repelling(RepellingConfig::new(2.0, DEFAULT_GAMMA, 2.0).unwrap());
            }
            let out = run_rr_cmaes(&p, &spec, "t").unwrap();
            let sum: usize = out.ledger.records.iter().map(|r| r.evals).sum();
            assert_eq!(sum + out.ledger.tail_evals, out.ledger.total_evals);
            assert_eq!(out.ledger.total_evals, 5000);
            assert_eq!(out.trajectory.last().unwrap().evaluation, 5000);
            assert!(out.trajectory.windows(2).all(|w| w[1].best_f <= w[0].best_f));
            assert!(out.ledger.records.len() > 2);
            if repelling {
                assert_eq!(out.archive.total_hits(), out.archive.restarts);
            }
        }
    }

    #[test]
    fn ipop_and_bipop_runs_complete() {
        let p = make_problem("rastrigin", 2, 0).unwrap();
        for kind in [StrategyKind::Ipop, StrategyKind::Bipop] {
            let spec = RunSpec::new(kind, 2.0, 6000, 2);
            let out = run_rr_cmaes(&p, &spec, "t").unwrap();
            assert_eq!(out.ledger.total_evals, 6000);
            if kind == StrategyKind::Ipop {
                let lambdas: Vec<usize> = out.events.iter().map(|e| e.lambda).collect();
                assert!(lambdas.windows(2).all(|w| w[1] == 2 * w[0]));
            }
        }
    }
}
