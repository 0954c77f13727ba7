//! Non-elitist (μ/μ_w, λ)-CMA-ES for one restart segment: strategy
//! parameters, state, the ask/tell update and the local restart criteria.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::numerics::{eigendecompose, sample_mvn, Eigen, Matrix, RngStream, Vector};

/// Eigenvalues below this fraction of the largest are lifted to it.
pub const EIGEN_FLOOR: f64 = 1e-30;

/// Strategy parameters of one segment. Defaults are the tutorial settings.
#[derive(Clone, Debug)]
pub struct CmaParams {
    pub dim: usize,
    pub lambda: usize,
    pub mu: usize,
    pub weights: Vec<f64>,
    pub mu_eff: f64,
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c_1: f64,
    pub c_mu: f64,
    /// E‖N(0, I)‖
    pub chi_n: f64,
}

pub fn default_lambda(dim: usize) -> usize {
    4 + (3.0 * (dim as f64).ln()).floor() as usize
}

impl CmaParams {
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_lambda(dim, default_lambda(dim))
    }

    pub fn with_lambda(dim: usize, lambda: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("dim", "dimension must be at least 1"));
        }
        if lambda < 2 {
            return Err(Error::config("lambda", format!("need λ ≥ 2, got {lambda}")));
        }
        let n = dim as f64;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let d_sigma =
            1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let c_1 = 2.0 / ((n + 1.3).powi(2) + mu_eff);
        let c_mu = (1.0 - c_1)
            .min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0).powi(2) + mu_eff));
        let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

        Ok(CmaParams {
            dim,
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
        })
    }
}

/// Local restart criteria, in the order [`check_restart`] tests them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RestartCriterion {
    MaxCondition,
    TolFunHist,
    TolX,
    EqualFunValues,
    Stagnation,
    NoEffectAxis,
    NoEffectCoord,
}

impl RestartCriterion {
    pub fn as_str(self) -> &'static str {
        match self {
            RestartCriterion::MaxCondition => "max_condition",
            RestartCriterion::TolFunHist => "tol_fun_hist",
            RestartCriterion::TolX => "tol_x",
            RestartCriterion::EqualFunValues => "equal_fun_values",
            RestartCriterion::Stagnation => "stagnation",
            RestartCriterion::NoEffectAxis => "no_effect_axis",
            RestartCriterion::NoEffectCoord => "no_effect_coord",
        }
    }
}

impl fmt::Display for RestartCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RestartCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use RestartCriterion::*;
        [
            MaxCondition,
            TolFunHist,
            TolX,
            EqualFunValues,
            Stagnation,
            NoEffectAxis,
            NoEffectCoord,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| Error::Parse(format!("unknown restart criterion `{s}`")))
    }
}

pub const MAX_CONDITION: f64 = 1e14;
pub const TOL_FUN_HIST: f64 = 1e-12;
pub const TOL_X_FACTOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CmaState {
    pub mean: Vector,
    pub sigma: f64,
    pub sigma0: f64,
    cov: Matrix,
    eigen: Eigen,
    pub p_sigma: Vector,
    pub p_c: Vector,
    pub generation: usize,
    pub evals_used: usize,
    pub best: Option<(Vector, f64)>,
    sanity: Bounds,
}

impl CmaState {
    /// Fresh segment: `C = I`, `σ = σ0`, mean uniform in the box.
    pub fn init(params: &CmaParams, bounds: &Bounds, sigma0: f64, rng: &mut RngStream) -> Result<Self> {
        if bounds.dim() != params.dim {
            return Err(Error::Dimension {
                expected: params.dim,
                got: bounds.dim(),
            });
        }
        if !(sigma0 > 0.0) || !sigma0.is_finite() {
            return Err(Error::config("sigma0", format!("must be positive, got {sigma0}")));
        }
        let mean = bounds.sample_uniform(rng);
        Ok(Self::with_mean(mean, sigma0, bounds))
    }

    pub fn with_mean(mean: Vector, sigma0: f64, bounds: &Bounds) -> Self {
        let d = mean.len();
        CmaState {
            mean,
            sigma: sigma0,
            sigma0,
            cov: Matrix::identity(d, d),
            eigen: Eigen::identity(d),
            p_sigma: Vector::zeros(d),
            p_c: Vector::zeros(d),
            generation: 0,
            evals_used: 0,
            best: None,
            sanity: bounds.widened(10.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn covariance(&self) -> &Matrix {
        &self.cov
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    /// Replaces `C` and refreshes its decomposition.
    pub fn set_covariance(&mut self, c: Matrix) -> Result<()> {
        let (cov, eigen) = floored_decomposition(&c)?;
        self.cov = cov;
        self.eigen = eigen;
        Ok(())
    }

    /// One raw (unclamped) offspring `m + σ N(0, C)`.
    pub fn sample(&self, rng: &mut RngStream) -> Vector {
        sample_mvn(&self.mean, self.sigma, &self.eigen, rng)
    }

    /// Bookkeeping for evaluated points: counts and tracks the segment best.
    pub fn observe(&mut self, x: &Vector, f: f64) {
        self.evals_used += 1;
        let better = match &self.best {
            Some((_, fb)) => f < *fb,
            None => true,
        };
        if better {
            self.best = Some((x.clone(), f));
        }
    }

    /// Distribution update from λ raw samples and their fitnesses.
    pub fn tell(&mut self, params: &CmaParams, xs: &[Vector], fs: &[f64]) -> Result<()> {
        if xs.len() != params.lambda || fs.len() != params.lambda {
            return Err(Error::Dimension {
                expected: params.lambda,
                got: xs.len().min(fs.len()),
            });
        }
        if let Some(i) = fs.iter().position(|f| f.is_nan()) {
            return Err(Error::Evaluation(format!("NaN fitness for offspring {i}")));
        }
        let d = self.dim();
        let n = d as f64;

        let order = selection_order(fs);
        let old_mean = self.mean.clone();
        let steps: Vec<Vector> = order[..params.mu]
            .iter()
            .map(|&i| (&xs[i] - &old_mean) / self.sigma)
            .collect();

        let mut y_w = Vector::zeros(d);
        for (w, y) in params.weights.iter().zip(&steps) {
            y_w += y * *w;
        }
        self.mean = &old_mean + &y_w * self.sigma;

        let cs = params.c_sigma;
        let c_inv_sqrt_yw = self.eigen.inv_sqrt_apply(&y_w);
        self.p_sigma = &self.p_sigma * (1.0 - cs)
            + c_inv_sqrt_yw * (cs * (2.0 - cs) * params.mu_eff).sqrt();

        let ps_norm = self.p_sigma.norm();
        let gen = (self.generation + 1) as f64;
        let h_sigma = ps_norm / (1.0 - (1.0 - cs).powf(2.0 * gen)).sqrt()
            < (1.4 + 2.0 / (n + 1.0)) * params.chi_n;
        let h = if h_sigma { 1.0 } else { 0.0 };

        let cc = params.c_c;
        self.p_c = &self.p_c * (1.0 - cc) + &y_w * (h * (cc * (2.0 - cc) * params.mu_eff).sqrt());
        let delta_h = (1.0 - h) * cc * (2.0 - cc);

        let mut rank_mu = Matrix::zeros(d, d);
        for (w, y) in params.weights.iter().zip(&steps) {
            rank_mu += (y * y.transpose()) * *w;
        }
        let rank_one = &self.p_c * self.p_c.transpose();
        let c_new = &self.cov * (1.0 - params.c_1 - params.c_mu)
            + (rank_one + &self.cov * delta_h) * params.c_1
            + rank_mu * params.c_mu;

        let (cov, eigen) = floored_decomposition(&c_new)?;
        self.cov = cov;
        self.eigen = eigen;

        self.sigma *= ((cs / params.d_sigma) * (ps_norm / params.chi_n - 1.0)).exp();
        if !self.sigma.is_finite() {
            self.sigma = f64::MAX;
        }
        self.sigma = self.sigma.max(f64::MIN_POSITIVE);
        self.mean = self.sanity.saturate(&self.mean);
        self.generation += 1;
        Ok(())
    }
}

/// Indices sorted by fitness, ties broken by sample index.
pub fn selection_order(fs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fs.len()).collect();
    order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]).then(a.cmp(&b)));
    order
}

fn floored_decomposition(c: &Matrix) -> Result<(Matrix, Eigen)> {
    let mut eigen = eigendecompose(c)?;
    let largest = eigen.values.max();
    if !(largest > 0.0) {
        return Err(Error::Numerical("covariance lost positive definiteness".into()));
    }
    let floor = EIGEN_FLOOR * largest;
    let mut lifted = false;
    for v in eigen.values.iter_mut() {
        if *v < floor {
            *v = floor;
            lifted = true;
        }
    }
    let cov = if lifted {
        eigen.reconstruct()
    } else {
        (c + c.transpose()) * 0.5
    };
    Ok((cov, eigen))
}

/// Per-generation fitness summary feeding the history-based criteria.
#[derive(Clone, Debug, Default)]
pub struct FitnessHistory {
    best: Vec<f64>,
    flat: Vec<bool>,
    best_so_far: Option<f64>,
    last_improvement: usize,
}

impl FitnessHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generations(&self) -> usize {
        self.best.len()
    }

    /// Records one generation's fitness values.
    pub fn record(&mut self, fs: &[f64]) {
        let mut sorted: Vec<f64> = fs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let best = sorted[0];
        let median = sorted[sorted.len() / 2];
        let worst = sorted[sorted.len() - 1];
        self.best.push(best);
        self.flat.push(best == median && median == worst);
        if self.best_so_far.is_none_or(|b| best < b) {
            self.best_so_far = Some(best);
            self.last_improvement = self.best.len();
        }
    }

    pub fn tol_fun_window(params: &CmaParams) -> usize {
        10 + (30.0 * params.dim as f64 / params.lambda as f64).ceil() as usize
    }
}

/// First met criterion in the order MaxCondition, TolFunHist, TolX,
/// EqualFunValues, Stagnation, NoEffectAxis, NoEffectCoord.
pub fn check_restart(
    state: &CmaState,
    params: &CmaParams,
    history: &FitnessHistory,
) -> Option<RestartCriterion> {
    let d = state.dim();
    let eigen = state.eigen();

    if eigen.condition_number() > MAX_CONDITION {
        return Some(RestartCriterion::MaxCondition);
    }

    let window = FitnessHistory::tol_fun_window(params);
    if history.best.len() >= window {
        let recent = &history.best[history.best.len() - window..];
        let (lo, hi) = recent
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
        if hi - lo < TOL_FUN_HIST {
            return Some(RestartCriterion::TolFunHist);
        }
    }

    let tol_x = TOL_X_FACTOR * state.sigma0;
    let cov = state.covariance();
    if (0..d).all(|i| {
        state.sigma * state.p_c[i].abs() < tol_x && state.sigma * cov[(i, i)].sqrt() < tol_x
    }) {
        return Some(RestartCriterion::TolX);
    }

    let gens = history.generations();
    let eq_window = (0.1 * gens as f64).ceil() as usize + 10;
    if gens >= eq_window && history.flat[gens - eq_window..].iter().all(|&f| f) {
        return Some(RestartCriterion::EqualFunValues);
    }

    let stagnation = 20 * d;
    if gens >= stagnation && gens - history.last_improvement >= stagnation {
        return Some(RestartCriterion::Stagnation);
    }

    if state.generation > 0 {
        let axis = state.generation % d;
        let shift = eigen.vectors.column(axis) * (0.1 * state.sigma * eigen.values[axis].sqrt());
        if (0..d).all(|i| state.mean[i] + shift[i] == state.mean[i]) {
            return Some(RestartCriterion::NoEffectAxis);
        }
    }

    if (0..d).any(|i| state.mean[i] + 0.2 * state.sigma * cov[(i, i)].sqrt() == state.mean[i]) {
        return Some(RestartCriterion::NoEffectCoord);
    }
    None
}
