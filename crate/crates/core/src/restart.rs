//! Population size and initial step size for consecutive restarts under the
//! naive, IPOP and BIPOP policies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    #[serde(rename = "restart")]
    Naive,
    Ipop,
    Bipop,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Naive => "restart",
            StrategyKind::Ipop => "ipop",
            StrategyKind::Bipop => "bipop",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "restart" => Ok(StrategyKind::Naive),
            "ipop" => Ok(StrategyKind::Ipop),
            "bipop" => Ok(StrategyKind::Bipop),
            other => Err(Error::config(
                "strategy",
                format!("expected restart | ipop | bipop, got `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Default,
    Large,
    Small,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrategyState {
    pub restarts_done: usize,
    pub large_regime_count: u32,
    pub small_regime_count: usize,
    pub evals_large: usize,
    pub evals_small: usize,
    pub lambda_default: usize,
}

impl StrategyState {
    pub fn new(lambda_default: usize) -> Self {
        StrategyState {
            restarts_done: 0,
            large_regime_count: 0,
            small_regime_count: 0,
            evals_large: 0,
            evals_small: 0,
            lambda_default,
        }
    }

    /// Charges a finished segment to its regime's budget.
    pub fn record_segment(&mut self, regime: Regime, evals: usize) {
        match regime {
            Regime::Small => self.evals_small += evals,
            Regime::Large | Regime::Default => self.evals_large += evals,
        }
    }

    /// Population size of the next large-regime segment.
    pub fn lambda_large(&self) -> usize {
        self.lambda_default << self.large_regime_count
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestartParams {
    pub lambda: usize,
    pub sigma0: f64,
    pub regime: Regime,
}

/// Parameters for the next segment (the very first segment included) and
/// advances `st`. BIPOP draws `u, v ~ U(0, 1)` from `rng` in small regimes
/// only.
pub fn next_restart_params(
    kind: StrategyKind,
    st: &mut StrategyState,
    sigma0_base: f64,
    rng: &mut RngStream,
) -> RestartParams {
    let params = match kind {
        StrategyKind::Naive => RestartParams {
            lambda: st.lambda_default,
            sigma0: sigma0_base,
            regime: Regime::Default,
        },
        StrategyKind::Ipop => RestartParams {
            lambda: st.lambda_default << st.restarts_done.min(40),
            sigma0: sigma0_base,
            regime: Regime::Default,
        },
        StrategyKind::Bipop => {
            if st.restarts_done == 0 || st.evals_large <= st.evals_small {
                let lambda = st.lambda_large();
                st.large_regime_count += 1;
                RestartParams {
                    lambda,
                    sigma0: sigma0_base,
                    regime: Regime::Large,
                }
            } else {
                let u = rng.uniform();
                let v = rng.uniform();
                st.small_regime_count += 1;
                RestartParams {
                    lambda: bipop_small_lambda(st.lambda_default, st.lambda_large(), u),
                    sigma0: sigma0_base * 10f64.powf(-2.0 * v),
                    regime: Regime::Small,
                }
            }
        }
    };
    st.restarts_done += 1;
    params
}

/// `⌊λ_def · (λ_large / λ_def)^(u²/2)⌋`, never below `λ_def`.
pub fn bipop_small_lambda(lambda_default: usize, lambda_large: usize, u: f64) -> usize {
    let ratio = lambda_large as f64 / lambda_default as f64;
    let lambda = (lambda_default as f64 * ratio.powf(u * u / 2.0)).floor() as usize;
    lambda.clamp(lambda_default, lambda_large.max(lambda_default))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ipop_doubles() {
        let mut st = StrategyState::new(8);
        let mut rng = RngStream::new(0);
        let lambdas: Vec<usize> = (0..4)
            .map(|_| next_restart_params(StrategyKind::Ipop, &mut st, 2.0, &mut rng).lambda)
            .collect();
        assert_eq!(lambdas, vec![8, 16, 32, 64]);
    }

    #[test]
    fn naive_is_constant() {
        let mut st = StrategyState::new(6);
        let mut rng = RngStream::new(0);
        for _ in 0..10 {
            let p = next_restart_params(StrategyKind::Naive, &mut st, 1.5, &mut rng);
            assert_eq!((p.lambda, p.sigma0), (6, 1.5));
        }
    }

    #[test]
    fn bipop_small_lambda_with_zero_u() {
        assert_eq!(bipop_small_lambda(8, 64, 0.0), 8);
        assert_eq!(bipop_small_lambda(8, 64, 1.0), 22); // 8·8^(1/2)
    }

    #[test]
    fn bipop_alternates_by_budget() {
        let mut st = StrategyState::new(6);
        let mut rng = RngStream::new(11);
        let first = next_restart_params(StrategyKind::Bipop, &mut st, 2.0, &mut rng);
        assert_eq!(first.regime, Regime::Large);
        assert_eq!(first.lambda, 6);
        st.record_segment(first.regime, 1000);

        for _ in 0..50 {
            let p = next_restart_params(StrategyKind::Bipop, &mut st, 2.0, &mut rng);
            match p.regime {
                Regime::Small => {
                    assert!(p.lambda >= 6 && p.lambda <= st.lambda_large());
                    assert!(p.sigma0 >= 2.0 / 100.0 && p.sigma0 <= 2.0);
                    st.record_segment(p.regime, 100);
                }
                Regime::Large => {
                    assert_eq!(p.sigma0, 2.0);
                    assert_eq!(p.lambda, 6 << (st.large_regime_count - 1));
                    st.record_segment(p.regime, 1000);
                }
                Regime::Default => unreachable!(),
            }
        }
        assert!(st.small_regime_count > 0 && st.large_regime_count > 1);
    }

    #[test]
    fn parses_cli_names() {
        assert_eq!("restart".parse::<StrategyKind>().unwrap(), StrategyKind::Naive);
        assert_eq!("ipop".parse::<StrategyKind>().unwrap(), StrategyKind::Ipop);
        assert_eq!("bipop".parse::<StrategyKind>().unwrap(), StrategyKind::Bipop);
        assert!("IPOP-ish".parse::<StrategyKind>().is_err());
    }
}
