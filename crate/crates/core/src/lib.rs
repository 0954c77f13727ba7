//! Restart CMA-ES with repelling restarts, the Hill-Valley basin test and the
//! restarts' redundancy factor, plus a multimodal benchmark catalog and an
//! experiment harness.

pub mod benchmarks;
pub mod bounds;
pub mod cma;
pub mod error;
pub mod harness;
pub mod hill_valley;
pub mod numerics;
pub mod redundancy;
pub mod repelling;
pub mod restart;

pub use benchmarks::{make_problem, Problem};
pub use bounds::Bounds;
pub use error::{Error, Result};
pub use hill_valley::{hv_test, HvConfig};
pub use redundancy::{classify, rrf, RunLedger};
pub use repelling::{run_rr_cmaes, RepellingConfig, RunOutput, RunSpec};
pub use restart::StrategyKind;
