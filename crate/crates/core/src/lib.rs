//! Bermudan option bounds by Markovian coercion of the reward process.
//!
//! The reward `Z_t = g(t, X_t)` of any simulatable Markov model is binned onto
//! a finite chain whose bins and transition probabilities are estimated from
//! simulated paths. Dynamic programming on that chain gives a stopping rule
//! (evaluated on fresh paths for a lower bound) and a value function whose
//! martingale part, estimated by subsimulation, gives a dual upper bound.
//!
//! ```no_run
//! use bermuda::harness::{presets, run_experiment, RunOptions};
//!
//! let cfg = presets::min_put(2).with_seed(7).with_scale(0.25);
//! let report = run_experiment(&cfg, &RunOptions::default()).unwrap();
//! print!("{}", report.to_text());
//! ```

pub mod artifact;
pub mod bounds;
pub mod chain;
pub mod chain_process;
pub mod coercion;
pub mod error;
pub mod grid;
pub mod harness;
pub mod model;
pub mod reward;
pub mod rng;
pub mod stats;

pub use bounds::{dual_bound, european_value, lower_bound, upper_bound, DualConfig, Subsim};
pub use chain::{solve_chain, ValueStoppingTable};
pub use chain_process::ChainProcess;
pub use coercion::{build_coercion, BinIndex, Coercion, CoercionSizes};
pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use model::{Model, ModelKind, ModelSpec, Numeraire, Process, StateBlock};
pub use reward::{PayoffId, Problem, RewardFn, RewardSpec};
pub use rng::{Purpose, StreamKey};
pub use stats::BoundEstimate;
