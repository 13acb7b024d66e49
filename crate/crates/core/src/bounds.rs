//! Simulation bounds on the true process.
//!
//! * lower bound: the stopping rule `S` read off the coerced chain, applied
//!   to fresh paths;
//! * upper bound: `E[max_t (Z_t - M_t)]` with martingale increments
//!   `V(t+1, Z_{t+1}) - Ê[V(t+1, Z_{t+1}) | X_t]`, the conditional expectation
//!   estimated by one-step subsimulation (or computed exactly when the process
//!   exposes a finite transition law);
//! * European value: the mean reward at expiry.
//!
//! Each path draws from its own counter-based stream, and samples are reduced
//! in path order, so estimates do not depend on the worker count.

use rayon::prelude::*;

use crate::chain::ValueStoppingTable;
use crate::coercion::Coercion;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::Process;
use crate::reward::RewardFn;
use crate::rng::{Purpose, StreamKey};
use crate::stats::BoundEstimate;

fn check_shapes(grid: &TimeGrid, c: &Coercion, table: &ValueStoppingTable) -> Result<()> {
    if c.n_times() != grid.len() || table.n_times() != grid.len() || table.n_bins() != c.n_bins() {
        return Err(Error::InvalidConfig(format!(
            "coercion ({} × {}), table ({} × {}) and grid ({}) disagree",
            c.n_times(),
            c.n_bins(),
            table.n_times(),
            table.n_bins(),
            grid.len()
        )));
    }
    Ok(())
}

fn check_count(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig(format!("{what} must be at least 1")));
    }
    Ok(())
}

/// Reward collected by following the coerced stopping rule on one path.
#[allow(clippy::too_many_arguments)]
fn stopped_reward<P: Process, G: RewardFn>(
    process: &P,
    reward: &G,
    grid: &TimeGrid,
    c: &Coercion,
    table: &ValueStoppingTable,
    key: &StreamKey,
    path: u64,
    state: &mut [f64],
) -> f64 {
    process.init_state(state);
    let last = grid.last_index();
    for t in 0..=last {
        if grid.can_exercise(t) {
            let z = reward.reward(grid, t, state);
            if t == last || table.stop_at(c, t, z) {
                return z;
            }
        }
        let mut rng = key.rng(Purpose::PRIMAL, path, t as u64, 0);
        process.advance(grid, t, state, &mut rng);
    }
    unreachable!("exercise is always permitted at expiry")
}

/// Lower bound from the induced stopping rule on `n_primal` fresh paths.
pub fn lower_bound<P: Process, G: RewardFn>(
    process: &P,
    reward: &G,
    grid: &TimeGrid,
    c: &Coercion,
    table: &ValueStoppingTable,
    n_primal: usize,
    key: &StreamKey,
) -> Result<BoundEstimate> {
    check_shapes(grid, c, table)?;
    check_count(n_primal, "n_primal")?;
    let stride = process.state_len();
    let samples: Vec<f64> = (0..n_primal)
        .into_par_iter()
        .map_init(
            || vec![0.0; stride],
            |state, p| stopped_reward(process, reward, grid, c, table, key, p as u64, state),
        )
        .collect();
    Ok(BoundEstimate::from_samples(&samples))
}

/// How the dual bound estimates `E[V(t+1, ·) | X_t]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsim {
    /// Average over this many independent one-step successors.
    Sampled(usize),
    /// Exact expectation over [`Process::successors`].
    Exact,
}

/// Dual bound settings: path count, subsimulation mode and the stream
/// purposes for the outer paths and the subsimulated successors.
#[derive(Debug, Clone, Copy)]
pub struct DualConfig {
    pub n_dual: usize,
    pub subsim: Subsim,
    pub path_purpose: Purpose,
    pub sub_purpose: Purpose,
}

impl DualConfig {
    pub fn new(n_dual: usize, subsim: Subsim) -> Self {
        Self {
            n_dual,
            subsim,
            path_purpose: Purpose::DUAL,
            sub_purpose: Purpose::SUBSIM,
        }
    }
}

/// Upper bound together with per-path diagnostics.
#[derive(Debug, Clone)]
pub struct DualOutcome {
    pub estimate: BoundEstimate,
    /// `max_t (Z_t - M_t)` for each dual path.
    pub samples: Vec<f64>,
    /// Sample statistics of the martingale increment over `(t_i, t_{i+1}]`.
    pub increments: Vec<BoundEstimate>,
}

struct DualPath {
    sup: f64,
    increments: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn dual_path<P: Process, G: RewardFn>(
    process: &P,
    reward: &G,
    grid: &TimeGrid,
    c: &Coercion,
    table: &ValueStoppingTable,
    cfg: &DualConfig,
    key: &StreamKey,
    path: u64,
    state: &mut [f64],
    scratch: &mut [f64],
) -> DualPath {
    let last = grid.last_index();
    process.init_state(state);
    let mut martingale = 0.0;
    let mut sup = if grid.can_exercise(0) {
        reward.reward(grid, 0, state)
    } else {
        f64::NEG_INFINITY
    };
    let mut increments = Vec::with_capacity(last);

    for t in 0..last {
        let expected = match cfg.subsim {
            Subsim::Sampled(n_sub) => {
                let mut acc = 0.0;
                for j in 0..n_sub {
                    scratch.copy_from_slice(state);
                    let mut rng = key.rng(cfg.sub_purpose, path, t as u64, j as u64 + 1);
                    process.advance(grid, t, scratch, &mut rng);
                    acc += table.value_at(c, t + 1, reward.reward(grid, t + 1, scratch));
                }
                acc / n_sub as f64
            }
            Subsim::Exact => process
                .successors(grid, t, state)
                .expect("checked before simulation")
                .iter()
                .map(|(w, next)| w * table.value_at(c, t + 1, reward.reward(grid, t + 1, next)))
                .sum(),
        };
        let mut rng = key.rng(cfg.path_purpose, path, t as u64, 0);
        process.advance(grid, t, state, &mut rng);
        let z = reward.reward(grid, t + 1, state);
        let increment = table.value_at(c, t + 1, z) - expected;
        martingale += increment;
        increments.push(increment);
        if grid.can_exercise(t + 1) {
            sup = sup.max(z - martingale);
        }
    }
    DualPath { sup, increments }
}

/// Dual upper bound with full diagnostics.
pub fn dual_bound<P: Process, G: RewardFn>(
    process: &P,
    reward: &G,
    grid: &TimeGrid,
    c: &Coercion,
    table: &ValueStoppingTable,
    cfg: &DualConfig,
    key: &StreamKey,
) -> Result<DualOutcome> {
    check_shapes(grid, c, table)?;
    check_count(cfg.n_dual, "n_dual")?;
    let stride = process.state_len();
    match cfg.subsim {
        Subsim::Sampled(n) => check_count(n, "n_sub")?,
        Subsim::Exact => {
            let mut s = vec![0.0; stride];
            process.init_state(&mut s);
            if process.successors(grid, 0, &s).is_none() {
                return Err(Error::ExactExpectationUnavailable);
            }
        }
    }
    let paths: Vec<DualPath> = (0..cfg.n_dual)
        .into_par_iter()
        .map_init(
            || (vec![0.0; stride], vec![0.0; stride]),
            |(state, scratch), p| {
                dual_path(
                    process, reward, grid, c, table, cfg, key, p as u64, state, scratch,
                )
            },
        )
        .collect();

    let samples: Vec<f64> = paths.iter().map(|p| p.sup).collect();
    let increments = (0..grid.last_index())
        .map(|t| {
            let col: Vec<f64> = paths.iter().map(|p| p.increments[t]).collect();
            BoundEstimate::from_samples(&col)
        })
        .collect();
    Ok(DualOutcome {
        estimate: BoundEstimate::from_samples(&samples),
        samples,
        increments,
    })
}

/// Upper bound from the approximate Snell martingale on `n_dual` paths.
#[allow(clippy::too_many_arguments)]
pub fn upper_bound<P: Process, G: RewardFn>(
    process: &P,
    reward: &G,
    grid: &TimeGrid,
    c: &Coercion,
    table: &ValueStoppingTable,
    n_dual: usize,
    subsim: Subsim,
    key: &StreamKey,
) -> Result<BoundEstimate> {
    let cfg = DualConfig::new(n_dual, subsim);
    Ok(dual_bound(process, reward, grid, c, table, &cfg, key)?.estimate)
}

/// Mean reward at expiry over `n_paths` fresh paths (actual, unbinned values).
pub fn european_value<P: Process, G: RewardFn>(
    process: &P,
    reward: &G,
    grid: &TimeGrid,
    n_paths: usize,
    key: &StreamKey,
) -> Result<BoundEstimate> {
    check_count(n_paths, "n_paths")?;
    let stride = process.state_len();
    let last = grid.last_index();
    let samples: Vec<f64> = (0..n_paths)
        .into_par_iter()
        .map_init(
            || vec![0.0; stride],
            |state, p| {
                process.init_state(state);
                for t in 0..last {
                    let mut rng = key.rng(Purpose::EUROPEAN, p as u64, t as u64, 0);
                    process.advance(grid, t, state, &mut rng);
                }
                reward.reward(grid, last, state)
            },
        )
        .collect();
    Ok(BoundEstimate::from_samples(&samples))
}
