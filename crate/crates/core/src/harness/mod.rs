//! Configuration, orchestration and reporting: one call prices one table row.

pub mod config;
pub mod presets;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use crate::artifact;
use crate::bounds::{european_value, lower_bound, upper_bound, Subsim};
use crate::chain::solve_chain;
use crate::coercion::build_coercion;
use crate::error::{Error, Result};
use crate::rng::StreamKey;

pub use config::{Example, ExperimentConfig, GridConfig, SimSizes};
pub use report::{Report, ReportRow};

/// Where to persist or reuse the coercion artifact.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub save_coercion: Option<PathBuf>,
    pub load_coercion: Option<PathBuf>,
}

/// Builds the coercion, solves the chain, then estimates the lower, upper
/// and European values, each from its own random streams.
pub fn run_row(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ReportRow> {
    let start = Instant::now();
    let (problem, grid) = cfg.validate()?;
    let sizes = cfg.resolved_sizes();
    let key = StreamKey::new(cfg.seed);

    let (coercion, table) = match &opts.load_coercion {
        Some(path) => {
            let (c, table) = artifact::load(path)?;
            if c.n_times() != grid.len() || c.n_bins() != sizes.n_bins {
                return Err(Error::Artifact(format!(
                    "artifact is {} times × {} bins, configuration needs {} × {}",
                    c.n_times(),
                    c.n_bins(),
                    grid.len(),
                    sizes.n_bins
                )));
            }
            let table = match table {
                Some(t) => t,
                None => solve_chain(&c, &grid)?,
            };
            (c, table)
        }
        None => {
            let c = build_coercion(&problem, &problem, &grid, sizes.coercion(), &key)?;
            let table = solve_chain(&c, &grid)?;
            (c, table)
        }
    };
    if let Some(path) = &opts.save_coercion {
        artifact::save(path, &coercion, Some(&table))?;
    }

    let low = lower_bound(
        &problem,
        &problem,
        &grid,
        &coercion,
        &table,
        sizes.n_primal,
        &key,
    )?;
    let high = upper_bound(
        &problem,
        &problem,
        &grid,
        &coercion,
        &table,
        sizes.n_dual,
        Subsim::Sampled(sizes.n_sub),
        &key,
    )?;
    let european = european_value(&problem, &problem, &grid, sizes.n_primal, &key)?;

    Ok(ReportRow {
        name: cfg.name.clone(),
        example: cfg.example.name().into(),
        european: Some(european),
        low: Some(low),
        high: Some(high),
        gap_pct: Some(100.0 * (high.mean - low.mean) / low.mean),
        seconds: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
        error: None,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Report> {
    Ok(Report {
        rows: vec![run_row(cfg, opts)?],
    })
}

/// Runs every configuration in order. A failing row is reported with its
/// error and does not stop the sweep.
pub fn sweep(cfgs: &[ExperimentConfig]) -> Report {
    let rows = cfgs
        .iter()
        .map(|cfg| {
            let start = Instant::now();
            run_row(cfg, &RunOptions::default()).unwrap_or_else(|e| ReportRow {
                name: cfg.name.clone(),
                example: cfg.example.name().into(),
                european: None,
                low: None,
                high: None,
                gap_pct: None,
                seconds: start.elapsed().as_secs_f64(),
                config: cfg.clone(),
                error: Some(e.to_string()),
            })
        })
        .collect();
    Report { rows }
}
