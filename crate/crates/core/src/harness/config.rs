use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coercion::CoercionSizes;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::ModelSpec;
use crate::reward::{Problem, RewardSpec};

/// The eight example studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    MinPut,
    MaxCall,
    BasketPut,
    AsianFixed,
    AsianFloat,
    Lookback,
    Range,
    SvsiMinPut,
}

impl Example {
    pub fn name(&self) -> &'static str {
        match self {
            Example::MinPut => "min_put",
            Example::MaxCall => "max_call",
            Example::BasketPut => "basket_put",
            Example::AsianFixed => "asian_fixed",
            Example::AsianFloat => "asian_float",
            Example::Lookback => "lookback",
            Example::Range => "range",
            Example::SvsiMinPut => "svsi_min_put",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub expiry: f64,
    /// Number of grid times including 0 and expiry.
    pub n_times: usize,
    /// Exercise is forbidden strictly before this time.
    #[serde(default)]
    pub lockout: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<TimeGrid> {
        TimeGrid::uniform(self.expiry, self.n_times, self.lockout)
    }
}

/// Simulation counts before scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimSizes {
    pub n_bins: usize,
    pub n_block: usize,
    pub n_primal: usize,
    pub n_dual: usize,
    pub n_sub: usize,
}

impl SimSizes {
    /// `N_block`, `N_primal`, `N_dual` scale linearly; `N_bins` and `N_sub`
    /// scale with the square root, never dropping below 10 (or below their
    /// unscaled value, if that is smaller).
    pub fn scaled(&self, scale: f64) -> SimSizes {
        let lin = |n: usize| ((n as f64 * scale).round() as usize).max(1);
        let root = |n: usize| {
            ((n as f64 * scale.sqrt()).round() as usize)
                .max(n.min(10))
                .max(1)
        };
        SimSizes {
            n_bins: root(self.n_bins).max(2),
            n_block: lin(self.n_block),
            n_primal: lin(self.n_primal),
            n_dual: lin(self.n_dual),
            n_sub: root(self.n_sub),
        }
    }

    pub fn coercion(&self) -> CoercionSizes {
        CoercionSizes {
            n_bins: self.n_bins,
            n_block: self.n_block,
        }
    }
}

pub const DEFAULT_SCALE: f64 = 0.25;

fn default_scale() -> f64 {
    DEFAULT_SCALE
}

/// One table row: model, reward, grid, simulation sizes and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Row identifier, e.g. `table1_d2`.
    pub name: String,
    pub example: Example,
    /// The parameters that vary across the rows of the table, for reporting.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub model: ModelSpec,
    pub reward: RewardSpec,
    pub grid: GridConfig,
    pub sizes: SimSizes,
    #[serde(default)]
    pub seed: u64,
    /// Multiplier on all simulation counts.
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Counts after applying `scale`.
    pub fn resolved_sizes(&self) -> SimSizes {
        self.sizes.scaled(self.scale)
    }

    /// Checks every field and builds the problem and grid.
    pub fn validate(&self) -> Result<(Problem, TimeGrid)> {
        if !(self.scale > 0.0 && self.scale <= 10.0) {
            return Err(Error::InvalidConfig(format!(
                "scale must lie in (0, 10], got {}",
                self.scale
            )));
        }
        let s = self.sizes;
        if s.n_bins < 2 || s.n_block == 0 || s.n_primal == 0 || s.n_dual == 0 || s.n_sub == 0 {
            return Err(Error::InvalidConfig(format!(
                "simulation sizes must be positive: {s:?}"
            )));
        }
        let grid = self.grid.build()?;
        let problem = Problem::new(&self.model, &self.reward)?;
        Ok((problem, grid))
    }
}
