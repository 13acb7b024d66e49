//! Simulatable Markov models.
//!
//! Prices are carried as discounted log prices `x = log S - ∫ r ds`. Every
//! model advances one grid interval at a time; the reward layer only ever sees
//! a state row (`&[f64]`) whose layout is fixed by the model kind:
//!
//! | kind         | row layout                                        |
//! |--------------|---------------------------------------------------|
//! | `multi_gbm`  | `x_1 .. x_d`                                      |
//! | `asian_gbm`  | `x, A, averaging mass`                            |
//! | `window_gbm` | `x, count, S_(k-a) .. S_k` (oldest first)         |
//! | `svsi`       | `x_1 .. x_d, ξ_1 .. ξ_d, z, ∫ r ds`               |

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::{Purpose, StreamKey};

/// Anything that can be initialised and advanced one grid step at a time.
pub trait Process: Sync {
    /// Number of reals in one state row.
    fn state_len(&self) -> usize;

    /// Writes the (deterministic) time-0 state.
    fn init_state(&self, state: &mut [f64]);

    /// Advances `state` from `grid.time(t_index)` to `grid.time(t_index + 1)`.
    fn advance<R: Rng + ?Sized>(
        &self,
        grid: &TimeGrid,
        t_index: usize,
        state: &mut [f64],
        rng: &mut R,
    );

    /// Finite one-step transition law, when the process has one. Used for the
    /// exact conditional expectations of the dual bound.
    fn successors(
        &self,
        _grid: &TimeGrid,
        _t_index: usize,
        _state: &[f64],
    ) -> Option<Vec<(f64, Vec<f64>)>> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Numeraire {
    /// Discounting by the bank account; simulation under the risk-neutral measure.
    #[default]
    Bank,
    /// Discounted asset price `e^{-(r-q)t} S_t / S_0` of the single asset.
    Stock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    MultiGbm,
    AsianGbm,
    WindowGbm,
    Svsi,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::MultiGbm => "multi_gbm",
            ModelKind::AsianGbm => "asian_gbm",
            ModelKind::WindowGbm => "window_gbm",
            ModelKind::Svsi => "svsi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsianParams {
    /// Length `δ` of the averaging window before time 0, in years.
    pub window: f64,
    /// Average over `[-δ, 0]`; defaults to the initial price.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_average: Option<f64>,
}

/// Stochastic volatility / stochastic interest parameters. Volatility is
/// `σ̄ e^{ξ}` with `ξ` an OU process, the short rate is `r̄ e^{z}` with `z` an
/// OU process; both load on a common market Brownian motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvsiParams {
    pub rho_s: f64,
    pub rho_xi: f64,
    pub rho_r: f64,
    pub sigma_bar: f64,
    pub r_bar: f64,
    pub beta_xi: f64,
    pub sigma_xi: f64,
    pub beta_r: f64,
    pub sigma_r: f64,
    /// Initial volatility, common to all assets.
    pub sigma0: f64,
    /// Initial short rate.
    pub r0: f64,
    pub stochastic_vol: bool,
    pub stochastic_rate: bool,
}

impl SvsiParams {
    /// The defaults used throughout the stochastic-volatility study.
    pub fn standard() -> Self {
        Self {
            rho_s: 0.3,
            rho_xi: 0.3,
            rho_r: 0.3,
            sigma_bar: 0.6,
            r_bar: 0.06,
            beta_xi: 4.5,
            sigma_xi: 0.3,
            beta_r: 0.02,
            sigma_r: 0.12,
            sigma0: 0.6,
            r0: 0.06,
            stochastic_vol: true,
            stochastic_rate: true,
        }
    }
}

/// Serializable description of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Initial prices `S_0`, one per asset.
    pub spot: Vec<f64>,
    #[serde(default)]
    pub rate: f64,
    /// Continuous dividend yield.
    #[serde(default)]
    pub dividend: f64,
    /// Common volatility, used unless `sigma_matrix` is given.
    #[serde(default)]
    pub volatility: f64,
    /// Common pairwise correlation, used with `volatility`.
    #[serde(default)]
    pub correlation: f64,
    /// Full volatility matrix `σ`; the covariance rate is `σσᵀ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asian: Option<AsianParams>,
    /// Number of recorded lags `a` for window payoffs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lags: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svsi: Option<SvsiParams>,
    #[serde(default)]
    pub numeraire: Numeraire,
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        self.spot.len()
    }

    /// `d` independent (or equicorrelated) log-Brownian assets.
    pub fn multi_gbm(d: usize, spot: f64, rate: f64, volatility: f64, correlation: f64) -> Self {
        Self {
            kind: ModelKind::MultiGbm,
            spot: vec![spot; d],
            rate,
            dividend: 0.0,
            volatility,
            correlation,
            sigma_matrix: None,
            asian: None,
            lags: None,
            svsi: None,
            numeraire: Numeraire::Bank,
        }
    }

    pub fn asian_gbm(spot: f64, rate: f64, volatility: f64, window: f64, average: f64) -> Self {
        Self {
            kind: ModelKind::AsianGbm,
            asian: Some(AsianParams {
                window,
                initial_average: Some(average),
            }),
            ..Self::multi_gbm(1, spot, rate, volatility, 0.0)
        }
    }

    pub fn window_gbm(spot: f64, rate: f64, volatility: f64, lags: usize) -> Self {
        Self {
            kind: ModelKind::WindowGbm,
            lags: Some(lags),
            ..Self::multi_gbm(1, spot, rate, volatility, 0.0)
        }
    }

    pub fn svsi(d: usize, spot: f64, params: SvsiParams) -> Self {
        Self {
            kind: ModelKind::Svsi,
            rate: params.r0,
            volatility: params.sigma_bar,
            correlation: params.rho_s,
            svsi: Some(params),
            ..Self::multi_gbm(d, spot, 0.0, 0.0, 0.0)
        }
    }

    /// Covariance rate `Σ = σσᵀ` of the log prices.
    pub fn covariance(&self) -> Result<DMatrix<f64>> {
        let d = self.dim();
        if let Some(rows) = &self.sigma_matrix {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidModel(format!("sigma_matrix must be {d}x{d}")));
            }
            let sigma = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
            Ok(&sigma * sigma.transpose())
        } else {
            let v2 = self.volatility * self.volatility;
            Ok(DMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    v2
                } else {
                    v2 * self.correlation
                }
            }))
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidModel(msg()))
    }
}

#[derive(Debug, Clone)]
enum Extra {
    None,
    Asian { average: f64, window: f64 },
    Window { lags: usize },
    Svsi(SvsiParams),
}

/// A validated, ready-to-simulate model.
#[derive(Debug, Clone)]
pub struct Model {
    spec: ModelSpec,
    d: usize,
    log_spot: Vec<f64>,
    /// Lower-triangular factor of `Σ`, row-major.
    factor: Vec<f64>,
    diagonal: bool,
    /// Drift rate of the discounted log prices under the simulation measure.
    drift: Vec<f64>,
    extra: Extra,
}

impl Model {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let d = spec.dim();
        check(d >= 1, || "at least one asset is required".into())?;
        check(spec.spot.iter().all(|&s| s.is_finite() && s > 0.0), || {
            format!("initial prices must be positive, got {:?}", spec.spot)
        })?;
        check(spec.rate.is_finite() && spec.dividend.is_finite(), || {
            "rate and dividend must be finite".into()
        })?;
        if spec.numeraire == Numeraire::Stock && d != 1 {
            return Err(Error::StockNumeraireDimension(d));
        }
        check(
            spec.kind == ModelKind::MultiGbm || spec.kind == ModelKind::Svsi || d == 1,
            || format!("{} models carry a single asset", spec.kind.name()),
        )?;

        let extra = match spec.kind {
            ModelKind::MultiGbm => Extra::None,
            ModelKind::AsianGbm => {
                let p = spec
                    .asian
                    .as_ref()
                    .ok_or_else(|| Error::InvalidModel("asian_gbm needs asian params".into()))?;
                let average = p.initial_average.unwrap_or(spec.spot[0]);
                check(p.window > 0.0 && p.window.is_finite(), || {
                    format!("averaging window must be positive, got {}", p.window)
                })?;
                check(average > 0.0 && average.is_finite(), || {
                    format!("initial average must be positive, got {average}")
                })?;
                Extra::Asian {
                    average,
                    window: p.window,
                }
            }
            ModelKind::WindowGbm => {
                let lags = spec
                    .lags
                    .ok_or_else(|| Error::InvalidModel("window_gbm needs lags".into()))?;
                check(lags >= 1, || "lags must be positive".into())?;
                Extra::Window { lags }
            }
            ModelKind::Svsi => {
                let p = spec
                    .svsi
                    .clone()
                    .ok_or_else(|| Error::InvalidModel("svsi needs svsi params".into()))?;
                check(spec.numeraire == Numeraire::Bank, || {
                    "svsi supports the bank numeraire only".into()
                })?;
                for (name, rho) in [("rho_s", p.rho_s), ("rho_xi", p.rho_xi), ("rho_r", p.rho_r)] {
                    check(rho.abs() < 1.0, || {
                        format!("|{name}| must be < 1, got {rho}")
                    })?;
                }
                for (name, v) in [
                    ("sigma_bar", p.sigma_bar),
                    ("r_bar", p.r_bar),
                    ("beta_xi", p.beta_xi),
                    ("sigma_xi", p.sigma_xi),
                    ("beta_r", p.beta_r),
                    ("sigma_r", p.sigma_r),
                    ("sigma0", p.sigma0),
                ] {
                    check(v > 0.0 && v.is_finite(), || {
                        format!("{name} must be positive, got {v}")
                    })?;
                }
                check(
                    p.r0.is_finite() && (p.r0 > 0.0 || (!p.stochastic_rate && p.r0 >= 0.0)),
                    || format!("r0 must be positive for a stochastic rate, got {}", p.r0),
                )?;
                Extra::Svsi(p)
            }
        };

        let (factor, diagonal, variance) = if let Extra::Svsi(_) = extra {
            (vec![0.0; d * d], true, vec![0.0; d])
        } else {
            check(spec.correlation.abs() < 1.0, || {
                format!("|correlation| must be < 1, got {}", spec.correlation)
            })?;
            let cov = spec.covariance()?;
            check(cov.iter().all(|v| v.is_finite()), || {
                "covariance must be finite".into()
            })?;
            let variance: Vec<f64> = (0..d).map(|i| cov[(i, i)]).collect();
            if cov.iter().all(|&v| v == 0.0) {
                (vec![0.0; d * d], true, variance)
            } else {
                let chol = cov.clone().cholesky().ok_or_else(|| {
                    Error::InvalidModel("covariance must be symmetric positive-definite".into())
                })?;
                let l = chol.l();
                let factor: Vec<f64> = (0..d * d).map(|k| l[(k / d, k % d)]).collect();
                let diagonal = (0..d).all(|i| (0..i).all(|j| factor[i * d + j] == 0.0));
                (factor, diagonal, variance)
            }
        };

        let shift = if spec.numeraire == Numeraire::Stock {
            1.0
        } else {
            0.0
        };
        let drift = variance
            .iter()
            .map(|&v| -0.5 * v - spec.dividend + shift * v)
            .collect();

        Ok(Self {
            spec: spec.clone(),
            d,
            log_spot: spec.spot.iter().map(|s| s.ln()).collect(),
            factor,
            diagonal,
            drift,
            extra,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn spot(&self) -> &[f64] {
        &self.spec.spot
    }

    pub fn numeraire(&self) -> Numeraire {
        self.spec.numeraire
    }

    /// Drift rate of each discounted log price under the simulation measure.
    pub fn log_drift(&self) -> &[f64] {
        &self.drift
    }

    /// Discounted log prices.
    pub fn log_prices<'a>(&self, state: &'a [f64]) -> &'a [f64] {
        &state[..self.d]
    }

    /// `∫_0^t r ds` along the path.
    pub fn discount_integral(&self, t: f64, state: &[f64]) -> f64 {
        match self.extra {
            Extra::Svsi(_) => state[2 * self.d + 1],
            _ => self.spec.rate * t,
        }
    }

    /// Running average and averaging mass of an Asian state.
    pub fn average(&self, state: &[f64]) -> Option<(f64, f64)> {
        match self.extra {
            Extra::Asian { .. } => Some((state[1], state[2])),
            _ => None,
        }
    }

    /// Recorded (undiscounted) prices of a window state, oldest first.
    pub fn window<'a>(&self, state: &'a [f64]) -> Option<&'a [f64]> {
        match self.extra {
            Extra::Window { .. } => {
                let count = state[1] as usize;
                Some(&state[2..2 + count])
            }
            _ => None,
        }
    }

    /// Current volatilities and short rate of an svsi state.
    pub fn svsi_levels(&self, state: &[f64]) -> Option<(Vec<f64>, f64)> {
        match &self.extra {
            Extra::Svsi(p) => {
                let d = self.d;
                let vols = (0..d)
                    .map(|i| {
                        if p.stochastic_vol {
                            p.sigma_bar * state[d + i].exp()
                        } else {
                            p.sigma0
                        }
                    })
                    .collect();
                let r = if p.stochastic_rate {
                    p.r_bar * state[2 * d].exp()
                } else {
                    p.r0
                };
                Some((vols, r))
            }
            _ => None,
        }
    }

    fn gbm_step<R: Rng + ?Sized>(&self, dt: f64, x: &mut [f64], rng: &mut R) {
        let d = self.d;
        let sq = dt.sqrt();
        if self.diagonal {
            for (i, xi) in x.iter_mut().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                *xi += self.drift[i] * dt + sq * self.factor[i * d + i] * z;
            }
        } else {
            let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            for (i, xi) in x.iter_mut().enumerate() {
                let row = &self.factor[i * d..i * d + i + 1];
                let shock: f64 = row.iter().zip(&z).map(|(l, z)| l * z).sum();
                *xi += self.drift[i] * dt + sq * shock;
            }
        }
    }

    fn svsi_step<R: Rng + ?Sized>(&self, p: &SvsiParams, dt: f64, state: &mut [f64], rng: &mut R) {
        let d = self.d;
        let sq = dt.sqrt();
        let comp = |rho: f64| (1.0 - rho * rho).sqrt();
        let (vols, r) = self.svsi_levels(state).expect("svsi state");
        let market: f64 = rng.sample(StandardNormal);

        for i in 0..d {
            let own: f64 = rng.sample(StandardNormal);
            let s = vols[i];
            state[i] += s * sq * (p.rho_s * market + comp(p.rho_s) * own) - 0.5 * s * s * dt;
        }
        if p.stochastic_vol {
            let decay = (-p.beta_xi * dt).exp();
            let sd = p.sigma_xi * ((1.0 - decay * decay) / (2.0 * p.beta_xi)).sqrt();
            for i in 0..d {
                let own: f64 = rng.sample(StandardNormal);
                let xi = &mut state[d + i];
                *xi = *xi * decay + sd * (p.rho_xi * market + comp(p.rho_xi) * own);
            }
        }
        state[2 * d + 1] += r * dt;
        if p.stochastic_rate {
            let own: f64 = rng.sample(StandardNormal);
            let decay = (-p.beta_r * dt).exp();
            let sd = p.sigma_r * ((1.0 - decay * decay) / (2.0 * p.beta_r)).sqrt();
            let z = &mut state[2 * d];
            *z = *z * decay + sd * (p.rho_r * market + comp(p.rho_r) * own);
        }
    }
}

impl Process for Model {
    fn state_len(&self) -> usize {
        match &self.extra {
            Extra::None => self.d,
            Extra::Asian { .. } => 3,
            Extra::Window { lags } => 2 + lags + 1,
            Extra::Svsi(_) => 2 * self.d + 2,
        }
    }

    fn init_state(&self, state: &mut [f64]) {
        state[..self.d].copy_from_slice(&self.log_spot);
        match &self.extra {
            Extra::None => {}
            Extra::Asian { average, window } => {
                state[1] = *average;
                state[2] = *window;
            }
            Extra::Window { .. } => {
                state[1] = 1.0;
                state[2] = self.spec.spot[0];
                state[3..].fill(0.0);
            }
            Extra::Svsi(p) => {
                let d = self.d;
                let xi = if p.stochastic_vol {
                    (p.sigma0 / p.sigma_bar).ln()
                } else {
                    0.0
                };
                let z = if p.stochastic_rate {
                    (p.r0 / p.r_bar).ln()
                } else {
                    0.0
                };
                state[d..2 * d].fill(xi);
                state[2 * d] = z;
                state[2 * d + 1] = 0.0;
            }
        }
    }

    fn advance<R: Rng + ?Sized>(
        &self,
        grid: &TimeGrid,
        t_index: usize,
        state: &mut [f64],
        rng: &mut R,
    ) {
        let dt = grid.dt(t_index);
        let t_next = grid.time(t_index + 1);
        match &self.extra {
            Extra::None => self.gbm_step(dt, &mut state[..self.d], rng),
            Extra::Asian { .. } => {
                let r = self.spec.rate;
                let before = (state[0] + r * grid.time(t_index)).exp();
                self.gbm_step(dt, &mut state[..1], rng);
                let after = (state[0] + r * t_next).exp();
                let mass = state[2];
                state[1] = (state[1] * mass + 0.5 * (before + after) * dt) / (mass + dt);
                state[2] = mass + dt;
            }
            Extra::Window { lags } => {
                self.gbm_step(dt, &mut state[..1], rng);
                let price = (state[0] + self.spec.rate * t_next).exp();
                let cap = lags + 1;
                let count = state[1] as usize;
                let buf = &mut state[2..2 + cap];
                if count < cap {
                    buf[count] = price;
                    state[1] = (count + 1) as f64;
                } else {
                    buf.copy_within(1.., 0);
                    buf[cap - 1] = price;
                }
            }
            Extra::Svsi(p) => self.svsi_step(p, dt, state, rng),
        }
    }
}

/// A block of `n` path states at a common grid index, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBlock {
    stride: usize,
    t_index: usize,
    data: Vec<f64>,
}

impl StateBlock {
    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.stride).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn t_index(&self) -> usize {
        self.t_index
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.stride)
    }

    pub fn par_rows(&self) -> rayon::slice::ChunksExact<'_, f64> {
        self.data.par_chunks_exact(self.stride)
    }
}

/// `n` copies of the initial state.
pub fn init_paths<P: Process>(process: &P, n: usize) -> Result<StateBlock> {
    if n == 0 {
        return Err(Error::InvalidConfig("path count must be at least 1".into()));
    }
    let stride = process.state_len();
    let mut row = vec![0.0; stride];
    process.init_state(&mut row);
    let mut data = Vec::with_capacity(n * stride);
    for _ in 0..n {
        data.extend_from_slice(&row);
    }
    Ok(StateBlock {
        stride,
        t_index: 0,
        data,
    })
}

/// Advances every path of the block by one grid step. Path `p` draws from the
/// stream `(purpose, p, t_index)`, so the result does not depend on the number
/// of worker threads.
pub fn step<P: Process>(
    process: &P,
    grid: &TimeGrid,
    block: &mut StateBlock,
    key: &StreamKey,
    purpose: Purpose,
) -> Result<()> {
    let t = block.t_index;
    if t + 1 >= grid.len() {
        return Err(Error::PastFinalTime(t));
    }
    block
        .data
        .par_chunks_exact_mut(block.stride)
        .enumerate()
        .for_each(|(p, row)| {
            let mut rng = key.rng(purpose, p as u64, t as u64, 0);
            process.advance(grid, t, row, &mut rng);
        });
    block.t_index = t + 1;
    Ok(())
}

/// `n_sub` independent one-step successors of a single state at `t_index`.
///
/// Successor `j` of path `path` uses stream `(purpose, path, t_index, j + 1)`;
/// callers pass a purpose distinct from the one advancing the parent path so
/// the successors are independent of the parent's own next draw.
#[allow(clippy::too_many_arguments)]
pub fn substep<P: Process>(
    process: &P,
    grid: &TimeGrid,
    t_index: usize,
    state: &[f64],
    n_sub: usize,
    key: &StreamKey,
    purpose: Purpose,
    path: u64,
) -> Result<StateBlock> {
    if n_sub == 0 {
        return Err(Error::InvalidConfig("n_sub must be at least 1".into()));
    }
    if t_index + 1 >= grid.len() {
        return Err(Error::PastFinalTime(t_index));
    }
    let stride = state.len();
    let mut data = Vec::with_capacity(n_sub * stride);
    for j in 0..n_sub {
        let start = data.len();
        data.extend_from_slice(state);
        let mut rng = key.rng(purpose, path, t_index as u64, j as u64 + 1);
        process.advance(grid, t_index, &mut data[start..], &mut rng);
    }
    Ok(StateBlock {
        stride,
        t_index: t_index + 1,
        data,
    })
}
