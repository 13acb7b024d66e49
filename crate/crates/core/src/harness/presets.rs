//! Shipped configurations, one per row of the twelve example tables.

use std::collections::BTreeMap;

use super::config::{Example, ExperimentConfig, GridConfig, SimSizes, DEFAULT_SCALE};
use crate::model::{ModelSpec, Numeraire, SvsiParams};
use crate::reward::{PayoffId, RewardSpec};

/// Interest rate for the Asian examples.
pub const ASIAN_RATE: f64 = 0.06;

/// Initial short rate used for the "r_0 = 0" rows (`log r_0 = -15.6`).
pub fn near_zero_rate() -> f64 {
    (-15.6f64).exp()
}

fn sizes(n_bins: usize, n_block: usize, n_primal: usize, n_dual: usize, n_sub: usize) -> SimSizes {
    SimSizes {
        n_bins,
        n_block,
        n_primal,
        n_dual,
        n_sub,
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[allow(clippy::too_many_arguments)]
fn row(
    name: String,
    example: Example,
    params: BTreeMap<String, f64>,
    model: ModelSpec,
    reward: RewardSpec,
    grid: GridConfig,
    sizes: SimSizes,
) -> ExperimentConfig {
    ExperimentConfig {
        name,
        example,
        params,
        model,
        reward,
        grid,
        sizes,
        seed: 0,
        scale: DEFAULT_SCALE,
        output: None,
    }
}

fn tag(v: f64) -> String {
    let s = format!("{v}");
    s.replace('-', "m").replace('.', "p")
}

/// Min put on `d` independent assets.
pub fn min_put(d: usize) -> ExperimentConfig {
    row(
        format!("table1_d{d}"),
        Example::MinPut,
        params(&[("d", d as f64)]),
        ModelSpec::multi_gbm(d, 100.0, 0.06, 0.6, 0.0),
        RewardSpec::new(PayoffId::MinPut, 100.0),
        GridConfig {
            expiry: 0.5,
            n_times: 40,
            lockout: 0.0,
        },
        sizes(200, 200, 50_000, 400, 60),
    )
}

/// Max call on 5 dividend-paying assets with `m` exercise intervals.
pub fn max_call(m: usize, spot: f64) -> ExperimentConfig {
    let mut model = ModelSpec::multi_gbm(5, spot, 0.05, 0.2, 0.0);
    model.dividend = 0.1;
    row(
        format!("table2_m{m}_s{spot}"),
        Example::MaxCall,
        params(&[("m", m as f64), ("S0", spot)]),
        model,
        RewardSpec::new(PayoffId::MaxCall, 100.0),
        GridConfig {
            expiry: 3.0,
            n_times: m + 1,
            lockout: 0.0,
        },
        sizes(500, 100, 50_000, 4000, 150),
    )
}

/// Basket put on `d` equicorrelated assets.
pub fn basket_put(d: usize, vol: f64) -> ExperimentConfig {
    let table = if vol == 0.2 { 3 } else { 4 };
    let name = if table == 3 {
        format!("table3_d{d}")
    } else {
        format!("table4_sigma{}_d{d}", (vol * 100.0).round())
    };
    row(
        name,
        Example::BasketPut,
        params(&[("d", d as f64), ("sigma", vol)]),
        ModelSpec::multi_gbm(d, 100.0, 0.03, vol, 0.5),
        RewardSpec::new(PayoffId::BasketPut, 100.0),
        GridConfig {
            expiry: 0.25,
            n_times: 40,
            lockout: 0.0,
        },
        sizes(500, 200, 50_000, 1000, 160),
    )
}

/// Fixed-strike Bermudan Asian call.
pub fn asian_fixed(average: f64, spot: f64, numeraire: Numeraire) -> ExperimentConfig {
    let suffix = match numeraire {
        Numeraire::Bank => "",
        Numeraire::Stock => "_stock",
    };
    row(
        format!("table5_a{average}_s{spot}{suffix}"),
        Example::AsianFixed,
        params(&[("A0", average), ("S0", spot)]),
        ModelSpec::asian_gbm(spot, ASIAN_RATE, 0.2, 0.25, average),
        RewardSpec::new(PayoffId::AsianFixedCall, 100.0).with_numeraire(numeraire),
        GridConfig {
            expiry: 2.0,
            n_times: 40,
            lockout: 0.25,
        },
        sizes(500, 100, 50_000, 4000, 125),
    )
}

/// Floating-strike Bermudan Asian call with `A_0 = 100`, stock numeraire.
pub fn asian_float(spot: f64) -> ExperimentConfig {
    row(
        format!("table6_s{spot}"),
        Example::AsianFloat,
        params(&[("S0", spot)]),
        ModelSpec::asian_gbm(spot, ASIAN_RATE, 0.2, 0.25, 100.0),
        RewardSpec::new(PayoffId::AsianFloatCall, 0.0).with_numeraire(Numeraire::Stock),
        GridConfig {
            expiry: 2.0,
            n_times: 40,
            lockout: 0.25,
        },
        sizes(200, 100, 50_000, 4000, 50),
    )
}

/// Fixed-window lookback over the last `lags` recorded prices.
pub fn lookback(lags: usize) -> ExperimentConfig {
    row(
        format!("table7_a{lags}"),
        Example::Lookback,
        params(&[("a", lags as f64)]),
        ModelSpec::window_gbm(100.0, 0.05, 0.5, lags),
        RewardSpec::new(PayoffId::LookbackWindow, 0.0).with_numeraire(Numeraire::Stock),
        GridConfig {
            expiry: 1.0,
            n_times: 500,
            lockout: 0.0,
        },
        sizes(250, 60, 50_000, 4000, 25),
    )
}

/// Fixed-window range option.
pub fn range(lags: usize) -> ExperimentConfig {
    row(
        format!("table8_a{lags}"),
        Example::Range,
        params(&[("a", lags as f64)]),
        ModelSpec::window_gbm(100.0, 0.05, 0.5, lags),
        RewardSpec::new(PayoffId::RangeWindow, 0.0).with_numeraire(Numeraire::Stock),
        GridConfig {
            expiry: 1.0,
            n_times: 250,
            lockout: 0.0,
        },
        sizes(200, 50, 50_000, 4000, 25),
    )
}

fn svsi_row(name: String, params: BTreeMap<String, f64>, p: SvsiParams) -> ExperimentConfig {
    row(
        name,
        Example::SvsiMinPut,
        params,
        ModelSpec::svsi(5, 100.0, p),
        RewardSpec::new(PayoffId::MinPut, 100.0),
        GridConfig {
            expiry: 0.5,
            n_times: 40,
            lockout: 0.0,
        },
        sizes(200, 50, 50_000, 4000, 50),
    )
}

/// Constant volatility and rate, market correlation `rho_s`.
pub fn svsi_rho(rho_s: f64) -> ExperimentConfig {
    let p = SvsiParams {
        rho_s,
        stochastic_vol: false,
        stochastic_rate: false,
        ..SvsiParams::standard()
    };
    svsi_row(
        format!("table9_rho{}", tag(rho_s)),
        params(&[("rho_S", rho_s)]),
        p,
    )
}

/// Black–Karasinski rate from `r0`, constant volatility.
pub fn svsi_rate(r0: f64) -> ExperimentConfig {
    let start = if r0 == 0.0 { near_zero_rate() } else { r0 };
    let p = SvsiParams {
        r0: start,
        stochastic_vol: false,
        ..SvsiParams::standard()
    };
    svsi_row(format!("table10_r{}", tag(r0)), params(&[("r0", r0)]), p)
}

/// Stochastic volatility from `sigma0`, constant rate.
pub fn svsi_vol(sigma0: f64) -> ExperimentConfig {
    let p = SvsiParams {
        sigma0,
        stochastic_rate: false,
        ..SvsiParams::standard()
    };
    svsi_row(
        format!("table11_sigma{}", tag(sigma0)),
        params(&[("sigma0", sigma0)]),
        p,
    )
}

/// Full model from `(r0, sigma0)`.
pub fn svsi_full(r0: f64, sigma0: f64) -> ExperimentConfig {
    let start = if r0 == 0.0 { near_zero_rate() } else { r0 };
    let p = SvsiParams {
        r0: start,
        sigma0,
        ..SvsiParams::standard()
    };
    svsi_row(
        format!("table12_r{}_sigma{}", tag(r0), tag(sigma0)),
        params(&[("r0", r0), ("sigma0", sigma0)]),
        p,
    )
}

/// Independent assets and near-infinite mean reversion: should price like
/// the d = 5 min put of the first table.
pub fn svsi_degenerate() -> ExperimentConfig {
    let p = SvsiParams {
        rho_s: 0.0,
        beta_xi: 1e4,
        beta_r: 1e4,
        ..SvsiParams::standard()
    };
    svsi_row("svsi_degenerate".into(), params(&[("beta", 1e4)]), p)
}

/// Every shipped preset, in table order.
pub fn all() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    out.extend([2, 3, 4, 5, 10, 15, 30, 60].map(min_put));
    for m in [3, 6, 9] {
        out.extend([90.0, 100.0, 110.0].map(|s| max_call(m, s)));
    }
    out.extend([2, 3, 4, 5, 6, 12].map(|d| basket_put(d, 0.2)));
    for vol in [0.19, 0.21] {
        out.extend([2, 3, 4, 5, 6].map(|d| basket_put(d, vol)));
    }
    for numeraire in [Numeraire::Bank, Numeraire::Stock] {
        for a in [90.0, 100.0, 110.0] {
            out.extend([80.0, 90.0, 100.0, 110.0, 120.0].map(|s| asian_fixed(a, s, numeraire)));
        }
    }
    out.extend([80.0, 90.0, 100.0, 110.0, 120.0].map(asian_float));
    out.extend([5, 10, 15, 20, 25].map(lookback));
    out.extend([5, 10, 15, 20, 25].map(range));
    out.extend([-0.15, 0.0, 0.15, 0.30, 0.45, 0.60].map(svsi_rho));
    out.extend([0.0, 0.025, 0.06, 0.10].map(svsi_rate));
    out.extend([0.1, 0.2, 0.3, 0.4, 0.5, 0.6].map(svsi_vol));
    for r0 in [0.0, 0.06] {
        out.extend([0.2, 0.4, 0.6].map(|s| svsi_full(r0, s)));
    }
    out.push(svsi_degenerate());
    out
}

pub fn find(name: &str) -> Option<ExperimentConfig> {
    all().into_iter().find(|c| c.name == name)
}
