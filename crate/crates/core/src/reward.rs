//! Stopping rewards `g(t, X_t)`, expressed in discounted units of the chosen
//! numeraire.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::{Model, ModelKind, ModelSpec, Numeraire};

/// Scalar reward process evaluated on a state row.
pub trait RewardFn: Sync {
    fn reward(&self, grid: &TimeGrid, t_index: usize, state: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffId {
    MinPut,
    MaxCall,
    BasketPut,
    AsianFixedCall,
    AsianFloatCall,
    LookbackWindow,
    RangeWindow,
}

impl PayoffId {
    pub fn name(&self) -> &'static str {
        match self {
            PayoffId::MinPut => "min_put",
            PayoffId::MaxCall => "max_call",
            PayoffId::BasketPut => "basket_put",
            PayoffId::AsianFixedCall => "asian_fixed_call",
            PayoffId::AsianFloatCall => "asian_float_call",
            PayoffId::LookbackWindow => "lookback_window",
            PayoffId::RangeWindow => "range_window",
        }
    }

    fn has_strike(&self) -> bool {
        matches!(
            self,
            PayoffId::MinPut | PayoffId::MaxCall | PayoffId::BasketPut | PayoffId::AsianFixedCall
        )
    }

    fn fits(&self, kind: ModelKind) -> bool {
        match self {
            PayoffId::MinPut | PayoffId::MaxCall | PayoffId::BasketPut => {
                matches!(kind, ModelKind::MultiGbm | ModelKind::Svsi)
            }
            PayoffId::AsianFixedCall | PayoffId::AsianFloatCall => kind == ModelKind::AsianGbm,
            PayoffId::LookbackWindow | PayoffId::RangeWindow => kind == ModelKind::WindowGbm,
        }
    }
}

pub const DEFAULT_EPSILON: f64 = 1e-6;

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardSpec {
    pub payoff: PayoffId,
    #[serde(default)]
    pub strike: f64,
    /// Slope `ε` of the tie-breaking extension below the kink.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Replace `(K - S)^+`-type rewards by `max{ε(K - S), K - S}` so the reward
    /// sample has no atom at zero.
    #[serde(default = "default_true")]
    pub tie_break: bool,
    #[serde(default)]
    pub numeraire: Numeraire,
}

impl RewardSpec {
    pub fn new(payoff: PayoffId, strike: f64) -> Self {
        Self {
            payoff,
            strike,
            epsilon: DEFAULT_EPSILON,
            tie_break: true,
            numeraire: Numeraire::Bank,
        }
    }

    pub fn without_tie_break(mut self) -> Self {
        self.tie_break = false;
        self
    }

    pub fn with_numeraire(mut self, numeraire: Numeraire) -> Self {
        self.numeraire = numeraire;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1e-3) {
            return Err(Error::InvalidReward(format!(
                "epsilon must lie in (0, 1e-3), got {}",
                self.epsilon
            )));
        }
        if self.payoff.has_strike() && !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(Error::InvalidReward(format!(
                "{} needs a positive strike, got {}",
                self.payoff.name(),
                self.strike
            )));
        }
        Ok(())
    }

    /// Checks that the reward can be evaluated on states of `model`.
    pub fn check_model(&self, model: &Model) -> Result<()> {
        self.validate()?;
        if !self.payoff.fits(model.kind()) {
            return Err(Error::PayoffModelMismatch {
                payoff: self.payoff.name().into(),
                model: model.kind().name().into(),
            });
        }
        if self.numeraire != model.numeraire() {
            return Err(Error::InvalidReward(format!(
                "reward numeraire {:?} differs from the model's simulation measure {:?}",
                self.numeraire,
                model.numeraire()
            )));
        }
        Ok(())
    }

    fn kink(&self, raw: f64) -> f64 {
        if self.tie_break {
            raw.max(self.epsilon * raw)
        } else {
            raw.max(0.0)
        }
    }

    /// Discounted reward at time `t` for a state row of `model`. The caller
    /// guarantees compatibility (see [`RewardSpec::check_model`]).
    pub fn evaluate(&self, model: &Model, t: f64, state: &[f64]) -> f64 {
        let x = model.log_prices(state);
        let disc = (-model.discount_integral(t, state)).exp();
        let k = self.strike;
        let value = match self.payoff {
            PayoffId::MinPut => {
                let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
                self.kink(k * disc - lo.exp())
            }
            PayoffId::MaxCall => {
                let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                self.kink(hi.exp() - k * disc)
            }
            PayoffId::BasketPut => {
                let mean = x.iter().map(|v| v.exp()).sum::<f64>() / x.len() as f64;
                self.kink(k * disc - mean)
            }
            PayoffId::AsianFixedCall => {
                let (avg, _) = model.average(state).expect("asian state");
                self.kink(disc * (avg - k))
            }
            PayoffId::AsianFloatCall => {
                let (avg, _) = model.average(state).expect("asian state");
                self.kink(disc * avg - x[0].exp())
            }
            PayoffId::LookbackWindow => {
                let w = model.window(state).expect("window state");
                let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                // A window maximum sits on an atom whenever it is an old
                // recorded price (or, after the stock change of numeraire, the
                // current one); a vanishing log-return term separates those.
                let s0 = model.spot()[0];
                let tilt = if self.tie_break {
                    self.epsilon * s0 * (x[0] - s0.ln() + model.discount_integral(t, state))
                } else {
                    0.0
                };
                disc * (hi + tilt)
            }
            PayoffId::RangeWindow => {
                let w = model.window(state).expect("window state");
                let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
                disc * (hi - lo)
            }
        };
        match self.numeraire {
            Numeraire::Bank => value,
            Numeraire::Stock => value / numeraire_level(model, t, state),
        }
    }
}

/// `ψ(t, x) = e^{-(r-q)t} S_t / S_0` for the single-asset stock numeraire.
pub fn numeraire_level(model: &Model, t: f64, state: &[f64]) -> f64 {
    let s0 = model.spot()[0];
    (model.log_prices(state)[0] + model.spec().dividend * t).exp() / s0
}

/// Re-expresses the pair in the reward's numeraire: the model is switched to
/// the measure under which that numeraire deflates prices to martingales. The
/// reward is divided by `ψ` at evaluation time. The bank numeraire is the
/// identity.
pub fn apply_numeraire(spec: &RewardSpec, model: &ModelSpec) -> Result<(RewardSpec, ModelSpec)> {
    match spec.numeraire {
        Numeraire::Bank => Ok((spec.clone(), model.clone())),
        Numeraire::Stock => {
            if model.dim() != 1 {
                return Err(Error::StockNumeraireDimension(model.dim()));
            }
            if model.kind == ModelKind::Svsi {
                return Err(Error::InvalidModel(
                    "svsi supports the bank numeraire only".into(),
                ));
            }
            let mut m = model.clone();
            m.numeraire = Numeraire::Stock;
            Ok((spec.clone(), m))
        }
    }
}

/// A model paired with a reward on it; the unit the engine prices.
#[derive(Debug, Clone)]
pub struct Problem {
    pub model: Model,
    pub reward: RewardSpec,
}

impl Problem {
    /// Validates the pair and applies the reward's numeraire to the model.
    pub fn new(model: &ModelSpec, reward: &RewardSpec) -> Result<Self> {
        let (reward, model) = apply_numeraire(reward, model)?;
        let model = Model::new(&model)?;
        reward.check_model(&model)?;
        Ok(Self { model, reward })
    }
}

impl crate::model::Process for Problem {
    fn state_len(&self) -> usize {
        self.model.state_len()
    }

    fn init_state(&self, state: &mut [f64]) {
        self.model.init_state(state)
    }

    fn advance<R: rand::Rng + ?Sized>(
        &self,
        grid: &TimeGrid,
        t_index: usize,
        state: &mut [f64],
        rng: &mut R,
    ) {
        self.model.advance(grid, t_index, state, rng)
    }
}

impl RewardFn for Problem {
    fn reward(&self, grid: &TimeGrid, t_index: usize, state: &[f64]) -> f64 {
        self.reward.evaluate(&self.model, grid.time(t_index), state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AsianParams;
    use proptest::prelude::*;

    fn gbm(d: usize, r: f64) -> Model {
        Model::new(&ModelSpec::multi_gbm(d, 100.0, r, 0.2, 0.0)).unwrap()
    }

    fn logs(prices: &[f64]) -> Vec<f64> {
        prices.iter().map(|p| p.ln()).collect()
    }

    #[test]
    fn min_put_at_time_zero() {
        let spec = RewardSpec::new(PayoffId::MinPut, 100.0);
        let v = spec.evaluate(&gbm(2, 0.06), 0.0, &logs(&[80.0, 120.0]));
        assert!((v - 20.0).abs() < 1e-12);
    }

    #[test]
    fn min_put_tie_break_below_kink() {
        let spec = RewardSpec::new(PayoffId::MinPut, 100.0);
        let v = spec.evaluate(&gbm(2, 0.06), 0.0, &logs(&[150.0, 200.0]));
        assert!((v - (-5e-5)).abs() < 1e-15);
        let plain = spec.clone().without_tie_break();
        assert_eq!(
            plain.evaluate(&gbm(2, 0.06), 0.0, &logs(&[150.0, 200.0])),
            0.0
        );
    }

    #[test]
    fn min_put_discounts_strike() {
        let spec = RewardSpec::new(PayoffId::MinPut, 100.0).without_tie_break();
        let v = spec.evaluate(&gbm(1, 0.06), 0.5, &[80f64.ln()]);
        assert!((v - (100.0 * (-0.03f64).exp() - 80.0)).abs() < 1e-12);
    }

    #[test]
    fn basket_put_equal_prices() {
        let spec = RewardSpec::new(PayoffId::BasketPut, 100.0);
        let v = spec.evaluate(&gbm(4, 0.03), 0.0, &logs(&[90.0; 4]));
        assert!((v - 10.0).abs() < 1e-12);
    }

    #[test]
    fn max_call_uses_largest_price() {
        let spec = RewardSpec::new(PayoffId::MaxCall, 100.0);
        let v = spec.evaluate(&gbm(3, 0.05), 0.0, &logs(&[90.0, 130.0, 110.0]));
        assert!((v - 30.0).abs() < 1e-12);
    }

    #[test]
    fn asian_float_payoff() {
        let m = Model::new(&ModelSpec {
            asian: Some(AsianParams {
                window: 0.25,
                initial_average: Some(110.0),
            }),
            ..ModelSpec::asian_gbm(100.0, 0.0, 0.2, 0.25, 110.0)
        })
        .unwrap();
        let spec = RewardSpec::new(PayoffId::AsianFloatCall, 0.0);
        // t arbitrary with r = 0
        let v = spec.evaluate(&m, 0.7, &[100f64.ln(), 110.0, 0.95]);
        assert!((v - 10.0).abs() < 1e-12);
    }

    #[test]
    fn range_and_lookback() {
        let m = Model::new(&ModelSpec::window_gbm(100.0, 0.0, 0.5, 3)).unwrap();
        let state = [105f64.ln(), 3.0, 100.0, 120.0, 105.0, 0.0];
        let range = RewardSpec::new(PayoffId::RangeWindow, 0.0);
        assert!((range.evaluate(&m, 0.1, &state) - 20.0).abs() < 1e-12);
        let look = RewardSpec::new(PayoffId::LookbackWindow, 0.0).without_tie_break();
        assert!((look.evaluate(&m, 0.1, &state) - 120.0).abs() < 1e-12);
        let tilted = RewardSpec::new(PayoffId::LookbackWindow, 0.0).evaluate(&m, 0.1, &state);
        assert!((tilted - 120.0).abs() < 1e-6 * 100.0);
    }

    #[test]
    fn stock_numeraire_divides_by_deflated_price() {
        let spec = ModelSpec::multi_gbm(1, 100.0, 0.05, 0.2, 0.0);
        let reward = RewardSpec::new(PayoffId::MinPut, 100.0)
            .without_tie_break()
            .with_numeraire(Numeraire::Stock);
        let p = Problem::new(&spec, &reward).unwrap();
        let bank = RewardSpec::new(PayoffId::MinPut, 100.0).without_tie_break();
        // discounted price 80 against S_0 = 100: ψ = 0.8
        let state = [80f64.ln()];
        let t = 1.0;
        let expected = bank.evaluate(&p.model, t, &state) / 0.8;
        assert!((p.reward.evaluate(&p.model, t, &state) - expected).abs() < 1e-12);
    }

    #[test]
    fn bank_numeraire_is_identity() {
        let m = ModelSpec::multi_gbm(3, 100.0, 0.05, 0.2, 0.3);
        let r = RewardSpec::new(PayoffId::BasketPut, 100.0);
        let (r2, m2) = apply_numeraire(&r, &m).unwrap();
        assert_eq!(r, r2);
        assert_eq!(m, m2);
    }

    #[test]
    fn stock_numeraire_rejects_baskets() {
        let m = ModelSpec::multi_gbm(3, 100.0, 0.05, 0.2, 0.3);
        let r = RewardSpec::new(PayoffId::BasketPut, 100.0).with_numeraire(Numeraire::Stock);
        assert!(matches!(
            apply_numeraire(&r, &m),
            Err(Error::StockNumeraireDimension(3))
        ));
    }

    #[test]
    fn mismatched_payoff_is_rejected() {
        let m = ModelSpec::multi_gbm(1, 100.0, 0.05, 0.2, 0.0);
        let r = RewardSpec::new(PayoffId::AsianFixedCall, 100.0);
        assert!(matches!(
            Problem::new(&m, &r),
            Err(Error::PayoffModelMismatch { .. })
        ));
        let r = RewardSpec::new(PayoffId::MinPut, 100.0);
        let a = ModelSpec::asian_gbm(100.0, 0.05, 0.2, 0.25, 100.0);
        assert!(matches!(
            Problem::new(&a, &r),
            Err(Error::PayoffModelMismatch { .. })
        ));
    }

    #[test]
    fn bad_epsilon_and_strike_rejected() {
        let mut r = RewardSpec::new(PayoffId::MinPut, 100.0);
        r.epsilon = 0.01;
        assert!(r.validate().is_err());
        assert!(RewardSpec::new(PayoffId::MinPut, 0.0).validate().is_err());
        assert!(RewardSpec::new(PayoffId::RangeWindow, 0.0)
            .validate()
            .is_ok());
    }

    proptest! {
        #[test]
        fn tie_break_differs_by_at_most_eps_k(a in 1.0f64..300.0, b in 1.0f64..300.0, t in 0.0f64..1.0) {
            let m = gbm(2, 0.06);
            let state = logs(&[a, b]);
            let tb = RewardSpec::new(PayoffId::MinPut, 100.0);
            let plain = tb.clone().without_tie_break();
            let (v1, v0) = (tb.evaluate(&m, t, &state), plain.evaluate(&m, t, &state));
            prop_assert!(v0 >= 0.0);
            prop_assert!((v1 - v0).abs() <= tb.epsilon * 300.0);
            if v0 > 0.0 { prop_assert_eq!(v1, v0); }
        }

        #[test]
        fn min_put_decreasing_in_min_price(lo in 1.0f64..200.0, bump in 0.0f64..50.0, other in 200.0f64..300.0) {
            let m = gbm(2, 0.06);
            let spec = RewardSpec::new(PayoffId::MinPut, 100.0);
            let a = spec.evaluate(&m, 0.25, &logs(&[lo, other]));
            let b = spec.evaluate(&m, 0.25, &logs(&[lo + bump, other]));
            prop_assert!(b <= a);
        }

        #[test]
        fn asian_fixed_increasing_in_average(a in 50.0f64..150.0, bump in 0.0f64..20.0, t in 0.0f64..2.0) {
            let m = Model::new(&ModelSpec::asian_gbm(100.0, 0.06, 0.2, 0.25, 100.0)).unwrap();
            let spec = RewardSpec::new(PayoffId::AsianFixedCall, 100.0);
            let lo = spec.evaluate(&m, t, &[100f64.ln(), a, 0.25 + t]);
            let hi = spec.evaluate(&m, t, &[100f64.ln(), a + bump, 0.25 + t]);
            prop_assert!(hi >= lo);
        }
    }
}
