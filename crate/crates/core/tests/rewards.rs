use bermuda::harness::presets;
use bermuda::stats::pooled_stderr;
use bermuda::{
    european_value, ModelSpec, Numeraire, PayoffId, Problem, RewardSpec, StreamKey, TimeGrid,
};

fn european(
    model: &ModelSpec,
    reward: &RewardSpec,
    grid: &TimeGrid,
    seed: u64,
) -> bermuda::BoundEstimate {
    let p = Problem::new(model, reward).unwrap();
    european_value(&p, &p, grid, 40_000, &StreamKey::new(seed)).unwrap()
}

fn assert_numeraire_invariant(model: &ModelSpec, reward: RewardSpec, grid: &TimeGrid) {
    let bank = european(
        model,
        &reward.clone().with_numeraire(Numeraire::Bank),
        grid,
        1,
    );
    let stock = european(model, &reward.with_numeraire(Numeraire::Stock), grid, 2);
    let se = pooled_stderr(&bank, &stock);
    assert!(
        (bank.mean - stock.mean).abs() <= 3.0 * se,
        "bank {bank:?} stock {stock:?}"
    );
}

#[test]
fn european_value_is_numeraire_invariant() {
    let asian = ModelSpec::asian_gbm(100.0, presets::ASIAN_RATE, 0.2, 0.25, 100.0);
    let grid = TimeGrid::uniform(2.0, 40, 0.25).unwrap();
    assert_numeraire_invariant(
        &asian,
        RewardSpec::new(PayoffId::AsianFixedCall, 100.0),
        &grid,
    );
    assert_numeraire_invariant(
        &asian,
        RewardSpec::new(PayoffId::AsianFloatCall, 0.0),
        &grid,
    );

    let window = ModelSpec::window_gbm(100.0, 0.05, 0.5, 10);
    let grid = TimeGrid::uniform(1.0, 100, 0.0).unwrap();
    assert_numeraire_invariant(
        &window,
        RewardSpec::new(PayoffId::LookbackWindow, 0.0),
        &grid,
    );
    assert_numeraire_invariant(&window, RewardSpec::new(PayoffId::RangeWindow, 0.0), &grid);

    let single = ModelSpec::multi_gbm(1, 100.0, 0.06, 0.4, 0.0);
    let grid = TimeGrid::uniform(0.5, 10, 0.0).unwrap();
    assert_numeraire_invariant(&single, RewardSpec::new(PayoffId::MinPut, 100.0), &grid);
}

#[test]
fn stock_numeraire_needs_one_asset() {
    let model = ModelSpec::multi_gbm(2, 100.0, 0.06, 0.4, 0.0);
    let reward = RewardSpec::new(PayoffId::MinPut, 100.0).with_numeraire(Numeraire::Stock);
    assert!(Problem::new(&model, &reward).is_err());
}
