use bermuda::harness::{presets, run_row, sweep, RunOptions};

#[test]
fn every_preset_runs_and_brackets_at_small_scale() {
    let cfgs: Vec<_> = presets::all()
        .into_iter()
        .map(|c| c.with_scale(0.1).with_seed(3))
        .collect();
    let report = sweep(&cfgs);
    for row in &report.rows {
        assert!(row.error.is_none(), "{}: {:?}", row.name, row.error);
        let (low, high) = (row.low.unwrap(), row.high.unwrap());
        assert!(
            low.mean - 3.0 * low.stderr <= high.mean + 3.0 * high.stderr,
            "{}: {low:?} {high:?}",
            row.name
        );
    }
}

#[test]
fn saved_coercion_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.bin");
    let cfg = presets::asian_fixed(100.0, 100.0, bermuda::Numeraire::Stock).with_scale(0.05);
    let first = run_row(
        &cfg,
        &RunOptions {
            save_coercion: Some(path.clone()),
            load_coercion: None,
        },
    )
    .unwrap();
    let second = run_row(
        &cfg,
        &RunOptions {
            save_coercion: None,
            load_coercion: Some(path),
        },
    )
    .unwrap();
    assert!(first.same_numbers(&second));
}

#[test]
fn artifact_with_other_shape_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.bin");
    let cfg = presets::min_put(2).with_scale(0.05);
    run_row(
        &cfg,
        &RunOptions {
            save_coercion: Some(path.clone()),
            load_coercion: None,
        },
    )
    .unwrap();
    let other = presets::range(5).with_scale(0.05);
    assert!(run_row(
        &other,
        &RunOptions {
            save_coercion: None,
            load_coercion: Some(path)
        }
    )
    .is_err());
}

#[test]
fn config_json_round_trips() {
    for cfg in presets::all() {
        let back = bermuda::harness::ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
