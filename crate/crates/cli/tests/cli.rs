use std::path::Path;
use std::process::{Command, Output};

fn price(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_price"))
        .args(args)
        .env_remove("PRICE_SEED")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_preset_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = price(&[
        "run",
        "table1_d2",
        "--scale",
        "0.02",
        "--seed",
        "4",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("table1_d2"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("example,name,d,eur_mean,eur_se,low_mean"));
    assert!(lines.next().unwrap().starts_with("min_put,table1_d2,2,"));
}

#[test]
fn same_seed_same_report_any_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let out = price(&[
            "run",
            "table6_s90",
            "--scale",
            "0.02",
            "--seed",
            "9",
            "--threads",
            threads,
            "--report-json",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let strip = |p: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v["rows"][0].as_object_mut().unwrap().remove("seconds");
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn config_file_and_coercion_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let presets_dir = dir.path().join("presets");
    assert!(
        price(&["presets", "--write", presets_dir.to_str().unwrap()])
            .status
            .success()
    );
    let file = presets_dir.join("table9_rho0p3.json");
    assert!(file.exists());
    let art = dir.path().join("chain.bin");
    let first = price(&[
        "run",
        file.to_str().unwrap(),
        "--scale",
        "0.02",
        "--save-coercion",
        art.to_str().unwrap(),
    ]);
    assert!(first.status.success());
    let again = price(&[
        "run",
        file.to_str().unwrap(),
        "--scale",
        "0.02",
        "--load-coercion",
        art.to_str().unwrap(),
    ]);
    assert!(again.status.success());
    let numbers = |o: &Output| {
        let s = stdout(o);
        let row = s.lines().nth(1).unwrap().to_string();
        row.rsplit_once("  ").unwrap().0.to_string()
    };
    assert_eq!(numbers(&first), numbers(&again));
}

#[test]
fn sweep_by_prefix() {
    let out = price(&["sweep", "table2_m3", "--scale", "0.02"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn errors_exit_nonzero() {
    assert!(!price(&["run", "no_such_preset"]).status.success());
    assert!(!price(&["run", "table1_d2", "--scale", "0"])
        .status
        .success());
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"name\": 1}").unwrap();
    assert!(!price(&["run", bad.to_str().unwrap()]).status.success());
}
