//! End-to-end checks of the command-line tool.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_lifted-tempering");

fn cli(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("LIFTED_TEMPERING_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// The JSON error line a failing command leaves on stderr.
fn error_kind(o: &Output) -> String {
    assert!(!o.status.success());
    let stderr = String::from_utf8(o.stderr.clone()).unwrap();
    let line = stderr.lines().next().expect("an error line");
    let v: serde_json::Value = serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {line}"));
    assert!(v["message"].is_string());
    v["error"].as_str().unwrap().to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn volatility_examples() {
    for (params, theory) in [("0.25,0.25,0.5", "0.500000"), ("0.5,0,0.5", "1.000000")] {
        let o = cli(&["volatility", "--params", params, "--iters", "20000", "--seed", "2"]);
        assert!(o.status.success());
        let text = stdout(&o);
        assert!(text.contains(&format!("theoretical  {theory}")), "{text}");
        assert!(text.contains("pass"), "{text}");
    }
    let bad = cli(&["volatility", "--params", "0.3,0.3,0.3"]);
    assert_eq!(error_kind(&bad), "invalid_params");
    assert_eq!(error_kind(&cli(&["volatility", "--params", "0.5,0.5"])), "invalid_argument");
    assert_eq!(error_kind(&cli(&["volatility"])), "invalid_argument");
}

#[test]
fn optimal_scales_with_c() {
    let dir = tempfile::tempdir().unwrap();
    let read = |c: &str| -> serde_json::Value {
        let out = dir.path().join(format!("opt-{c}.json"));
        assert!(cli(&["optimal", "--c", c, "--out", p(&out)]).status.success());
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap()
    };
    let (one, two) = (read("1"), read("2"));
    for mode in ["reversible", "nonreversible"] {
        let l1 = one[mode]["ell_opt"].as_f64().unwrap();
        let l2 = two[mode]["ell_opt"].as_f64().unwrap();
        assert!((l2 - l1 / 2.0).abs() < 1e-6);
        let e1 = one[mode]["eff_opt"].as_f64().unwrap();
        let e2 = two[mode]["eff_opt"].as_f64().unwrap();
        assert!((e2 - e1 / 4.0).abs() < 1e-9);
    }
    assert!((one["ratio"].as_f64().unwrap() - two["ratio"].as_f64().unwrap()).abs() < 1e-9);
    assert_eq!(error_kind(&cli(&["optimal", "--c", "0"])), "invalid_argument");
}

#[test]
fn curves_write_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curves.csv");
    assert!(cli(&["curves", "--out", p(&out)]).status.success());
    let script = std::fs::read_to_string(dir.path().join("curves.py")).unwrap();
    assert!(script.contains("curves.csv") && script.contains("axvline"));

    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["acc", "eff_reversible", "eff_nonreversible", "ratio"]);
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 99);
    for r in &rows {
        assert!((r[3] - 1.0 / (1.0 - r[0])).abs() <= 1e-12 * r[3]);
    }
    let at95 = rows.iter().find(|r| (r[0] - 0.95).abs() < 1e-9).unwrap();
    assert!(at95[3] > 10.0);

    let unwritable = dir.path().join("missing").join("curves.csv");
    assert_eq!(error_kind(&cli(&["curves", "--out", p(&unwritable)])), "io");
}

#[test]
fn sweep_records_point_failures_and_continues() {
    let o = cli(&[
        "sweep", "--d", "20", "--beta-min", "0.3", "--iters", "100000", "--mode", "rev",
        "--grid", "0.5,0.99999999999999",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "{text}");
    assert!(lines[0].ends_with(",error"));
    assert!(lines[1].ends_with(','), "first point is clean: {}", lines[1]);
    assert!(lines[2].contains("too close to 1"), "{}", lines[2]);
}

#[test]
fn sweep_rejects_bad_configs() {
    assert_eq!(error_kind(&cli(&["sweep", "--iters", "99999"])), "invalid_argument");
    assert_eq!(error_kind(&cli(&["sweep", "--grid", "0.5,0.4"])), "invalid_argument");
    assert_eq!(error_kind(&cli(&["sweep", "--mode", "sideways"])), "invalid_argument");
    let o = Command::new(BIN)
        .args(["oracle", "--grid", "3"])
        .env("LIFTED_TEMPERING_WORKERS", "lots")
        .output()
        .unwrap();
    // the oracle ignores workers; the sweep must not
    assert!(o.status.success());
    let o = Command::new(BIN)
        .args(["sweep", "--grid", "0.5", "--iters", "100000"])
        .env("LIFTED_TEMPERING_WORKERS", "lots")
        .output()
        .unwrap();
    assert_eq!(error_kind(&o), "config");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "d = 20\nbeta_min = 0.3\ngrid = [0.3, 0.5]\nmode = \"nonrev\"\n").unwrap();
    let from_file = stdout(&cli(&["oracle", "--config", p(&cfg)]));
    let explicit = stdout(&cli(&["oracle", "--d", "20", "--beta-min", "0.3", "--grid", "0.3,0.5", "--mode", "nonrev"]));
    assert_eq!(from_file, explicit);
    assert_eq!(from_file.lines().count(), 3);

    let overridden = stdout(&cli(&["oracle", "--config", p(&cfg), "--d", "40"]));
    let direct = stdout(&cli(&["oracle", "--d", "40", "--beta-min", "0.3", "--grid", "0.3,0.5", "--mode", "nonrev"]));
    assert_eq!(overridden, direct);
    assert_ne!(overridden, from_file);

    std::fs::write(&cfg, "dimension = 3\n").unwrap();
    assert_eq!(error_kind(&cli(&["oracle", "--config", p(&cfg)])), "config");
    assert_eq!(error_kind(&cli(&["oracle", "--config", p(&dir.path().join("none.toml"))])), "config");
}

#[test]
fn fit_reads_a_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.csv");
    let o = cli(&[
        "sweep", "--d", "30", "--beta-min", "0.2", "--iters", "300000", "--seed", "8", "--grid", "6",
        "--out", p(&sweep),
    ]);
    assert!(o.status.success());
    let json = dir.path().join("fit.json");
    let o = cli(&["fit", p(&sweep), "--c-effective", "fit", "--out", p(&json)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fits: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(fits.as_array().unwrap().len(), 2);
    assert_eq!(fits[0]["mode"], "reversible");
    assert_eq!(fits[0]["points"], 6);
    assert!(fits[0]["scale"].as_f64().unwrap() > 0.0);
    assert!(stdout(&o).contains("scale ratio"));
}

#[test]
fn fit_errors() {
    let dir = tempfile::tempdir().unwrap();
    let few = dir.path().join("few.csv");
    let o = cli(&[
        "sweep", "--d", "20", "--beta-min", "0.3", "--iters", "100000", "--grid", "4", "--mode", "rev",
        "--out", p(&few),
    ]);
    assert!(o.status.success());
    assert_eq!(error_kind(&cli(&["fit", p(&few)])), "invalid_argument");

    let junk = dir.path().join("junk.csv");
    std::fs::write(&junk, "acc,rate\n0.1,2\n").unwrap();
    assert_eq!(error_kind(&cli(&["fit", p(&junk)])), "malformed_input");
    assert_eq!(error_kind(&cli(&["fit", p(&junk), "--c-effective=-2"])), "invalid_argument");
    assert_eq!(error_kind(&cli(&["fit", p(&dir.path().join("absent.csv"))])), "io");
}

#[test]
fn usage_errors_and_help() {
    let o = cli(&["transmogrify"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "usage");
    let o = cli(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("sweep"));
}
