use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn openq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_openq")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_line(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    serde_json::from_str(text.trim()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn interfere_half_overlap_visibility() {
    let out = openq(&["interfere", "--overlap", "0.5"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    assert!(csv.starts_with("x,intensity,visibility\n"));
    let v = column(&csv, "visibility");
    assert_eq!(v.len(), 4096);
    assert!(v.iter().all(|v| (v - 0.5).abs() < 1e-6));
}

#[test]
fn seeded_interfere_matches_record_overlap() {
    // Same seed, same generator: the reported visibility equals the overlap.
    let out = openq(&["interfere", "--seed", "11", "--env-dim", "3", "--format", "json"]);
    assert!(out.status.success());
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let (o, v) = (json["overlap"].as_f64().unwrap(), json["visibility"].as_f64().unwrap());
    assert!((o - v).abs() < 1e-6);
    let other = openq(&["interfere", "--seed", "12", "--env-dim", "3", "--format", "json"]);
    assert_ne!(other.stdout, out.stdout);
}

#[test]
fn qec_bitflip_sweep() {
    let out = openq(&["qec", "--code", "bitflip", "--theta-max", "180", "--steps", "37"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    assert!(csv.starts_with("theta_deg,fidelity\n"));
    let f = column(&csv, "fidelity");
    assert_eq!(f.len(), 37);
    assert!(f.iter().all(|f| (f - 1.0).abs() < 1e-10));
    assert_eq!(column(&csv, "theta_deg")[1], 5.0);
}

#[test]
fn stats_missing_input_names_the_path() {
    let out = openq(&["stats", "--input", "missing.csv"]);
    assert_eq!(out.status.code(), Some(4));
    let err = error_line(&out);
    assert_eq!(err["exit"], 4);
    assert!(err["message"].as_str().unwrap().contains("missing.csv"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_flag_and_subcommand_exit_2() {
    for args in [&["interfere", "--bogus", "1"][..], &["teleport"][..], &["qec", "--steps", "many"][..]] {
        let out = openq(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error_line(&out)["error"], "usage");
    }
}

#[test]
fn invalid_values_are_named() {
    let out = openq(&["interfere", "--overlap", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out)["message"].as_str().unwrap().contains("overlap"));
    let out = openq(&["qec", "--code", "steane"]);
    assert_eq!(out.status.code(), Some(2));
    let out = openq(&["rp", "--b-static", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out)["message"].as_str().unwrap().contains("b_static"));
}

#[test]
fn config_file_is_strict_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"subcommand": "qec", "seed": 3, "steps": 5, "theta_max": 40}"#).unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let out = openq(&["qec", "--config", cfg_s]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(column(&stdout(&out), "theta_deg"), vec![0.0, 10.0, 20.0, 30.0, 40.0]);
    let out = openq(&["qec", "--config", cfg_s, "--steps", "3"]);
    assert_eq!(column(&stdout(&out), "theta_deg"), vec![0.0, 20.0, 40.0]);

    std::fs::write(&cfg, r#"{"steps": 5, "thetamax": 40}"#).unwrap();
    let out = openq(&["qec", "--config", cfg_s]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out)["message"].as_str().unwrap().contains("thetamax"));

    std::fs::write(&cfg, r#"{"subcommand": "rp"}"#).unwrap();
    assert_eq!(openq(&["qec", "--config", cfg_s]).status.code(), Some(2));

    let out = openq(&["qec", "--config", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn output_file_receives_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = openq(&["qbm", "--steps", "10", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,gamma,phi\n"));
    assert_eq!(text.lines().count(), 12);
    let bad = openq(&["qbm", "--output", Path::new("/nonexistent/dir/x.csv").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn every_subcommand_documents_its_keys() {
    let cases: [(&str, &[&str]); 7] = [
        ("interfere", &["--overlap", "--env-dim", "--points", "--x-min", "--x-max", "--kappa"]),
        ("evolve", &["--model", "--rate", "--omega", "--t-max", "--steps", "--n-bath", "--initial"]),
        ("qbm", &["--family", "--eta", "--cutoff", "--temperature", "--d", "--horizon", "--steps"]),
        ("dfs", &["--n", "--tol"]),
        ("qec", &["--code", "--axis", "--qubit", "--theta-min", "--theta-max", "--steps"]),
        ("rp", &["--sweep", "--from", "--to", "--a-iso", "--b-static", "--rf-frequency", "--k-s", "--k-t"]),
        ("stats", &["--input", "--dump-records"]),
    ];
    for (sub, keys) in cases {
        let out = openq(&[sub, "--help"]);
        assert!(out.status.success());
        let help = stdout(&out);
        for key in keys.iter().chain(&["--config", "--seed", "--output", "--format"]) {
            assert!(help.contains(key), "{sub} help lacks {key}");
        }
    }
    assert!(stdout(&openq(&["rp", "--help"])).contains("uT"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["interfere", "--seed", "5"][..],
        &["evolve", "--model", "markov", "--seed", "9"][..],
        &["qec", "--code", "shor9", "--steps", "4"][..],
        &["rp", "--steps", "3"][..],
        &["stats", "--format", "json"][..],
    ] {
        let (a, b) = (openq(args), openq(args));
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn stats_round_trips_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trials.csv");
    let dump = openq(&["stats", "--dump-records", "--output", path.to_str().unwrap()]);
    assert!(dump.status.success());
    let from_file = openq(&["stats", "--input", path.to_str().unwrap()]);
    assert_eq!(from_file.stdout, openq(&["stats"]).stdout);
    let csv = stdout(&from_file);
    assert!(csv.starts_with("endpoint,a,b,"));
    assert_eq!(csv.lines().count(), 9);
    let table = stdout(&openq(&["stats", "--format", "table"]));
    assert!(table.contains("[caspase_per_cell]"));
    assert_eq!(openq(&["qbm", "--format", "table"]).status.code(), Some(2));
}

#[test]
fn dfs_lists_collective_dephasing_blocks() {
    let out = openq(&["dfs", "--n", "2"]);
    assert!(out.status.success());
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let dims: Vec<u64> = json["subspaces"].as_array().unwrap().iter().map(|b| b["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 2, 1]);
}

#[test]
fn evolve_models_run() {
    for model in ["dephasing", "damping", "closed", "joint"] {
        let out = openq(&["evolve", "--model", model, "--steps", "10", "--omega", "1"]);
        assert!(out.status.success(), "{model}");
        assert_eq!(stdout(&out).lines().count(), 12);
    }
    let out = openq(&["evolve", "--model", "markov"]);
    assert!(stdout(&out).starts_with("t,exact_coherence,markov_coherence,divergence\n"));
}

#[test]
fn rf_sweep_supplies_its_own_frequency() {
    let out = openq(&["rp", "--sweep", "rf", "--rf-amplitude", "0.1", "--from", "1e6", "--to", "2e6", "--steps", "2", "--k-s", "1e6", "--k-t", "1e6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(column(&stdout(&out), "param"), vec![1e6, 2e6]);
}
