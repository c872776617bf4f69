use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causalkit")).args(args).output().expect("spawn causalkit")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("UTF-8 output")
}

/// Value in the last column of the first data row.
fn first_value(out: &Output) -> f64 {
    let text = stdout(out);
    let row = text.lines().nth(1).expect("data row");
    row.rsplit(',').next().unwrap().parse().expect("number")
}

#[test]
fn tsirelson_value() {
    let out = run(&["chsh", "--tsirelson"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("chsh\n2.828427"));
    assert!((first_value(&out) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn ocb_game_value() {
    let out = run(&["process", "ocb-game"]);
    assert!(out.status.success());
    assert!((first_value(&out) - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
}

#[test]
fn uncoupled_pair_has_zero_entropy() {
    let out = run(&["entropy", "pair", "--k0", "1", "--k1", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next(), Some("k0,k1,xi,entropy_nats"));
    assert_eq!(first_value(&out), 0.0);
}

#[test]
fn localize_columns() {
    let out = run(&["localize", "converge", "--eps-m", "1,2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps_m,sup_f_minus,l2_dist_f_plus");
    assert_eq!(lines.len(), 3);
}

#[test]
fn usage_errors_exit_one() {
    for args in [&["chsh", "--bogus"][..], &["nosuch"], &["entropy", "pair", "--k0", "abc"], &[]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
    let out = run(&["process", "validate", "--input", "/nonexistent/w.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let top = ["chsh", "boxes", "ic", "process", "crac", "wigner", "entropy", "localize", "ctc", "switch"];
    for name in top {
        assert!(text.contains(name), "{name} missing from listing");
    }
    let nested: [(&str, &[&str]); 6] = [
        ("boxes", &["nonsignalling", "polytope", "game"]),
        ("ic", &["rac", "scan"]),
        ("process", &["validate", "ocb-game", "separability", "ordered"]),
        ("crac", &["table", "bounds", "hgr", "dpi"]),
        ("entropy", &["pair", "chain", "bound"]),
        ("localize", &["converge", "commutator"]),
    ];
    for (group, subs) in nested {
        let listing = stdout(&run(&[group, "--help"]));
        for sub in subs {
            assert!(listing.contains(sub), "{group} {sub}");
            let out = run(&[group, sub, "--help"]);
            assert!(out.status.success(), "{group} {sub} --help");
            assert!(stdout(&out).contains("Usage:"));
        }
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn process_json(w: impl Fn(usize, usize) -> f64) -> String {
    let rows: Vec<Vec<[f64; 2]>> = (0..16).map(|i| (0..16).map(|j| [w(i, j), 0.0]).collect()).collect();
    serde_json::json!({ "dims": { "dA1": 2, "dA2": 2, "dB1": 2, "dB2": 2 }, "entries": rows }).to_string()
}

#[test]
fn invalid_process_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // I/4 plus a σz on A₂ alone: normalization fails for some channels.
    let bad = write(dir.path(), "bad.json", &process_json(|i, j| {
        if i != j {
            0.0
        } else {
            let a2 = (i >> 2) & 1;
            0.25 * (1.0 + if a2 == 0 { 0.5 } else { -0.5 })
        }
    }));
    let out = run(&["process", "validate", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("alice_directions,"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("validation failed"));
    for sub in ["ocb-game", "separability"] {
        assert_eq!(run(&["process", sub, "--input", &bad]).status.code(), Some(2), "{sub}");
    }
    let good = write(dir.path(), "good.json", &process_json(|i, j| if i == j { 0.25 } else { 0.0 }));
    let out = run(&["process", "validate", "--input", &good]);
    assert_eq!(out.status.code(), Some(0));
    let garbage = write(dir.path(), "garbage.json", "{\"dims\": 3}");
    assert_eq!(run(&["process", "validate", "--input", &garbage]).status.code(), Some(2));
}

#[test]
fn out_of_range_parameters_exit_two() {
    assert_eq!(run(&["crac", "table", "--e1", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["entropy", "pair", "--k0=-1"]).status.code(), Some(2));
    assert_eq!(run(&["boxes", "game", "--p", "0.9"]).status.code(), Some(2));
}

#[test]
fn out_flag_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    let out = run(&["ic", "scan", "--n-max", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = doc.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["n"], 3);
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["n", "E", "I_exact", "I_lower_bound", "P_k"]);
}

#[test]
fn ordered_process_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let p = path.to_str().unwrap();
    let out = run(&["process", "ordered", "--order", "ba", "--seed", "9", "--format", "json", "--out", p]);
    assert!(out.status.success());
    assert_eq!(run(&["process", "validate", "--input", p]).status.code(), Some(0));
    let sep = run(&["process", "separability", "--input", p]);
    assert!(stdout(&sep).lines().nth(1).unwrap().starts_with("separable,"));
}

#[test]
fn seeds_change_random_artifacts() {
    let a = stdout(&run(&["ic", "rac", "--n", "2", "--trials", "500", "--seed", "1"]));
    let b = stdout(&run(&["ic", "rac", "--n", "2", "--trials", "500", "--seed", "2"]));
    assert_ne!(a, b);
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["boxes", "polytope", "--samples", "50", "--seed", "4"];
    let default = run(&args);
    let capped = Command::new(env!("CARGO_BIN_EXE_causalkit"))
        .args(args)
        .env("CAUSALKIT_THREADS", "1")
        .output()
        .unwrap();
    assert!(capped.status.success());
    assert_eq!(default.stdout, capped.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_causalkit"))
        .args(args)
        .env("CAUSALKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
