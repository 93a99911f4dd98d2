use std::path::PathBuf;
use std::process::{Command, Output};

use k3zeta::families::preset;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3zeta")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn count_example_padic() {
    let ex = data("ex24.txt");
    let out = run(&["count", "--model", "double-cover", "--poly", &ex, "--p", "7", "--n", "3", "--method", "padic"]);
    assert_eq!(stdout(&out), "60\n2488\n118587\n");
}

#[test]
fn count_json_and_methods() {
    let ex = data("ex24.txt");
    for method in ["naive", "fft", "auto"] {
        let out = run(&[
            "count",
            "--model",
            "double-cover",
            "--poly",
            &ex,
            "--p",
            "7",
            "--n",
            "2",
            "--method",
            method,
            "--out",
            "json",
        ]);
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let counts: Vec<&str> = v["counts"].as_array().unwrap().iter().map(|c| c["count"].as_str().unwrap()).collect();
        assert_eq!(counts, ["60", "2488"], "{method}");
    }
}

#[test]
fn weil_on_cm_surface() {
    let poly = preset("mu9").unwrap().template().to_string();
    let out = run(&["weil", "--poly", &poly, "--p", "13"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["picard_upper"], 16);
    assert_eq!(v["zeta_consistent"], true);
    assert_eq!(v["nodes"].as_array().unwrap().iter().map(|n| n.as_u64().unwrap()).sum::<u64>(), 15);
}

#[test]
fn nonordinary_scan_lists_nineteen() {
    let out = run(&["scan-nonordinary", "--poly", &data("v13.txt"), "--pmax", "100"]);
    let text = stdout(&out);
    assert!(text.starts_with("p,class\n"));
    assert!(text.lines().any(|l| l == "19,non-ordinary"), "{text}");
}

#[test]
fn family_scan_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("rows.jsonl");
    let ck = ck.to_str().unwrap();
    let base = ["scan-family", "--family", "v2a", "--primes", "17..19", "--params", "sample:3", "--out", "json"];
    let serial = stdout(&run(&[&base[..], &["--jobs", "1"]].concat()));
    let parallel = stdout(&run(&[&base[..], &["--jobs", "2", "--checkpoint", ck]].concat()));
    assert_eq!(serial, parallel);
    let written = std::fs::read_to_string(ck).unwrap().lines().count();
    assert_eq!(written, 6);
    // a replay only reads the checkpoint
    let replay = stdout(&run(&[&base[..], &["--jobs", "2", "--checkpoint", ck]].concat()));
    assert_eq!(replay, serial);
    assert_eq!(std::fs::read_to_string(ck).unwrap().lines().count(), written);
}

#[test]
fn exit_codes() {
    let ex = data("ex24.txt");
    let bad_prime = run(&["count", "--model", "double-cover", "--poly", &ex, "--p", "9"]);
    assert_eq!(bad_prime.status.code(), Some(2));
    let bad_text = run(&["count", "--model", "hypersurface", "--poly", "T0^3+", "--p", "7"]);
    assert_eq!(bad_text.status.code(), Some(2));
    let unknown = run(&["scan-family", "--family", "nope", "--primes", "7"]);
    assert_eq!(unknown.status.code(), Some(2));
    let too_few = run(&["weil", "--poly", &ex, "--p", "7", "--n", "1"]);
    assert_eq!(too_few.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&too_few.stderr).contains("precision"));
    let too_big =
        run(&["count", "--model", "double-cover", "--poly", &ex, "--p", "7", "--n", "7", "--method", "naive"]);
    assert_eq!(too_big.status.code(), Some(3));
}
