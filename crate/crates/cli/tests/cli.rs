use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const SLAZ: &str = "../core/scenarios/slaz_m4n2.cfq";

fn cfcomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfcomm"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = cfcomm(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn json(args: &[&str]) -> Value {
    serde_json::from_slice(&ok(args)).expect("valid JSON")
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name)
}

fn assert_schema(name: &str, doc: &Value) {
    let schema: Value = serde_json::from_str(&fs::read_to_string(schema_path(name)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn pbm(width: usize, height: usize, black: impl Fn(usize, usize) -> bool) -> String {
    let mut s = format!("P1\n{width} {height}\n");
    for y in 0..height {
        let row: Vec<&str> = (0..width).map(|x| if black(x, y) { "1" } else { "0" }).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

#[test]
fn simulate_exact_logic0() {
    let r = json(&["simulate", SLAZ, "--logic", "0", "--exact"]);
    assert_schema("simulate.schema.json", &r);
    let c = r["exact"]["conditional_d0"].as_f64().unwrap();
    assert!((c - 0.853553).abs() < 1e-6, "{c}");
    assert!(r.get("wall_time_s").is_none());
}

#[test]
fn simulate_exact_logic1() {
    let r = json(&["simulate", SLAZ, "--logic", "1", "--exact"]);
    assert_schema("simulate.schema.json", &r);
    assert!(r["exact"]["detectors"]["D0"].as_f64().unwrap() <= 1e-12);
    assert_eq!(r["exact"]["conditional_d1"].as_f64(), Some(1.0));
}

#[test]
fn simulate_hash_matches_builtin() {
    let file = json(&["simulate", SLAZ, "--logic", "0"]);
    let builtin = json(&["simulate", "builtin:slaz_m4n2", "--logic", "0"]);
    assert_eq!(file["scenario"], builtin["scenario"]);
    let hash = file["scenario"]["hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
}

#[test]
fn simulate_monte_carlo_and_wall_time() {
    let r = json(&[
        "simulate",
        SLAZ,
        "--logic",
        "0",
        "--trials",
        "20000",
        "--seed",
        "3",
        "--exact",
        "--wall-time",
    ]);
    assert_schema("simulate.schema.json", &r);
    assert_eq!(r["monte_carlo"]["counts"]["trials"].as_u64(), Some(20000));
    assert!(r["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn simulate_is_independent_of_workers() {
    let base = ["simulate", SLAZ, "--logic", "0", "--trials", "50000", "--seed", "11"];
    let one = ok(&[&base[..], &["--workers", "1"]].concat());
    let four = ok(&[&base[..], &["--workers", "4"]].concat());
    let again = ok(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(one, four);
    assert_eq!(four, again);
}

#[test]
fn malformed_scenario_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfq");
    fs::write(&bad, "format_version = 1\nname = x\nthis is not valid\n").unwrap();
    let out = cfcomm(&["simulate", bad.to_str().unwrap(), "--logic", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(
        msg.split(|c: char| c.is_whitespace()).any(|w| {
            let w = w.trim_end_matches(':');
            w.split_once(':')
                .is_some_and(|(l, c)| l.parse::<u32>().is_ok() && c.parse::<u32>().is_ok())
        }),
        "{msg}"
    );
}

#[test]
fn missing_file_and_unknown_builtin_exit_2() {
    assert_eq!(
        cfcomm(&["simulate", "/nonexistent.cfq", "--logic", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        cfcomm(&["simulate", "builtin:nope", "--logic", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn optimize_mirror() {
    let r = json(&["optimize-mirror", "--M", "4"]);
    assert_schema("optimize_mirror.schema.json", &r);
    assert!((r["optimum"].as_f64().unwrap() - 0.5).abs() < 1e-5);
    let r = json(&["optimize-mirror", "--M", "3", "--steps", "6"]);
    assert!((r["optimum"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-5);
    assert_eq!(r["sweep"].as_array().unwrap().len(), 7);
    assert_eq!(cfcomm(&["optimize-mirror", "--M", "2"]).status.code(), Some(2));
}

#[test]
fn audit_single_photon_and_coherent() {
    let r = json(&["audit", SLAZ, "--logic", "1"]);
    assert_schema("audit.schema.json", &r);
    assert_eq!(r["joint_violation"].as_f64(), Some(0.0));
    for d in r["audit"]["detectors"].as_array().unwrap() {
        assert_eq!(d["traversing_share"].as_f64(), Some(0.0), "{d}");
    }
    let r = json(&["audit", SLAZ, "--logic", "0", "--source", "coherent", "--mu", "1"]);
    assert_schema("audit.schema.json", &r);
    assert!(r["joint_violation"].as_f64().unwrap() > 0.0);
    assert_eq!(r["audit"]["joint_absorbed_and_conclusive"].as_f64(), Some(0.0));
}

#[test]
fn audit_too_large_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(SLAZ)).unwrap();
    let big = src
        .lines()
        .map(|l| match l.split_once('=') {
            Some((k, _)) if k.trim() == "M" => "M = 6".to_owned(),
            Some((k, _)) if k.trim() == "N" => "N = 6".to_owned(),
            _ => l.to_owned(),
        })
        .collect::<Vec<_>>()
        .join("\n");
    let path = dir.path().join("big.cfq");
    fs::write(&path, big).unwrap();
    let p = path.to_str().unwrap();
    ok(&["simulate", p, "--logic", "0"]);
    assert_eq!(cfcomm(&["audit", p, "--logic", "0"]).status.code(), Some(4));
}

#[test]
fn calibrate_report() {
    let r = json(&["calibrate", SLAZ]);
    assert_schema("calibrate.schema.json", &r);
    let v = r["calibration"]["visibility"].as_f64().unwrap();
    assert!((0.9..=1.0).contains(&v));
}

#[test]
fn transmit_counts_bits_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.pbm");
    fs::write(&input, pbm(100, 100, |x, y| (x / 10 + y / 10) % 2 == 0)).unwrap();
    let run = |tag: &str, workers_hint: &str| {
        let out = dir.path().join(format!("out{tag}.pbm"));
        let stats = dir.path().join(format!("stats{tag}.json"));
        let csv = dir.path().join(format!("stats{tag}.csv"));
        ok(&[
            "transmit",
            SLAZ,
            "--image",
            input.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--stats",
            stats.to_str().unwrap(),
            "--stats-csv",
            csv.to_str().unwrap(),
            "--seed",
            workers_hint,
        ]);
        (fs::read(out).unwrap(), fs::read(stats).unwrap(), fs::read(csv).unwrap())
    };
    let a = run("a", "5");
    let b = run("b", "5");
    assert_eq!(a, b);
    let stats: Value = serde_json::from_slice(&a.1).unwrap();
    assert_schema("transmit.schema.json", &stats);
    assert_eq!(stats["stats"]["bits"].as_u64(), Some(10_000));
    assert_eq!(stats["stats"]["errors_logic1"].as_u64(), Some(0));
    let csv = String::from_utf8(a.2).unwrap();
    assert!(csv.starts_with("bits,bits_logic0,bits_logic1,errors_logic0,errors_logic1,"));
}

#[test]
fn transmit_all_white_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("white.pbm");
    let text = pbm(12, 7, |_, _| false);
    fs::write(&input, &text).unwrap();
    let out = dir.path().join("out.pbm");
    let stats = ok(&[
        "transmit",
        SLAZ,
        "--image",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let stats: Value = serde_json::from_slice(&stats).unwrap();
    assert_eq!(stats["stats"]["pixel_errors"].as_u64(), Some(0));
    let original = cfcore_bits(text.as_bytes());
    assert_eq!(cfcore_bits(&fs::read(out).unwrap()), original);
}

fn cfcore_bits(bytes: &[u8]) -> Vec<u8> {
    let img = cfcomm_core::protocol::decode_pbm(bytes).unwrap();
    img.bits()
}

#[test]
fn transmit_rejects_bad_image() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.pbm");
    fs::write(&input, "P7\n1 1\n0\n").unwrap();
    let out = dir.path().join("o.pbm");
    let res = cfcomm(&[
        "transmit",
        SLAZ,
        "--image",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
}

fn lock_csv(args: &[&str]) -> Vec<(f64, f64)> {
    let text = String::from_utf8(ok(&[&["lock-demo"][..], args].concat())).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,time_s,phase_error,visibility"));
    lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[2], f[3])
        })
        .collect()
}

fn mean(xs: &[(f64, f64)]) -> f64 {
    xs.iter().map(|x| x.1).sum::<f64>() / xs.len() as f64
}

#[test]
fn lock_demo_orders_locked_above_unlocked() {
    let locked = lock_csv(&["--locked", "--seed", "4"]);
    let unlocked = lock_csv(&["--unlocked", "--seed", "4"]);
    assert_eq!(locked.len(), 1500);
    assert!(mean(&locked) >= 0.98);
    assert!(mean(&unlocked) < mean(&locked));
}

#[test]
fn lock_demo_without_drift_is_flat() {
    let flat = lock_csv(&["--sigma", "0", "--duration", "50"]);
    assert!(flat.iter().all(|&(_, v)| (v - 0.99).abs() < 1e-12));
}

#[test]
fn lock_demo_is_deterministic() {
    assert_eq!(ok(&["lock-demo", "--seed", "9"]), ok(&["lock-demo", "--seed", "9"]));
}
