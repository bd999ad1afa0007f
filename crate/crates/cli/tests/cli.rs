use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppgsec")).args(args).current_dir(dir).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

fn short_synth(dir: &Path, out: &str, extra: &[&str]) {
    let mut args = vec!["synth", "--out-dir", out, "--set", "duration=20"];
    args.extend_from_slice(extra);
    ok(dir, &args);
}

#[test]
fn synth_writes_all_artifacts() {
    let t = tempfile::tempdir().unwrap();
    short_synth(t.path(), "v", &["--set", "bpm=60", "--set", "jitter=0"]);
    for f in ["video.frv1", "mask.msk1", "truth.csv", "truth_ipi.csv", "trace.csv"] {
        assert!(t.path().join("v").join(f).is_file(), "{f}");
    }
    let ipi = fs::read_to_string(t.path().join("v/truth_ipi.csv")).unwrap();
    let mut lines = ipi.lines();
    assert_eq!(lines.next(), Some("seconds"));
    assert!(lines.all(|l| (l.parse::<f64>().unwrap() - 1.0).abs() < 1e-9));
}

#[test]
fn extract_reports_heart_rate() {
    let t = tempfile::tempdir().unwrap();
    short_synth(t.path(), "v", &["--set", "bpm=66"]);
    let report = ok(t.path(), &["extract", "--video", "v/video.frv1", "--mask", "v/mask.msk1", "--method", "pca", "--out", "p.csv"]);
    let json: Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["method"], "pca");
    assert!((json["heart_rate_bpm"].as_f64().unwrap() - 66.0).abs() < 1.5, "{json}");
    assert!(fs::read_to_string(t.path().join("p.csv")).unwrap().starts_with("t,value\n"));
}

#[test]
fn ipi_and_quantize_agree() {
    let t = tempfile::tempdir().unwrap();
    short_synth(t.path(), "v", &[]);
    ok(t.path(), &["ipi", "--signal", "v/truth.csv", "--out-dir", "k"]);
    ok(t.path(), &["quantize", "--ipi", "k/ipi.csv", "--codec", "gray", "--out", "g.txt"]);
    ok(t.path(), &["quantize", "--ipi", "k/ipi.csv", "--codec", "trend", "--out", "tr.txt"]);
    let gray = fs::read_to_string(t.path().join("k/gray.txt")).unwrap();
    assert_eq!(gray, fs::read_to_string(t.path().join("g.txt")).unwrap());
    assert!(gray.lines().all(|l| l.len() == 8));
    let trend = fs::read_to_string(t.path().join("tr.txt")).unwrap();
    assert_eq!(trend, fs::read_to_string(t.path().join("k/trend.txt")).unwrap());
    let intervals = fs::read_to_string(t.path().join("k/ipi.csv")).unwrap().lines().count() - 1;
    assert_eq!(trend.trim().len(), intervals + 1);
    assert!(trend.starts_with('0'));
}

#[test]
fn metrics_of_identical_files() {
    let t = tempfile::tempdir().unwrap();
    short_synth(t.path(), "v", &[]);
    let out = ok(t.path(), &["metrics", "--ref", "v/truth.csv", "--cand", "v/truth.csv", "--kind", "pulse"]);
    let json: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["mae"], 0.0);
    assert_eq!(json["pc"], 1.0);
    assert_eq!(json["bhr"], 1.0);
    fs::write(t.path().join("a.txt"), "0101\n1100\n").unwrap();
    fs::write(t.path().join("b.txt"), "0111\n1100\n").unwrap();
    let out = ok(t.path(), &["metrics", "--ref", "a.txt", "--cand", "b.txt", "--kind", "bits", "--out", "m.json"]);
    assert!(out.is_empty());
    let json: Value = serde_json::from_str(&fs::read_to_string(t.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(json["bhr"], 7.0 / 8.0);
    assert_eq!(json["n"], 8);
}

#[test]
fn enroll_attack_and_defend() {
    let t = tempfile::tempdir().unwrap();
    short_synth(t.path(), "enroll", &["--user", "3", "--seed", "1"]);
    short_synth(t.path(), "a", &["--user", "4", "--seed", "2"]);
    short_synth(t.path(), "b", &["--user", "5", "--seed", "3"]);
    short_synth(t.path(), "victim", &["--user", "3", "--seed", "9"]);
    ok(
        t.path(),
        &["enroll", "--ppg", "enroll/truth.csv", "--impostor", "a/truth.csv", "--impostor", "b/truth.csv", "--out", "tpl.json"],
    );
    let video = ["--video", "victim/video.frv1", "--mask", "victim/mask.msk1"];
    let attack = |v: &str| -> Value {
        let out = ok(t.path(), &["attack", "--video", v, "--mask", "victim/mask.msk1", "--template", "tpl.json"]);
        serde_json::from_str(&out).unwrap()
    };
    let before = attack("victim/video.frv1");
    assert_eq!(before["schema"], 1);
    assert_eq!(before["reports"][0]["attack_kind"], "victim_rppg");
    assert_eq!(before["reports"][1]["attack_kind"], "mean_rppg");
    assert!(before["reports"][1]["success_rate"].as_f64().unwrap() >= 0.5, "{before}");

    let mut args = vec!["defend"];
    args.extend_from_slice(&video);
    args.extend_from_slice(&["--truth", "victim/truth.csv", "--out", "prot.frv1"]);
    let report: Value = serde_json::from_str(&ok(t.path(), &args)).unwrap();
    assert_eq!(report["hidden"], true, "{report}");
    let after = attack("prot.frv1");
    assert!(after["reports"][0]["success_rate"].as_f64().unwrap() < 0.1, "{after}");
}

#[test]
fn zero_amplitude_inject_copies_the_video() {
    let t = tempfile::tempdir().unwrap();
    short_synth(t.path(), "v", &["--set", "duration=4"]);
    ok(t.path(), &["inject", "--video", "v/video.frv1", "--mask", "v/mask.msk1", "--amp", "0", "--out", "same.frv1"]);
    assert_eq!(fs::read(t.path().join("v/video.frv1")).unwrap(), fs::read(t.path().join("same.frv1")).unwrap());
}

#[test]
fn custom_waveform_injection() {
    let t = tempfile::tempdir().unwrap();
    short_synth(t.path(), "v", &["--set", "duration=4"]);
    fs::write(t.path().join("w.csv"), "t,value\n0,0\n1,1\n2,0\n3,-1\n4,0\n").unwrap();
    ok(
        t.path(),
        &["inject", "--video", "v/video.frv1", "--mask", "v/mask.msk1", "--wave", "custom", "--custom", "w.csv", "--out", "c.frv1"],
    );
    assert_ne!(fs::read(t.path().join("v/video.frv1")).unwrap(), fs::read(t.path().join("c.frv1")).unwrap());
}

#[test]
fn exit_codes() {
    let t = tempfile::tempdir().unwrap();
    let p = t.path();
    // usage
    assert_eq!(code(p, &["extract"]), 2);
    // missing and malformed input
    assert_eq!(code(p, &["extract", "--video", "nope.frv1", "--mask", "nope.msk1", "--out", "x.csv"]), 2);
    fs::write(p.join("junk.frv1"), b"JUNKJUNKJUNK").unwrap();
    fs::write(p.join("junk.msk1"), b"MSK1").unwrap();
    assert_eq!(code(p, &["extract", "--video", "junk.frv1", "--mask", "junk.msk1", "--out", "x.csv"]), 2);
    fs::write(p.join("bad.csv"), "t,value\n0,abc\n").unwrap();
    assert_eq!(code(p, &["ipi", "--signal", "bad.csv", "--out-dir", "k"]), 2);
    // domain errors
    assert_eq!(code(p, &["synth", "--out-dir", "v", "--set", "bpm=400"]), 3);
    assert_eq!(code(p, &["synth", "--out-dir", "v", "--set", "colour=3"]), 3);
    fs::write(p.join("flat.csv"), "t,value\n0,1\n0.1,1\n0.2,1\n0.3,1\n").unwrap();
    assert_eq!(code(p, &["ipi", "--signal", "flat.csv", "--out-dir", "k"]), 3);
    short_synth(p, "v", &["--set", "duration=4"]);
    let bad_freq = ["inject", "--video", "v/video.frv1", "--mask", "v/mask.msk1", "--freq", "9", "--out", "o.frv1"];
    assert_eq!(code(p, &bad_freq), 3);
    assert!(!p.join("o.frv1").exists());
}
