//! End-to-end tests of the `phaseless` binary: exit codes, file formats,
//! and byte-determinism of the outputs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use phaseless::io::write_sample_file;
use phaseless::kernels::GStarCache;
use phaseless::pipeline::{reconstruct, ReconstructionConfig};
use phaseless::signals;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phaseless"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_preset_samples(path: &Path, m: u32, s: f64) {
    let sig = signals::sine_preset();
    let mags = signals::sample_magnitudes(&sig, s, m);
    let mut buf = Vec::new();
    write_sample_file(&mut buf, s, &mags).unwrap();
    fs::write(path, buf).unwrap();
}

#[test]
fn malformed_input_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "M=2 s=1\n-2 0.5\n-1 not-a-number\n").unwrap();
    let out = run(&["reconstruct", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_input_exits_with_io_code() {
    let out = run(&["reconstruct", "--input", "/nonexistent/samples.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn near_zero_line_exits_with_dedicated_code() {
    // A lone magnitude spike sends g_M below the near-zero guard.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spike.txt");
    let mut text = String::from("M=20 s=1\n");
    for k in -20i64..=20 {
        text.push_str(&format!("{} {}\n", k, if k == 0 { 1.0 } else { 0.0 }));
    }
    fs::write(&path, text).unwrap();
    let out = run(&["reconstruct", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_rate_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.txt");
    write_preset_samples(&path, 8, 1.0);
    // Declared bandwidth 0.5 at s = 1 sits exactly at the critical rate.
    let out = run(&["reconstruct", "--input", path.to_str().unwrap(), "--b", "0.5"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn reconstruct_file_matches_in_process_run() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("samples.txt");
    let output = dir.path().join("result.json");
    let (m, s) = (16u32, 1.0);
    write_preset_samples(&input, m, s);

    let out = run(&[
        "reconstruct",
        "--input",
        input.to_str().unwrap(),
        "--b",
        "0.25",
        "--out",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();

    let sig = signals::sine_preset();
    let cfg = ReconstructionConfig::new(m, s, 0.25, 0.1).unwrap();
    let mags = signals::sample_magnitudes(&sig, s, m);
    let expected = reconstruct(&cfg, &mags, &GStarCache::new()).unwrap();

    let values: Vec<f64> = json["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(values, expected.values, "file round trip changed the output");
    let grid: Vec<f64> = json["grid"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(grid, expected.grid);
    assert_eq!(json["sign_resolved"], serde_json::json!(false));
    assert!(json["diagnostics"].is_object());
}

#[test]
fn reconstruct_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("samples.txt");
    write_preset_samples(&input, 12, 1.0);
    let args = [
        "reconstruct",
        "--input",
        input.to_str().unwrap(),
        "--b",
        "0.25",
        "--format",
        "text",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn benchmark_csv_is_ordered_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bench.csv");
    let out = run(&[
        "benchmark",
        "--preset",
        "sine",
        "--m-list",
        "12,8,10",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "M,error,predicted_rate,runtime_ms");
    let ms: Vec<u32> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ms, vec![8, 10, 12], "rows must be sorted by M");
    for line in &lines[1..] {
        let err_field = line.split(',').nth(1).unwrap();
        assert!(
            err_field.parse::<f64>().is_ok(),
            "error column not numeric: {line}"
        );
    }
}

#[test]
fn tabulate_kernel_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("gstar1.txt");
    let second = dir.path().join("gstar2.txt");
    for path in [&first, &second] {
        let out = run(&["tabulate-kernel", "--M", "6", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let a = fs::read(&first).unwrap();
    assert_eq!(a, fs::read(&second).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("M=6 "), "unexpected header: {}", text.lines().next().unwrap());
    // Arguments -M ..= 2M, one value per line after the header.
    assert_eq!(text.lines().count(), 1 + (3 * 6 + 1));
}

#[test]
fn demo_counterexample_json_report() {
    let out = run(&["demo-counterexample", "--format", "json"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["sampling_rate_s"].as_f64(), Some(2.0));
    assert_eq!(json["twice_bandwidth"].as_f64(), Some(2.0));
    assert!(json["max_magnitude_discrepancy"].as_f64().unwrap() <= 1e-12);
    assert!(json["sup_function_gap"].as_f64().unwrap() >= 0.9);
}
