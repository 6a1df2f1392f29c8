use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn svsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svsim"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

#[test]
fn bench_csv_header_is_stable() {
    let o = svsim(&["bench", "--gate", "RX", "--qubits", "3", "--reps", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        format!("{}\n", text.lines().next().unwrap()),
        golden("bench_header.csv")
    );
    assert_eq!(
        svsim_cli::bench::CSV_HEADER,
        golden("bench_header.csv").trim_end()
    );
}

#[test]
fn vqe_csv_header_is_stable() {
    let o = svsim(&["vqe", &fixture("h2.ham"), "--steps", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        format!("{}\n", text.lines().next().unwrap()),
        golden("vqe_header.csv")
    );
    // One report row for one step.
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn bench_row_counts() {
    let o = svsim(&[
        "bench", "--gate", "RX", "--qubits", "10", "--tiers", "scalar", "--reps", "3",
    ]);
    assert_eq!(stdout(&o).lines().count(), 1 + 10);
    let o = svsim(&["bench", "--gate", "CNOT", "--qubits", "6", "--reps", "1"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 30);
    let o = svsim(&[
        "bench",
        "--gate",
        "rx",
        "--qubits",
        "5",
        "--tiers",
        "scalar,vector256,vector512",
        "--threads",
        "1,2",
        "--reps",
        "2",
        "--format",
        "json",
    ]);
    let rows = json(&o);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5 * 3 * 2);
    for r in rows {
        let (min, mean, max) = (
            r["min_s"].as_f64().unwrap(),
            r["mean_s"].as_f64().unwrap(),
            r["max_s"].as_f64().unwrap(),
        );
        assert!(min <= mean && mean <= max);
        assert_eq!(r["reps"], 2);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        svsim(&["bench", "--gate", "Nope", "--qubits", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(svsim(&["bench", "--qubits", "3"]).status.code(), Some(2));
    assert_eq!(
        svsim(&["bench", "--gate", "RX", "--qubits", "3", "--tiers", "sse"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        svsim(&["bench", "--gate", "RX", "--qubits", "3", "--reps", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        svsim(&["bench", "--gate", "RX", "--qubits", "60", "--reps", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(svsim(&["run", "/nonexistent.qc"]).status.code(), Some(1));
    assert_eq!(
        svsim(&[
            "run",
            &fixture("bell.qc"),
            "--shards",
            "2",
            "--tier",
            "scalar"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        svsim(&["run", &fixture("bell.qc"), "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        svsim(&["vqe", &fixture("h2.ham"), "--steps", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(svsim(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_point_at_the_location() {
    let dir = std::env::temp_dir().join(format!("svsim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.qc");
    std::fs::write(&path, "# format: 1\nqubits 2\nH 0\nRX(0.5 1\n").unwrap();
    let o = svsim(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains('^'), "{err}");
}

#[test]
fn bell_probabilities_monolithic_and_sharded() {
    let mono = json(&svsim(&["run", &fixture("bell.qc")]));
    let probs: Vec<f64> = serde_json::from_value(mono["probabilities"].clone()).unwrap();
    let want = [0.5, 0.0, 0.0, 0.5];
    for (p, w) in probs.iter().zip(want) {
        assert!((p - w).abs() < 1e-15);
    }
    let sharded = json(&svsim(&["run", &fixture("bell.qc"), "--shards", "2"]));
    assert_eq!(sharded["probabilities"], mono["probabilities"]);
    let m = &sharded["messages"];
    assert_eq!(m["shards"], 2);
    // H on the global qubit swaps blocks; CNOT controlled by it does not.
    assert_eq!(m["log"][0]["messages"], 2);
    assert_eq!(m["log"][1]["messages"], 0);
    assert!(m["total_messages"].as_u64().unwrap() >= 2);
}

#[test]
fn samples_repeat_for_a_seed() {
    let args = ["run", &fixture("bell.qc"), "--shots", "1000", "--seed", "7"];
    let a = json(&svsim(&args));
    let b = json(&svsim(&args));
    assert_eq!(a["samples"], b["samples"]);
    let mut sharded_args = args.to_vec();
    sharded_args.extend(["--shards", "2"]);
    assert_eq!(json(&svsim(&sharded_args))["samples"], a["samples"]);
    let counts = &a["samples"]["counts"];
    assert_eq!(
        counts["00"].as_u64().unwrap() + counts["11"].as_u64().unwrap(),
        1000
    );
}

#[test]
fn observable_report() {
    let o = json(&svsim(&[
        "run",
        &fixture("bell.qc"),
        "--observable",
        "Z0 Z1",
        "--observable",
        "[X0 X1]",
        "--tier",
        "vector256",
    ]));
    let ev = o["expvals"].as_array().unwrap();
    assert!((ev[0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((ev[1]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(o.get("probabilities").is_none());
    let trace = o["dispatch"].as_array().unwrap();
    assert_eq!(trace.len(), 2);
    assert_eq!(trace[0]["requested"], "vector256");
}

#[test]
fn vqe_trajectory_independent_of_workers() {
    let run = |workers: &str| {
        json(&svsim(&[
            "vqe",
            &fixture("h2.ham"),
            "--steps",
            "10",
            "--workers",
            workers,
            "--format",
            "json",
        ]))
    };
    let (a, b) = (run("1"), run("4"));
    let ea: Vec<f64> = a["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["energy"].as_f64().unwrap())
        .collect();
    let eb: Vec<f64> = b["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["energy"].as_f64().unwrap())
        .collect();
    assert_eq!(ea.len(), 10);
    for (x, y) in ea.iter().zip(&eb) {
        assert!((x - y).abs() <= 1e-12);
    }
    assert_eq!(b["workers"], 4);
}

#[test]
fn worker_count_env_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_svsim"))
        .args([
            "vqe",
            &fixture("h2.ham"),
            "--steps",
            "1",
            "--format",
            "json",
        ])
        .env("SVSIM_BWD_BATCH", "3")
        .output()
        .unwrap();
    assert_eq!(json(&o)["workers"], 3);
}

#[test]
fn noop_harness_overhead_is_small() {
    let recs = svsim_cli::collect_bench(&svsim_cli::BenchConfig {
        gate: "noop".into(),
        n_qubits: 4,
        reps: 200,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(recs.len(), 4);
    for r in recs {
        assert!(r.min_s < svsim_cli::bench::NOOP_EPSILON_S, "{r:?}");
    }
}
