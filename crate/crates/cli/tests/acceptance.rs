//! Acceptance report: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails. Run with `cargo test -p svsim-cli --test acceptance`.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::time::{Duration, Instant};

use support::checks;
use svsim::adjoint::BatchOptions;
use svsim::circuit::singles_doubles_ansatz;
use svsim::simd::KernelTier;
use svsim::vqe::{run_vqe, VqeOptions};
use svsim_cli::bench::{cmd_bench, BenchConfig, CSV_HEADER};

struct Report {
    failed: Vec<&'static str>,
}

impl Report {
    fn line(&mut self, id: &'static str, ok: bool, elapsed: Duration, detail: String) {
        println!(
            "{} {id:<24} {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if !ok {
            self.failed.push(id);
        }
    }
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed())
}

fn kernel_oracle(rep: &mut Report) {
    let (s, t) = timed(|| checks::kernel_oracle_sweep(2..=10, 7));
    let ok = s.max_err < 1e-12 && t < Duration::from_secs(300);
    rep.line(
        "kernel-oracle",
        ok,
        t,
        format!(
            "{} cases, n 2..=10, max |Δ| {:.2e} (< 1e-12), limit 300 s",
            s.cases, s.max_err
        ),
    );
}

fn controlled_work(rep: &mut Report) {
    let ((cases, bad), t) = timed(|| checks::controlled_call_counts(12));
    let detail = match bad.first() {
        None => format!("{cases} (n, target, controls) cases, all counts equal 2^(n-1-c)"),
        Some(b) => format!("{} of {cases} cases wrong, first: {b}", bad.len()),
    };
    rep.line("controlled-work", bad.is_empty(), t, detail);
}

fn tier_equivalence(rep: &mut Report) {
    let ((s, fallbacks), t) = timed(|| checks::tier_equivalence(2..=16, 11));
    let ok = s.max_err < 1e-12 && fallbacks == 0 && t < Duration::from_secs(600);
    rep.line(
        "tier-equivalence",
        ok,
        t,
        format!(
            "{} applications, n 2..=16, streaming on/off, max |Δ| {:.2e} (< 1e-12), {fallbacks} fallbacks, limit 600 s",
            s.cases, s.max_err
        ),
    );
}

fn gradients(rep: &mut Report) {
    let (g, t) = timed(|| checks::gradient_cross_check(50, 21));
    let ok = g.circuits == 50
        && g.max_vs_shift < 1e-10
        && g.max_vs_fd < 1e-6
        && g.adjoint_executions == (1, 1)
        && g.shift_count_mismatches == 0;
    rep.line(
        "gradient-cross-check",
        ok,
        t,
        format!(
            "{} circuits, |adj-shift| {:.2e} (< 1e-10), |adj-fd| {:.2e} (< 1e-6), adjoint executions {:?} for up to {} params",
            g.circuits, g.max_vs_shift, g.max_vs_fd, g.adjoint_executions, g.max_params
        ),
    );
}

fn batching(rep: &mut Report) {
    let (b, t) = timed(|| checks::batching_determinism(31));
    let ok = b.bit_mismatches.is_empty() && b.plan_violations.is_empty();
    let detail = if ok {
        format!(
            "{} runs over g {{1,2,4,8}} x b {{-,1,3,n}} bit-identical, partitions follow ceil(n/g)",
            b.runs
        )
    } else {
        format!(
            "mismatches {:?}, plan violations {:?}",
            b.bit_mismatches, b.plan_violations
        )
    };
    rep.line("batching-determinism", ok, t, detail);
}

fn sharded(rep: &mut Report) {
    let (s, t) = timed(|| checks::sharded_equivalence(10, &[2, 4, 8], 3, 41));
    let ok = s.max_state < 1e-12
        && s.max_probs < 1e-12
        && s.sample_mismatches == 0
        && s.max_jacobian < 1e-10
        && s.law_violations.is_empty();
    let mut detail = format!(
        "{} circuits, state {:.2e}, probs {:.2e} (< 1e-12), {} sample mismatches, jacobian {:.2e} (< 1e-10), {} message-law violations",
        s.circuits,
        s.max_state,
        s.max_probs,
        s.sample_mismatches,
        s.max_jacobian,
        s.law_violations.len()
    );
    if let Some(v) = s.law_violations.first() {
        detail.push_str(&format!(", first: {v}"));
    }
    rep.line("sharded-equivalence", ok, t, detail);
}

fn vqe(rep: &mut Report) {
    let h = checks::load_h2();
    let e0 = checks::h2_ground_energy();
    let opts = VqeOptions {
        steps: 50,
        learning_rate: 0.2,
        batch: BatchOptions::default(),
    };
    let (r, t) = timed(|| run_vqe(|p| singles_doubles_ansatz(4, 2, p), &h, &[0.0; 3], &opts));
    match r {
        Ok(r) => {
            let gap = (r.final_energy - e0).abs();
            let ok = h.len() == 15 && gap < 1e-3 && t < Duration::from_secs(30);
            rep.line(
                "vqe-h2",
                ok,
                t,
                format!(
                    "{} terms, final {:.10} vs exact {:.10}, gap {:.2e} (< 1e-3), limit 30 s",
                    h.len(),
                    r.final_energy,
                    e0,
                    gap
                ),
            );
        }
        Err(e) => rep.line("vqe-h2", false, t, format!("run failed: {e}")),
    }
}

fn bench(rep: &mut Report) {
    let t0 = Instant::now();
    let tiers = vec![
        KernelTier::Scalar,
        KernelTier::Vector256,
        KernelTier::Vector512,
    ];
    let cfg = BenchConfig {
        gate: "RX".into(),
        n_qubits: 20,
        tiers: tiers.clone(),
        threads: vec![1, 2],
        reps: 3,
        ..Default::default()
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut records = Vec::new();
    let res = cmd_bench(&cfg, |r| {
        w.serialize(&r)
            .map_err(|e| svsim_cli::CliError::Runtime(e.to_string()))?;
        records.push(r);
        Ok(())
    });
    let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
    let cnot = svsim_cli::collect_bench(&BenchConfig {
        gate: "CNOT".into(),
        n_qubits: 6,
        reps: 1,
        ..Default::default()
    });
    let t = t0.elapsed();
    let (Ok(_), Ok(cnot)) = (res, cnot) else {
        rep.line("bench", false, t, "benchmark command failed".into());
        return;
    };
    let mut per_combo = Vec::new();
    for tier in &tiers {
        for th in [1, 2] {
            per_combo.push(
                records
                    .iter()
                    .filter(|r| r.tier == tier.name() && r.threads == th)
                    .count(),
            );
        }
    }
    let header_ok = text.lines().next() == Some(CSV_HEADER);
    let fields_ok = text.lines().all(|l| l.split(',').count() == 10);
    let ordered = records
        .iter()
        .all(|r| r.min_s <= r.mean_s && r.mean_s <= r.max_s);
    let ok =
        per_combo.iter().all(|&c| c == 20) && header_ok && fields_ok && ordered && cnot.len() == 30;
    rep.line(
        "bench",
        ok,
        t,
        format!(
            "RX n=20 records per (tier, threads) {per_combo:?} (want 20), header stable {header_ok}, CNOT n=6 {} records (want 30)",
            cnot.len()
        ),
    );
}

fn sampling(rep: &mut Report) {
    let ((p, tests), t) = timed(|| checks::sampling_min_p_value(6, 100_000, &[1, 2, 3]));
    rep.line(
        "sampling-chi-square",
        p > 1e-3,
        t,
        format!("{tests} tests, n 1..=6, 1e5 shots, seeds 1/2/3, min p {p:.4} (> 0.001)"),
    );
}

fn main() {
    // libtest flags such as `--nocapture` or a name filter are ignored.
    let mut rep = Report { failed: Vec::new() };
    kernel_oracle(&mut rep);
    controlled_work(&mut rep);
    tier_equivalence(&mut rep);
    gradients(&mut rep);
    batching(&mut rep);
    sharded(&mut rep);
    vqe(&mut rep);
    bench(&mut rep);
    sampling(&mut rep);
    if rep.failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!(
            "acceptance: {} failing: {}",
            rep.failed.len(),
            rep.failed.join(", ")
        );
        std::process::exit(1);
    }
}
