//! Per-index gate microbenchmarks.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use svsim::simd::{apply_vectorized_op, CpuFeatures, KernelOptions, KernelTier};
use svsim::{Complex64, GateKind, Operation, StateVector};

use crate::error::{CliError, CliResult};

/// Upper bound on the minimum time of the no-op pseudo-gate. Anything slower
/// means the timing loop itself has grown overhead.
pub const NOOP_EPSILON_S: f64 = 1e-5;

/// Name of the pseudo-gate that times an empty closure.
pub const NOOP_GATE: &str = "noop";

/// One timing row. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub gate: String,
    pub n_qubits: usize,
    /// Target wires joined with `-`, e.g. `3` or `0-5`.
    pub target_index: String,
    pub tier: String,
    pub threads: usize,
    pub streaming: bool,
    pub reps: usize,
    pub min_s: f64,
    pub mean_s: f64,
    pub max_s: f64,
}

pub const CSV_HEADER: &str =
    "gate,n_qubits,target_index,tier,threads,streaming,reps,min_s,mean_s,max_s";

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub gate: String,
    pub n_qubits: usize,
    pub tiers: Vec<KernelTier>,
    pub threads: Vec<usize>,
    pub reps: usize,
    pub streaming: bool,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            gate: "RX".into(),
            n_qubits: 10,
            tiers: vec![KernelTier::Scalar],
            threads: vec![1],
            reps: 5,
            streaming: false,
            seed: 0,
        }
    }
}

enum Target {
    Gate(GateKind),
    Noop,
}

fn resolve_gate(name: &str) -> CliResult<Target> {
    if name.eq_ignore_ascii_case(NOOP_GATE) {
        return Ok(Target::Noop);
    }
    GateKind::named()
        .find(|k| k.name().eq_ignore_ascii_case(name))
        .map(Target::Gate)
        .ok_or_else(|| {
            let known: Vec<&str> = GateKind::named().map(|k| k.name()).collect();
            CliError::Usage(format!(
                "unknown gate `{name}` (known: {}, {NOOP_GATE})",
                known.join(", ")
            ))
        })
}

/// Ordered tuples of `k` distinct wires, lexicographic.
fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &out {
            for w in (0..n).filter(|w| !t.contains(w)) {
                let mut t2 = t.clone();
                t2.push(w);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Bytes available for new allocations, from `/proc/meminfo` where present.
fn available_memory() -> Option<u64> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024)
}

fn check_capacity(n_qubits: usize) -> CliResult<()> {
    if n_qubits == 0 || n_qubits > svsim::statevector::MAX_QUBITS {
        return Err(CliError::Usage(format!(
            "--qubits must be in 1..={}",
            svsim::statevector::MAX_QUBITS
        )));
    }
    // The state plus the pristine copy it is reset from.
    let need = 2u128 * (16u128 << n_qubits);
    if let Some(avail) = available_memory() {
        if need > avail as u128 {
            return Err(CliError::Runtime(format!(
                "a {n_qubits}-qubit benchmark needs {need} bytes but only {avail} are available"
            )));
        }
    }
    Ok(())
}

fn stats(samples: &[f64]) -> (f64, f64, f64) {
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(0.0, f64::max);
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    // Summation rounding can push the mean a hair outside [min, max].
    (min, mean.clamp(min, max), max)
}

/// Times `gate` on every index tuple for each (tier, threads) pair and hands
/// each record to `sink` in a fixed order: tiers, then thread counts, then
/// indices.
pub fn cmd_bench(
    cfg: &BenchConfig,
    mut sink: impl FnMut(BenchRecord) -> CliResult<()>,
) -> CliResult<usize> {
    let target = resolve_gate(&cfg.gate)?;
    if cfg.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    if cfg.tiers.is_empty() || cfg.threads.is_empty() || cfg.threads.contains(&0) {
        return Err(CliError::Usage(
            "--tiers and --threads need at least one value; thread counts start at 1".into(),
        ));
    }
    check_capacity(cfg.n_qubits)?;
    let (arity, gate_name) = match &target {
        Target::Gate(k) => (k.n_wires().unwrap_or(1), k.name().to_string()),
        Target::Noop => (1, NOOP_GATE.to_string()),
    };
    if arity > cfg.n_qubits {
        return Err(CliError::Usage(format!(
            "{gate_name} needs {arity} qubits, got --qubits {}",
            cfg.n_qubits
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let params: Vec<f64> = match &target {
        Target::Gate(k) => (0..k.n_params())
            .map(|_| rng.random_range(-3.0..3.0))
            .collect(),
        Target::Noop => vec![],
    };
    let amps: Vec<Complex64> = (0..1usize << cfg.n_qubits)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut pristine = StateVector::from_amplitudes(&amps)?;
    pristine.normalize();
    let mut sv = pristine.clone();
    let features = CpuFeatures::detect();

    let mut emitted = 0;
    for &tier in &cfg.tiers {
        let opts = KernelOptions::tier(tier)
            .streaming(cfg.streaming)
            .portable(!features.supports(tier));
        for &threads in &cfg.threads {
            sv.set_threads(threads);
            for wires in index_tuples(cfg.n_qubits, arity) {
                let mut times = Vec::with_capacity(cfg.reps);
                match &target {
                    Target::Gate(kind) => {
                        let op = Operation::gate(*kind, &wires).with_params(&params);
                        for _ in 0..cfg.reps {
                            let t = Instant::now();
                            apply_vectorized_op(&mut sv, &op, &opts)?;
                            times.push(t.elapsed().as_secs_f64());
                        }
                        // Keep amplitudes from drifting over long sweeps.
                        sv.copy_from(&pristine);
                    }
                    Target::Noop => {
                        for _ in 0..cfg.reps {
                            let t = Instant::now();
                            std::hint::black_box(&mut sv);
                            times.push(t.elapsed().as_secs_f64());
                        }
                    }
                }
                let (min_s, mean_s, max_s) = stats(&times);
                sink(BenchRecord {
                    gate: gate_name.clone(),
                    n_qubits: cfg.n_qubits,
                    target_index: wires
                        .iter()
                        .map(|w| w.to_string())
                        .collect::<Vec<_>>()
                        .join("-"),
                    tier: tier.name().to_string(),
                    threads,
                    streaming: cfg.streaming,
                    reps: cfg.reps,
                    min_s,
                    mean_s,
                    max_s,
                })?;
                emitted += 1;
            }
        }
    }
    Ok(emitted)
}

/// Convenience wrapper collecting every record.
pub fn collect_bench(cfg: &BenchConfig) -> CliResult<Vec<BenchRecord>> {
    let mut out = Vec::new();
    cmd_bench(cfg, |r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}
