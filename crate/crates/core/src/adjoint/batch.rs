//! Observable batching: one producer hands chunks of Hamiltonian terms to
//! `g` worker threads, each running the adjoint sweep on a private copy of
//! the forward state.
//!
//! Per-term values are stored by term index and reduced sequentially in term
//! order, so energy and gradient are bit-identical for any worker count or
//! batch size.

use std::ops::Range;

use crossbeam_channel::unbounded;

use super::{expand, forward, sweep, ExecutionStats};
use crate::circuit::Circuit;
use crate::error::{Result, SimError};
use crate::measurements::{Hamiltonian, Observable};
use crate::statevector::StateVector;

/// Threads used by the gate kernels during the forward pass.
pub const FWD_BATCH_ENV: &str = "SVSIM_FWD_BATCH";
/// Default number of gradient workers.
pub const BWD_BATCH_ENV: &str = "SVSIM_BWD_BATCH";

fn env_count(name: &str) -> Option<usize> {
    std::env::var(name)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Worker count from `SVSIM_BWD_BATCH`, else 1.
pub fn default_workers() -> usize {
    env_count(BWD_BATCH_ENV).unwrap_or(1)
}

/// Forward-pass kernel threads from `SVSIM_FWD_BATCH`, else 1.
pub fn default_forward_threads() -> usize {
    env_count(FWD_BATCH_ENV).unwrap_or(1)
}

/// Partition of `n_observables` terms into contiguous chunks.
///
/// Without a batch size the terms are split into `min(g, n)` chunks whose
/// sizes differ by at most one, larger chunks first (`n = 9, g = 4` gives
/// `3, 2, 2, 2`). With `b` every chunk holds `b` terms except possibly the last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    pub n_observables: usize,
    pub n_workers: usize,
    pub batch_size: Option<usize>,
    pub chunks: Vec<Range<usize>>,
}

impl BatchPlan {
    pub fn new(n_observables: usize, n_workers: usize, batch_size: Option<usize>) -> Result<Self> {
        if n_workers == 0 {
            return Err(SimError::invalid("worker count must be at least 1"));
        }
        let chunks = match batch_size {
            Some(0) => return Err(SimError::invalid("batch size must be at least 1")),
            Some(b) => (0..n_observables)
                .step_by(b)
                .map(|s| s..(s + b).min(n_observables))
                .collect(),
            None => {
                let (q, r) = (n_observables / n_workers, n_observables % n_workers);
                let mut start = 0;
                (0..n_workers)
                    .map(|w| q + usize::from(w < r))
                    .filter(|&len| len > 0)
                    .map(|len| {
                        start += len;
                        start - len..start
                    })
                    .collect()
            }
        };
        Ok(BatchPlan {
            n_observables,
            n_workers,
            batch_size,
            chunks,
        })
    }

    pub fn chunk_sizes(&self) -> Vec<usize> {
        self.chunks.iter().map(|c| c.len()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchOptions {
    pub workers: usize,
    pub batch_size: Option<usize>,
    pub forward_threads: usize,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            workers: default_workers(),
            batch_size: None,
            forward_threads: default_forward_threads(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub energy: f64,
    /// One entry per trainable parameter of the circuit, ascending.
    pub gradient: Vec<f64>,
    /// `⟨P_i⟩` of every Hamiltonian term, without its coefficient.
    pub term_values: Vec<f64>,
    pub plan: BatchPlan,
    pub stats: ExecutionStats,
}

/// `⟨H⟩` and `∇⟨H⟩` from `|0…0⟩` with `n_workers` gradient workers.
pub fn batched_expval_and_grad(
    circuit: &Circuit,
    hamiltonian: &Hamiltonian,
    n_workers: usize,
    batch_size: Option<usize>,
) -> Result<BatchResult> {
    let state0 = StateVector::new_zero_state(circuit.n_qubits)?;
    let opts = BatchOptions {
        workers: n_workers,
        batch_size,
        forward_threads: default_forward_threads(),
    };
    batched_expval_and_grad_with(circuit, hamiltonian, &state0, &opts)
}

type ChunkOutput = Result<(Vec<f64>, Vec<f64>, ExecutionStats)>;

pub fn batched_expval_and_grad_with(
    circuit: &Circuit,
    hamiltonian: &Hamiltonian,
    state0: &StateVector<f64>,
    opts: &BatchOptions,
) -> Result<BatchResult> {
    let plan = BatchPlan::new(hamiltonian.len(), opts.workers, opts.batch_size)?;
    circuit.validate()?;
    if state0.n_qubits() != circuit.n_qubits {
        return Err(SimError::DimensionMismatch {
            expected: circuit.n_qubits,
            got: state0.n_qubits(),
        });
    }
    let terms: Vec<Observable> = hamiltonian
        .terms()
        .iter()
        .cloned()
        .map(Observable::from)
        .collect();
    for t in &terms {
        t.validate(circuit.n_qubits)?;
    }
    let trainable = circuit.trainable_params();
    let n_cols = trainable.len();
    let steps = expand(circuit, &trainable)?;

    let mut stats = ExecutionStats::default();
    let start = state0.clone().with_threads(opts.forward_threads.max(1));
    let mut psi = forward(circuit, &start, &mut stats)?;
    psi.set_threads(1);

    let mut outputs: Vec<Option<ChunkOutput>> = vec![None; plan.chunks.len()];
    let (task_tx, task_rx) = unbounded::<usize>();
    let (result_tx, result_rx) = unbounded::<(usize, ChunkOutput)>();
    std::thread::scope(|s| {
        for _ in 0..opts.workers.min(plan.chunks.len()) {
            let (task_rx, result_tx) = (task_rx.clone(), result_tx.clone());
            let (plan, steps, psi, terms) = (&plan, &steps, &psi, &terms);
            s.spawn(move || {
                for idx in task_rx.iter() {
                    let mut st = ExecutionStats::default();
                    let out = sweep(
                        steps,
                        psi,
                        &terms[plan.chunks[idx].clone()],
                        n_cols,
                        &mut st,
                    )
                    .map(|(v, j)| (v, j, st));
                    if result_tx.send((idx, out)).is_err() {
                        return;
                    }
                }
            });
        }
        drop(result_tx);
        for idx in 0..plan.chunks.len() {
            task_tx.send(idx).expect("workers outlive the producer");
        }
        drop(task_tx);
        for (idx, out) in result_rx.iter() {
            outputs[idx] = Some(out);
        }
    });

    let mut term_values = Vec::with_capacity(terms.len());
    let mut term_grads = Vec::with_capacity(terms.len() * n_cols);
    for out in outputs {
        let (v, j, st) = out.expect("every chunk is processed")?;
        term_values.extend(v);
        term_grads.extend(j);
        stats.merge(&st);
    }

    let coeffs = hamiltonian.coeffs();
    let mut energy = 0.0;
    let mut gradient = vec![0.0; n_cols];
    for (i, &c) in coeffs.iter().enumerate() {
        energy += c * term_values[i];
        for (g, d) in gradient
            .iter_mut()
            .zip(&term_grads[i * n_cols..(i + 1) * n_cols])
        {
            *g += c * d;
        }
    }
    Ok(BatchResult {
        energy,
        gradient,
        term_values,
        plan,
        stats,
    })
}
