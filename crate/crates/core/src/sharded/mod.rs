//! A state vector split into `2^g` contiguous shards.
//!
//! The `g` most significant qubits are global: their bits select the shard.
//! Gates on local qubits run inside each shard with no communication. A gate
//! whose targets include `m` global qubits groups the shards that differ only
//! in those bits; every member sends its block to the other `2^m − 1`
//! members, rebuilds the `(m + local)`-qubit group state, applies the gate and
//! keeps its own block. That is `n_shards · (2^m − 1)` block transfers per
//! gate. Shard 0 is the root for reductions.

mod transport;

pub use transport::{MessageLog, Payload, TraceEntry};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::adjoint::{adjoint_jacobian, control_masks, AdjointState, Jacobian, JacobianRequest};
use crate::circuit::{Circuit, Operation};
use crate::error::{check_wires, Result, SimError};
use crate::gates::{apply_operation_to_slice, GateKind};
use crate::measurements::{
    cumulative, last_nonzero, locate, uniforms, Observable, Pauli, PauliWord, SampleSet,
};
use crate::statevector::StateVector;
use transport::Exchange;

const ROOT: usize = 0;

#[derive(Debug, Clone)]
pub struct ShardedState {
    n_qubits: usize,
    n_global: usize,
    shards: Vec<Vec<Complex64>>,
    log: MessageLog,
    /// Drive shards from the thread pool for local work.
    parallel: bool,
}

impl ShardedState {
    /// Splits `sv` into `n_shards` contiguous blocks.
    pub fn shard(sv: &StateVector<f64>, n_shards: usize) -> Result<Self> {
        let n = sv.n_qubits();
        if !n_shards.is_power_of_two() {
            return Err(SimError::invalid(format!(
                "shard count {n_shards} is not a power of two"
            )));
        }
        let n_global = n_shards.trailing_zeros() as usize;
        if n_global > n {
            return Err(SimError::invalid(format!(
                "{n_shards} shards exceed the {} amplitudes of a {n}-qubit state",
                sv.len()
            )));
        }
        let block = sv.len() / n_shards;
        Ok(ShardedState {
            n_qubits: n,
            n_global,
            shards: sv.amplitudes().chunks(block).map(<[_]>::to_vec).collect(),
            log: MessageLog::default(),
            parallel: false,
        })
    }

    pub fn new_zero_state(n_qubits: usize, n_shards: usize) -> Result<Self> {
        Self::shard(&StateVector::new_zero_state(n_qubits)?, n_shards)
    }

    /// Concatenates the shards in shard order.
    pub fn gather(&self) -> StateVector<f64> {
        let amps: Vec<Complex64> = self.shards.iter().flatten().copied().collect();
        StateVector::from_amplitudes(&amps).expect("valid register")
    }

    pub fn with_parallel_shards(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_shards(&self) -> usize {
        self.shards.len()
    }

    pub fn block_len(&self) -> usize {
        self.shards[0].len()
    }

    pub fn global_qubits(&self) -> std::ops::Range<usize> {
        0..self.n_global
    }

    pub fn local_qubits(&self) -> std::ops::Range<usize> {
        self.n_global..self.n_qubits
    }

    pub fn shards(&self) -> &[Vec<Complex64>] {
        &self.shards
    }

    pub fn log(&self) -> &MessageLog {
        &self.log
    }

    fn n_local(&self) -> usize {
        self.n_qubits - self.n_global
    }

    /// Bit of global wire `w` in the index of shard `s`.
    fn global_bit(&self, s: usize, w: usize) -> bool {
        (s >> (self.n_global - 1 - w)) & 1 == 1
    }

    /// Σ over shards of the local squared norms, summed at the root.
    pub fn norm_sqr(&self) -> f64 {
        let mut ex = Exchange::new(&self.log, "norm");
        let partial: Vec<f64> = self
            .shards
            .iter()
            .map(|b| b.iter().map(|a| a.norm_sqr()).sum())
            .collect();
        self.reduce_at_root(&mut ex, &partial).iter().sum()
    }

    /// Sends each non-root shard's values to the root; returns them in shard order.
    fn reduce_at_root(&self, ex: &mut Exchange<'_>, partial: &[f64]) -> Vec<f64> {
        for (s, &p) in partial.iter().enumerate().skip(1) {
            ex.send(s, ROOT, Payload::Reals(vec![p]));
        }
        let mut out = vec![partial[ROOT]];
        for s in 1..partial.len() {
            out.extend(ex.recv_reals(s, ROOT));
        }
        out
    }

    /// Applies a named gate.
    pub fn apply_gate(&mut self, kind: GateKind, wires: &[usize], params: &[f64]) -> Result<()> {
        self.apply_operation(&Operation::gate(kind, wires).with_params(params), false)
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(SimError::DimensionMismatch {
                expected: self.n_qubits,
                got: circuit.n_qubits,
            });
        }
        circuit
            .ops
            .iter()
            .try_for_each(|op| self.apply_operation(op, false))
    }

    /// Applies `op` (or its adjoint) and records one trace entry labelled
    /// with the gate name.
    pub fn apply_operation(&mut self, op: &Operation, inverse: bool) -> Result<()> {
        op.validate(self.n_qubits)?;
        let label = op.kind.name();
        let ng = self.n_global;
        let global_targets: Vec<usize> = {
            let mut t: Vec<usize> = op.wires.iter().copied().filter(|&w| w < ng).collect();
            t.sort_unstable();
            t
        };
        // Local controls stay on the operation; global ones gate whole shards.
        type Ctrls = Vec<(usize, bool)>;
        let (global_ctrls, local_ctrls): (Ctrls, Ctrls) = op
            .ctrls
            .iter()
            .copied()
            .zip(op.ctrl_values.iter().copied())
            .partition(|&(c, _)| c < ng);
        let active = |s: usize| {
            global_ctrls
                .iter()
                .all(|&(c, v)| ((s >> (ng - 1 - c)) & 1 == 1) == v)
        };

        let m = global_targets.len();
        // Wire position inside the (m + local)-qubit group register.
        let remap = |w: usize| match global_targets.iter().position(|&g| g == w) {
            Some(i) => i,
            None => m + (w - ng),
        };
        let mut sub = op.clone();
        sub.wires = op.wires.iter().map(|&w| remap(w)).collect();
        sub.ctrls = local_ctrls.iter().map(|&(c, _)| remap(c)).collect();
        sub.ctrl_values = local_ctrls.iter().map(|&(_, v)| v).collect();

        let mut ex = Exchange::new(&self.log, label);
        if m == 0 {
            let run = |(s, block): (usize, &mut Vec<Complex64>)| -> Result<()> {
                if active(s) {
                    apply_operation_to_slice(block, &sub, inverse, 1)?;
                }
                Ok(())
            };
            let (shards, parallel) = (&mut self.shards, self.parallel);
            return if parallel {
                shards.par_iter_mut().enumerate().try_for_each(run)
            } else {
                shards.iter_mut().enumerate().try_for_each(run)
            };
        }

        // Members of a group differ only in the global target bits.
        let target_mask: usize = global_targets.iter().map(|&w| 1usize << (ng - 1 - w)).sum();
        let member = |s: usize, rank: usize| -> usize {
            let mut out = s & !target_mask;
            for (i, &w) in global_targets.iter().enumerate() {
                if (rank >> (m - 1 - i)) & 1 == 1 {
                    out |= 1 << (ng - 1 - w);
                }
            }
            out
        };
        let rank_of = |s: usize| -> usize {
            global_targets
                .iter()
                .fold(0, |r, &w| (r << 1) | usize::from(self.global_bit(s, w)))
        };
        let group_size = 1usize << m;

        // Exchange, ordered by shard index.
        for s in 0..self.n_shards() {
            if !active(s) {
                continue;
            }
            for r in 0..group_size {
                let peer = member(s, r);
                if peer != s {
                    ex.send(s, peer, Payload::Amplitudes(self.shards[s].clone()));
                }
            }
        }
        let block = self.block_len();
        let mut updated = Vec::with_capacity(self.n_shards());
        for s in 0..self.n_shards() {
            if !active(s) {
                updated.push(None);
                continue;
            }
            let mut group = Vec::with_capacity(block * group_size);
            for r in 0..group_size {
                let peer = member(s, r);
                if peer == s {
                    group.extend_from_slice(&self.shards[s]);
                } else {
                    group.extend(ex.recv_amplitudes(peer, s));
                }
            }
            apply_operation_to_slice(&mut group, &sub, inverse, 1)?;
            let r = rank_of(s);
            updated.push(Some(group[r * block..(r + 1) * block].to_vec()));
        }
        for (s, new) in updated.into_iter().enumerate() {
            if let Some(b) = new {
                self.shards[s] = b;
            }
        }
        ex.finish();
        Ok(())
    }

    /// Probabilities over `wires` (every wire when `None`), assembled at the root.
    pub fn probabilities_root(&self, wires: Option<&[usize]>) -> Result<Vec<f64>> {
        let mut ex = Exchange::new(&self.log, "probabilities");
        let n = self.n_qubits;
        let nl = self.n_local();
        let Some(wires) = wires else {
            let local: Vec<Vec<f64>> = self
                .shards
                .iter()
                .map(|b| b.iter().map(|a| a.norm_sqr()).collect())
                .collect();
            for (s, p) in local.iter().enumerate().skip(1) {
                ex.send(s, ROOT, Payload::Reals(p.clone()));
            }
            let mut out = local[ROOT].clone();
            for s in 1..self.n_shards() {
                out.extend(ex.recv_reals(s, ROOT));
            }
            return Ok(out);
        };
        check_wires(wires, n)?;
        let partial: Vec<Vec<f64>> = self
            .shards
            .iter()
            .enumerate()
            .map(|(s, block)| {
                let mut out = vec![0.0; 1 << wires.len()];
                for (i, a) in block.iter().enumerate() {
                    let g = (s << nl) | i;
                    let r = wires
                        .iter()
                        .fold(0, |r, &w| (r << 1) | ((g >> (n - 1 - w)) & 1));
                    out[r] += a.norm_sqr();
                }
                out
            })
            .collect();
        for (s, p) in partial.iter().enumerate().skip(1) {
            ex.send(s, ROOT, Payload::Reals(p.clone()));
        }
        let mut out = partial[ROOT].clone();
        for s in 1..self.n_shards() {
            for (o, v) in out.iter_mut().zip(ex.recv_reals(s, ROOT)) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// Same draws as [`crate::measurements::sample`] on the gathered state.
    ///
    /// The running sum is scanned shard by shard (each shard starts from its
    /// predecessor's total), the root draws the targets and routes each one
    /// to the first shard whose running total exceeds it.
    pub fn sample_root(&self, shots: usize, seed: u64) -> Result<SampleSet> {
        if shots == 0 {
            return Err(SimError::invalid("at least one shot is required"));
        }
        let mut ex = Exchange::new(&self.log, "sample");
        let s_count = self.n_shards();
        let nl = self.n_local();

        let mut cdfs = Vec::with_capacity(s_count);
        let mut starts = Vec::with_capacity(s_count);
        let mut start = 0.0;
        for s in 0..s_count {
            if s > 0 {
                ex.send(s - 1, s, Payload::Reals(vec![start]));
                start = ex.recv_reals(s - 1, s)[0];
            }
            starts.push(start);
            let cdf = cumulative(self.shards[s].iter().map(|a| a.norm_sqr()), start);
            start = *cdf.last().expect("nonempty shard");
            cdfs.push(cdf);
        }
        // Each shard reports its running total and last nonzero index to the root.
        let summary: Vec<(f64, Option<usize>)> = (0..s_count)
            .map(|s| {
                let end = *cdfs[s].last().expect("nonempty shard");
                let last = last_nonzero(&cdfs[s], starts[s]).map(|i| (s << nl) | i);
                (end, last)
            })
            .collect();
        for (s, &(end, last)) in summary.iter().enumerate().skip(1) {
            let last = last.map_or(-1.0, |i| i as f64);
            ex.send(s, ROOT, Payload::Reals(vec![end, last]));
        }
        let mut ends = vec![summary[ROOT].0];
        let mut fallback = summary[ROOT].1;
        for s in 1..s_count {
            let r = ex.recv_reals(s, ROOT);
            ends.push(r[0]);
            if r[1] >= 0.0 {
                fallback = Some(r[1] as usize);
            }
        }
        let total = *ends.last().expect("at least one shard");
        if total <= 0.0 || !total.is_finite() {
            return Err(SimError::invalid(
                "cannot sample from a zero or non-finite state",
            ));
        }
        let fallback = fallback.expect("positive total");

        // Route targets, remembering which shots went where.
        let targets: Vec<f64> = uniforms(shots, seed)
            .into_iter()
            .map(|u| u * total)
            .collect();
        let mut owner = vec![usize::MAX; shots];
        let mut routed: Vec<Vec<f64>> = vec![Vec::new(); s_count];
        for (shot, &t) in targets.iter().enumerate() {
            if let Some(s) = ends.iter().position(|&e| e > t) {
                owner[shot] = s;
                routed[s].push(t);
            }
        }
        for (s, ts) in routed.iter().enumerate() {
            if s != ROOT && !ts.is_empty() {
                ex.send(ROOT, s, Payload::Reals(ts.clone()));
            }
        }
        let mut answers: Vec<std::vec::IntoIter<usize>> = Vec::with_capacity(s_count);
        for s in 0..s_count {
            let ts = if s == ROOT || routed[s].is_empty() {
                routed[s].clone()
            } else {
                ex.recv_reals(ROOT, s)
            };
            let found: Vec<usize> = ts
                .iter()
                .map(|&t| locate(&cdfs[s], t).map_or(fallback, |i| (s << nl) | i))
                .collect();
            if s != ROOT && !found.is_empty() {
                ex.send(s, ROOT, Payload::Indices(found));
                answers.push(Vec::new().into_iter());
            } else {
                answers.push(found.into_iter());
            }
        }
        for s in 1..s_count {
            if !routed[s].is_empty() {
                answers[s] = ex.recv_indices(s, ROOT).into_iter();
            }
        }
        let indices = owner
            .iter()
            .map(|&s| {
                if s == usize::MAX {
                    fallback
                } else {
                    answers[s].next().expect("one answer per routed shot")
                }
            })
            .collect();
        ex.finish();
        Ok(SampleSet {
            shots,
            n_qubits: self.n_qubits,
            seed,
            indices,
        })
    }

    /// Adjoint Jacobian computed on the shards; the result lives at the root.
    pub fn adjoint_jacobian(&self, req: &JacobianRequest) -> Result<Jacobian> {
        adjoint_jacobian(req, self)
    }

    fn apply_pauli_word(&mut self, word: &PauliWord) -> Result<()> {
        for &(w, p) in word.factors() {
            let kind = match p {
                Pauli::X => GateKind::X,
                Pauli::Y => GateKind::Y,
                Pauli::Z => GateKind::Z,
            };
            self.apply_operation(&Operation::gate(kind, &[w]), false)?;
        }
        Ok(())
    }

    /// `self += c · other`, shard by shard.
    fn axpy(&mut self, c: f64, other: &ShardedState) {
        for (a, b) in self.shards.iter_mut().zip(&other.shards) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * c;
            }
        }
    }

    fn fill_zero(&mut self) {
        for b in &mut self.shards {
            b.fill(Complex64::new(0.0, 0.0));
        }
    }
}

/// Adjoint Jacobian of `req` on a sharded copy of `state0`.
pub fn adjoint_jacobian_sharded(req: &JacobianRequest, st: &ShardedState) -> Result<Jacobian> {
    st.adjoint_jacobian(req)
}

impl AdjointState for ShardedState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_op(&mut self, op: &Operation, inverse: bool) -> Result<()> {
        self.apply_operation(op, inverse)
    }

    fn apply_observable(&mut self, obs: &Observable) -> Result<()> {
        obs.validate(self.n_qubits)?;
        match obs {
            Observable::PauliWord(p) => self.apply_pauli_word(p),
            Observable::Hamiltonian(h) => {
                let src = self.clone();
                let mut term = self.clone();
                self.fill_zero();
                for (&c, t) in h.coeffs().iter().zip(h.terms()) {
                    term.copy_from(&src);
                    term.apply_pauli_word(t)?;
                    self.axpy(c, &term);
                }
                Ok(())
            }
            Observable::DenseHermitian { wires, matrix } => {
                self.apply_operation(&Operation::matrix(wires, matrix.clone()), false)
            }
            Observable::SparseHermitian(m) => {
                // Every shard needs the whole vector for its rows.
                let mut ex = Exchange::new(&self.log, "sparse-observable");
                let s_count = self.n_shards();
                for s in 0..s_count {
                    for t in 0..s_count {
                        if s != t {
                            ex.send(s, t, Payload::Amplitudes(self.shards[s].clone()));
                        }
                    }
                }
                let block = self.block_len();
                let mut out = Vec::with_capacity(s_count);
                for t in 0..s_count {
                    let mut full = Vec::with_capacity(block * s_count);
                    for s in 0..s_count {
                        if s == t {
                            full.extend_from_slice(&self.shards[t]);
                        } else {
                            full.extend(ex.recv_amplitudes(s, t));
                        }
                    }
                    let mut rows = vec![Complex64::new(0.0, 0.0); block];
                    m.matvec_rows(&full, t * block..(t + 1) * block, &mut rows);
                    out.push(rows);
                }
                ex.finish();
                self.shards = out;
                Ok(())
            }
        }
    }

    fn project_controls(&mut self, ctrls: &[usize], values: &[bool]) -> Result<()> {
        check_wires(ctrls, self.n_qubits)?;
        let nl = self.n_local();
        let (mask, want) = control_masks(ctrls, values, self.n_qubits);
        for (s, block) in self.shards.iter_mut().enumerate() {
            for (i, a) in block.iter_mut().enumerate() {
                if ((s << nl) | i) & mask != want {
                    *a = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(())
    }

    fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits || self.n_shards() != other.n_shards() {
            return Err(SimError::invalid(
                "inner product of differently sharded states",
            ));
        }
        let mut ex = Exchange::new(&self.log, "inner");
        let partial: Vec<Complex64> = self
            .shards
            .iter()
            .zip(&other.shards)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
            .collect();
        for (s, p) in partial.iter().enumerate().skip(1) {
            ex.send(s, ROOT, Payload::Amplitudes(vec![*p]));
        }
        let mut acc = partial[ROOT];
        for s in 1..partial.len() {
            acc += ex.recv_amplitudes(s, ROOT)[0];
        }
        Ok(acc)
    }

    fn expval(&self, obs: &Observable) -> Result<f64> {
        let mut tmp = self.clone();
        tmp.apply_observable(obs)?;
        Ok(self.inner(&tmp)?.re)
    }

    fn copy_from(&mut self, other: &Self) {
        for (a, b) in self.shards.iter_mut().zip(&other.shards) {
            a.copy_from_slice(b);
        }
    }
}
