//! Adjoint-method Jacobians, a parameter-shift reference, and the batched
//! observable pipeline.
//!
//! The adjoint sweep runs the circuit forward once, prepares `λ_k = O_k|ψ⟩`
//! for every observable, then walks the gates backwards. At a trainable gate
//! `U = exp(i·a·θ·G)` the derivative is `-2a · Im⟨λ_k|G|φ⟩`, after which both
//! `φ` and every `λ_k` are un-applied through `U†`.

mod batch;

pub use batch::{
    batched_expval_and_grad, batched_expval_and_grad_with, default_forward_threads,
    default_workers, BatchOptions, BatchPlan, BatchResult, BWD_BATCH_ENV, FWD_BATCH_ENV,
};

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::circuit::{Circuit, Operation};
use crate::error::{Result, SimError};
use crate::gates::{apply_operation, generator_of, GateKind};
use crate::measurements::{expval, Observable};
use crate::statevector::StateVector;

/// State representation the gradient routines run on.
pub trait AdjointState: Clone + Send + Sync {
    fn n_qubits(&self) -> usize;
    fn apply_op(&mut self, op: &Operation, inverse: bool) -> Result<()>;
    /// Replaces `|ψ⟩` with `O|ψ⟩`.
    fn apply_observable(&mut self, obs: &Observable) -> Result<()>;
    /// Zeroes every amplitude whose control bits differ from `values`.
    fn project_controls(&mut self, ctrls: &[usize], values: &[bool]) -> Result<()>;
    /// `⟨self|other⟩`.
    fn inner(&self, other: &Self) -> Result<Complex64>;
    fn expval(&self, obs: &Observable) -> Result<f64>;
    fn copy_from(&mut self, other: &Self);
}

impl AdjointState for StateVector<f64> {
    fn n_qubits(&self) -> usize {
        StateVector::n_qubits(self)
    }

    fn apply_op(&mut self, op: &Operation, inverse: bool) -> Result<()> {
        apply_operation(self, op, inverse)
    }

    fn apply_observable(&mut self, obs: &Observable) -> Result<()> {
        obs.apply_to(self)
    }

    fn project_controls(&mut self, ctrls: &[usize], values: &[bool]) -> Result<()> {
        let n = StateVector::n_qubits(self);
        let (mask, want) = control_masks(ctrls, values, n);
        for (i, a) in self.amplitudes_mut().iter_mut().enumerate() {
            if i & mask != want {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(())
    }

    fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(SimError::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(StateVector::inner(self, other))
    }

    fn expval(&self, obs: &Observable) -> Result<f64> {
        expval(self, obs)
    }

    fn copy_from(&mut self, other: &Self) {
        StateVector::copy_from(self, other)
    }
}

/// Index mask of the control wires and the bit pattern they must hold.
pub(crate) fn control_masks(ctrls: &[usize], values: &[bool], n_qubits: usize) -> (usize, usize) {
    ctrls.iter().zip(values).fold((0, 0), |(m, w), (&c, &v)| {
        let bit = 1usize << (n_qubits - 1 - c);
        (m | bit, if v { w | bit } else { w })
    })
}

/// Work counters. An adjoint Jacobian needs one circuit execution however
/// many parameters are trainable; parameter shift needs two per parameter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExecutionStats {
    pub circuit_executions: usize,
    pub gate_applications: usize,
    pub generator_applications: usize,
    pub state_copies: usize,
}

impl ExecutionStats {
    pub(crate) fn merge(&mut self, other: &ExecutionStats) {
        self.circuit_executions += other.circuit_executions;
        self.gate_applications += other.gate_applications;
        self.generator_applications += other.generator_applications;
        self.state_copies += other.state_copies;
    }
}

#[derive(Debug, Clone)]
pub struct JacobianRequest {
    pub circuit: Circuit,
    pub observables: Vec<Observable>,
    /// Flattened parameter indices to differentiate, ascending.
    pub trainable: Vec<usize>,
}

impl JacobianRequest {
    /// Differentiates the parameters the circuit marks trainable.
    pub fn new(circuit: Circuit, observables: Vec<Observable>) -> Self {
        let trainable = circuit.trainable_params();
        JacobianRequest {
            circuit,
            observables,
            trainable,
        }
    }

    pub fn with_trainable(mut self, mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        self.trainable = indices;
        self
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.circuit.n_qubits != n_qubits {
            return Err(SimError::DimensionMismatch {
                expected: self.circuit.n_qubits,
                got: n_qubits,
            });
        }
        self.circuit.validate()?;
        for obs in &self.observables {
            obs.validate(n_qubits)?;
        }
        let n_params = self.circuit.n_params();
        if let Some(&p) = self.trainable.iter().find(|&&p| p >= n_params) {
            return Err(SimError::invalid(format!(
                "trainable index {p} but the circuit has {n_params} parameter(s)"
            )));
        }
        if self.trainable.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::invalid(
                "trainable indices must be strictly ascending",
            ));
        }
        Ok(())
    }
}

/// `n_observables × trainable.len()` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub n_observables: usize,
    pub trainable: Vec<usize>,
    pub values: Vec<f64>,
    pub stats: ExecutionStats,
}

impl Jacobian {
    fn zeros(n_observables: usize, trainable: Vec<usize>) -> Self {
        Jacobian {
            n_observables,
            values: vec![0.0; n_observables * trainable.len()],
            trainable,
            stats: ExecutionStats::default(),
        }
    }

    pub fn n_params(&self) -> usize {
        self.trainable.len()
    }

    pub fn get(&self, obs: usize, param: usize) -> f64 {
        self.values[obs * self.n_params() + param]
    }

    pub fn row(&self, obs: usize) -> &[f64] {
        let w = self.n_params();
        &self.values[obs * w..(obs + 1) * w]
    }

    pub fn max_abs_diff(&self, other: &Jacobian) -> f64 {
        assert_eq!(
            self.values.len(),
            other.values.len(),
            "Jacobian shapes differ"
        );
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One gate of the reverse sweep. `Rot` is split into its three rotations.
#[derive(Debug, Clone)]
pub(crate) struct Step {
    op: Operation,
    /// Jacobian column and generator, when the parameter is differentiated.
    diff: Option<(usize, Observable, f64)>,
}

pub(crate) fn expand(circuit: &Circuit, trainable: &[usize]) -> Result<Vec<Step>> {
    let column = |p: usize| trainable.binary_search(&p).ok();
    let mut steps = Vec::with_capacity(circuit.ops.len());
    let mut base = 0;
    for op in &circuit.ops {
        let parts: Vec<(Operation, Option<usize>)> = if op.kind == GateKind::Rot {
            // Rot(φ, θ, ω) = RZ(φ)·RY(θ)·RZ(ω): RZ(ω) acts first.
            [(GateKind::RZ, 2), (GateKind::RY, 1), (GateKind::RZ, 0)]
                .into_iter()
                .map(|(kind, j)| {
                    let mut sub = Operation::gate(kind, &op.wires).with_params(&[op.params[j]]);
                    sub.ctrls = op.ctrls.clone();
                    sub.ctrl_values = op.ctrl_values.clone();
                    (sub, Some(base + j))
                })
                .collect()
        } else {
            let idx = (op.params.len() == 1).then_some(base);
            vec![(op.clone(), idx)]
        };
        for (sub, param) in parts {
            let diff = match param.and_then(|p| column(p).map(|c| (p, c))) {
                None => None,
                Some((p, col)) => {
                    let g = generator_of(sub.kind).map_err(|_| {
                        SimError::UnsupportedDifferentiation {
                            gate: sub.kind.name(),
                            param: p,
                            reason: "the gate has no known generator",
                        }
                    })?;
                    Some((col, g.observable.remap(&sub.wires), g.prefactor))
                }
            };
            steps.push(Step { op: sub, diff });
        }
        // Multi-parameter gates other than Rot cannot be differentiated.
        if op.kind != GateKind::Rot && op.params.len() > 1 {
            if let Some(p) = (base..base + op.params.len()).find(|&p| column(p).is_some()) {
                return Err(SimError::UnsupportedDifferentiation {
                    gate: op.kind.name(),
                    param: p,
                    reason: "multi-parameter gate without a decomposition",
                });
            }
        }
        base += op.params.len();
    }
    Ok(steps)
}

/// Forward pass from `state0`.
pub(crate) fn forward<S: AdjointState>(
    circuit: &Circuit,
    state0: &S,
    stats: &mut ExecutionStats,
) -> Result<S> {
    let mut psi = state0.clone();
    stats.state_copies += 1;
    for op in &circuit.ops {
        psi.apply_op(op, false)?;
    }
    stats.gate_applications += circuit.ops.len();
    stats.circuit_executions += 1;
    Ok(psi)
}

/// Reverse sweep over `steps` for the given observables. Returns the
/// expectation values and the row-major Jacobian block.
pub(crate) fn sweep<S: AdjointState>(
    steps: &[Step],
    psi: &S,
    observables: &[Observable],
    n_cols: usize,
    stats: &mut ExecutionStats,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lambdas = Vec::with_capacity(observables.len());
    let mut values = Vec::with_capacity(observables.len());
    for obs in observables {
        let mut l = psi.clone();
        l.apply_observable(obs)?;
        values.push(psi.inner(&l)?.re);
        lambdas.push(l);
    }
    let mut jac = vec![0.0; observables.len() * n_cols];
    if n_cols == 0 {
        stats.state_copies += lambdas.len();
        return Ok((values, jac));
    }
    let mut phi = psi.clone();
    let mut mu = psi.clone();
    stats.state_copies += lambdas.len() + 2;

    for step in steps.iter().rev() {
        if let Some((col, gen, prefactor)) = &step.diff {
            mu.copy_from(&phi);
            mu.apply_observable(gen)?;
            if !step.op.ctrls.is_empty() {
                mu.project_controls(&step.op.ctrls, &step.op.ctrl_values)?;
            }
            stats.generator_applications += 1;
            for (k, l) in lambdas.iter().enumerate() {
                jac[k * n_cols + col] = -2.0 * prefactor * l.inner(&mu)?.im;
            }
        }
        phi.apply_op(&step.op, true)?;
        for l in &mut lambdas {
            l.apply_op(&step.op, true)?;
        }
        stats.gate_applications += 1 + lambdas.len();
    }
    Ok((values, jac))
}

/// `∂⟨O_k⟩/∂θ_j` for every observable and trainable parameter.
pub fn adjoint_jacobian<S: AdjointState>(req: &JacobianRequest, state0: &S) -> Result<Jacobian> {
    req.validate(state0.n_qubits())?;
    let steps = expand(&req.circuit, &req.trainable)?;
    let mut jac = Jacobian::zeros(req.observables.len(), req.trainable.clone());
    let psi = forward(&req.circuit, state0, &mut jac.stats)?;
    let (_, values) = sweep(
        &steps,
        &psi,
        &req.observables,
        req.trainable.len(),
        &mut jac.stats,
    )?;
    jac.values = values;
    Ok(jac)
}

/// Two-term shift rule, `(f(θ+π/2) − f(θ−π/2)) / 2` per parameter.
///
/// Valid for gates `exp(-iθP/2)` with `P² = I` (up to a global phase), which
/// is the set [`GateKind::shift_compatible`] reports. Controlled gates are
/// rejected: their generators have three distinct eigenvalues.
pub fn parameter_shift_jacobian<S: AdjointState>(
    req: &JacobianRequest,
    state0: &S,
) -> Result<Jacobian> {
    req.validate(state0.n_qubits())?;
    let locations = req.circuit.param_locations();
    for &p in &req.trainable {
        let op = &req.circuit.ops[locations[p].0];
        if !op.kind.shift_compatible() || !op.ctrls.is_empty() {
            return Err(SimError::UnsupportedDifferentiation {
                gate: op.kind.name(),
                param: p,
                reason: if op.ctrls.is_empty() {
                    "no two-term shift rule"
                } else {
                    "controlled gates have no two-term shift rule"
                },
            });
        }
    }

    let mut jac = Jacobian::zeros(req.observables.len(), req.trainable.clone());
    let n_cols = req.trainable.len();
    let mut shifted = req.circuit.clone();
    let evaluate = |circuit: &Circuit, stats: &mut ExecutionStats| -> Result<Vec<f64>> {
        let psi = forward(circuit, state0, stats)?;
        req.observables.iter().map(|o| psi.expval(o)).collect()
    };
    for (col, &p) in req.trainable.iter().enumerate() {
        let (op_idx, j) = locations[p];
        let theta = req.circuit.ops[op_idx].params[j];
        shifted.ops[op_idx].params[j] = theta + FRAC_PI_2;
        let plus = evaluate(&shifted, &mut jac.stats)?;
        shifted.ops[op_idx].params[j] = theta - FRAC_PI_2;
        let minus = evaluate(&shifted, &mut jac.stats)?;
        shifted.ops[op_idx].params[j] = theta;
        for k in 0..req.observables.len() {
            jac.values[k * n_cols + col] = (plus[k] - minus[k]) / 2.0;
        }
    }
    Ok(jac)
}
