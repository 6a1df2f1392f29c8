//! Circuit and Hamiltonian data model, the `.qc` / `.ham` text formats, and
//! workload templates.

mod hamiltonian;
mod parser;
mod templates;

pub use hamiltonian::{parse_hamiltonian, HamiltonianSpec};
pub use parser::{parse_circuit, serialize_circuit, ParseError, FORMAT_VERSION};
pub use templates::{excitations, singles_doubles_ansatz, strongly_entangling_layers, Excitations};

use crate::error::{check_wires, Result, SimError};
use crate::gates::{apply_operation, GateKind};
use crate::matrix::Matrix;
use crate::precision::Real;
use crate::statevector::StateVector;

/// One gate application.
#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    pub params: Vec<f64>,
    pub ctrls: Vec<usize>,
    /// Required value of each control; same length as `ctrls`.
    pub ctrl_values: Vec<bool>,
    /// Per-parameter trainable flag; same length as `params`.
    pub trainable: Vec<bool>,
    /// Payload of `Matrix` / `ControlledMatrix` operations.
    pub matrix: Option<Matrix>,
}

impl Operation {
    pub fn gate(kind: GateKind, wires: &[usize]) -> Self {
        Operation {
            kind,
            wires: wires.to_vec(),
            params: Vec::new(),
            ctrls: Vec::new(),
            ctrl_values: Vec::new(),
            trainable: Vec::new(),
            matrix: None,
        }
    }

    pub fn matrix(wires: &[usize], matrix: Matrix) -> Self {
        Operation {
            matrix: Some(matrix),
            ..Operation::gate(GateKind::Matrix, wires)
        }
    }

    pub fn with_params(mut self, params: &[f64]) -> Self {
        self.params = params.to_vec();
        self.trainable = vec![false; params.len()];
        self
    }

    /// Marks every parameter trainable.
    pub fn mark_trainable(mut self) -> Self {
        self.trainable = vec![true; self.params.len()];
        self
    }

    /// Adds controls; `values` defaults to all ones.
    pub fn controlled(mut self, ctrls: &[usize], values: Option<&[bool]>) -> Self {
        self.ctrls.extend_from_slice(ctrls);
        match values {
            Some(v) => self.ctrl_values.extend_from_slice(v),
            None => self
                .ctrl_values
                .extend(std::iter::repeat_n(true, ctrls.len())),
        }
        if self.kind == GateKind::Matrix {
            self.kind = GateKind::ControlledMatrix;
        }
        self
    }

    pub fn is_trainable(&self) -> bool {
        self.trainable.iter().any(|&t| t)
    }

    /// Every wire the operation touches, controls first.
    pub fn all_wires(&self) -> Vec<usize> {
        let mut w = self.ctrls.clone();
        w.extend_from_slice(&self.wires);
        w
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        crate::gates::check_arity_op(self)?;
        let expected_wires = match self.kind.n_wires() {
            Some(w) => w,
            None => {
                let m = self.matrix.as_ref().ok_or_else(|| {
                    SimError::invalid(format!("{} operation without a matrix", self.kind))
                })?;
                m.n_wires()
                    .ok_or_else(|| SimError::invalid("matrix dimension is not a power of two"))?
            }
        };
        if self.wires.len() != expected_wires {
            return Err(SimError::invalid(format!(
                "{} acts on {} wire(s), got {}",
                self.kind,
                expected_wires,
                self.wires.len()
            )));
        }
        if self.ctrl_values.len() != self.ctrls.len() {
            return Err(SimError::DimensionMismatch {
                expected: self.ctrls.len(),
                got: self.ctrl_values.len(),
            });
        }
        if self.trainable.len() != self.params.len() {
            return Err(SimError::invalid(format!(
                "{} trainable flags for {} parameters",
                self.trainable.len(),
                self.params.len()
            )));
        }
        check_wires(&self.all_wires(), n_qubits)
    }
}

/// Ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<Operation>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            ops: Vec::new(),
        }
    }

    /// Appends a validated operation.
    pub fn push(&mut self, op: Operation) -> Result<&mut Self> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(SimError::EmptyRegister);
        }
        self.ops
            .iter()
            .try_for_each(|op| op.validate(self.n_qubits))
    }

    /// Total parameter count (flattened over operations).
    pub fn n_params(&self) -> usize {
        self.ops.iter().map(|o| o.params.len()).sum()
    }

    pub fn params(&self) -> Vec<f64> {
        self.ops
            .iter()
            .flat_map(|o| o.params.iter().copied())
            .collect()
    }

    /// Overwrites the flattened parameter vector.
    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(SimError::DimensionMismatch {
                expected: self.n_params(),
                got: params.len(),
            });
        }
        let mut it = params.iter();
        for op in &mut self.ops {
            for p in &mut op.params {
                *p = *it.next().expect("length checked");
            }
        }
        Ok(())
    }

    /// Flattened indices of trainable parameters.
    pub fn trainable_params(&self) -> Vec<usize> {
        self.ops
            .iter()
            .flat_map(|o| o.trainable.iter())
            .enumerate()
            .filter_map(|(i, &t)| t.then_some(i))
            .collect()
    }

    /// `(op index, param index within op)` for each flattened parameter.
    pub fn param_locations(&self) -> Vec<(usize, usize)> {
        self.ops
            .iter()
            .enumerate()
            .flat_map(|(i, o)| (0..o.params.len()).map(move |j| (i, j)))
            .collect()
    }

    /// Applies every operation in order.
    pub fn apply_to<T: Real>(&self, sv: &mut StateVector<T>) -> Result<()> {
        if sv.n_qubits() != self.n_qubits {
            return Err(SimError::DimensionMismatch {
                expected: self.n_qubits,
                got: sv.n_qubits(),
            });
        }
        self.ops
            .iter()
            .try_for_each(|op| apply_operation(sv, op, false))
    }

    /// Runs the circuit from `|0…0⟩`.
    pub fn simulate<T: Real>(&self) -> Result<StateVector<T>> {
        let mut sv = StateVector::new_zero_state(self.n_qubits)?;
        self.apply_to(&mut sv)?;
        Ok(sv)
    }
}
