use num_complex::Complex;

use super::{interaction_of, matrix_of, GateKind, Interaction};
use crate::circuit::Operation;
use crate::error::{Result, SimError};
use crate::matrix::Matrix;
use crate::precision::Real;
use crate::statevector::{
    apply_controlled_matrix, apply_controlled_single_qubit, qubits_of, StateVector,
};

/// Applies `op` (or its adjoint) to a state vector with the scalar kernels.
pub fn apply_operation<T: Real>(
    sv: &mut StateVector<T>,
    op: &Operation,
    inverse: bool,
) -> Result<()> {
    let threads = sv.threads();
    apply_operation_to_slice(sv.amplitudes_mut(), op, inverse, threads)
}

/// Slice-level form of [`apply_operation`]; the slice length fixes the register size.
pub fn apply_operation_to_slice<T: Real>(
    amps: &mut [Complex<T>],
    op: &Operation,
    inverse: bool,
    threads: usize,
) -> Result<()> {
    op.validate(qubits_of(amps.len()))?;
    let ctrl_values = Some(op.ctrl_values.as_slice());
    match op.kind {
        k if k.is_single_qubit() => {
            let mut f: Interaction<T> = interaction_of(k, &op.params)?;
            if inverse {
                f = f.adjoint();
            }
            apply_controlled_single_qubit(amps, &op.ctrls, ctrl_values, op.wires[0], &f, threads)
        }
        GateKind::CNOT | GateKind::CZ => {
            let f: Interaction<T> = if op.kind == GateKind::CNOT {
                Interaction::PauliX
            } else {
                Interaction::PauliZ
            };
            let mut ctrls = op.ctrls.clone();
            ctrls.push(op.wires[0]);
            let mut values = op.ctrl_values.clone();
            values.push(true);
            apply_controlled_single_qubit(amps, &ctrls, Some(&values), op.wires[1], &f, threads)
        }
        GateKind::Matrix | GateKind::ControlledMatrix => {
            let m = op.matrix.as_ref().ok_or_else(|| {
                SimError::invalid(format!("{} operation without a matrix", op.kind))
            })?;
            let m = if inverse { m.adjoint() } else { m.clone() };
            apply_controlled_matrix(
                amps,
                &op.ctrls,
                ctrl_values,
                &op.wires,
                &m.cast::<T>(),
                threads,
            )
        }
        k => {
            let m = matrix_of(k, &op.params)?;
            let m: Matrix<T> = if inverse { m.adjoint() } else { m }.cast();
            apply_controlled_matrix(amps, &op.ctrls, ctrl_values, &op.wires, &m, threads)
        }
    }
}
