//! Workload templates: layered entangling circuits and the singles/doubles
//! chemistry ansatz.

use super::{Circuit, Operation};
use crate::error::{Result, SimError};
use crate::gates::GateKind;

/// `layers` blocks of a `Rot` on every qubit followed by a ring of CNOTs
/// from `i` to `(i + range) mod n_qubits`. `params` is the row-major
/// `[layers][n_qubits][3]` tensor; every angle is trainable.
pub fn strongly_entangling_layers(
    n_qubits: usize,
    layers: usize,
    params: &[f64],
    range: usize,
) -> Result<Circuit> {
    if n_qubits == 0 {
        return Err(SimError::EmptyRegister);
    }
    let expected = layers * n_qubits * 3;
    if params.len() != expected {
        return Err(SimError::DimensionMismatch {
            expected,
            got: params.len(),
        });
    }
    if n_qubits > 1 && range.is_multiple_of(n_qubits) {
        return Err(SimError::invalid(format!(
            "entangler range {range} maps every qubit onto itself"
        )));
    }
    let mut c = Circuit::new(n_qubits);
    for layer in params.chunks_exact(n_qubits * 3) {
        for (q, angles) in layer.chunks_exact(3).enumerate() {
            c.push(
                Operation::gate(GateKind::Rot, &[q])
                    .with_params(angles)
                    .mark_trainable(),
            )?;
        }
        if n_qubits > 1 {
            for q in 0..n_qubits {
                c.push(Operation::gate(
                    GateKind::CNOT,
                    &[q, (q + range) % n_qubits],
                ))?;
            }
        }
    }
    Ok(c)
}

/// Spin-conserving excitations out of the Hartree-Fock reference.
///
/// Even wires carry spin up, odd wires spin down. Singles are sorted by
/// `(occupied, virtual)`, doubles by `(occ, occ, virt, virt)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excitations {
    pub singles: Vec<[usize; 2]>,
    pub doubles: Vec<[usize; 4]>,
}

impl Excitations {
    pub fn len(&self) -> usize {
        self.singles.len() + self.doubles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn excitations(electrons: usize, n_qubits: usize) -> Result<Excitations> {
    if electrons > n_qubits {
        return Err(SimError::invalid(format!(
            "{electrons} electrons do not fit in {n_qubits} spin orbitals"
        )));
    }
    let spin = |w: usize| w % 2;
    let occupied = 0..electrons;
    let virtuals = electrons..n_qubits;

    let mut singles = Vec::new();
    for i in occupied.clone() {
        for a in virtuals.clone() {
            if spin(i) == spin(a) {
                singles.push([i, a]);
            }
        }
    }
    let mut doubles = Vec::new();
    for i in occupied.clone() {
        for j in i + 1..electrons {
            for a in virtuals.clone() {
                for b in a + 1..n_qubits {
                    if spin(i) + spin(j) == spin(a) + spin(b) {
                        doubles.push([i, j, a, b]);
                    }
                }
            }
        }
    }
    Ok(Excitations { singles, doubles })
}

/// Hartree-Fock preparation followed by one trainable `SingleExcitation` per
/// single and one `DoubleExcitation` per double, in [`excitations`] order.
pub fn singles_doubles_ansatz(
    n_qubits: usize,
    electrons: usize,
    params: &[f64],
) -> Result<Circuit> {
    if n_qubits == 0 {
        return Err(SimError::EmptyRegister);
    }
    let ex = excitations(electrons, n_qubits)?;
    if params.len() != ex.len() {
        return Err(SimError::DimensionMismatch {
            expected: ex.len(),
            got: params.len(),
        });
    }
    let mut c = Circuit::new(n_qubits);
    for w in 0..electrons {
        c.push(Operation::gate(GateKind::X, &[w]))?;
    }
    let mut theta = params.iter();
    for s in &ex.singles {
        let p = *theta.next().expect("length checked");
        c.push(
            Operation::gate(GateKind::SingleExcitation, s)
                .with_params(&[p])
                .mark_trainable(),
        )?;
    }
    for d in &ex.doubles {
        let p = *theta.next().expect("length checked");
        c.push(
            Operation::gate(GateKind::DoubleExcitation, d)
                .with_params(&[p])
                .mark_trainable(),
        )?;
    }
    Ok(c)
}
