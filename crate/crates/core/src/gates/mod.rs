//! The named gate set: pair interactions, dense matrices and generators.
//!
//! Rotations follow the `exp(-iθ/2·P)` convention, `T = diag(1, e^{iπ/4})`,
//! and `Rot(φ, θ, ω) = RZ(φ)·RY(θ)·RZ(ω)` as a matrix product.

mod apply;
mod interaction;
mod kind;

pub use apply::{apply_operation, apply_operation_to_slice};
pub use interaction::{interaction_of, Interaction};
pub use kind::GateKind;

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::matrix::Matrix;
use crate::measurements::{Hamiltonian, Observable, Pauli, PauliWord};

pub(crate) fn check_arity(kind: GateKind, params: &[f64]) -> Result<()> {
    if params.len() != kind.n_params() {
        return Err(SimError::Arity {
            gate: kind.name(),
            expected: kind.n_params(),
            got: params.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_arity_op(op: &crate::circuit::Operation) -> Result<()> {
    check_arity(op.kind, &op.params)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Matrix {
    Matrix::from_row_major(vec![a, b, cc, d]).expect("2x2")
}

fn rz(theta: f64) -> Matrix {
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    Matrix::diagonal(&[c(cs, -sn), c(cs, sn)])
}

fn ry(theta: f64) -> Matrix {
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    m2(c(cs, 0.), c(-sn, 0.), c(sn, 0.), c(cs, 0.))
}

/// Unitary matrix of a named gate. Multi-wire matrices index the first wire
/// as the most significant bit.
pub fn matrix_of(kind: GateKind, params: &[f64]) -> Result<Matrix> {
    if kind.is_matrix() {
        return Err(SimError::UnsupportedGate {
            gate: kind.name(),
            context: "named matrices (the matrix travels with the operation)",
        });
    }
    check_arity(kind, params)?;
    let (z, one, i) = (c(0., 0.), c(1., 0.), c(0., 1.));
    let half = |x: f64| ((x / 2.0).cos(), (x / 2.0).sin());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match kind {
        GateKind::I => Matrix::identity(2),
        GateKind::X => m2(z, one, one, z),
        GateKind::Y => m2(z, -i, i, z),
        GateKind::Z => Matrix::diagonal(&[one, -one]),
        GateKind::H => m2(c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)),
        GateKind::S => Matrix::diagonal(&[one, i]),
        GateKind::T => {
            Matrix::diagonal(&[one, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
        }
        GateKind::Phase => Matrix::diagonal(&[one, Complex64::from_polar(1.0, params[0])]),
        GateKind::RX => {
            let (cs, sn) = half(params[0]);
            m2(c(cs, 0.), c(0., -sn), c(0., -sn), c(cs, 0.))
        }
        GateKind::RY => ry(params[0]),
        GateKind::RZ => rz(params[0]),
        GateKind::Rot => rz(params[0]).matmul(&ry(params[1])).matmul(&rz(params[2])),
        GateKind::CNOT => {
            let mut m = Matrix::identity(4);
            m[(2, 2)] = z;
            m[(3, 3)] = z;
            m[(2, 3)] = one;
            m[(3, 2)] = one;
            m
        }
        GateKind::CZ => Matrix::diagonal(&[one, one, one, -one]),
        GateKind::SWAP => {
            let mut m = Matrix::zeros(4);
            m[(0, 0)] = one;
            m[(1, 2)] = one;
            m[(2, 1)] = one;
            m[(3, 3)] = one;
            m
        }
        GateKind::IsingXX => {
            let (cs, sn) = half(params[0]);
            let mut m = Matrix::diagonal(&[c(cs, 0.); 4]);
            for r in 0..4 {
                m[(r, 3 - r)] = c(0., -sn);
            }
            m
        }
        GateKind::IsingYY => {
            let (cs, sn) = half(params[0]);
            let mut m = Matrix::diagonal(&[c(cs, 0.); 4]);
            m[(0, 3)] = c(0., sn);
            m[(3, 0)] = c(0., sn);
            m[(1, 2)] = c(0., -sn);
            m[(2, 1)] = c(0., -sn);
            m
        }
        GateKind::IsingZZ => {
            let (cs, sn) = half(params[0]);
            let (e_minus, e_plus) = (c(cs, -sn), c(cs, sn));
            Matrix::diagonal(&[e_minus, e_plus, e_plus, e_minus])
        }
        GateKind::IsingXY => {
            let (cs, sn) = half(params[0]);
            let mut m = Matrix::diagonal(&[one, c(cs, 0.), c(cs, 0.), one]);
            m[(1, 2)] = c(0., sn);
            m[(2, 1)] = c(0., sn);
            m
        }
        GateKind::SingleExcitation => {
            let (cs, sn) = half(params[0]);
            let mut m = Matrix::diagonal(&[one, c(cs, 0.), c(cs, 0.), one]);
            m[(1, 2)] = c(-sn, 0.);
            m[(2, 1)] = c(sn, 0.);
            m
        }
        GateKind::DoubleExcitation => {
            let (cs, sn) = half(params[0]);
            let mut m = Matrix::identity(16);
            m[(3, 3)] = c(cs, 0.);
            m[(12, 12)] = c(cs, 0.);
            m[(3, 12)] = c(-sn, 0.);
            m[(12, 3)] = c(sn, 0.);
            m
        }
        GateKind::ControlledMatrix | GateKind::Matrix => unreachable!("rejected above"),
    })
}

/// Hermitian `G` and scalar `prefactor` with `gate(θ) = exp(i·prefactor·θ·G)`.
/// The observable acts on local wires `0..arity` of the gate.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub observable: Observable,
    pub prefactor: f64,
}

fn pauli_word(paulis: &[Pauli]) -> PauliWord {
    PauliWord::new(paulis.iter().copied().enumerate().collect()).expect("distinct wires")
}

pub fn generator_of(kind: GateKind) -> Result<Generator> {
    use Pauli::{X, Y, Z};
    let pw = |p: &[Pauli], prefactor: f64| Generator {
        observable: Observable::PauliWord(pauli_word(p)),
        prefactor,
    };
    Ok(match kind {
        GateKind::RX => pw(&[X], -0.5),
        GateKind::RY => pw(&[Y], -0.5),
        GateKind::RZ => pw(&[Z], -0.5),
        GateKind::IsingXX => pw(&[X, X], -0.5),
        GateKind::IsingYY => pw(&[Y, Y], -0.5),
        GateKind::IsingZZ => pw(&[Z, Z], -0.5),
        GateKind::Phase => Generator {
            observable: Observable::dense(vec![0], Matrix::diagonal(&[c(0., 0.), c(1., 0.)]))?,
            prefactor: 1.0,
        },
        GateKind::IsingXY => Generator {
            observable: Observable::Hamiltonian(Hamiltonian::new(
                vec![1.0, 1.0],
                vec![pauli_word(&[X, X]), pauli_word(&[Y, Y])],
            )?),
            prefactor: 0.25,
        },
        // σ_y on span{|01⟩, |10⟩} = (Y⊗X − X⊗Y)/2
        GateKind::SingleExcitation => Generator {
            observable: Observable::Hamiltonian(Hamiltonian::new(
                vec![0.5, -0.5],
                vec![pauli_word(&[Y, X]), pauli_word(&[X, Y])],
            )?),
            prefactor: -0.5,
        },
        // σ_y on span{|0011⟩, |1100⟩}
        GateKind::DoubleExcitation => {
            let mut g = Matrix::zeros(16);
            g[(3, 12)] = c(0., -1.);
            g[(12, 3)] = c(0., 1.);
            Generator {
                observable: Observable::dense(vec![0, 1, 2, 3], g)?,
                prefactor: -0.5,
            }
        }
        _ => {
            return Err(SimError::UnsupportedGate {
                gate: kind.name(),
                context: "single-parameter generators",
            })
        }
    })
}
