//! State-vector quantum circuit simulation.
//!
//! Qubit 0 is the most significant bit of an amplitude index. Gates are
//! applied in place by bit-masked pair loops ([`statevector`]), optionally
//! through wide-register kernels ([`simd`]). Gradients come from the adjoint
//! method ([`adjoint`]) and the state can be split across in-process shards
//! ([`sharded`]).
//!
//! ```
//! use svsim::adjoint::{adjoint_jacobian, JacobianRequest};
//! use svsim::{parse_circuit, Observable, Pauli, StateVector};
//!
//! let circuit = parse_circuit("qubits 2\nRX(0.3) 0 train\nCNOT 0 1\n")?;
//! let req = JacobianRequest::new(circuit, vec![Observable::pauli(1, Pauli::Z)]);
//! let jac = adjoint_jacobian(&req, &StateVector::new_zero_state(2)?)?;
//! // ⟨Z₁⟩ = cos θ
//! assert!((jac.get(0, 0) + 0.3f64.sin()).abs() < 1e-12);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod adjoint;
pub mod aligned;
pub mod circuit;
pub mod error;
pub mod gates;
pub mod matrix;
pub mod measurements;
mod parallel;
pub mod precision;
pub mod sharded;
pub mod simd;
pub mod statevector;
pub mod vqe;

pub use adjoint::{
    adjoint_jacobian, batched_expval_and_grad, parameter_shift_jacobian, BatchPlan, Jacobian,
    JacobianRequest,
};
pub use circuit::{parse_circuit, parse_hamiltonian, Circuit, HamiltonianSpec, Operation};
pub use error::{Result, SimError};
pub use gates::GateKind;
pub use matrix::Matrix;
pub use measurements::{Hamiltonian, Observable, Pauli, PauliWord, SampleSet};
pub use num_complex::{Complex, Complex32, Complex64};
pub use precision::Real;
pub use sharded::ShardedState;
pub use simd::{detect_tier, InteractionClass, KernelTier};
pub use statevector::StateVector;
