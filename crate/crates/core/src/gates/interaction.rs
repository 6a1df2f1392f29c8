//! Coefficient interaction functions for single-qubit gates.

use num_complex::Complex;

use super::GateKind;
use crate::error::{Result, SimError};
use crate::matrix::Matrix;
use crate::precision::Real;
use crate::statevector::CoefficientInteraction;

/// Closed-form pair updates for the single-qubit gate set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interaction<T> {
    Identity,
    PauliX,
    PauliY,
    PauliZ,
    Hadamard,
    /// Multiplies the `|1⟩` amplitude (S, T, Phase).
    Phase(Complex<T>),
    /// `[[c, -i s], [-i s, c]]`.
    RX {
        c: T,
        s: T,
    },
    /// `[[c, -s], [s, c]]`.
    RY {
        c: T,
        s: T,
    },
    Diagonal(Complex<T>, Complex<T>),
    General([Complex<T>; 4]),
}

fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

/// The pair update for a single-qubit gate.
pub fn interaction_of<T: Real>(kind: GateKind, params: &[f64]) -> Result<Interaction<T>> {
    if !kind.is_single_qubit() {
        return Err(SimError::UnsupportedGate {
            gate: kind.name(),
            context: "single-qubit coefficient interactions",
        });
    }
    super::check_arity(kind, params)?;
    let half = |x: f64| ((x / 2.0).cos(), (x / 2.0).sin());
    Ok(match kind {
        GateKind::I => Interaction::Identity,
        GateKind::X => Interaction::PauliX,
        GateKind::Y => Interaction::PauliY,
        GateKind::Z => Interaction::PauliZ,
        GateKind::H => Interaction::Hadamard,
        GateKind::S => Interaction::Phase(cx(0.0, 1.0)),
        GateKind::T => Interaction::Phase(Complex::from_polar(T::one(), T::FRAC_PI_4())),
        GateKind::Phase => Interaction::Phase(cx(params[0].cos(), params[0].sin())),
        GateKind::RX => {
            let (c, s) = half(params[0]);
            Interaction::RX {
                c: T::from_f64(c),
                s: T::from_f64(s),
            }
        }
        GateKind::RY => {
            let (c, s) = half(params[0]);
            Interaction::RY {
                c: T::from_f64(c),
                s: T::from_f64(s),
            }
        }
        GateKind::RZ => {
            let (c, s) = half(params[0]);
            Interaction::Diagonal(cx(c, -s), cx(c, s))
        }
        GateKind::Rot => {
            let m = super::matrix_of(kind, params)?;
            Interaction::General(
                [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]].map(|z| cx(z.re, z.im)),
            )
        }
        _ => unreachable!("filtered by is_single_qubit"),
    })
}

impl<T: Real> Interaction<T> {
    /// Wraps an arbitrary 2×2 matrix.
    pub fn from_matrix(m: &Matrix<T>) -> Self {
        assert_eq!(m.dim(), 2, "interaction needs a 2x2 matrix");
        Interaction::General([m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
    }

    /// The conjugate-transpose update.
    pub fn adjoint(self) -> Self {
        match self {
            Interaction::Phase(p) => Interaction::Phase(p.conj()),
            Interaction::RX { c, s } => Interaction::RX { c, s: -s },
            Interaction::RY { c, s } => Interaction::RY { c, s: -s },
            Interaction::Diagonal(a, b) => Interaction::Diagonal(a.conj(), b.conj()),
            Interaction::General([a, b, c, d]) => {
                Interaction::General([a.conj(), c.conj(), b.conj(), d.conj()])
            }
            other => other,
        }
    }

    /// Row-major 2×2 matrix of the update.
    pub fn to_array(self) -> [Complex<T>; 4] {
        let z = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        match self {
            Interaction::Identity => [one, z, z, one],
            Interaction::PauliX => [z, one, one, z],
            Interaction::PauliY => [z, -i, i, z],
            Interaction::PauliZ => [one, z, z, -one],
            Interaction::Hadamard => {
                let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
                [h, h, h, -h]
            }
            Interaction::Phase(p) => [one, z, z, p],
            Interaction::RX { c, s } => {
                let c = Complex::new(c, T::zero());
                let mis = Complex::new(T::zero(), -s);
                [c, mis, mis, c]
            }
            Interaction::RY { c, s } => {
                let (c, s) = (Complex::new(c, T::zero()), Complex::new(s, T::zero()));
                [c, -s, s, c]
            }
            Interaction::Diagonal(a, b) => [a, z, z, b],
            Interaction::General(m) => m,
        }
    }

    pub fn to_matrix(self) -> Matrix<T> {
        Matrix::from_row_major(self.to_array().to_vec()).expect("2x2")
    }
}

impl<T: Real> CoefficientInteraction<T> for Interaction<T> {
    #[inline(always)]
    fn update(&self, a0: &mut Complex<T>, a1: &mut Complex<T>) {
        match *self {
            Interaction::Identity => {}
            Interaction::PauliX => std::mem::swap(a0, a1),
            Interaction::PauliY => {
                let (v0, v1) = (*a0, *a1);
                *a0 = Complex::new(v1.im, -v1.re);
                *a1 = Complex::new(-v0.im, v0.re);
            }
            Interaction::PauliZ => *a1 = -*a1,
            Interaction::Hadamard => {
                let h = T::FRAC_1_SQRT_2();
                let (v0, v1) = (*a0, *a1);
                *a0 = (v0 + v1) * h;
                *a1 = (v0 - v1) * h;
            }
            Interaction::Phase(p) => *a1 = *a1 * p,
            Interaction::RX { c, s } => {
                let (v0, v1) = (*a0, *a1);
                // -i s v = (s v.im, -s v.re)
                *a0 = Complex::new(c * v0.re + s * v1.im, c * v0.im - s * v1.re);
                *a1 = Complex::new(c * v1.re + s * v0.im, c * v1.im - s * v0.re);
            }
            Interaction::RY { c, s } => {
                let (v0, v1) = (*a0, *a1);
                *a0 = v0 * c - v1 * s;
                *a1 = v0 * s + v1 * c;
            }
            Interaction::Diagonal(d0, d1) => {
                *a0 = *a0 * d0;
                *a1 = *a1 * d1;
            }
            Interaction::General([m00, m01, m10, m11]) => {
                let (v0, v1) = (*a0, *a1);
                *a0 = m00 * v0 + m01 * v1;
                *a1 = m10 * v0 + m11 * v1;
            }
        }
    }
}
