//! Dense reference implementations written from textbook definitions, with
//! no code shared with the library's kernels.

use nalgebra::{DMatrix, DVector};
use svsim::Complex64 as C;
use svsim::{GateKind, Pauli};

pub type Dense = DMatrix<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn from_rows(rows: &[&[C]]) -> Dense {
    let n = rows.len();
    DMatrix::from_fn(n, n, |r, col| rows[r][col])
}

pub fn identity(dim: usize) -> Dense {
    DMatrix::identity(dim, dim)
}

pub fn pauli(p: Pauli) -> Dense {
    let (o, z) = (c(1., 0.), c(0., 0.));
    match p {
        Pauli::X => from_rows(&[&[z, o], &[o, z]]),
        Pauli::Y => from_rows(&[&[z, c(0., -1.)], &[c(0., 1.), z]]),
        Pauli::Z => from_rows(&[&[o, z], &[z, -o]]),
    }
}

/// `A ⊗ B`, left factor on the more significant bits.
pub fn kron(a: &Dense, b: &Dense) -> Dense {
    a.kronecker(b)
}

pub fn kron_all(factors: &[Dense]) -> Dense {
    factors.iter().fold(identity(1), |acc, f| kron(&acc, f))
}

/// `cos(θ/2)·I − i·sin(θ/2)·P` for an involutory `P`.
fn pauli_rotation(p: &Dense, theta: f64) -> Dense {
    let dim = p.nrows();
    identity(dim) * c((theta / 2.).cos(), 0.) - p * c(0., (theta / 2.).sin())
}

/// Givens rotation by `θ/2` between basis states `a` and `b` of a `dim`-dimensional space.
fn givens(dim: usize, a: usize, b: usize, theta: f64) -> Dense {
    let (cs, sn) = ((theta / 2.).cos(), (theta / 2.).sin());
    let mut m = identity(dim);
    m[(a, a)] = c(cs, 0.);
    m[(b, b)] = c(cs, 0.);
    m[(a, b)] = c(-sn, 0.);
    m[(b, a)] = c(sn, 0.);
    m
}

pub fn gate_matrix(kind: GateKind, p: &[f64]) -> Dense {
    use GateKind::*;
    let (o, z) = (c(1., 0.), c(0., 0.));
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let px = pauli(Pauli::X);
    let py = pauli(Pauli::Y);
    let pz = pauli(Pauli::Z);
    match kind {
        I => identity(2),
        X => px,
        Y => py,
        Z => pz,
        H => from_rows(&[&[c(s2, 0.), c(s2, 0.)], &[c(s2, 0.), c(-s2, 0.)]]),
        S => from_rows(&[&[o, z], &[z, c(0., 1.)]]),
        T => from_rows(&[
            &[o, z],
            &[z, C::from_polar(1., std::f64::consts::FRAC_PI_4)],
        ]),
        Phase => from_rows(&[&[o, z], &[z, C::from_polar(1., p[0])]]),
        RX => pauli_rotation(&px, p[0]),
        RY => pauli_rotation(&py, p[0]),
        RZ => pauli_rotation(&pz, p[0]),
        Rot => pauli_rotation(&pz, p[0]) * pauli_rotation(&py, p[1]) * pauli_rotation(&pz, p[2]),
        CNOT => {
            let mut m = identity(4);
            m.swap_rows(2, 3);
            m
        }
        CZ => {
            let mut m = identity(4);
            m[(3, 3)] = -o;
            m
        }
        SWAP => {
            let mut m = identity(4);
            m.swap_rows(1, 2);
            m
        }
        IsingXX => pauli_rotation(&kron(&px, &px), p[0]),
        IsingYY => pauli_rotation(&kron(&py, &py), p[0]),
        IsingZZ => pauli_rotation(&kron(&pz, &pz), p[0]),
        IsingXY => {
            let (cs, sn) = ((p[0] / 2.).cos(), (p[0] / 2.).sin());
            let mut m = identity(4);
            m[(1, 1)] = c(cs, 0.);
            m[(2, 2)] = c(cs, 0.);
            m[(1, 2)] = c(0., sn);
            m[(2, 1)] = c(0., sn);
            m
        }
        SingleExcitation => givens(4, 1, 2, p[0]),
        DoubleExcitation => givens(16, 3, 12, p[0]),
        Matrix | ControlledMatrix => panic!("matrix gates carry their own matrix"),
    }
}

/// `Σ_{b ≠ v} |b⟩⟨b| ⊗ I + |v⟩⟨v| ⊗ M` for controls holding `values`.
pub fn controlled(m: &Dense, values: &[bool]) -> Dense {
    let nc = values.len();
    let want = values
        .iter()
        .fold(0usize, |acc, &v| (acc << 1) | usize::from(v));
    let dim = m.nrows();
    let mut out = Dense::zeros(dim << nc, dim << nc);
    for b in 0..1usize << nc {
        let mut proj = Dense::zeros(1 << nc, 1 << nc);
        proj[(b, b)] = c(1., 0.);
        let block = if b == want { m.clone() } else { identity(dim) };
        out += kron(&proj, &block);
    }
    out
}

/// Nonzeros of a dense matrix, row by row.
#[derive(Debug, Clone)]
pub struct Rows(pub Vec<Vec<(usize, C)>>);

impl Rows {
    pub fn from_dense(m: &Dense) -> Self {
        Rows(
            (0..m.nrows())
                .map(|r| {
                    (0..m.ncols())
                        .filter(|&col| m[(r, col)] != c(0., 0.))
                        .map(|col| (col, m[(r, col)]))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn apply(&self, x: &[C]) -> Vec<C> {
        self.0
            .iter()
            .map(|row| row.iter().map(|&(col, v)| v * x[col]).sum())
            .collect()
    }
}

/// `M ⊗ I` on an `n`-qubit register: `M` acts on the leading qubits.
pub fn embed_leading(m: &Dense, n: usize) -> Dense {
    let k = m.nrows().trailing_zeros() as usize;
    kron(m, &identity(1 << (n - k)))
}

/// Applies an operator that acts on the leading `order.len()` qubits of a
/// canonical register to the real register, where canonical qubit `j` is
/// real wire `order[j]`. `op` is the operator on all `n` canonical qubits.
pub fn apply_on_wires(op: &Rows, n: usize, order: &[usize], x: &[C]) -> Vec<C> {
    let mut full_order = order.to_vec();
    full_order.extend((0..n).filter(|w| !order.contains(w)));
    let canon = |i: usize| -> usize {
        full_order.iter().enumerate().fold(0, |acc, (j, &w)| {
            acc | (((i >> (n - 1 - w)) & 1) << (n - 1 - j))
        })
    };
    let mut y = vec![c(0., 0.); x.len()];
    for (i, &a) in x.iter().enumerate() {
        y[canon(i)] = a;
    }
    let z = op.apply(&y);
    (0..x.len()).map(|i| z[canon(i)]).collect()
}

/// Full `2^n × 2^n` matrix of a Pauli word.
pub fn pauli_word_matrix(factors: &[(usize, Pauli)], n: usize) -> Dense {
    let ops: Vec<Dense> = (0..n)
        .map(|w| {
            factors
                .iter()
                .find(|&&(fw, _)| fw == w)
                .map_or_else(|| identity(2), |&(_, p)| pauli(p))
        })
        .collect();
    kron_all(&ops)
}

/// Full matrix of a weighted sum of Pauli words.
pub fn hamiltonian_matrix(coeffs: &[f64], words: &[Vec<(usize, Pauli)>], n: usize) -> Dense {
    coeffs
        .iter()
        .zip(words)
        .fold(Dense::zeros(1 << n, 1 << n), |acc, (&k, w)| {
            acc + pauli_word_matrix(w, n) * c(k, 0.)
        })
}

/// Lowest eigenvalue of a Hermitian matrix.
pub fn ground_energy(h: &Dense) -> f64 {
    h.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `⟨x|M|x⟩`, real part.
pub fn expectation(m: &Dense, x: &[C]) -> f64 {
    let v = DVector::from_column_slice(x);
    (v.adjoint() * m * &v)[(0, 0)].re
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
