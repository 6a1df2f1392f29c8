use std::fmt;

use num_complex::{Complex, Complex64};

use crate::error::{check_wires, Result, SimError};
use crate::gates::Interaction;
use crate::matrix::Matrix;
use crate::precision::Real;
use crate::statevector::{apply_matrix, apply_single_qubit, offset_of, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn interaction<T: Real>(self) -> Interaction<T> {
        match self {
            Pauli::X => Interaction::PauliX,
            Pauli::Y => Interaction::PauliY,
            Pauli::Z => Interaction::PauliZ,
        }
    }
}

/// Tensor product of Paulis on distinct wires. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliWord {
    factors: Vec<(usize, Pauli)>,
}

impl PauliWord {
    pub fn new(factors: Vec<(usize, Pauli)>) -> Result<Self> {
        for (i, &(w, _)) in factors.iter().enumerate() {
            if factors[..i].iter().any(|&(v, _)| v == w) {
                return Err(SimError::DuplicateWire(w));
            }
        }
        Ok(PauliWord { factors })
    }

    pub fn identity() -> Self {
        PauliWord::default()
    }

    pub fn single(wire: usize, p: Pauli) -> Self {
        PauliWord {
            factors: vec![(wire, p)],
        }
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn wires(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.iter().map(|&(w, _)| w)
    }

    /// `(flip_mask, sign_mask, n_y)`: `P|j⟩ = i^{n_y} (−1)^{|j & sign_mask|} |j ^ flip_mask⟩`.
    pub fn index_masks(&self, n_qubits: usize) -> (usize, usize, u32) {
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut n_y = 0;
        for &(w, p) in &self.factors {
            let bit = 1usize << offset_of(w, n_qubits);
            match p {
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    n_y += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        (flip, sign, n_y)
    }

    fn remap(&self, wires: &[usize]) -> PauliWord {
        PauliWord {
            factors: self.factors.iter().map(|&(w, p)| (wires[w], p)).collect(),
        }
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, &(w, p)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", p.as_char(), w)?;
        }
        f.write_str("]")
    }
}

/// `Σ coeffs[i] · terms[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    coeffs: Vec<f64>,
    terms: Vec<PauliWord>,
}

impl Hamiltonian {
    pub fn new(coeffs: Vec<f64>, terms: Vec<PauliWord>) -> Result<Self> {
        if coeffs.len() != terms.len() {
            return Err(SimError::InvalidObservable(format!(
                "{} coefficients for {} terms",
                coeffs.len(),
                terms.len()
            )));
        }
        Ok(Hamiltonian { coeffs, terms })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn terms(&self) -> &[PauliWord] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Compressed-sparse-row complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptrs: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn new(
        dim: usize,
        row_ptrs: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(SimError::InvalidObservable(format!("malformed CSR: {msg}")));
        if row_ptrs.len() != dim + 1 {
            return bad(format!("{} row pointers for {dim} rows", row_ptrs.len()));
        }
        if row_ptrs[0] != 0 || row_ptrs.windows(2).any(|w| w[0] > w[1]) {
            return bad("row pointers must start at 0 and be nondecreasing".into());
        }
        if row_ptrs[dim] != col_idx.len() || col_idx.len() != values.len() {
            return bad(format!(
                "{} nonzeros declared, {} columns, {} values",
                row_ptrs[dim],
                col_idx.len(),
                values.len()
            ));
        }
        if let Some(&c) = col_idx.iter().find(|&&c| c >= dim) {
            return bad(format!("column {c} out of range"));
        }
        Ok(CsrMatrix {
            dim,
            row_ptrs,
            col_idx,
            values,
        })
    }

    /// Builds CSR from a dense matrix, dropping exact zeros.
    pub fn from_dense(m: &Matrix) -> Self {
        let dim = m.dim();
        let mut row_ptrs = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                let v = m[(r, c)];
                if v.re != 0.0 || v.im != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptrs.push(col_idx.len());
        }
        CsrMatrix {
            dim,
            row_ptrs,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptrs(&self) -> &[usize] {
        &self.row_ptrs
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `(col, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptrs[r]..self.row_ptrs[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// `y = A x` for rows `rows`, written to `out` (len == rows.len()).
    pub fn matvec_rows<T: Real>(
        &self,
        x: &[Complex<T>],
        rows: std::ops::Range<usize>,
        out: &mut [Complex<T>],
    ) {
        for (o, r) in out.iter_mut().zip(rows) {
            let acc = self.row(r).fold(Complex64::new(0.0, 0.0), |acc, (c, v)| {
                acc + v * Complex64::new(x[c].re.to_f64(), x[c].im.to_f64())
            });
            *o = Complex::new(T::from_f64(acc.re), T::from_f64(acc.im));
        }
    }
}

/// A constant Hermitian measurement operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    PauliWord(PauliWord),
    Hamiltonian(Hamiltonian),
    DenseHermitian { wires: Vec<usize>, matrix: Matrix },
    SparseHermitian(CsrMatrix),
}

impl Observable {
    pub fn pauli(wire: usize, p: Pauli) -> Self {
        Observable::PauliWord(PauliWord::single(wire, p))
    }

    pub fn dense(wires: Vec<usize>, matrix: Matrix) -> Result<Self> {
        if matrix.dim() != 1 << wires.len() {
            return Err(SimError::DimensionMismatch {
                expected: 1 << wires.len(),
                got: matrix.dim(),
            });
        }
        Ok(Observable::DenseHermitian { wires, matrix })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Observable::PauliWord(_) => "PauliWord",
            Observable::Hamiltonian(_) => "Hamiltonian",
            Observable::DenseHermitian { .. } => "DenseHermitian",
            Observable::SparseHermitian(_) => "SparseHermitian",
        }
    }

    /// Largest wire referenced, if any.
    pub fn max_wire(&self) -> Option<usize> {
        match self {
            Observable::PauliWord(p) => p.wires().max(),
            Observable::Hamiltonian(h) => h.terms.iter().filter_map(|t| t.wires().max()).max(),
            Observable::DenseHermitian { wires, .. } => wires.iter().copied().max(),
            Observable::SparseHermitian(m) => m
                .dim
                .checked_ilog2()
                .map(|b| b as usize)
                .and_then(|n| n.checked_sub(1)),
        }
    }

    /// Checks wire ranges and structural consistency against a register size.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        match self {
            Observable::PauliWord(p) => check_wires(&p.wires().collect::<Vec<_>>(), n_qubits),
            Observable::Hamiltonian(h) => h
                .terms
                .iter()
                .try_for_each(|t| check_wires(&t.wires().collect::<Vec<_>>(), n_qubits)),
            Observable::DenseHermitian { wires, matrix } => {
                check_wires(wires, n_qubits)?;
                if matrix.dim() != 1 << wires.len() {
                    return Err(SimError::DimensionMismatch {
                        expected: 1 << wires.len(),
                        got: matrix.dim(),
                    });
                }
                Ok(())
            }
            Observable::SparseHermitian(m) => {
                if m.dim != 1usize << n_qubits {
                    return Err(SimError::DimensionMismatch {
                        expected: 1 << n_qubits,
                        got: m.dim,
                    });
                }
                Ok(())
            }
        }
    }

    /// Relabels local wire `w` as `wires[w]`.
    pub fn remap(&self, wires: &[usize]) -> Observable {
        match self {
            Observable::PauliWord(p) => Observable::PauliWord(p.remap(wires)),
            Observable::Hamiltonian(h) => Observable::Hamiltonian(Hamiltonian {
                coeffs: h.coeffs.clone(),
                terms: h.terms.iter().map(|t| t.remap(wires)).collect(),
            }),
            Observable::DenseHermitian { wires: w, matrix } => Observable::DenseHermitian {
                wires: w.iter().map(|&x| wires[x]).collect(),
                matrix: matrix.clone(),
            },
            Observable::SparseHermitian(_) => self.clone(),
        }
    }

    /// Dense `2^n × 2^n` matrix over `n_qubits` wires.
    pub fn to_matrix(&self, n_qubits: usize) -> Result<Matrix> {
        self.validate(n_qubits)?;
        let dim = 1usize << n_qubits;
        match self {
            Observable::PauliWord(p) => Ok(pauli_matrix(p, n_qubits)),
            Observable::Hamiltonian(h) => Ok(h
                .coeffs
                .iter()
                .zip(&h.terms)
                .fold(Matrix::zeros(dim), |acc, (&c, t)| {
                    acc.add(&pauli_matrix(t, n_qubits).scale(Complex64::new(c, 0.0)))
                })),
            Observable::DenseHermitian { .. } => {
                let mut m = Matrix::zeros(dim);
                for j in 0..dim {
                    let mut col = StateVector::<f64>::basis_state(n_qubits, j)?;
                    self.apply_to(&mut col)?;
                    for (i, a) in col.amplitudes().iter().enumerate() {
                        m[(i, j)] = *a;
                    }
                }
                Ok(m)
            }
            Observable::SparseHermitian(s) => Ok(s.to_dense()),
        }
    }

    /// Dense matrix on the smallest register that holds every referenced wire.
    pub fn to_dense_local(&self) -> Result<Matrix> {
        self.to_matrix(self.max_wire().map_or(1, |w| w + 1))
    }

    pub fn is_hermitian(&self, n_qubits: usize, tol: f64) -> Result<bool> {
        Ok(match self {
            Observable::PauliWord(_) | Observable::Hamiltonian(_) => true,
            Observable::DenseHermitian { matrix, .. } => matrix.is_hermitian(tol),
            Observable::SparseHermitian(_) => self.to_matrix(n_qubits)?.is_hermitian(tol),
        })
    }

    /// Replaces `|ψ⟩` with `O|ψ⟩` (not normalized).
    pub fn apply_to<T: Real>(&self, sv: &mut StateVector<T>) -> Result<()> {
        self.validate(sv.n_qubits())?;
        let threads = sv.threads();
        match self {
            Observable::PauliWord(p) => apply_pauli_word(sv.amplitudes_mut(), p, threads),
            Observable::Hamiltonian(h) => {
                let src = sv.clone();
                let zero = Complex::new(T::zero(), T::zero());
                sv.amplitudes_mut().fill(zero);
                let mut tmp = src.clone();
                for (&c, term) in h.coeffs.iter().zip(&h.terms) {
                    tmp.copy_from(&src);
                    apply_pauli_word(tmp.amplitudes_mut(), term, threads)?;
                    let c = T::from_f64(c);
                    for (acc, t) in sv.amplitudes_mut().iter_mut().zip(tmp.amplitudes()) {
                        *acc = *acc + *t * c;
                    }
                }
                Ok(())
            }
            Observable::DenseHermitian { wires, matrix } => {
                apply_matrix(sv.amplitudes_mut(), wires, &matrix.cast::<T>(), threads)
            }
            Observable::SparseHermitian(m) => {
                let src = sv.amplitudes().to_vec();
                m.matvec_rows(&src, 0..m.dim, sv.amplitudes_mut());
                Ok(())
            }
        }
    }
}

impl From<PauliWord> for Observable {
    fn from(p: PauliWord) -> Self {
        Observable::PauliWord(p)
    }
}

impl From<Hamiltonian> for Observable {
    fn from(h: Hamiltonian) -> Self {
        Observable::Hamiltonian(h)
    }
}

pub(crate) fn apply_pauli_word<T: Real>(
    amps: &mut [Complex<T>],
    p: &PauliWord,
    threads: usize,
) -> Result<()> {
    for &(w, pauli) in &p.factors {
        apply_single_qubit(amps, w, &pauli.interaction::<T>(), threads)?;
    }
    Ok(())
}

fn pauli_matrix(p: &PauliWord, n_qubits: usize) -> Matrix {
    let dim = 1usize << n_qubits;
    let (flip, sign, n_y) = p.index_masks(n_qubits);
    let i_pow = [
        Complex64::new(1., 0.),
        Complex64::new(0., 1.),
        Complex64::new(-1., 0.),
        Complex64::new(0., -1.),
    ][(n_y % 4) as usize];
    let mut m = Matrix::zeros(dim);
    for j in 0..dim {
        let s = if (j & sign).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        m[(j ^ flip, j)] = i_pow * s;
    }
    m
}
