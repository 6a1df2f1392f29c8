//! Line-oriented Hamiltonian format (`.ham`).
//!
//! ```text
//! # format: 1
//! qubits 4          # optional; defaults to the highest wire + 1
//! -0.042 []
//! 0.177 [Z0]
//! 0.045 [Y0 X1 X2 Y3]
//! ```

use super::parser::{split_comment, Cursor, ParseError};
use crate::error::Result;
use crate::measurements::{Hamiltonian, Pauli, PauliWord};

/// Parsed `.ham` file: a weighted sum of Pauli words on `n_qubits` wires.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub n_qubits: usize,
    pub coeffs: Vec<f64>,
    pub pauli_words: Vec<PauliWord>,
}

impl HamiltonianSpec {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sum of the coefficients of identity terms.
    pub fn constant_offset(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.pauli_words)
            .filter(|(_, w)| w.is_identity())
            .map(|(c, _)| c)
            .sum()
    }

    pub fn to_hamiltonian(&self) -> Result<Hamiltonian> {
        Hamiltonian::new(self.coeffs.clone(), self.pauli_words.clone())
    }

    /// Canonical text form.
    pub fn serialize(&self) -> String {
        use std::fmt::Write;
        let mut out = format!(
            "# format: {}\nqubits {}\n",
            super::FORMAT_VERSION,
            self.n_qubits
        );
        for (c, w) in self.coeffs.iter().zip(&self.pauli_words) {
            writeln!(out, "{c:?} {w}").unwrap();
        }
        out
    }
}

pub fn parse_hamiltonian(text: &str) -> Result<HamiltonianSpec, ParseError> {
    let mut declared: Option<(usize, usize)> = None;
    let mut coeffs = Vec::new();
    let mut words = Vec::new();
    let mut max_wire: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let code = split_comment(raw, line_no)?;
        let code_len = code.chars().count();
        let mut cur = Cursor::new(raw, line_no);
        cur.skip_ws();
        if cur.pos() >= code_len {
            continue;
        }
        if cur.peek() == Some('q') {
            let start = cur.pos();
            if cur.word() != "qubits" {
                return Err(cur.error_at(start, "expected a coefficient or `qubits N`"));
            }
            if declared.is_some() || !coeffs.is_empty() {
                return Err(cur.error_at(start, "`qubits` must appear once, before any term"));
            }
            cur.skip_ws();
            let n_start = cur.pos();
            let n = cur.uint("qubit count")?;
            if n == 0 || n > crate::statevector::MAX_QUBITS {
                return Err(cur.error_at(
                    n_start,
                    format!(
                        "qubit count must be in 1..={}",
                        crate::statevector::MAX_QUBITS
                    ),
                ));
            }
            declared = Some((n, line_no));
        } else {
            let coeff = cur.number()?;
            cur.skip_ws();
            cur.expect('[')?;
            let mut factors = Vec::new();
            loop {
                cur.skip_ws();
                if cur.eat(']') {
                    break;
                }
                let tok_start = cur.pos();
                let p = cur
                    .peek()
                    .and_then(Pauli::from_char)
                    .ok_or_else(|| cur.error("expected a Pauli factor such as `X0` or `]`"))?;
                cur.eat(p.as_char());
                let w = cur.uint("wire after Pauli letter")?;
                if factors.iter().any(|&(fw, _)| fw == w) {
                    return Err(
                        cur.error_at(tok_start, format!("wire {w} appears twice in one term"))
                    );
                }
                if let Some((n, _)) = declared {
                    if w >= n {
                        return Err(cur.error_at(
                            tok_start,
                            format!("wire {w} out of range for {n} qubit(s)"),
                        ));
                    }
                }
                max_wire = max_wire.max(Some(w));
                factors.push((w, p));
                match cur.peek() {
                    Some(c) if c.is_whitespace() || c == ']' => {}
                    Some(c) => return Err(cur.error(format!("unexpected `{c}` in Pauli term"))),
                    None => return Err(cur.error("expected `]`, found end of line")),
                }
            }
            cur.skip_ws();
            if cur.pos() < code_len {
                return Err(cur.error(format!(
                    "unexpected `{}` after term",
                    cur.peek().unwrap_or(' ')
                )));
            }
            let word = PauliWord::new(factors).map_err(|e| cur.error_at(0, e.to_string()))?;
            coeffs.push(coeff);
            words.push(word);
        }
    }

    let n_qubits = match declared {
        Some((n, _)) => n,
        None => max_wire.map_or(1, |m| m + 1),
    };
    Ok(HamiltonianSpec {
        n_qubits,
        coeffs,
        pauli_words: words,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_terms() {
        let h = parse_hamiltonian("0.5 [Z0]\n-0.25 [X0 X1]").unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.n_qubits, 2);
        assert_eq!(h.coeffs, vec![0.5, -0.25]);
        assert_eq!(h.pauli_words[1].factors(), &[(0, Pauli::X), (1, Pauli::X)]);
    }

    #[test]
    fn identity_term() {
        let h = parse_hamiltonian("1.0 []").unwrap();
        assert_eq!(h.len(), 1);
        assert!(h.pauli_words[0].is_identity());
        assert_eq!(h.constant_offset(), 1.0);
    }

    #[test]
    fn declared_register_and_comments() {
        let h = parse_hamiltonian("# format: 1\nqubits 3\n\n2 [Y1] # y\n").unwrap();
        assert_eq!(h.n_qubits, 3);
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn errors() {
        let cases = [
            ("0.5 [Q0]", 1, 6, "Pauli"),
            ("0.5 [X0 Z0]", 1, 9, "twice"),
            ("0.5 [X]", 1, 7, "wire"),
            ("0.5 [X0", 1, 8, "`]`"),
            ("qubits 2\n0.5 [X2]", 2, 6, "out of range"),
            ("[X0]", 1, 1, "number"),
            ("0.5 [X0X1]", 1, 8, "unexpected"),
            ("# format: 3\n1 []", 1, 1, "format"),
        ];
        for (text, line, col, msg) in cases {
            let e = parse_hamiltonian(text).unwrap_err();
            assert_eq!((e.line, e.column), (line, col), "{text:?}: {e}");
            assert!(e.message.contains(msg), "{text:?}: {}", e.message);
        }
    }

    #[test]
    fn serialize_round_trip() {
        let h = parse_hamiltonian("qubits 4\n-0.04 []\n0.17 [Z0]\n0.04 [Y0 X1 X2 Y3]\n").unwrap();
        assert_eq!(parse_hamiltonian(&h.serialize()).unwrap(), h);
    }
}
