//! Line-oriented circuit format (`.qc`).
//!
//! ```text
//! # format: 1
//! qubits 3
//! H 0
//! CTRL[0] X 1
//! CTRL[0,1=10] RZ(0.1) 2 train
//! Rot(0.1, 0.2, 0.3) 2 train[0,2]
//! ```
//!
//! The grammar is written out in `docs/formats.md`.

use std::fmt;

use super::{Circuit, Operation};
use crate::error::{Result, SimError};
use crate::gates::GateKind;

pub const FORMAT_VERSION: u32 = 1;

/// Syntax or validation error with a 1-based source location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub source_line: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )?;
        writeln!(f, "  {}", self.source_line)?;
        write!(f, "  {}^", " ".repeat(self.column.saturating_sub(1)))
    }
}

impl std::error::Error for ParseError {}

/// Character cursor over one source line.
pub(crate) struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line_no: usize,
    line: &'a str,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(line: &'a str, line_no: usize) -> Self {
        Cursor {
            chars: line.chars().collect(),
            pos: 0,
            line_no,
            line,
        }
    }

    pub(crate) fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line_no,
            column: pos + 1,
            message: message.into(),
            source_line: self.line.to_string(),
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub(crate) fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
        self.pos > start
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(match self.peek() {
                Some(found) => format!("expected `{c}`, found `{found}`"),
                None => format!("expected `{c}`, found end of line"),
            }))
        }
    }

    pub(crate) fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    pub(crate) fn word(&mut self) -> String {
        self.take_while(|c| c.is_ascii_alphanumeric() || c == '_')
    }

    pub(crate) fn uint(&mut self, what: &str) -> Result<usize, ParseError> {
        let start = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.error(format!("expected {what}")));
        }
        digits
            .parse()
            .map_err(|_| self.error_at(start, format!("{what} `{digits}` is too large")))
    }

    pub(crate) fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        let text =
            self.take_while(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        if text.is_empty() {
            return Err(self.error("expected a number"));
        }
        text.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.error_at(start, format!("`{text}` is not a finite number")))
    }

    /// `uint { "," uint }`, allowing spaces around commas.
    pub(crate) fn uint_list(&mut self, what: &str) -> Result<Vec<usize>, ParseError> {
        let mut out = vec![self.uint(what)?];
        loop {
            self.skip_ws();
            if !self.eat(',') {
                return Ok(out);
            }
            self.skip_ws();
            out.push(self.uint(what)?);
        }
    }
}

/// Strips a trailing comment and reports a `# format:` header if present.
/// Returns the code part of the line.
pub(crate) fn split_comment(line: &str, line_no: usize) -> Result<&str, ParseError> {
    let Some(hash) = line.find('#') else {
        return Ok(line);
    };
    let comment = line[hash + 1..].trim();
    if let Some(v) = comment.strip_prefix("format:") {
        let v = v.trim();
        if v != FORMAT_VERSION.to_string() {
            let col = line[..hash].chars().count() + 1;
            return Err(ParseError {
                line: line_no,
                column: col,
                message: format!("unsupported format version `{v}` (expected {FORMAT_VERSION})"),
                source_line: line.to_string(),
            });
        }
    }
    Ok(&line[..hash])
}

pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let code = split_comment(raw, line_no)?;
        let mut cur = Cursor::new(raw, line_no);
        cur.skip_ws();
        if cur.pos() >= code.chars().count() {
            continue;
        }
        match circuit.as_mut() {
            None => {
                let start = cur.pos();
                if cur.word() != "qubits" {
                    return Err(
                        cur.error_at(start, "expected `qubits N` header before any operation")
                    );
                }
                if !cur.skip_ws() {
                    return Err(cur.error("expected whitespace after `qubits`"));
                }
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
                finish_line(&mut cur, code)?;
                circuit = Some(Circuit::new(n));
            }
            Some(c) => {
                let op = parse_op(&mut cur, code, c.n_qubits)?;
                c.ops.push(op);
            }
        }
    }
    circuit.ok_or_else(|| ParseError {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing `qubits N` header".into(),
        source_line: String::new(),
    })
}

fn finish_line(cur: &mut Cursor<'_>, code: &str) -> Result<(), ParseError> {
    cur.skip_ws();
    if cur.pos() < code.chars().count() {
        return Err(cur.error(format!("unexpected `{}`", cur.peek().unwrap_or(' '))));
    }
    Ok(())
}

fn parse_op(cur: &mut Cursor<'_>, code: &str, n_qubits: usize) -> Result<Operation, ParseError> {
    let code_len = code.chars().count();
    let mut ctrls = Vec::new();
    let mut ctrl_values = Vec::new();

    let name_start = cur.pos();
    let mut name = cur.word();
    if name == "CTRL" {
        cur.expect('[')?;
        cur.skip_ws();
        let list_start = cur.pos();
        ctrls = cur.uint_list("control wire")?;
        cur.skip_ws();
        if cur.eat('=') {
            cur.skip_ws();
            let bits_start = cur.pos();
            let bits = cur.take_while(|c| c == '0' || c == '1');
            if bits.len() != ctrls.len() {
                return Err(cur.error_at(
                    bits_start,
                    format!(
                        "{} control value bit(s) for {} control(s)",
                        bits.len(),
                        ctrls.len()
                    ),
                ));
            }
            ctrl_values = bits.chars().map(|c| c == '1').collect();
            cur.skip_ws();
        } else {
            ctrl_values = vec![true; ctrls.len()];
        }
        cur.expect(']')?;
        if let Some(&w) = ctrls.iter().find(|&&w| w >= n_qubits) {
            return Err(cur.error_at(
                list_start,
                format!("control wire {w} out of range for {n_qubits} qubit(s)"),
            ));
        }
        if !cur.skip_ws() {
            return Err(cur.error("expected whitespace after control spec"));
        }
        let start = cur.pos();
        name = cur.word();
        return finish_op(cur, code_len, n_qubits, name, start, ctrls, ctrl_values);
    }
    finish_op(
        cur,
        code_len,
        n_qubits,
        name,
        name_start,
        ctrls,
        ctrl_values,
    )
}

fn finish_op(
    cur: &mut Cursor<'_>,
    code_len: usize,
    n_qubits: usize,
    name: String,
    name_start: usize,
    ctrls: Vec<usize>,
    ctrl_values: Vec<bool>,
) -> Result<Operation, ParseError> {
    if name.is_empty() {
        return Err(cur.error_at(name_start, "expected a gate name"));
    }
    let kind = GateKind::from_name(&name)
        .ok_or_else(|| cur.error_at(name_start, format!("unknown gate `{name}`")))?;
    if kind.is_matrix() {
        return Err(cur.error_at(
            name_start,
            format!("{kind} gates cannot be written in the text format"),
        ));
    }

    let mut params = Vec::new();
    if cur.eat('(') {
        cur.skip_ws();
        if !cur.eat(')') {
            loop {
                params.push(cur.number()?);
                cur.skip_ws();
                if cur.eat(')') {
                    break;
                }
                if !cur.eat(',') {
                    return Err(cur.error("expected `,` or `)` in parameter list"));
                }
                cur.skip_ws();
            }
        }
    }
    if params.len() != kind.n_params() {
        return Err(cur.error_at(
            name_start,
            format!(
                "{kind} takes {} parameter(s), got {}",
                kind.n_params(),
                params.len()
            ),
        ));
    }

    let n_wires = kind.n_wires().expect("named gate");
    let mut wires = Vec::with_capacity(n_wires);
    let mut trainable = vec![false; params.len()];
    loop {
        let had_ws = cur.skip_ws();
        if cur.pos() >= code_len {
            break;
        }
        if !had_ws {
            return Err(cur.error(format!("unexpected `{}`", cur.peek().unwrap_or(' '))));
        }
        let start = cur.pos();
        if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            if !trainable.iter().all(|t| !t) || wires.len() == n_wires {
                return Err(cur.error(format!("{kind} takes {n_wires} wire(s)")));
            }
            let w = cur.uint("wire")?;
            if w >= n_qubits {
                return Err(cur.error_at(
                    start,
                    format!("wire {w} out of range for {n_qubits} qubit(s)"),
                ));
            }
            if wires.contains(&w) || ctrls.contains(&w) {
                return Err(cur.error_at(start, format!("wire {w} used twice")));
            }
            wires.push(w);
            continue;
        }
        if cur.word() != "train" {
            return Err(cur.error_at(start, "expected a wire or `train`"));
        }
        if params.is_empty() {
            return Err(cur.error_at(start, format!("{kind} has no parameters to train")));
        }
        if cur.eat('[') {
            cur.skip_ws();
            let list_start = cur.pos();
            for i in cur.uint_list("parameter index")? {
                if i >= params.len() {
                    return Err(
                        cur.error_at(list_start, format!("parameter index {i} out of range"))
                    );
                }
                trainable[i] = true;
            }
            cur.skip_ws();
            cur.expect(']')?;
        } else {
            trainable.iter_mut().for_each(|t| *t = true);
        }
        cur.skip_ws();
        if cur.pos() < code_len {
            return Err(cur.error("`train` must end the line"));
        }
        break;
    }
    if wires.len() != n_wires {
        return Err(cur.error(format!(
            "{kind} takes {n_wires} wire(s), got {}",
            wires.len()
        )));
    }
    Ok(Operation {
        kind,
        wires,
        params,
        ctrls,
        ctrl_values,
        trainable,
        matrix: None,
    })
}

/// Canonical text form. Matrix operations have no text form.
pub fn serialize_circuit(circuit: &Circuit) -> Result<String> {
    use std::fmt::Write;
    let mut out = format!("# format: {FORMAT_VERSION}\nqubits {}\n", circuit.n_qubits);
    for op in &circuit.ops {
        if op.kind.is_matrix() {
            return Err(SimError::UnsupportedGate {
                gate: op.kind.name(),
                context: "the circuit text format",
            });
        }
        if !op.ctrls.is_empty() {
            let list: Vec<String> = op.ctrls.iter().map(usize::to_string).collect();
            write!(out, "CTRL[{}", list.join(",")).unwrap();
            if op.ctrl_values.iter().any(|v| !v) {
                let bits: String = op
                    .ctrl_values
                    .iter()
                    .map(|&v| if v { '1' } else { '0' })
                    .collect();
                write!(out, "={bits}").unwrap();
            }
            out.push_str("] ");
        }
        out.push_str(op.kind.name());
        if !op.params.is_empty() {
            let ps: Vec<String> = op.params.iter().map(|p| format!("{p:?}")).collect();
            write!(out, "({})", ps.join(", ")).unwrap();
        }
        for w in &op.wires {
            write!(out, " {w}").unwrap();
        }
        if op.trainable.iter().all(|&t| t) && !op.trainable.is_empty() {
            out.push_str(" train");
        } else if op.is_trainable() {
            let idx: Vec<String> = op
                .trainable
                .iter()
                .enumerate()
                .filter(|&(_, &t)| t)
                .map(|(i, _)| i.to_string())
                .collect();
            write!(out, " train[{}]", idx.join(",")).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}
