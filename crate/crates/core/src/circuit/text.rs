//! Line-oriented text formats for circuits and Hamiltonians.
//!
//! Circuit lines:
//!
//! ```text
//! # comment
//! rot  <pauli-string> <angle>
//! crot <control-qubit> <0|1> <pauli-string> <angle>
//! phase <angle>
//! ```
//!
//! Hamiltonian lines are `<coefficient> <pauli-string>`. Qubits are 1-based and
//! every Pauli string spells out all qubits, qubit 1 first.

use std::fmt::Write as _;

use crate::circuit::{Gate, GateNetwork, PauliSum};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &content[s..i],
                    column: s + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &content[s..],
            column: s + 1,
        });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn number(tok: &Token<'_>, line: usize, what: &str) -> Result<f64> {
    let v: f64 = tok
        .text
        .parse()
        .map_err(|_| err(line, tok.column, format!("invalid {what} '{}'", tok.text)))?;
    if !v.is_finite() {
        return Err(err(line, tok.column, format!("non-finite {what}")));
    }
    Ok(v)
}

fn pauli(tok: &Token<'_>, line: usize) -> Result<PauliString> {
    tok.text.parse::<PauliString>().map_err(|e| match e {
        Error::Parse {
            column, message, ..
        } => err(line, tok.column + column - 1, message),
        other => other,
    })
}

fn expect_arity(toks: &[Token<'_>], want: usize, line: usize, usage: &str) -> Result<()> {
    if toks.len() != want {
        let column = toks
            .get(want)
            .map_or_else(|| toks.last().map_or(1, |t| t.column), |t| t.column);
        return Err(err(line, column, format!("expected `{usage}`")));
    }
    Ok(())
}

fn check_width(n: &mut Option<usize>, s: &PauliString, line: usize, column: usize) -> Result<()> {
    match *n {
        None => *n = Some(s.num_qubits()),
        Some(w) if w != s.num_qubits() => {
            return Err(err(
                line,
                column,
                format!(
                    "Pauli string has {} qubits, earlier lines have {w}",
                    s.num_qubits()
                ),
            ))
        }
        _ => {}
    }
    Ok(())
}

/// Parses a circuit. `qubits` fixes the register size; otherwise it is taken
/// from the first Pauli string (an empty file needs an explicit size).
pub fn parse_circuit(src: &str, qubits: Option<usize>) -> Result<GateNetwork> {
    let mut n = qubits;
    let mut gates = Vec::new();
    let mut phase = 0.0;
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let toks = tokenize(raw);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "rot" => {
                expect_arity(&toks, 3, line, "rot <pauli-string> <angle>")?;
                let axis = pauli(&toks[1], line)?;
                check_width(&mut n, &axis, line, toks[1].column)?;
                let angle = number(&toks[2], line, "angle")?;
                gates.push(
                    Gate::rotation(axis, angle)
                        .map_err(|e| err(line, toks[1].column, e.to_string()))?,
                );
            }
            "crot" => {
                expect_arity(
                    &toks,
                    5,
                    line,
                    "crot <control-qubit> <0|1> <pauli-string> <angle>",
                )?;
                let control: usize = toks[1].text.parse().map_err(|_| {
                    err(
                        line,
                        toks[1].column,
                        format!("invalid control qubit '{}'", toks[1].text),
                    )
                })?;
                let value = match toks[2].text {
                    "0" => false,
                    "1" => true,
                    other => {
                        return Err(err(
                            line,
                            toks[2].column,
                            format!("control value must be 0 or 1, got '{other}'"),
                        ))
                    }
                };
                let axis = pauli(&toks[3], line)?;
                check_width(&mut n, &axis, line, toks[3].column)?;
                let angle = number(&toks[4], line, "angle")?;
                let gate = Gate::controlled(control, value, axis, angle).map_err(|e| {
                    let column = match e {
                        Error::QubitIndex { .. } => toks[1].column,
                        _ => toks[3].column,
                    };
                    err(line, column, e.to_string())
                })?;
                gates.push(gate);
            }
            "phase" => {
                expect_arity(&toks, 2, line, "phase <angle>")?;
                phase += number(&toks[1], line, "angle")?;
            }
            other => {
                return Err(err(
                    line,
                    head.column,
                    format!("unknown gate keyword '{other}'"),
                ))
            }
        }
    }
    let n = n.ok_or_else(|| err(1, 1, "circuit has no gates and no qubit count was given"))?;
    let mut net = GateNetwork::from_gates(n, gates)?;
    net.add_global_phase(phase);
    Ok(net)
}

pub fn write_circuit(net: &GateNetwork) -> String {
    let mut out = String::new();
    writeln!(out, "# {} qubits, {} gates", net.num_qubits(), net.len()).unwrap();
    for g in net.gates() {
        match g {
            Gate::PauliRotation { axis, angle } => writeln!(out, "rot {axis} {angle:?}").unwrap(),
            Gate::ControlledPauliRotation {
                control,
                value,
                axis,
                angle,
            } => writeln!(out, "crot {control} {} {axis} {angle:?}", u8::from(*value)).unwrap(),
        }
    }
    if net.global_phase() != 0.0 {
        writeln!(out, "phase {:?}", net.global_phase()).unwrap();
    }
    out
}

pub fn parse_hamiltonian(src: &str) -> Result<PauliSum> {
    let mut terms = Vec::new();
    let mut n = None;
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        expect_arity(&toks, 2, line, "<coefficient> <pauli-string>")?;
        let c = number(&toks[0], line, "coefficient")?;
        let s = pauli(&toks[1], line)?;
        check_width(&mut n, &s, line, toks[1].column)?;
        terms.push((c, s));
    }
    let n = n.ok_or_else(|| err(1, 1, "Hamiltonian has no terms"))?;
    PauliSum::from_terms(n, terms)
}

pub fn write_hamiltonian(h: &PauliSum) -> String {
    let mut out = String::new();
    for (c, s) in h.terms() {
        writeln!(out, "{c:?} {s}").unwrap();
    }
    out
}
