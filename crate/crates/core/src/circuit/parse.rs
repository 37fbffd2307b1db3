use super::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn index(tok: &str, line: usize) -> Result<usize> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(line, format!("expected a decimal index, found {tok:?}")));
    }
    tok.parse()
        .map_err(|_| err(line, format!("index {tok} too large")))
}

fn single_kind(name: &str) -> Option<GateKind> {
    GateKind::SINGLE.into_iter().find(|k| k.name() == name)
}

/// Parses the line-oriented circuit format:
///
/// ```text
/// # Bell pair
/// qubits 2
/// h 0
/// cx 0 1      # control, target
/// cp 2 0 1    # phase π/2^(k-1) = π/2
/// ```
///
/// Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };

        let Some(c) = circuit.as_mut() else {
            if head != "qubits" {
                return Err(err(line, format!("expected `qubits <n>` header, found {head:?}")));
            }
            if toks.len() != 2 {
                return Err(err(line, "`qubits` takes exactly one argument"));
            }
            let n = index(toks[1], line)?;
            circuit = Some(Circuit::new(n).map_err(|_| err(line, "qubit count must be at least 1"))?);
            continue;
        };

        let args = &toks[1..];
        let gate = if head == "qubits" {
            return Err(err(line, "duplicate `qubits` header"));
        } else if let Some(kind) = single_kind(head) {
            if args.len() != 1 {
                return Err(err(line, format!("`{head}` takes one qubit")));
            }
            Gate::single(kind, index(args[0], line)?)
        } else if head == "cx" || head == "cz" {
            if args.len() != 2 {
                return Err(err(line, format!("`{head}` takes a control and a target")));
            }
            let kind = if head == "cx" { GateKind::Cx } else { GateKind::Cz };
            Gate::controlled(kind, index(args[0], line)?, index(args[1], line)?)
        } else if head == "cp" {
            if args.len() != 3 {
                return Err(err(line, "`cp` takes an exponent, a control and a target"));
            }
            let k = index(args[0], line)?;
            let k = u32::try_from(k).map_err(|_| err(line, format!("cp exponent {k} too large")))?;
            Gate::controlled(GateKind::Cp(k), index(args[1], line)?, index(args[2], line)?)
        } else {
            return Err(err(line, format!("unknown gate {head:?}")));
        };
        c.push(gate).map_err(|e| match e {
            Error::Contract(msg) => err(line, msg),
            other => other,
        })?;
    }
    circuit.ok_or_else(|| err(last.max(1), "missing `qubits <n>` header"))
}
