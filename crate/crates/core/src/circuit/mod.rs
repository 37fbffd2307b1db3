//! Circuits over a small fixed gate set, their text format, generators and
//! DD construction.
//!
//! Qubit 0 is the most significant bit of every basis index.

mod build;
mod generate;
mod parse;

pub use generate::{gen_qft, gen_random, gen_supremacy, Rng};
pub use parse::parse;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ops::Matrix2;

/// Largest `k` accepted for `cp k`.
pub const MAX_PHASE_EXPONENT: u32 = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    /// Square root of X.
    Sx,
    /// Square root of Y.
    Sy,
    Cx,
    Cz,
    /// Controlled phase `diag(1, e^{iπ/2^{k−1}})`.
    Cp(u32),
}

impl GateKind {
    pub const SINGLE: [GateKind; 10] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Sx,
        GateKind::Sy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Sx => "sx",
            GateKind::Sy => "sy",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Cp(_) => "cp",
        }
    }

    pub fn is_controlled(self) -> bool {
        matches!(self, GateKind::Cx | GateKind::Cz | GateKind::Cp(_))
    }

    /// The 2×2 operator applied to the target.
    pub fn matrix(self) -> Matrix2 {
        let c = Complex64::new;
        let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
        let r = FRAC_1_SQRT_2;
        let half = |re, im| c(0.5 * re, 0.5 * im);
        match self {
            GateKind::H => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
            GateKind::X | GateKind::Cx => [[o, l], [l, o]],
            GateKind::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
            GateKind::Z | GateKind::Cz => [[l, o], [o, c(-1.0, 0.0)]],
            GateKind::S => [[l, o], [o, c(0.0, 1.0)]],
            GateKind::Sdg => [[l, o], [o, c(0.0, -1.0)]],
            GateKind::T => [[l, o], [o, c(r, r)]],
            GateKind::Tdg => [[l, o], [o, c(r, -r)]],
            GateKind::Sx => [[half(1.0, 1.0), half(1.0, -1.0)], [half(1.0, -1.0), half(1.0, 1.0)]],
            GateKind::Sy => [[half(1.0, 1.0), half(-1.0, -1.0)], [half(1.0, 1.0), half(1.0, 1.0)]],
            GateKind::Cp(k) => [[l, o], [o, phase(k)]],
        }
    }
}

/// `e^{iπ/2^{k−1}}`, exact for `k ≤ 3`.
fn phase(k: u32) -> Complex64 {
    match k {
        1 => Complex64::new(-1.0, 0.0),
        2 => Complex64::new(0.0, 1.0),
        3 => Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        _ => Complex64::from_polar(1.0, PI / 2f64.powi(k as i32 - 1)),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    /// Present exactly for controlled kinds.
    pub control: Option<usize>,
}

impl Gate {
    pub fn single(kind: GateKind, target: usize) -> Gate {
        Gate { kind, target, control: None }
    }

    pub fn controlled(kind: GateKind, control: usize, target: usize) -> Gate {
        Gate { kind, target, control: Some(control) }
    }

    fn validate(&self, n: usize) -> std::result::Result<(), String> {
        if self.kind.is_controlled() != self.control.is_some() {
            return Err(format!("gate {} has the wrong number of qubits", self.kind.name()));
        }
        if let GateKind::Cp(k) = self.kind {
            if k == 0 || k > MAX_PHASE_EXPONENT {
                return Err(format!("cp exponent {k} outside 1..={MAX_PHASE_EXPONENT}"));
            }
        }
        if self.target >= n {
            return Err(format!("qubit {} out of range for {n} qubits", self.target));
        }
        if let Some(c) = self.control {
            if c >= n {
                return Err(format!("qubit {c} out of range for {n} qubits"));
            }
            if c == self.target {
                return Err(format!("control equals target ({c})"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.control) {
            (GateKind::Cp(k), Some(c)) => write!(f, "cp {k} {c} {}", self.target),
            (kind, Some(c)) => write!(f, "{} {c} {}", kind.name(), self.target),
            (kind, None) => write!(f, "{} {}", kind.name(), self.target),
        }
    }
}

/// A qubit count and a gate list; gates apply in list order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Circuit> {
        if n == 0 {
            return Err(Error::Contract("a circuit needs at least one qubit".into()));
        }
        Ok(Circuit { n, gates: Vec::new() })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n).map_err(Error::Contract)?;
        self.gates.push(gate);
        Ok(())
    }

    /// The first `k` gates (all of them if `k` exceeds the length).
    pub fn truncated(&self, k: usize) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates[..k.min(self.gates.len())].to_vec(),
        }
    }

    /// The circuit in the text format accepted by [`parse`].
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}
