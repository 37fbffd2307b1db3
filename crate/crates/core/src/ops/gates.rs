use num_complex::Complex64;

use crate::dd::{Edge, Kind, NodeId};
use crate::error::{Error, Result};
use crate::package::Package;

/// A single-qubit operator, row-major.
pub type Matrix2 = [[Complex64; 2]; 2];

impl Package {
    fn check_width(&self, n: usize) -> Result<()> {
        if n > self.config.max_qubits {
            return Err(Error::Index(format!(
                "{n} qubits exceed package limit {}",
                self.config.max_qubits
            )));
        }
        Ok(())
    }

    /// The `2^n × 2^n` identity: a chain of `n` nodes.
    pub fn identity_dd(&mut self, n: usize) -> Result<Edge> {
        self.check_width(n)?;
        self.top_level(|p| {
            let mut e = Edge::ONE;
            for v in (0..n).rev() {
                e = p.make_node(Kind::Matrix, v, [e, Edge::ZERO, Edge::ZERO, e])?;
            }
            Ok(e)
        })
    }

    /// The basis state `|0…0⟩` on `n` qubits.
    pub fn zero_state(&mut self, n: usize) -> Result<Edge> {
        self.basis_state(n, 0)
    }

    /// The computational basis state `|index⟩`, qubit 0 being the most
    /// significant bit.
    pub fn basis_state(&mut self, n: usize, index: usize) -> Result<Edge> {
        self.check_width(n)?;
        if n < usize::BITS as usize && index >> n != 0 {
            return Err(Error::Index(format!("basis index {index} outside {n} qubits")));
        }
        self.top_level(|p| {
            let mut e = Edge::ONE;
            for v in (0..n).rev() {
                let bit = (index >> (n - 1 - v)) & 1;
                let mut raw = [Edge::ZERO; 4];
                raw[bit] = e;
                e = p.make_node(Kind::Vector, v, raw)?;
            }
            Ok(e)
        })
    }

    /// The `n`-qubit operator applying `u` to `target` when every qubit in
    /// `controls` is one, and the identity otherwise.
    pub fn gate_dd(&mut self, u: Matrix2, target: usize, controls: &[usize], n: usize) -> Result<Edge> {
        self.check_width(n)?;
        if target >= n {
            return Err(Error::Contract(format!("target {target} outside {n} qubits")));
        }
        let mut is_control = vec![false; n];
        for &c in controls {
            if c >= n {
                return Err(Error::Contract(format!("control {c} outside {n} qubits")));
            }
            if c == target {
                return Err(Error::Contract(format!("qubit {c} is both control and target")));
            }
            is_control[c] = true;
        }
        self.top_level(|p| {
            let mut em = [[Edge::ZERO; 2]; 2];
            for (i, row) in u.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    let w = p.cn.lookup_complex(z.re, z.im)?;
                    if !w.is_zero() {
                        em[i][j] = Edge { node: NodeId::TERMINAL, weight: w };
                    }
                }
            }
            let mut id = Edge::ONE;
            for v in (target + 1..n).rev() {
                for i in 0..2 {
                    for j in 0..2 {
                        let e = em[i][j];
                        em[i][j] = if is_control[v] {
                            let pass = if i == j { id } else { Edge::ZERO };
                            p.make_node(Kind::Matrix, v, [pass, Edge::ZERO, Edge::ZERO, e])?
                        } else {
                            p.make_node(Kind::Matrix, v, [e, Edge::ZERO, Edge::ZERO, e])?
                        };
                    }
                }
                id = p.make_node(Kind::Matrix, v, [id, Edge::ZERO, Edge::ZERO, id])?;
            }
            let mut e = p.make_node(Kind::Matrix, target, [em[0][0], em[0][1], em[1][0], em[1][1]])?;
            id = p.make_node(Kind::Matrix, target, [id, Edge::ZERO, Edge::ZERO, id])?;
            for v in (0..target).rev() {
                e = if is_control[v] {
                    p.make_node(Kind::Matrix, v, [id, Edge::ZERO, Edge::ZERO, e])?
                } else {
                    p.make_node(Kind::Matrix, v, [e, Edge::ZERO, Edge::ZERO, e])?
                };
                id = p.make_node(Kind::Matrix, v, [id, Edge::ZERO, Edge::ZERO, id])?;
            }
            Ok(e)
        })
    }
}
