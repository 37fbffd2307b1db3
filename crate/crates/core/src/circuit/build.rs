use std::time::Instant;

use super::{Circuit, Gate};
use crate::dd::Edge;
use crate::error::{Error, Result};
use crate::package::Package;

impl Package {
    /// The `n`-qubit operator DD of one gate.
    pub fn gate_edge(&mut self, gate: &Gate, n: usize) -> Result<Edge> {
        let controls: &[usize] = match &gate.control {
            Some(c) => std::slice::from_ref(c),
            None => &[],
        };
        self.gate_dd(gate.kind.matrix(), gate.target, controls, n)
    }

    fn check_circuit(&self, c: &Circuit) -> Result<()> {
        if c.qubits() > self.config.max_qubits {
            return Err(Error::Index(format!(
                "circuit has {} qubits, package limit is {}",
                c.qubits(),
                self.config.max_qubits
            )));
        }
        Ok(())
    }

    /// DD of `G_k ⋯ G_1` for the circuit's gates `G_1, …, G_k`.
    ///
    /// The returned edge holds one reference; release it with
    /// [`dec_ref`](Self::dec_ref). Garbage may be collected between gates.
    pub fn build_functionality(&mut self, c: &Circuit) -> Result<Edge> {
        self.build_functionality_until(c, None)
    }

    /// Like [`build_functionality`](Self::build_functionality), giving up
    /// with [`Error::Deadline`] once `deadline` has passed.
    pub fn build_functionality_until(&mut self, c: &Circuit, deadline: Option<Instant>) -> Result<Edge> {
        self.deadline = deadline;
        let r = self.build_inner(c, deadline);
        self.deadline = None;
        r
    }

    fn build_inner(&mut self, c: &Circuit, deadline: Option<Instant>) -> Result<Edge> {
        self.check_circuit(c)?;
        let n = c.qubits();
        let mut acc = self.identity_dd(n)?;
        self.inc_ref(acc)?;
        for (i, g) in c.gates().iter().enumerate() {
            let step = self.check_deadline(deadline, i, c.len()).and_then(|_| {
                let gd = self.gate_edge(g, n)?;
                self.multiply(gd, acc).map_err(|e| match e {
                    Error::Deadline { .. } => Error::Deadline { completed: i, total: c.len() },
                    other => other,
                })
            });
            acc = self.advance(acc, step)?;
        }
        Ok(acc)
    }

    /// State DD of `G_k ⋯ G_1 |0…0⟩`, applying one gate at a time. The
    /// returned edge holds one reference.
    pub fn simulate(&mut self, c: &Circuit) -> Result<Edge> {
        self.check_circuit(c)?;
        let n = c.qubits();
        let mut acc = self.zero_state(n)?;
        self.inc_ref(acc)?;
        for g in c.gates() {
            let step = self.gate_edge(g, n).and_then(|gd| self.mat_vec(gd, acc));
            acc = self.advance(acc, step)?;
        }
        Ok(acc)
    }

    fn check_deadline(&self, deadline: Option<Instant>, completed: usize, total: usize) -> Result<()> {
        match deadline {
            Some(d) if Instant::now() >= d => Err(Error::Deadline { completed, total }),
            _ => Ok(()),
        }
    }

    /// Swaps the protected running result `old` for `next`, releasing `old`
    /// on failure as well.
    fn advance(&mut self, old: Edge, next: Result<Edge>) -> Result<Edge> {
        match next {
            Ok(e) => {
                self.inc_ref(e)?;
                self.dec_ref(old)?;
                self.gc_if_needed();
                Ok(e)
            }
            Err(err) => {
                self.dec_ref(old)?;
                Err(err)
            }
        }
    }
}
