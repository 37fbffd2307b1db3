use std::collections::{HashMap, HashSet};

use num_complex::Complex64;

use super::{Edge, Kind, NodeId};
use crate::complex::{ComplexValue, REF_SATURATED};
use crate::error::{Error, Result};
use crate::package::Package;

/// A protected root with the number of times it was passed to `inc_ref`.
#[derive(Clone, Copy, Debug)]
pub struct RefcountRoot {
    pub edge: Edge,
    pub protections: u32,
}

impl Package {
    /// Kind of the DD under `e`; `None` for terminal edges and stubs.
    pub fn kind_of(&self, e: Edge) -> Option<Kind> {
        (!e.node.is_terminal()).then(|| self.node(e.node).kind)
    }

    /// Top variable of `e`, `None` for terminal edges and stubs.
    pub fn top_var(&self, e: Edge) -> Option<usize> {
        self.node(e.node).var()
    }

    /// Number of levels between `e` and the terminal.
    pub fn depth(&self, e: Edge) -> usize {
        let mut depth = 0;
        let mut cur = e;
        while !cur.node.is_terminal() {
            depth += 1;
            match self.node(cur.node).edges().iter().find(|c| !c.is_zero()) {
                Some(&c) => cur = c,
                None => break,
            }
        }
        depth
    }

    /// Successor edges of the node under `e`; empty for terminal edges.
    pub fn children(&self, e: Edge) -> &[Edge] {
        if e.node.is_terminal() {
            &[]
        } else {
            self.node(e.node).edges()
        }
    }

    pub fn weight(&self, e: Edge) -> Complex64 {
        self.cn.value(e.weight)
    }

    /// Matrix entry `(row, col)`: the product of the weights on the path
    /// selected by the index bits, most significant bit at the root.
    pub fn extract_entry(&self, root: Edge, row: usize, col: usize) -> Result<Complex64> {
        if self.kind_of(root) == Some(Kind::Vector) {
            return Err(Error::Contract("extract_entry on a vector DD".into()));
        }
        let n = self.depth(root);
        if n >= usize::BITS as usize || row >> n != 0 || col >> n != 0 {
            return Err(Error::Index(format!(
                "({row}, {col}) outside a {n}-qubit matrix"
            )));
        }
        let mut acc = self.cn.value(root.weight);
        let mut cur = root;
        for level in (0..n).rev() {
            if cur.is_zero() {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let idx = 2 * ((row >> level) & 1) + ((col >> level) & 1);
            cur = self.node(cur.node).edges[idx];
            acc *= self.cn.value(cur.weight);
        }
        Ok(if cur.is_zero() { Complex64::new(0.0, 0.0) } else { acc })
    }

    /// Amplitude `index` of a vector DD.
    pub fn extract_amplitude(&self, root: Edge, index: usize) -> Result<Complex64> {
        if self.kind_of(root) == Some(Kind::Matrix) {
            return Err(Error::Contract("extract_amplitude on a matrix DD".into()));
        }
        let n = self.depth(root);
        if n >= usize::BITS as usize || index >> n != 0 {
            return Err(Error::Index(format!("{index} outside a {n}-qubit vector")));
        }
        let mut acc = self.cn.value(root.weight);
        let mut cur = root;
        for level in (0..n).rev() {
            if cur.is_zero() {
                return Ok(Complex64::new(0.0, 0.0));
            }
            cur = self.node(cur.node).edges[(index >> level) & 1];
            acc *= self.cn.value(cur.weight);
        }
        Ok(if cur.is_zero() { Complex64::new(0.0, 0.0) } else { acc })
    }

    /// The full matrix in row-major order, `2^n × 2^n` for an `n`-level DD.
    pub fn to_dense_matrix(&self, root: Edge, qubits: usize) -> Result<Vec<Complex64>> {
        let n = self.depth(root);
        if !root.is_zero() && n != qubits {
            return Err(Error::Dimension(format!("DD has {n} levels, expected {qubits}")));
        }
        let dim = 1usize << qubits;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        self.fill_matrix(root, Complex64::new(1.0, 0.0), 0, 0, dim, dim, &mut out);
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn fill_matrix(
        &self,
        e: Edge,
        scale: Complex64,
        row: usize,
        col: usize,
        size: usize,
        dim: usize,
        out: &mut [Complex64],
    ) {
        if e.is_zero() {
            return;
        }
        let w = scale * self.cn.value(e.weight);
        if size == 1 {
            out[row * dim + col] = w;
            return;
        }
        let half = size / 2;
        let edges = self.node(e.node).edges;
        for (i, &child) in edges.iter().enumerate() {
            let (r, c) = (i / 2, i % 2);
            self.fill_matrix(child, w, row + r * half, col + c * half, half, dim, out);
        }
    }

    /// All `2^n` amplitudes of a vector DD.
    pub fn to_dense_vector(&self, root: Edge, qubits: usize) -> Result<Vec<Complex64>> {
        let n = self.depth(root);
        if !root.is_zero() && n != qubits {
            return Err(Error::Dimension(format!("DD has {n} levels, expected {qubits}")));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 1usize << qubits];
        self.fill_vector(root, Complex64::new(1.0, 0.0), 0, out.len(), &mut out);
        Ok(out)
    }

    fn fill_vector(&self, e: Edge, scale: Complex64, at: usize, size: usize, out: &mut [Complex64]) {
        if e.is_zero() {
            return;
        }
        let w = scale * self.cn.value(e.weight);
        if size == 1 {
            out[at] = w;
            return;
        }
        let half = size / 2;
        let edges = self.node(e.node).edges;
        self.fill_vector(edges[0], w, at, half, out);
        self.fill_vector(edges[1], w, at + half, half, out);
    }

    /// Distinct non-terminal nodes reachable from `root`.
    pub fn dd_size(&self, root: Edge) -> usize {
        self.reachable(root).len()
    }

    pub(crate) fn reachable(&self, root: Edge) -> HashSet<NodeId> {
        let mut seen = HashSet::new();
        let mut stack = vec![root];
        while let Some(e) = stack.pop() {
            if e.is_zero() || e.node.is_terminal() || !seen.insert(e.node) {
                continue;
            }
            stack.extend_from_slice(self.node(e.node).edges());
        }
        seen
    }

    /// Checks at every node below `root` that the leftmost weight whose
    /// squared magnitude is within `ε` of one is exactly `1`, that no
    /// squared magnitude exceeds `1 + 2ε`, that stubs point at the terminal,
    /// that variables strictly increase and that no node is all-zero.
    pub fn check_normalization(&self, root: Edge) -> std::result::Result<(), String> {
        let eps = self.cn.epsilon();
        if root.is_zero() && !root.node.is_terminal() {
            return Err("zero-weight root points at a non-terminal node".into());
        }
        for id in self.reachable(root) {
            let node = self.node(id);
            let var = node.var().ok_or("terminal reached as inner node")?;
            let mut mags = Vec::with_capacity(4);
            for (i, e) in node.edges().iter().enumerate() {
                if e.is_zero() {
                    if !e.node.is_terminal() {
                        return Err(format!("node {}: stub {i} points at a non-terminal", id.0));
                    }
                    mags.push(0.0);
                    continue;
                }
                if !self.cn.is_table_resident(e.weight) {
                    return Err(format!("node {}: weight {i} not table-resident", id.0));
                }
                if let Some(v) = self.node(e.node).var() {
                    if v <= var {
                        return Err(format!("node {}: child var {v} not below {var}", id.0));
                    }
                }
                mags.push(self.cn.value(e.weight).norm_sqr());
            }
            if mags.iter().all(|&m| m == 0.0) {
                return Err(format!("node {} has only zero successors", id.0));
            }
            if let Some(m) = mags.iter().find(|&&m| m > 1.0 + 2.0 * eps) {
                return Err(format!("node {}: |w|² = {m} exceeds 1 + 2ε", id.0));
            }
            let lead = mags
                .iter()
                .position(|&m| m >= 1.0 - eps)
                .ok_or(format!("node {}: no weight of magnitude one", id.0))?;
            if node.edges[lead].weight != ComplexValue::ONE {
                return Err(format!(
                    "node {}: leading weight {lead} is {} instead of exactly 1",
                    id.0,
                    self.cn.value(node.edges[lead].weight)
                ));
            }
        }
        Ok(())
    }

    /// Full scan of both unique tables for duplicate nodes.
    pub fn check_unique_table(&self) -> std::result::Result<(), String> {
        let mut seen = HashMap::new();
        let nodes = self.table_nodes();
        if nodes.len() != self.stats.live_nodes {
            return Err(format!(
                "{} nodes linked, {} counted live",
                nodes.len(),
                self.stats.live_nodes
            ));
        }
        for id in nodes {
            let n = self.node(id);
            if let Some(other) = seen.insert((n.kind, n.var, n.edges), id) {
                return Err(format!("nodes {} and {} are identical", other.0, id.0));
            }
        }
        Ok(())
    }

    /// Recounts references from the given protected roots and compares the
    /// result with the stored node reference counts.
    pub fn check_refcounts(&self, roots: &[RefcountRoot]) -> std::result::Result<(), String> {
        let mut expected: HashMap<NodeId, u64> = HashMap::new();
        let mut stack = Vec::new();
        let mut bump = |id: NodeId, by: u64, stack: &mut Vec<NodeId>| {
            if id.is_terminal() {
                return;
            }
            let c = expected.entry(id).or_insert(0);
            if *c == 0 {
                stack.push(id);
            }
            *c += by;
        };
        for r in roots {
            if r.protections > 0 {
                bump(r.edge.node, r.protections as u64, &mut stack);
            }
        }
        while let Some(id) = stack.pop() {
            for e in self.node(id).edges() {
                bump(e.node, 1, &mut stack);
            }
        }
        for id in self.table_nodes() {
            let actual = self.node(id).refcount;
            if actual == REF_SATURATED {
                continue;
            }
            let want = expected.get(&id).copied().unwrap_or(0);
            if actual as u64 != want {
                return Err(format!("node {}: refcount {actual}, recount {want}", id.0));
            }
        }
        Ok(())
    }
}
