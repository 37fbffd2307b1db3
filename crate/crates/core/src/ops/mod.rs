//! Recursive DD algebra: addition, multiplication, Kronecker product and
//! conjugate transposition, memoized through [`compute`] tables.
//!
//! Every public operation is a top-level call: intermediate weights live in
//! the complex cache and the returned edge is fully interned. Results are not
//! protected; call [`Package::inc_ref`] before the next garbage collection.

pub(crate) mod compute;
mod gates;

pub use gates::Matrix2;

use std::collections::HashMap;

use compute::{Factored, OpKind, NO_WEIGHT};
use num_complex::Complex64;

use crate::complex::{ComplexValue, TagOp};
use crate::dd::{Edge, Kind, NodeId};
use crate::error::{Error, Result};
use crate::package::Package;

impl Package {
    /// Entrywise sum of two DDs of the same kind over the same variables.
    pub fn add(&mut self, a: Edge, b: Edge) -> Result<Edge> {
        self.check_compatible(a, b, "add")?;
        self.top_level(|p| {
            let r = p.add_rec(a, b)?;
            p.finish(r)
        })
    }

    /// Matrix product `a·b`; `b` may be a matrix or a vector DD.
    pub fn multiply(&mut self, a: Edge, b: Edge) -> Result<Edge> {
        if self.kind_of(a) == Some(Kind::Vector) {
            return Err(Error::Contract("left operand of multiply is a vector".into()));
        }
        self.check_levels(a, b, "multiply")?;
        self.top_level(|p| {
            let r = p.mul_rec(a, b)?;
            p.finish(r)
        })
    }

    /// Applies matrix `a` to state vector `v`.
    pub fn mat_vec(&mut self, a: Edge, v: Edge) -> Result<Edge> {
        if self.kind_of(v) == Some(Kind::Matrix) {
            return Err(Error::Contract("mat_vec operand is a matrix".into()));
        }
        self.multiply(a, v)
    }

    /// `a ⊗ b`. The variables of `b` must start directly below the lowest
    /// variable of `a` (see [`shift_vars`](Self::shift_vars)).
    pub fn kron(&mut self, a: Edge, b: Edge) -> Result<Edge> {
        if let (Some(ka), Some(kb)) = (self.kind_of(a), self.kind_of(b)) {
            if ka != kb {
                return Err(Error::Contract("kron of a matrix and a vector".into()));
            }
        }
        if let (Some(ta), Some(tb)) = (self.top_var(a), self.top_var(b)) {
            let below = ta + self.depth(a);
            if tb < below {
                return Err(Error::Contract(format!(
                    "kron: variable {tb} of the lower operand overlaps the upper operand (variables {ta}..{below})"
                )));
            }
            if tb > below {
                return Err(Error::Contract(format!(
                    "kron: lower operand starts at variable {tb}, expected {below}"
                )));
            }
        }
        self.top_level(|p| {
            let r = p.kron_rec(a, b)?;
            p.finish(r)
        })
    }

    /// The adjoint `a†`.
    pub fn conjugate_transpose(&mut self, a: Edge) -> Result<Edge> {
        if self.kind_of(a) == Some(Kind::Vector) {
            return Err(Error::Contract("conjugate_transpose of a vector".into()));
        }
        self.top_level(|p| {
            let r = p.adjoint_rec(a)?;
            p.finish(r)
        })
    }

    /// Copy of `e` with every variable moved down by `offset`.
    pub fn shift_vars(&mut self, e: Edge, offset: usize) -> Result<Edge> {
        if offset == 0 || e.node.is_terminal() {
            return Ok(e);
        }
        let top = self.top_var(e).unwrap_or(0);
        let bottom = top + self.depth(e);
        if bottom + offset > self.config.max_qubits {
            return Err(Error::Index(format!(
                "shifting variables {top}..{bottom} by {offset} exceeds package limit {}",
                self.config.max_qubits
            )));
        }
        let mut memo = HashMap::new();
        let node = self.shift_node(e.node, offset, &mut memo);
        Ok(Edge { node, weight: e.weight })
    }

    fn shift_node(&mut self, id: NodeId, offset: usize, memo: &mut HashMap<NodeId, NodeId>) -> NodeId {
        if id.is_terminal() {
            return id;
        }
        if let Some(&r) = memo.get(&id) {
            return r;
        }
        let n = *self.node(id);
        let mut edges = n.edges;
        for e in edges.iter_mut().take(n.kind.arity()) {
            e.node = self.shift_node(e.node, offset, memo);
        }
        let r = self.unique_lookup(n.kind, n.var as usize + offset, edges);
        memo.insert(id, r);
        r
    }

    fn check_compatible(&self, a: Edge, b: Edge, op: &str) -> Result<()> {
        if let (Some(ka), Some(kb)) = (self.kind_of(a), self.kind_of(b)) {
            if ka != kb {
                return Err(Error::Contract(format!("{op}: operands differ in arity")));
            }
        }
        self.check_levels(a, b, op)
    }

    fn check_levels(&self, a: Edge, b: Edge, op: &str) -> Result<()> {
        if a.is_zero() || b.is_zero() {
            return Ok(());
        }
        let la = (self.top_var(a), self.depth(a));
        let lb = (self.top_var(b), self.depth(b));
        if la != lb {
            return Err(Error::Dimension(format!(
                "{op}: operands span different variables ({la:?} vs {lb:?})"
            )));
        }
        Ok(())
    }

    /// Interns the weight of an owned result edge, releasing its cache slot.
    fn finish(&mut self, e: Edge) -> Result<Edge> {
        let w = self.cn.intern_unbounded(e.weight)?;
        Ok(if w.is_zero() {
            Edge::ZERO
        } else {
            Edge { node: e.node, weight: w }
        })
    }

    /// Owned edge to `node` with weight `w·factor`; the stub if it vanishes.
    fn attach(&mut self, w: Complex64, f: Factored) -> Result<Edge> {
        if f.is_zero() {
            return Ok(Edge::ZERO);
        }
        let v = w * f.factor;
        let eps = self.cn.epsilon();
        if v.re.abs() <= eps && v.im.abs() <= eps {
            return Ok(Edge::ZERO);
        }
        let weight = self.cn.cache_alloc(v)?;
        Ok(Edge { node: f.node, weight })
    }

    /// Owned copy of `e`: table weights are shared, cache weights duplicated.
    fn owned_copy(&mut self, e: Edge) -> Result<Edge> {
        if e.is_zero() || !self.cn.is_cache_resident(e.weight) {
            return Ok(e);
        }
        let weight = self.cn.cache_alloc(self.cn.value(e.weight))?;
        Ok(Edge { node: e.node, weight })
    }

    /// Fails with [`Error::Deadline`] once the build deadline has passed.
    fn tick(&mut self) -> Result<()> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks & 0x3ff == 0 {
            if let Some(d) = self.deadline {
                if std::time::Instant::now() >= d {
                    return Err(Error::Deadline { completed: 0, total: 0 });
                }
            }
        }
        Ok(())
    }

    // The recursive helpers below return edges whose weight the caller owns:
    // cache-resident weights must be released (release is a no-op for table
    // weights). Operand weights are never consumed.

    pub(crate) fn mul_rec(&mut self, a: Edge, b: Edge) -> Result<Edge> {
        if a.is_zero() || b.is_zero() || self.cn.approx_zero(a.weight) || self.cn.approx_zero(b.weight) {
            return Ok(Edge::ZERO);
        }
        let w = self.cn.value(a.weight) * self.cn.value(b.weight);
        let f = match (a.node.is_terminal(), b.node.is_terminal()) {
            (true, true) => Factored { node: NodeId::TERMINAL, factor: Complex64::new(1.0, 0.0) },
            (false, false) => self.mul_nodes(a.node, b.node)?,
            _ => return Err(Error::Dimension("multiply: operands differ in depth".into())),
        };
        self.attach(w, f)
    }

    fn mul_nodes(&mut self, x: NodeId, y: NodeId) -> Result<Factored> {
        let (nx, ny) = (*self.node(x), *self.node(y));
        if nx.var != ny.var {
            return Err(Error::Dimension(format!(
                "multiply: variable {} meets variable {}",
                nx.var, ny.var
            )));
        }
        if nx.kind != Kind::Matrix {
            return Err(Error::Contract("left operand of multiply is a vector".into()));
        }
        let op = match ny.kind {
            Kind::Matrix => OpKind::MulMatrix,
            Kind::Vector => OpKind::MulVector,
        };
        if let Some(r) = self.compute.lookup(op, x, y, NO_WEIGHT) {
            return Ok(r);
        }
        self.tick()?;
        let (xe, ye) = (nx.edges, ny.edges);
        let cols = ny.kind.arity() / 2;
        let mut out = [Edge::ZERO; 4];
        for i in 0..2 {
            for j in 0..cols {
                let p0 = self.mul_rec(xe[2 * i], ye[j])?;
                let p1 = self.mul_rec(xe[2 * i + 1], ye[cols + j])?;
                let s = self.add_rec(p0, p1);
                self.cn.release(p0.weight);
                self.cn.release(p1.weight);
                out[cols * i + j] = s?;
            }
        }
        let r = self.make_node_raw(ny.kind, nx.var as usize, out)?;
        self.compute.insert(op, x, y, NO_WEIGHT, r);
        Ok(r)
    }

    pub(crate) fn add_rec(&mut self, a: Edge, b: Edge) -> Result<Edge> {
        if a.is_zero() || self.cn.approx_zero(a.weight) {
            return self.owned_copy(b);
        }
        if b.is_zero() || self.cn.approx_zero(b.weight) {
            return self.owned_copy(a);
        }
        if a.node == b.node {
            let s = self.cn.add(a.weight, b.weight)?;
            if self.cn.approx_zero(s) {
                self.cn.release(s);
                return Ok(Edge::ZERO);
            }
            return Ok(Edge { node: a.node, weight: s });
        }
        if a.node.is_terminal() || b.node.is_terminal() {
            return Err(Error::Dimension("add: operands differ in depth".into()));
        }
        let (a, b) = if a.node < b.node { (a, b) } else { (b, a) };
        let (na, nb) = (*self.node(a.node), *self.node(b.node));
        if na.kind != nb.kind {
            return Err(Error::Contract("add: operands differ in arity".into()));
        }
        if na.var != nb.var {
            return Err(Error::Dimension(format!(
                "add: variable {} meets variable {}",
                na.var, nb.var
            )));
        }
        let op = match na.kind {
            Kind::Matrix => OpKind::AddMatrix,
            Kind::Vector => OpKind::AddVector,
        };
        let residual = self.cn.div(b.weight, a.weight)?;
        let key = self.cn.round_for_key(residual);
        let f = match self.compute.lookup(op, a.node, b.node, key) {
            Some(f) => f,
            None => {
                let f = self.add_nodes(a.node, b.node, residual)?;
                self.compute.insert(op, a.node, b.node, key, f);
                f
            }
        };
        self.cn.release(residual);
        let w = self.cn.value(a.weight);
        self.attach(w, f)
    }

    /// `x + residual·y` for two nodes on the same variable.
    fn add_nodes(&mut self, x: NodeId, y: NodeId, residual: ComplexValue) -> Result<Factored> {
        self.tick()?;
        let (nx, ny) = (*self.node(x), *self.node(y));
        let mut out = [Edge::ZERO; 4];
        for (i, slot) in out.iter_mut().take(nx.kind.arity()).enumerate() {
            let yc = ny.edges[i];
            let w = self.cn.mul(yc.weight, residual)?;
            let r = self.add_rec(nx.edges[i], Edge { node: yc.node, weight: w });
            self.cn.release(w);
            *slot = r?;
        }
        self.make_node_raw(nx.kind, nx.var as usize, out)
    }

    fn kron_rec(&mut self, a: Edge, b: Edge) -> Result<Edge> {
        if a.is_zero() || b.is_zero() {
            return Ok(Edge::ZERO);
        }
        let w = self.cn.value(a.weight) * self.cn.value(b.weight);
        let f = if a.node.is_terminal() {
            Factored { node: b.node, factor: Complex64::new(1.0, 0.0) }
        } else {
            self.kron_nodes(a.node, b.node)?
        };
        self.attach(w, f)
    }

    fn kron_nodes(&mut self, x: NodeId, y: NodeId) -> Result<Factored> {
        if let Some(r) = self.compute.lookup(OpKind::Kron, x, y, NO_WEIGHT) {
            return Ok(r);
        }
        let nx = *self.node(x);
        let mut out = [Edge::ZERO; 4];
        for (i, slot) in out.iter_mut().take(nx.kind.arity()).enumerate() {
            *slot = self.kron_rec(nx.edges[i], Edge { node: y, weight: ComplexValue::ONE })?;
        }
        let r = self.make_node_raw(nx.kind, nx.var as usize, out)?;
        self.compute.insert(OpKind::Kron, x, y, NO_WEIGHT, r);
        Ok(r)
    }

    fn adjoint_rec(&mut self, a: Edge) -> Result<Edge> {
        if a.is_zero() {
            return Ok(Edge::ZERO);
        }
        let w = a.weight.apply(TagOp::Conjugate);
        if a.node.is_terminal() {
            return self.owned_copy(Edge { node: a.node, weight: w });
        }
        let f = match self.compute.lookup(OpKind::Adjoint, a.node, a.node, NO_WEIGHT) {
            Some(f) => f,
            None => {
                let n = *self.node(a.node);
                let e = n.edges;
                let mut out = [Edge::ZERO; 4];
                for (slot, src) in out.iter_mut().zip([0, 2, 1, 3]) {
                    *slot = self.adjoint_rec(e[src])?;
                }
                let f = self.make_node_raw(Kind::Matrix, n.var as usize, out)?;
                self.compute.insert(OpKind::Adjoint, a.node, a.node, NO_WEIGHT, f);
                f
            }
        };
        let w = self.cn.value(w);
        self.attach(w, f)
    }
}
