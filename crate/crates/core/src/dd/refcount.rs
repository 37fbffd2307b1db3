use super::Edge;
use crate::complex::REF_SATURATED;
use crate::error::{Error, Result};
use crate::package::Package;

impl Package {
    /// Protects the DD below `e` from garbage collection.
    ///
    /// A node whose count rises from zero protects its successors in turn;
    /// the root weight and every weight below a newly protected node gain a
    /// reference as well.
    pub fn inc_ref(&mut self, e: Edge) -> Result<()> {
        self.cn.inc_complex(e.weight)?;
        if e.node.is_terminal() {
            return Ok(());
        }
        let node = self.store.get_mut(e.node);
        if node.refcount == REF_SATURATED {
            return Ok(());
        }
        node.refcount += 1;
        if node.refcount == 1 {
            let (edges, arity) = (node.edges, node.kind.arity());
            for &child in &edges[..arity] {
                self.inc_ref(child)?;
            }
        }
        Ok(())
    }

    /// Reverses one [`inc_ref`](Self::inc_ref).
    pub fn dec_ref(&mut self, e: Edge) -> Result<()> {
        if e.node.is_terminal() {
            return self.cn.dec_complex(e.weight);
        }
        if self.store.get(e.node).refcount == 0 {
            return Err(Error::Contract(format!(
                "reference count of node {} would drop below zero",
                e.node.index()
            )));
        }
        self.cn.dec_complex(e.weight)?;
        let node = self.store.get_mut(e.node);
        if node.refcount == REF_SATURATED {
            return Ok(());
        }
        node.refcount -= 1;
        if node.refcount == 0 {
            let (edges, arity) = (node.edges, node.kind.arity());
            for &child in &edges[..arity] {
                self.dec_ref(child)?;
            }
        }
        Ok(())
    }

    /// Removes every unreferenced node and real entry, then clears the
    /// compute tables. Returns `(nodes, reals)` collected.
    ///
    /// Must only run between top-level operations: unprotected results of
    /// earlier operations become dangling.
    pub fn garbage_collect(&mut self) -> (usize, usize) {
        let mut nodes = 0;
        for table in self.unique.iter_mut() {
            nodes += table.collect(&mut self.store);
        }
        let reals = self.cn.table_gc();
        self.compute.clear();
        self.stats.live_nodes -= nodes;
        self.stats.nodes_collected += nodes as u64;
        self.stats.gc_runs += 1;
        self.insertions_since_gc = 0;
        (nodes, reals)
    }

    /// Collects garbage if the insertion threshold was exceeded.
    pub fn gc_if_needed(&mut self) -> Option<(usize, usize)> {
        self.gc_pending().then(|| self.garbage_collect())
    }
}
