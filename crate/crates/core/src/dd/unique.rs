use super::{Edge, Kind, Node, NodeId, TERMINAL_VAR};
use crate::complex::{NIL, REF_SATURATED};
use crate::package::Package;

/// Nodes allocated at once when the free list is empty.
pub const NODE_BLOCK: usize = 2048;

/// Arena of nodes with an intrusive free list. Slot 0 is the terminal.
#[derive(Debug)]
pub(crate) struct NodeStore {
    nodes: Vec<Node>,
    free: u32,
}

impl NodeStore {
    pub(crate) fn new() -> Self {
        let terminal = Node {
            var: TERMINAL_VAR,
            kind: Kind::Matrix,
            edges: [Edge::ZERO; 4],
            refcount: REF_SATURATED,
            next: NIL,
        };
        NodeStore {
            nodes: vec![terminal],
            free: NIL,
        }
    }

    #[inline]
    pub(crate) fn get(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    #[inline]
    pub(crate) fn get_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id.0 as usize]
    }

    fn alloc(&mut self) -> u32 {
        if self.free == NIL {
            let start = self.nodes.len() as u32;
            let end = start + NODE_BLOCK as u32;
            self.nodes.reserve(NODE_BLOCK);
            for i in start..end {
                self.nodes.push(Node {
                    var: TERMINAL_VAR,
                    kind: Kind::Matrix,
                    edges: [Edge::ZERO; 4],
                    refcount: 0,
                    next: if i + 1 < end { i + 1 } else { NIL },
                });
            }
            self.free = start;
        }
        let idx = self.free;
        self.free = self.nodes[idx as usize].next;
        idx
    }

    fn release(&mut self, idx: u32) {
        let n = &mut self.nodes[idx as usize];
        n.var = TERMINAL_VAR;
        n.next = self.free;
        self.free = idx;
    }

    pub(crate) fn capacity(&self) -> usize {
        self.nodes.len()
    }
}

/// Per-variable chained hash tables for one node kind.
#[derive(Debug)]
pub(crate) struct UniqueTable {
    levels: Vec<Vec<u32>>,
    mask: usize,
}

#[inline]
fn mix(h: u64, x: u32) -> u64 {
    (h.rotate_left(5) ^ x as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95)
}

fn node_hash(edges: &[Edge]) -> u64 {
    let mut h = 0u64;
    for e in edges {
        h = mix(h, e.node.0);
        h = mix(h, e.weight.re.raw());
        h = mix(h, e.weight.im.raw());
    }
    h ^ (h >> 29)
}

impl UniqueTable {
    pub(crate) fn new(levels: usize, buckets: usize) -> Self {
        debug_assert!(buckets.is_power_of_two());
        UniqueTable {
            levels: vec![Vec::new(); levels],
            mask: buckets - 1,
        }
    }

    /// Unlinks unreferenced nodes into the store's free list.
    pub(crate) fn collect(&mut self, store: &mut NodeStore) -> usize {
        let mut collected = 0;
        for level in &mut self.levels {
            for head in level.iter_mut() {
                let mut prev = NIL;
                let mut cur = *head;
                while cur != NIL {
                    let next = store.nodes[cur as usize].next;
                    if store.nodes[cur as usize].refcount == 0 {
                        if prev == NIL {
                            *head = next;
                        } else {
                            store.nodes[prev as usize].next = next;
                        }
                        store.release(cur);
                        collected += 1;
                    } else {
                        prev = cur;
                    }
                    cur = next;
                }
            }
        }
        collected
    }

    /// Every node currently linked into the table.
    pub(crate) fn nodes<'a>(&'a self, store: &'a NodeStore) -> impl Iterator<Item = NodeId> + 'a {
        self.levels.iter().flat_map(move |level| {
            level.iter().flat_map(move |&head| {
                let mut cur = head;
                std::iter::from_fn(move || {
                    if cur == NIL {
                        return None;
                    }
                    let id = NodeId(cur);
                    cur = store.nodes[cur as usize].next;
                    Some(id)
                })
            })
        })
    }
}

impl Package {
    /// Returns the node `(var, edges)`, creating it if it is not yet in the
    /// unique table. `edges` must already be normalized.
    pub fn unique_lookup(&mut self, kind: Kind, var: usize, edges: [Edge; 4]) -> NodeId {
        assert!(var < self.config.max_qubits, "variable {var} out of range");
        let arity = kind.arity();
        debug_assert!(edges[arity..].iter().all(|e| *e == Edge::ZERO));
        self.stats.unique_lookups += 1;

        let table = &mut self.unique[kind.slot()];
        let level = &mut table.levels[var];
        if level.is_empty() {
            level.resize(table.mask + 1, NIL);
        }
        let bucket = node_hash(&edges[..arity]) as usize & table.mask;

        let mut cur = level[bucket];
        while cur != NIL {
            let n = &self.store.nodes[cur as usize];
            if n.edges == edges {
                self.stats.unique_hits += 1;
                return NodeId(cur);
            }
            cur = n.next;
        }

        let idx = self.store.alloc();
        self.store.nodes[idx as usize] = Node {
            var: var as u16,
            kind,
            edges,
            refcount: 0,
            next: level[bucket],
        };
        level[bucket] = idx;

        self.stats.live_nodes += 1;
        self.stats.peak_nodes = self.stats.peak_nodes.max(self.stats.live_nodes);
        self.stats.insertions += 1;
        self.insertions_since_gc += 1;
        NodeId(idx)
    }

    /// True once enough nodes were inserted that the next safe point should
    /// collect garbage.
    pub fn gc_pending(&self) -> bool {
        self.insertions_since_gc > self.config.gc_threshold
    }

    pub(crate) fn table_nodes(&self) -> Vec<NodeId> {
        self.unique
            .iter()
            .flat_map(|t| t.nodes(&self.store))
            .collect()
    }

    /// Allocated node slots, live or free.
    pub fn node_capacity(&self) -> usize {
        self.store.capacity()
    }
}
