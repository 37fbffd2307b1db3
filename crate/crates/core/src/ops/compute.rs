//! Memoization of DD operations: one direct-mapped table per operation kind,
//! single entry per slot, overwritten on collision.

use num_complex::Complex64;

use crate::complex::WeightKey;
use crate::dd::NodeId;

/// A node and the factor pulled out of it by normalization. The factor is
/// kept as a plain value since it may exceed one in magnitude.
#[derive(Clone, Copy, PartialEq, Debug)]
pub(crate) struct Factored {
    pub(crate) node: NodeId,
    pub(crate) factor: Complex64,
}

impl Factored {
    pub(crate) const ZERO: Factored = Factored {
        node: NodeId::TERMINAL,
        factor: Complex64::new(0.0, 0.0),
    };

    pub(crate) fn is_zero(&self) -> bool {
        self.factor == Complex64::new(0.0, 0.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum OpKind {
    MulMatrix = 0,
    MulVector = 1,
    AddMatrix = 2,
    AddVector = 3,
    Kron = 4,
    Adjoint = 5,
}

const OP_KINDS: usize = 6;

pub(crate) const NO_WEIGHT: WeightKey = WeightKey { re: 0, im: 0 };

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Key {
    a: NodeId,
    b: NodeId,
    w: WeightKey,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    key: Key,
    result: Factored,
    generation: u32,
}

#[derive(Debug)]
struct Table {
    slots: Vec<Slot>,
    hits: u64,
    lookups: u64,
}

#[derive(Debug)]
pub(crate) struct ComputeTables {
    tables: [Table; OP_KINDS],
    size: usize,
    generation: u32,
    pub(crate) enabled: bool,
}

fn slot_index(key: &Key, mask: usize) -> usize {
    let mut h = (key.a.index() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    h ^= (key.b.index() as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    h ^= (key.w.re as u64).wrapping_mul(0x1656_67b1_9e37_79f9);
    h ^= (key.w.im as u64).rotate_left(31).wrapping_mul(0x27d4_eb2f_1656_67c5);
    (h ^ (h >> 32)) as usize & mask
}

impl ComputeTables {
    pub(crate) fn new(size: usize) -> Self {
        debug_assert!(size.is_power_of_two());
        ComputeTables {
            tables: std::array::from_fn(|_| Table {
                slots: Vec::new(),
                hits: 0,
                lookups: 0,
            }),
            size,
            generation: 1,
            enabled: true,
        }
    }

    pub(crate) fn lookup(&mut self, op: OpKind, a: NodeId, b: NodeId, w: WeightKey) -> Option<Factored> {
        if !self.enabled {
            return None;
        }
        let t = &mut self.tables[op as usize];
        t.lookups += 1;
        if t.slots.is_empty() {
            return None;
        }
        let key = Key { a, b, w };
        let slot = &t.slots[slot_index(&key, self.size - 1)];
        if slot.generation == self.generation && slot.key == key {
            t.hits += 1;
            Some(slot.result)
        } else {
            None
        }
    }

    pub(crate) fn insert(&mut self, op: OpKind, a: NodeId, b: NodeId, w: WeightKey, result: Factored) {
        if !self.enabled {
            return;
        }
        let size = self.size;
        let t = &mut self.tables[op as usize];
        if t.slots.is_empty() {
            t.slots = vec![
                Slot {
                    key: Key {
                        a: NodeId::TERMINAL,
                        b: NodeId::TERMINAL,
                        w: NO_WEIGHT,
                    },
                    result: Factored::ZERO,
                    generation: 0,
                };
                size
            ];
        }
        let key = Key { a, b, w };
        t.slots[slot_index(&key, size - 1)] = Slot {
            key,
            result,
            generation: self.generation,
        };
    }

    /// Invalidates every entry.
    pub(crate) fn clear(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            for t in &mut self.tables {
                t.slots.clear();
            }
            self.generation = 1;
        }
    }

    pub(crate) fn hits(&self) -> u64 {
        self.tables.iter().map(|t| t.hits).sum()
    }

    pub(crate) fn lookups(&self) -> u64 {
        self.tables.iter().map(|t| t.lookups).sum()
    }
}
