//! Decision-diagram nodes and edges.
//!
//! A matrix node on variable `v` splits a `2^k × 2^k` block into its four
//! quadrants (edge index `2·row_bit + col_bit`); a vector node splits a
//! `2^k` column into two halves. Variable 0 is the top level and corresponds
//! to the most significant bit of row/column indices. Every level is
//! materialized on every nonzero path, and all-zero blocks are represented by
//! a stub: weight zero pointing at the terminal.

mod inspect;
mod normalize;
mod refcount;
mod unique;

pub use inspect::RefcountRoot;
pub use normalize::Normalized;
pub(crate) use unique::{NodeStore, UniqueTable};

use crate::complex::ComplexValue;

/// Index of a node in the package's node store.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub const TERMINAL: NodeId = NodeId(0);

    #[inline]
    pub fn is_terminal(self) -> bool {
        self == Self::TERMINAL
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }
}

/// A weighted pointer to a node.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Edge {
    pub node: NodeId,
    pub weight: ComplexValue,
}

impl Edge {
    /// The zero stub.
    pub const ZERO: Edge = Edge {
        node: NodeId::TERMINAL,
        weight: ComplexValue::ZERO,
    };
    /// The terminal with weight one, i.e. the 1×1 matrix `[1]`.
    pub const ONE: Edge = Edge {
        node: NodeId::TERMINAL,
        weight: ComplexValue::ONE,
    };

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.weight.is_zero()
    }

    #[inline]
    pub fn is_terminal(&self) -> bool {
        self.node.is_terminal()
    }
}

/// Matrix nodes have four successors, vector nodes two.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Kind {
    Matrix,
    Vector,
}

impl Kind {
    #[inline]
    pub fn arity(self) -> usize {
        match self {
            Kind::Matrix => 4,
            Kind::Vector => 2,
        }
    }

    #[inline]
    pub(crate) fn slot(self) -> usize {
        match self {
            Kind::Matrix => 0,
            Kind::Vector => 1,
        }
    }
}

pub(crate) const TERMINAL_VAR: u16 = u16::MAX;

#[derive(Clone, Copy, Debug)]
pub struct Node {
    pub(crate) var: u16,
    pub(crate) kind: Kind,
    pub(crate) edges: [Edge; 4],
    pub(crate) refcount: u32,
    pub(crate) next: u32,
}

impl Node {
    /// Variable index, or `None` for the terminal.
    pub fn var(&self) -> Option<usize> {
        (self.var != TERMINAL_VAR).then_some(self.var as usize)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Successor edges (four for matrices, two for vectors).
    pub fn edges(&self) -> &[Edge] {
        &self.edges[..self.kind.arity()]
    }

    pub fn refcount(&self) -> u32 {
        self.refcount
    }
}
