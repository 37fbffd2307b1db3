//! Complex edge weights.
//!
//! Real and imaginary parts are interned separately as nonnegative reals in a
//! bucketed lookup table; the sign of each part lives in the low bit of its
//! [`RealHandle`]. A [`ComplexValue`] is a pair of such handles, so comparing
//! two table-resident weights is a comparison of two `u32` pairs.
//!
//! Intermediate results of arithmetic are kept in a fixed-size cache that
//! shares the entry arena with the table, which lets table handles and cache
//! handles be mixed freely as operands. Cache values are only rounded against
//! the tolerance when they are interned during node normalization.

mod cache;
mod table;

pub use cache::{ArithOp, CacheStats, WeightKey};
pub use table::{TableMode, TableStats};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const NIL: u32 = u32::MAX;

/// Reference counts at this value never change again.
pub(crate) const REF_SATURATED: u32 = u32::MAX;

/// Number of table entries allocated at once when the free list runs dry.
pub const ENTRY_BLOCK: usize = 2048;

const ZERO_INDEX: u32 = 0;
const ONE_INDEX: u32 = 1;

/// A stored real: nonnegative magnitude for table entries, signed value for
/// cache slots.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RealEntry {
    pub(crate) value: f64,
    pub(crate) refcount: u32,
    pub(crate) next: u32,
}

impl RealEntry {
    const EMPTY: RealEntry = RealEntry {
        value: 0.0,
        refcount: 0,
        next: NIL,
    };
}

/// Handle to an interned real with a sign tag in bit 0.
///
/// Equality is identity: same entry, same sign.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RealHandle(u32);

impl RealHandle {
    pub const ZERO: RealHandle = RealHandle(ZERO_INDEX << 1);
    pub const ONE: RealHandle = RealHandle(ONE_INDEX << 1);
    pub const MINUS_ONE: RealHandle = RealHandle((ONE_INDEX << 1) | 1);

    #[inline]
    pub(crate) fn new(index: u32, negative: bool) -> Self {
        if index == ZERO_INDEX {
            return RealHandle::ZERO;
        }
        RealHandle((index << 1) | negative as u32)
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn raw(self) -> u32 {
        self.0
    }

    /// Flips the sign tag. The canonical zero stays positive.
    #[inline]
    pub fn negated(self) -> Self {
        if self.index() == ZERO_INDEX {
            self
        } else {
            RealHandle(self.0 ^ 1)
        }
    }
}

/// An edge weight: handles to its real and imaginary parts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ComplexValue {
    pub re: RealHandle,
    pub im: RealHandle,
}

impl ComplexValue {
    pub const ZERO: ComplexValue = ComplexValue {
        re: RealHandle::ZERO,
        im: RealHandle::ZERO,
    };
    pub const ONE: ComplexValue = ComplexValue {
        re: RealHandle::ONE,
        im: RealHandle::ZERO,
    };

    #[inline]
    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self == Self::ONE
    }

    /// Applies a sign/swap transformation without touching the table.
    pub fn apply(self, op: TagOp) -> ComplexValue {
        match op {
            TagOp::Negate => ComplexValue {
                re: self.re.negated(),
                im: self.im.negated(),
            },
            TagOp::Conjugate => ComplexValue {
                re: self.re,
                im: self.im.negated(),
            },
            // (a + bi)·i = -b + ai
            TagOp::MulI => ComplexValue {
                re: self.im.negated(),
                im: self.re,
            },
            // (a + bi)·(-i) = b - ai
            TagOp::MulNegI => ComplexValue {
                re: self.im,
                im: self.re.negated(),
            },
        }
    }
}

/// Exact transformations realised by sign flips and component swaps.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TagOp {
    Negate,
    Conjugate,
    MulI,
    MulNegI,
}

/// Where the parts of a [`ComplexValue`] live.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Residency {
    Table,
    Cache,
    Mixed,
}

/// The lookup table for reals together with the intermediate-value cache.
#[derive(Debug)]
pub struct ComplexNumbers {
    pub(crate) entries: Vec<RealEntry>,
    epsilon: f64,
    mode: TableMode,
    buckets: Vec<u32>,
    linear: Vec<u32>,
    free_head: u32,
    table_stats: TableStats,
    cache_begin: u32,
    cache_end: u32,
    cache_free: u32,
    cache_stats: CacheStats,
}

impl ComplexNumbers {
    /// Creates the table with `bucket_count` buckets over `[0, 1]` and a cache
    /// holding `cache_capacity` complex values.
    pub fn new(
        epsilon: f64,
        bucket_count: usize,
        cache_capacity: usize,
        mode: TableMode,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        if bucket_count == 0 || bucket_count > (u32::MAX / 2) as usize {
            return Err(Error::Config(format!("invalid bucket count {bucket_count}")));
        }
        if bucket_count as f64 * 2.0 * epsilon >= 1.0 {
            return Err(Error::Config(format!(
                "bucket width 1/{bucket_count} must exceed 2·epsilon = {}",
                2.0 * epsilon
            )));
        }
        if cache_capacity == 0 {
            return Err(Error::Config("cache capacity must be positive".into()));
        }

        let slots = 2 * cache_capacity;
        let cache_begin = 2u32;
        let cache_end = cache_begin + slots as u32;
        let mut entries = Vec::with_capacity(cache_end as usize + ENTRY_BLOCK);
        entries.push(RealEntry {
            value: 0.0,
            refcount: REF_SATURATED,
            next: NIL,
        });
        entries.push(RealEntry {
            value: 1.0,
            refcount: REF_SATURATED,
            next: NIL,
        });
        for i in cache_begin..cache_end {
            let next = if i + 1 < cache_end { i + 1 } else { NIL };
            entries.push(RealEntry {
                value: 0.0,
                refcount: 0,
                next,
            });
        }

        let mut cn = ComplexNumbers {
            entries,
            epsilon,
            mode,
            buckets: Vec::new(),
            linear: Vec::new(),
            free_head: NIL,
            table_stats: TableStats::default(),
            cache_begin,
            cache_end,
            cache_free: cache_begin,
            cache_stats: CacheStats {
                capacity: cache_capacity,
                ..CacheStats::default()
            },
        };
        match mode {
            TableMode::Bucketed => {
                cn.buckets = vec![NIL; bucket_count];
                cn.buckets[0] = ZERO_INDEX;
                cn.entries[ONE_INDEX as usize].next = cn.buckets[bucket_count - 1];
                cn.buckets[bucket_count - 1] = ONE_INDEX;
            }
            TableMode::LinearScan => {
                cn.linear.push(ZERO_INDEX);
                cn.linear.push(ONE_INDEX);
            }
        }
        cn.table_stats.live_entries = 2;
        cn.table_stats.peak_entries = 2;
        Ok(cn)
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn mode(&self) -> TableMode {
        self.mode
    }

    /// Signed value behind a handle.
    #[inline]
    pub fn real(&self, h: RealHandle) -> f64 {
        let v = self.entries[h.index() as usize].value;
        if h.is_negative() {
            -v
        } else {
            v
        }
    }

    #[inline]
    pub fn value(&self, c: ComplexValue) -> Complex64 {
        Complex64::new(self.real(c.re), self.real(c.im))
    }

    #[inline]
    pub(crate) fn is_cache_index(&self, index: u32) -> bool {
        index >= self.cache_begin && index < self.cache_end
    }

    pub fn residency(&self, c: ComplexValue) -> Residency {
        match (self.is_cache_index(c.re.index()), self.is_cache_index(c.im.index())) {
            (false, false) => Residency::Table,
            (true, true) => Residency::Cache,
            _ => Residency::Mixed,
        }
    }

    #[inline]
    pub fn is_table_resident(&self, c: ComplexValue) -> bool {
        !self.is_cache_index(c.re.index()) && !self.is_cache_index(c.im.index())
    }

    #[inline]
    pub fn is_cache_resident(&self, c: ComplexValue) -> bool {
        self.is_cache_index(c.re.index()) && self.is_cache_index(c.im.index())
    }

    /// Both parts within the tolerance of zero.
    #[inline]
    pub fn approx_zero(&self, c: ComplexValue) -> bool {
        c.is_zero()
            || (self.real(c.re).abs() <= self.epsilon && self.real(c.im).abs() <= self.epsilon)
    }
}
