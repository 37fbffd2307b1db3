use num_complex::Complex64;

use super::{ComplexNumbers, ComplexValue, RealHandle, Residency, NIL};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    /// Capacity in complex values.
    pub capacity: usize,
    /// Complex values currently handed out.
    pub in_use: usize,
    pub high_water: usize,
    pub allocs: u64,
    pub releases: u64,
}

/// Compute-table key for a weight: both parts snapped to a `2ε` grid.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct WeightKey {
    pub re: i64,
    pub im: i64,
}

impl ComplexNumbers {
    fn alloc_slot(&mut self, value: f64) -> u32 {
        let idx = self.cache_free;
        let e = &mut self.entries[idx as usize];
        self.cache_free = e.next;
        e.value = value;
        e.refcount = 1;
        e.next = NIL;
        idx
    }

    fn release_slot(&mut self, idx: u32) {
        let free = self.cache_free;
        let e = &mut self.entries[idx as usize];
        debug_assert_eq!(e.refcount, 1, "cache slot {idx} released twice");
        e.refcount = 0;
        e.next = free;
        self.cache_free = idx;
    }

    /// Places `v` in two fresh cache slots.
    pub fn cache_alloc(&mut self, v: Complex64) -> Result<ComplexValue> {
        if self.cache_stats.in_use == self.cache_stats.capacity {
            return Err(Error::CacheExhausted {
                capacity: self.cache_stats.capacity,
            });
        }
        let re = self.alloc_slot(v.re);
        let im = self.alloc_slot(v.im);
        let s = &mut self.cache_stats;
        s.in_use += 1;
        s.allocs += 1;
        s.high_water = s.high_water.max(s.in_use);
        Ok(ComplexValue {
            re: RealHandle::new_cached(re),
            im: RealHandle::new_cached(im),
        })
    }

    /// Returns the slots of a cache-resident value to the pool. Table-resident
    /// values are left alone.
    pub fn release(&mut self, v: ComplexValue) {
        if !self.is_cache_resident(v) {
            debug_assert!(self.is_table_resident(v), "mixed residency {v:?}");
            return;
        }
        self.release_slot(v.re.index());
        self.release_slot(v.im.index());
        self.cache_stats.in_use -= 1;
        self.cache_stats.releases += 1;
    }

    /// Exact machine-precision arithmetic into the cache; nothing is rounded
    /// against the tolerance and nothing enters the table.
    pub fn arith(&mut self, op: ArithOp, a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
        let (x, y) = (self.value(a), self.value(b));
        let r = match op {
            ArithOp::Add => x + y,
            ArithOp::Sub => x - y,
            ArithOp::Mul => x * y,
            ArithOp::Div => {
                if y.norm() <= self.epsilon() {
                    return Err(Error::DivisionByZero { re: y.re, im: y.im });
                }
                x / y
            }
        };
        self.cache_alloc(r)
    }

    #[inline]
    pub fn add(&mut self, a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
        self.arith(ArithOp::Add, a, b)
    }

    #[inline]
    pub fn sub(&mut self, a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
        self.arith(ArithOp::Sub, a, b)
    }

    #[inline]
    pub fn mul(&mut self, a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
        self.arith(ArithOp::Mul, a, b)
    }

    #[inline]
    pub fn div(&mut self, a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
        self.arith(ArithOp::Div, a, b)
    }

    /// Looks up a cache-resident value in the table and frees its slots.
    /// Table-resident inputs are returned unchanged.
    pub fn intern(&mut self, v: ComplexValue) -> Result<ComplexValue> {
        self.intern_with(v, false)
    }

    /// As [`intern`](Self::intern), admitting magnitudes above one.
    pub(crate) fn intern_unbounded(&mut self, v: ComplexValue) -> Result<ComplexValue> {
        self.intern_with(v, true)
    }

    fn intern_with(&mut self, v: ComplexValue, unbounded: bool) -> Result<ComplexValue> {
        match self.residency(v) {
            Residency::Table => Ok(v),
            Residency::Mixed => Err(Error::Contract(format!("mixed-residency value {v:?}"))),
            Residency::Cache => {
                let z = self.value(v);
                self.release(v);
                if unbounded {
                    self.lookup_complex_unbounded(z.re, z.im)
                } else {
                    self.lookup_complex(z.re, z.im)
                }
            }
        }
    }

    pub fn round_for_key(&self, v: ComplexValue) -> WeightKey {
        let step = 2.0 * self.epsilon();
        let z = self.value(v);
        // `as` saturates, so absurdly large weights still produce a key
        WeightKey {
            re: (z.re / step).round() as i64,
            im: (z.im / step).round() as i64,
        }
    }

    pub fn cache_stats(&self) -> CacheStats {
        self.cache_stats
    }

    #[inline]
    pub fn cache_in_use(&self) -> usize {
        self.cache_stats.in_use
    }

    /// Returns every outstanding slot to the pool. Used to recover after an
    /// operation aborted with an error.
    pub(crate) fn reset_cache(&mut self) {
        let outstanding = self.cache_stats.in_use as u64;
        for i in self.cache_begin..self.cache_end {
            let e = &mut self.entries[i as usize];
            e.refcount = 0;
            e.next = if i + 1 < self.cache_end { i + 1 } else { NIL };
        }
        self.cache_free = self.cache_begin;
        self.cache_stats.in_use = 0;
        self.cache_stats.releases += outstanding;
    }
}

impl RealHandle {
    #[inline]
    fn new_cached(index: u32) -> Self {
        // cache slots hold signed values; the tag stays positive
        RealHandle::new(index, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::TableMode;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    const EPS: f64 = 1e-13;

    fn numbers() -> ComplexNumbers {
        ComplexNumbers::new(EPS, 65536, 4, TableMode::Bucketed).unwrap()
    }

    #[test]
    fn arithmetic_stays_in_the_cache() {
        let mut cn = numbers();
        let h = cn.lookup_complex(FRAC_1_SQRT_2, 0.0).unwrap();
        let live = cn.live_entries();

        let p = cn.mul(h, h).unwrap();
        assert!(cn.is_cache_resident(p));
        assert_eq!(cn.value(p), Complex64::new(FRAC_1_SQRT_2 * FRAC_1_SQRT_2, 0.0));

        let s = cn.add(h, h).unwrap();
        assert_eq!(cn.value(s).re, 2.0 * FRAC_1_SQRT_2);
        assert!((cn.value(s).re - SQRT_2).abs() < 1e-15);

        let i = cn.lookup_complex(0.0, 1.0).unwrap();
        let q = cn.div(i, i).unwrap();
        assert_eq!(cn.value(q), Complex64::new(1.0, 0.0));

        assert_eq!(cn.live_entries(), live);
        cn.release(p);
        cn.release(s);
        cn.release(q);
        assert_eq!(cn.cache_in_use(), 0);
        let st = cn.cache_stats();
        assert_eq!(st.allocs, st.releases);
        assert_eq!(st.high_water, 3);
    }

    #[test]
    fn division_by_near_zero_fails() {
        let mut cn = numbers();
        let tiny = cn.cache_alloc(Complex64::new(EPS / 4.0, 0.0)).unwrap();
        let one = ComplexValue::ONE;
        assert!(matches!(cn.div(one, tiny), Err(Error::DivisionByZero { .. })));
        cn.release(tiny);
    }

    #[test]
    fn exhaustion_is_an_error() {
        let mut cn = numbers();
        let held: Vec<_> = (0..4).map(|_| cn.cache_alloc(Complex64::new(0.5, 0.5)).unwrap()).collect();
        assert!(matches!(
            cn.cache_alloc(Complex64::new(0.1, 0.0)),
            Err(Error::CacheExhausted { capacity: 4 })
        ));
        for v in held {
            cn.release(v);
        }
        assert!(cn.cache_alloc(Complex64::new(0.1, 0.0)).is_ok());
        cn.reset_cache();
        assert_eq!(cn.cache_in_use(), 0);
    }

    #[test]
    fn intern_collapses_nearby_values() {
        let mut cn = numbers();
        let a = cn.cache_alloc(Complex64::new(0.3, -0.4)).unwrap();
        let b = cn.cache_alloc(Complex64::new(0.3 + 3e-14, -0.4 - 2e-14)).unwrap();
        let ia = cn.intern(a).unwrap();
        let ib = cn.intern(b).unwrap();
        assert_eq!(ia, ib);
        assert!(cn.is_table_resident(ia));
        assert_eq!(cn.cache_in_use(), 0);

        let one = cn.cache_alloc(Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(cn.intern(one).unwrap(), ComplexValue::ONE);
    }

    #[test]
    fn key_rounding() {
        let mut cn = numbers();
        let a = cn.cache_alloc(Complex64::new(0.3, 0.2)).unwrap();
        let b = cn.cache_alloc(Complex64::new(0.3 + EPS / 2.0, 0.2)).unwrap();
        assert_eq!(cn.round_for_key(a), cn.round_for_key(b));
        let i = cn.lookup_complex(0.0, 1.0).unwrap();
        assert_ne!(cn.round_for_key(ComplexValue::ONE), cn.round_for_key(i));
        assert_eq!(cn.round_for_key(i), cn.round_for_key(i));
        cn.release(a);
        cn.release(b);
    }

    #[test]
    fn tag_ops_work_on_cache_values() {
        let mut cn = numbers();
        let v = cn.cache_alloc(Complex64::new(0.5, -0.5)).unwrap();
        let w = v.apply(crate::complex::TagOp::MulI);
        assert_eq!(cn.value(w), Complex64::new(0.5, 0.5));
        cn.release(v);
    }
}
