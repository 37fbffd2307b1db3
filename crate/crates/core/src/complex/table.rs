use super::{
    ComplexNumbers, ComplexValue, RealEntry, RealHandle, ENTRY_BLOCK, NIL, ONE_INDEX,
    REF_SATURATED, ZERO_INDEX,
};
use crate::error::{Error, Result};

/// How the lookup table searches for a matching real.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum TableMode {
    /// `N` equal-width buckets over `[0, 1]`, with a neighbor-bucket probe
    /// when `r ± ε` crosses a bucket border.
    #[default]
    Bucketed,
    /// Every lookup scans all live entries in insertion order. Baseline for
    /// benchmarking only.
    LinearScan,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TableStats {
    pub live_entries: usize,
    pub peak_entries: usize,
    pub lookups: u64,
    pub hits: u64,
    pub inserts: u64,
    /// Lookups that had to probe an adjacent bucket.
    pub neighbor_searches: u64,
    /// Entry comparisons made while walking chains.
    pub comparisons: u64,
    pub collected: u64,
}

impl ComplexNumbers {
    /// Interns a signed real with `|r| ≤ 1 + ε`.
    ///
    /// Returns the first entry found within `ε` of `|r|` (target bucket first,
    /// then at most one neighbor), inserting `|r|` otherwise. The sign of `r`
    /// goes into the handle.
    pub fn lookup_real(&mut self, r: f64) -> Result<RealHandle> {
        if !r.is_finite() {
            return Err(Error::NonFinite { re: r, im: 0.0 });
        }
        let limit = 1.0 + self.epsilon;
        if r.abs() > limit {
            return Err(Error::OutOfRange { value: r, limit });
        }
        Ok(self.lookup_signed(r))
    }

    pub fn lookup_complex(&mut self, re: f64, im: f64) -> Result<ComplexValue> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite { re, im });
        }
        Ok(ComplexValue {
            re: self.lookup_real(re)?,
            im: self.lookup_real(im)?,
        })
    }

    pub(crate) fn lookup_complex_unbounded(&mut self, re: f64, im: f64) -> Result<ComplexValue> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite { re, im });
        }
        Ok(ComplexValue {
            re: self.lookup_signed(re),
            im: self.lookup_signed(im),
        })
    }

    fn lookup_signed(&mut self, r: f64) -> RealHandle {
        self.table_stats.lookups += 1;
        let a = r.abs();
        if a <= self.epsilon {
            self.table_stats.hits += 1;
            return RealHandle::ZERO;
        }
        if (a - 1.0).abs() <= self.epsilon {
            self.table_stats.hits += 1;
            return RealHandle::new(ONE_INDEX, r < 0.0);
        }
        let index = match self.mode {
            TableMode::Bucketed => self.find_or_insert_bucketed(a),
            TableMode::LinearScan => self.find_or_insert_linear(a),
        };
        RealHandle::new(index, r < 0.0)
    }

    #[inline]
    pub(crate) fn bucket_of(&self, a: f64) -> usize {
        let n = self.buckets.len();
        ((a * n as f64) as usize).min(n - 1)
    }

    fn scan_chain(&mut self, bucket: usize, a: f64) -> Option<u32> {
        let mut cur = self.buckets[bucket];
        while cur != NIL {
            let e = &self.entries[cur as usize];
            self.table_stats.comparisons += 1;
            if (e.value - a).abs() <= self.epsilon {
                return Some(cur);
            }
            cur = e.next;
        }
        None
    }

    fn find_or_insert_bucketed(&mut self, a: f64) -> u32 {
        let n = self.buckets.len();
        let b = self.bucket_of(a);
        if let Some(i) = self.scan_chain(b, a) {
            self.table_stats.hits += 1;
            return i;
        }
        let width = 1.0 / n as f64;
        let lower = b as f64 * width;
        let upper = (b + 1) as f64 * width;
        let neighbor = if b > 0 && a - self.epsilon < lower {
            Some(b - 1)
        } else if b + 1 < n && a + self.epsilon >= upper {
            Some(b + 1)
        } else {
            None
        };
        if let Some(nb) = neighbor {
            self.table_stats.neighbor_searches += 1;
            if let Some(i) = self.scan_chain(nb, a) {
                self.table_stats.hits += 1;
                return i;
            }
        }
        let idx = self.alloc_entry(a);
        self.entries[idx as usize].next = self.buckets[b];
        self.buckets[b] = idx;
        idx
    }

    fn find_or_insert_linear(&mut self, a: f64) -> u32 {
        for &i in &self.linear {
            self.table_stats.comparisons += 1;
            if (self.entries[i as usize].value - a).abs() <= self.epsilon {
                self.table_stats.hits += 1;
                return i;
            }
        }
        let idx = self.alloc_entry(a);
        self.linear.push(idx);
        idx
    }

    fn alloc_entry(&mut self, value: f64) -> u32 {
        if self.free_head == NIL {
            let start = self.entries.len() as u32;
            let end = start + ENTRY_BLOCK as u32;
            self.entries.reserve(ENTRY_BLOCK);
            for i in start..end {
                let next = if i + 1 < end { i + 1 } else { NIL };
                self.entries.push(RealEntry {
                    next,
                    ..RealEntry::EMPTY
                });
            }
            self.free_head = start;
        }
        let idx = self.free_head;
        let e = &mut self.entries[idx as usize];
        self.free_head = e.next;
        *e = RealEntry {
            value,
            refcount: 0,
            next: NIL,
        };
        let stats = &mut self.table_stats;
        stats.inserts += 1;
        stats.live_entries += 1;
        stats.peak_entries = stats.peak_entries.max(stats.live_entries);
        idx
    }

    fn free_entry(&mut self, idx: u32) {
        let e = &mut self.entries[idx as usize];
        e.value = f64::NAN;
        e.next = self.free_head;
        self.free_head = idx;
        self.table_stats.live_entries -= 1;
        self.table_stats.collected += 1;
    }

    /// Moves every unreferenced entry (other than 0 and 1) to the free list.
    pub fn table_gc(&mut self) -> usize {
        let mut collected = Vec::new();
        match self.mode {
            TableMode::Bucketed => {
                for b in 0..self.buckets.len() {
                    let mut prev = NIL;
                    let mut cur = self.buckets[b];
                    while cur != NIL {
                        let next = self.entries[cur as usize].next;
                        if self.entries[cur as usize].refcount == 0 {
                            if prev == NIL {
                                self.buckets[b] = next;
                            } else {
                                self.entries[prev as usize].next = next;
                            }
                            collected.push(cur);
                        } else {
                            prev = cur;
                        }
                        cur = next;
                    }
                }
            }
            TableMode::LinearScan => {
                let entries = &self.entries;
                self.linear.retain(|&i| {
                    if entries[i as usize].refcount == 0 {
                        collected.push(i);
                        false
                    } else {
                        true
                    }
                });
            }
        }
        for &i in &collected {
            self.free_entry(i);
        }
        collected.len()
    }

    pub(crate) fn inc_entry(&mut self, h: RealHandle) -> Result<()> {
        let idx = h.index();
        if self.is_cache_index(idx) {
            return Err(Error::Contract(format!(
                "reference to cache slot {idx} cannot be counted"
            )));
        }
        let e = &mut self.entries[idx as usize];
        if e.refcount != REF_SATURATED {
            e.refcount += 1;
        }
        Ok(())
    }

    pub(crate) fn dec_entry(&mut self, h: RealHandle) -> Result<()> {
        let idx = h.index();
        if self.is_cache_index(idx) {
            return Err(Error::Contract(format!(
                "reference to cache slot {idx} cannot be counted"
            )));
        }
        let e = &mut self.entries[idx as usize];
        match e.refcount {
            REF_SATURATED => Ok(()),
            0 => Err(Error::Contract(format!(
                "reference count of real entry {idx} ({}) would drop below zero",
                e.value
            ))),
            _ => {
                e.refcount -= 1;
                Ok(())
            }
        }
    }

    pub(crate) fn inc_complex(&mut self, c: ComplexValue) -> Result<()> {
        self.inc_entry(c.re)?;
        self.inc_entry(c.im)
    }

    pub(crate) fn dec_complex(&mut self, c: ComplexValue) -> Result<()> {
        self.dec_entry(c.re)?;
        self.dec_entry(c.im)
    }

    pub fn refcount(&self, h: RealHandle) -> u32 {
        self.entries[h.index() as usize].refcount
    }

    pub fn table_stats(&self) -> TableStats {
        self.table_stats
    }

    pub fn live_entries(&self) -> usize {
        self.table_stats.live_entries
    }

    /// `(entry index, value, bucket)` for every live table entry; the bucket
    /// is `None` in linear-scan mode.
    pub fn live_table_entries(&self) -> Vec<(u32, f64, Option<usize>)> {
        let mut out = Vec::with_capacity(self.table_stats.live_entries);
        match self.mode {
            TableMode::Bucketed => {
                for (b, &head) in self.buckets.iter().enumerate() {
                    let mut cur = head;
                    while cur != NIL {
                        let e = &self.entries[cur as usize];
                        out.push((cur, e.value, Some(b)));
                        cur = e.next;
                    }
                }
            }
            TableMode::LinearScan => {
                for &i in &self.linear {
                    out.push((i, self.entries[i as usize].value, None));
                }
            }
        }
        out
    }

    /// Full scan of the table invariants: pairwise separation above `ε`,
    /// bucket residency and the live-entry count.
    pub fn check_table_invariants(&self) -> std::result::Result<(), String> {
        let live = self.live_table_entries();
        if live.len() != self.table_stats.live_entries {
            return Err(format!(
                "live count {} but {} entries reachable",
                self.table_stats.live_entries,
                live.len()
            ));
        }
        let mut seen_zero = false;
        let mut seen_one = false;
        for &(idx, v, bucket) in &live {
            seen_zero |= idx == ZERO_INDEX;
            seen_one |= idx == ONE_INDEX;
            if v.is_nan() || v < 0.0 {
                return Err(format!("entry {idx} holds negative or NaN value {v}"));
            }
            if let Some(b) = bucket {
                if b != self.bucket_of(v) {
                    return Err(format!(
                        "entry {idx} = {v} in bucket {b}, expected {}",
                        self.bucket_of(v)
                    ));
                }
            }
        }
        if !seen_zero || !seen_one {
            return Err("canonical 0 or 1 missing from the table".into());
        }
        let mut values: Vec<f64> = live.iter().map(|e| e.1).collect();
        values.sort_by(f64::total_cmp);
        for w in values.windows(2) {
            if w[1] - w[0] <= self.epsilon {
                return Err(format!(
                    "entries {} and {} are within epsilon {}",
                    w[0], w[1], self.epsilon
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-13;

    fn table(mode: TableMode) -> ComplexNumbers {
        ComplexNumbers::new(EPS, 65536, 8, mode).unwrap()
    }

    fn brute_force_matches(cn: &ComplexNumbers, a: f64) -> Vec<u32> {
        cn.live_table_entries()
            .into_iter()
            .filter(|&(_, v, _)| (v - a).abs() <= EPS)
            .map(|e| e.0)
            .collect()
    }

    #[test]
    fn zero_is_canonical_and_positive() {
        let mut cn = table(TableMode::Bucketed);
        assert_eq!(cn.lookup_real(0.0).unwrap(), RealHandle::ZERO);
        assert_eq!(cn.lookup_real(-0.0).unwrap(), RealHandle::ZERO);
        assert_eq!(cn.lookup_real(-EPS / 2.0).unwrap(), RealHandle::ZERO);
        assert_eq!(cn.lookup_real(1.0 - EPS / 2.0).unwrap(), RealHandle::ONE);
        assert_eq!(cn.lookup_real(-1.0).unwrap(), RealHandle::MINUS_ONE);
        assert_eq!(cn.live_entries(), 2);
    }

    #[test]
    fn tolerance_match_carries_sign() {
        let mut cn = table(TableMode::Bucketed);
        let v = std::f64::consts::FRAC_1_SQRT_2;
        let pos = cn.lookup_real(v).unwrap();
        let neg = cn.lookup_real(-(v + 1e-14)).unwrap();
        assert_eq!(pos.index(), neg.index());
        assert!(!pos.is_negative());
        assert!(neg.is_negative());
        assert_eq!(cn.live_entries(), 3);
    }

    #[test]
    fn neighbor_bucket_is_searched() {
        let mut cn = table(TableMode::Bucketed);
        let border = 1.0 / 65536.0;
        let r1 = border - 2e-14;
        let r2 = border + 2e-14;
        assert_eq!(cn.bucket_of(r1), 0);
        assert_eq!(cn.bucket_of(r2), 1);
        let h1 = cn.lookup_real(r1).unwrap();
        assert_eq!(brute_force_matches(&cn, r2), vec![h1.index()]);
        let before = cn.table_stats().neighbor_searches;
        let h2 = cn.lookup_real(r2).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(cn.table_stats().neighbor_searches, before + 1);
        assert_eq!(cn.live_entries(), 3);
    }

    #[test]
    fn out_of_range_names_the_value() {
        let mut cn = table(TableMode::Bucketed);
        match cn.lookup_real(1.5) {
            Err(Error::OutOfRange { value, .. }) => assert_eq!(value, 1.5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(cn.lookup_real(-1.0 - 2.0 * EPS).is_err());
        assert!(cn.lookup_real(f64::NAN).is_err());
        assert!(cn.lookup_complex_unbounded(1.5, 0.0).is_ok());
    }

    #[test]
    fn values_above_one_live_in_the_last_bucket() {
        let mut cn = table(TableMode::Bucketed);
        let c = cn.lookup_complex_unbounded(std::f64::consts::SQRT_2, 0.0).unwrap();
        assert_eq!(cn.real(c.re), std::f64::consts::SQRT_2);
        cn.check_table_invariants().unwrap();
    }

    #[test]
    fn gc_keeps_referenced_and_canonical_entries() {
        let mut cn = table(TableMode::Bucketed);
        assert_eq!(cn.table_gc(), 0);
        let kept = cn.lookup_real(0.25).unwrap();
        cn.inc_entry(kept).unwrap();
        cn.lookup_real(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert_eq!(cn.table_gc(), 1);
        assert_eq!(cn.live_entries(), 3);
        cn.check_table_invariants().unwrap();
        cn.dec_entry(kept).unwrap();
        assert!(cn.dec_entry(kept).is_err());
        assert_eq!(cn.table_gc(), 1);
        assert_eq!(cn.live_entries(), 2);
        // freed storage is reused
        let len = cn.entries.len();
        cn.lookup_real(0.3).unwrap();
        assert_eq!(cn.entries.len(), len);
    }

    #[test]
    fn linear_scan_agrees_with_buckets() {
        let mut a = table(TableMode::Bucketed);
        let mut b = table(TableMode::LinearScan);
        let vals = [0.5, 0.5 + 1e-14, 0.25, -0.25, 1.0 / 65536.0, 0.9999, 0.125];
        for &v in &vals {
            let ha = a.lookup_real(v).unwrap();
            let hb = b.lookup_real(v).unwrap();
            assert_eq!(a.real(ha), b.real(hb));
        }
        assert_eq!(a.live_entries(), b.live_entries());
        b.check_table_invariants().unwrap();
        assert_eq!(b.table_gc(), a.table_gc());
    }

    #[test]
    fn saturated_entries_are_immortal() {
        let mut cn = table(TableMode::Bucketed);
        let h = cn.lookup_real(0.4).unwrap();
        cn.entries[h.index() as usize].refcount = REF_SATURATED - 1;
        cn.inc_entry(h).unwrap();
        for _ in 0..10 {
            cn.dec_entry(h).unwrap();
        }
        assert_eq!(cn.refcount(h), REF_SATURATED);
        assert_eq!(cn.table_gc(), 0);
    }
}
