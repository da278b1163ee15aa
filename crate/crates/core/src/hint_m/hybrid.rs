use std::collections::{BTreeMap, HashSet};

use crate::domain::{DomainMapper, Interval, QueryRange, RecordId};
use crate::error::{Error, Result};
use crate::probe::{NoProbe, Probe, QueryStats};

use super::{BuildOptions, DynamicHintM, HintMIndex};

/// Default delta size, relative to the main index, that triggers a merge.
pub const DEFAULT_MERGE_THRESHOLD: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Home {
    Main,
    Delta,
}

/// A query-optimized main index plus an update-friendly delta. Inserts go
/// to the delta; deletes tombstone whichever side holds the id; both sides
/// are probed per query. [`HybridIndex::flush_delta`] rebuilds the main
/// index from all live intervals.
#[derive(Debug, Clone)]
pub struct HybridIndex {
    main: HintMIndex,
    delta: DynamicHintM,
    records: BTreeMap<RecordId, (Interval, Home)>,
    deleted: HashSet<RecordId>,
    merge_threshold: f64,
}

impl HybridIndex {
    /// `merge_threshold` is the delta/main live-count ratio above which an
    /// insert triggers a flush; `f64::INFINITY` disables automatic flushes.
    pub fn new(intervals: &[Interval], mapper: DomainMapper, opts: BuildOptions, merge_threshold: f64) -> Result<Self> {
        if merge_threshold.is_nan() || merge_threshold < 0.0 {
            return Err(Error::InvalidParameter(format!("merge threshold {merge_threshold} must be >= 0")));
        }
        let main = HintMIndex::build(intervals, mapper, opts)?;
        let records = intervals.iter().map(|s| (s.id, (*s, Home::Main))).collect();
        Ok(HybridIndex { main, delta: DynamicHintM::new(mapper), records, deleted: HashSet::new(), merge_threshold })
    }

    pub fn main(&self) -> &HintMIndex {
        &self.main
    }

    pub fn delta(&self) -> &DynamicHintM {
        &self.delta
    }

    pub fn mapper(&self) -> &DomainMapper {
        self.main.mapper()
    }

    pub fn merge_threshold(&self) -> f64 {
        self.merge_threshold
    }

    /// Live interval count.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn contains(&self, id: RecordId) -> bool {
        self.records.contains_key(&id)
    }

    /// Physical entries in both indexes, tombstoned ones included.
    pub fn total_entries(&self) -> u64 {
        self.main.stats().total_entries + self.delta.total_entries()
    }

    pub fn heap_bytes(&self) -> usize {
        self.main.heap_bytes() + self.delta.heap_bytes()
    }

    pub fn live_intervals(&self) -> Vec<Interval> {
        self.records.values().map(|(s, _)| *s).collect()
    }

    pub fn insert(&mut self, s: Interval) -> Result<()> {
        if self.deleted.contains(&s.id) {
            return Err(Error::Tombstoned(s.id));
        }
        if self.records.contains_key(&s.id) {
            return Err(Error::DuplicateId(s.id));
        }
        self.delta.insert(s)?;
        self.records.insert(s.id, (s, Home::Delta));
        if self.delta.len() as f64 > self.merge_threshold * self.main.len() as f64 {
            self.flush_delta()?;
        }
        Ok(())
    }

    pub fn delete(&mut self, id: RecordId) -> Result<()> {
        let (_, home) = self.records.remove(&id).ok_or(Error::NotFound(id))?;
        match home {
            Home::Main => self.main.tombstone_unchecked(id),
            Home::Delta => self.delta.delete(id)?,
        }
        self.deleted.insert(id);
        Ok(())
    }

    /// Rebuilds the main index from every live interval and empties the
    /// delta. Tombstoned entries are dropped physically.
    pub fn flush_delta(&mut self) -> Result<()> {
        if self.delta.total_entries() == 0 && self.deleted.is_empty() {
            return Ok(());
        }
        let live: Vec<Interval> = self.records.values().map(|(s, _)| *s).collect();
        let mapper = *self.main.mapper();
        let main = HintMIndex::build(&live, mapper, *self.main.options())?;
        self.main = main;
        self.delta = DynamicHintM::new(mapper);
        self.deleted.clear();
        for (_, home) in self.records.values_mut() {
            *home = Home::Main;
        }
        Ok(())
    }

    pub fn range_query(&self, q: &QueryRange) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_with(q, |id| out.push(id));
        out
    }

    pub fn query_with(&self, q: &QueryRange, mut sink: impl FnMut(RecordId)) {
        self.query_probed(q, &mut NoProbe, &mut sink);
    }

    pub fn query_stats(&self, q: &QueryRange) -> QueryStats {
        let mut stats = QueryStats::default();
        let mut results = 0;
        self.query_probed(q, &mut stats, &mut |_| results += 1);
        stats.results = results;
        stats
    }

    pub fn query_probed<P: Probe>(&self, q: &QueryRange, probe: &mut P, sink: &mut impl FnMut(RecordId)) {
        self.main.query_probed(q, probe, sink);
        if !self.delta.is_empty() {
            self.delta.query_probed(q, probe, sink);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::brute_force_query;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<RecordId>) -> Vec<RecordId> {
        v.sort();
        v
    }

    fn data(n: u32, seed: u64) -> Vec<Interval> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let st = rng.random_range(0..1_000_000u64);
                Interval::new(i, st, (st + rng.random_range(0..50_000)).min(999_999)).unwrap()
            })
            .collect()
    }

    fn mapper() -> DomainMapper {
        DomainMapper::new(0, 999_999, 12).unwrap()
    }

    fn queries(k: usize, seed: u64) -> Vec<QueryRange> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..k)
            .map(|_| {
                let a = rng.random_range(0..1_000_000u64);
                QueryRange::new(a, a + rng.random_range(0..20_000))
            })
            .collect()
    }

    #[test]
    fn empty_delta_matches_main() {
        let d = data(2000, 1);
        let h = HybridIndex::new(&d, mapper(), BuildOptions::default(), DEFAULT_MERGE_THRESHOLD).unwrap();
        let main = HintMIndex::build(&d, mapper(), BuildOptions::default()).unwrap();
        for q in queries(100, 2) {
            assert_eq!(sorted(h.range_query(&q)), sorted(main.range_query(&q)));
        }
    }

    #[test]
    fn all_data_in_delta_matches_dynamic_index() {
        let d = data(2000, 3);
        let mut h = HybridIndex::new(&[], mapper(), BuildOptions::default(), f64::INFINITY).unwrap();
        for s in &d {
            h.insert(*s).unwrap();
        }
        assert!(h.main().is_empty());
        let dynamic = DynamicHintM::build(&d, mapper()).unwrap();
        for q in queries(100, 4) {
            assert_eq!(sorted(h.range_query(&q)), sorted(dynamic.range_query(&q)));
        }
    }

    #[test]
    fn deletes_and_inserts_match_rebuild_oracle() {
        let d = data(3000, 5);
        let (pre, rest) = d.split_at(2500);
        let mut h = HybridIndex::new(pre, mapper(), BuildOptions::default(), f64::INFINITY).unwrap();
        for s in rest {
            h.insert(*s).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut alive = d.clone();
        for _ in 0..400 {
            let k = rng.random_range(0..alive.len());
            let gone = alive.swap_remove(k);
            h.delete(gone.id).unwrap();
        }
        assert!(matches!(h.delete(RecordId(99_999)), Err(Error::NotFound(_))));
        let deleted = d.iter().find(|s| !alive.iter().any(|a| a.id == s.id)).unwrap();
        assert!(matches!(h.insert(*deleted), Err(Error::Tombstoned(_))));

        let qs = queries(200, 7);
        let before: Vec<_> = qs.iter().map(|q| sorted(h.range_query(q))).collect();
        for (q, got) in qs.iter().zip(&before) {
            assert_eq!(got, &sorted(brute_force_query(&alive, q)));
        }
        let entries_before = h.total_entries();
        h.flush_delta().unwrap();
        assert!(h.delta().is_empty());
        assert!(h.main().tombstones().is_empty());
        assert!(h.total_entries() < entries_before);
        for (q, want) in qs.iter().zip(&before) {
            assert_eq!(&sorted(h.range_query(q)), want);
        }
        // After a flush the deleted ids may be reused.
        h.insert(*deleted).unwrap();
    }

    #[test]
    fn delete_everything() {
        let d = data(500, 8);
        let mut h = HybridIndex::new(&d[..400], mapper(), BuildOptions::default(), f64::INFINITY).unwrap();
        for s in &d[400..] {
            h.insert(*s).unwrap();
        }
        for s in &d {
            h.delete(s.id).unwrap();
        }
        assert!(h.is_empty());
        for q in queries(50, 9) {
            assert!(h.range_query(&q).is_empty());
        }
    }

    #[test]
    fn flush_of_empty_delta_is_identity() {
        let d = data(1000, 10);
        let mut h = HybridIndex::new(&d, mapper(), BuildOptions::default(), DEFAULT_MERGE_THRESHOLD).unwrap();
        let bytes = h.heap_bytes();
        h.flush_delta().unwrap();
        assert_eq!(h.heap_bytes(), bytes);
        assert_eq!(h.main().stats().n, 1000);
    }

    #[test]
    fn flush_after_inserts_equals_rebuild_of_union() {
        let d = data(1200, 12);
        let mut h = HybridIndex::new(&d[..1000], mapper(), BuildOptions::default(), f64::INFINITY).unwrap();
        for s in &d[1000..] {
            h.insert(*s).unwrap();
        }
        h.flush_delta().unwrap();
        let rebuilt = HintMIndex::build(&d, mapper(), BuildOptions::default()).unwrap();
        assert_eq!(h.main().stats(), rebuilt.stats());
        for q in queries(100, 13) {
            assert_eq!(sorted(h.range_query(&q)), sorted(rebuilt.range_query(&q)));
        }
    }

    #[test]
    fn flush_drops_replicated_entries_of_deleted_ids() {
        let d = data(1000, 14);
        let mut h = HybridIndex::new(&d, mapper(), BuildOptions::default(), f64::INFINITY).unwrap();
        let victims = [RecordId(3), RecordId(50), RecordId(700)];
        let per_id: u64 = victims
            .iter()
            .map(|id| {
                let s = d[id.0 as usize];
                let (a, b) = mapper().map_interval(&s).unwrap();
                crate::hint::assign_partitions(a, b, 12).len() as u64
            })
            .sum();
        let before = h.total_entries();
        for id in victims {
            h.delete(id).unwrap();
        }
        assert_eq!(h.main().entry_counts().live, before - per_id);
        h.flush_delta().unwrap();
        assert_eq!(h.total_entries(), before - per_id);
    }

    #[test]
    fn automatic_flush_past_threshold() {
        let d = data(1100, 15);
        let mut h = HybridIndex::new(&d[..1000], mapper(), BuildOptions::default(), 0.05).unwrap();
        for s in &d[1000..1050] {
            h.insert(*s).unwrap();
        }
        assert_eq!(h.delta().len(), 50);
        h.insert(d[1050]).unwrap();
        assert!(h.delta().is_empty());
        assert_eq!(h.main().len(), 1051);
    }
}
