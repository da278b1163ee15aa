use std::collections::{BTreeMap, HashSet};

use crate::domain::{prefix, DomainMapper, Interval, QueryRange, RecordId};
use crate::error::{Error, Result};
use crate::hint::for_each_assignment;
use crate::probe::{NoProbe, Probe, QueryStats};

#[derive(Debug, Clone, Default)]
struct Partition {
    originals: Vec<Interval>,
    replicas: Vec<Interval>,
}

/// Update-friendly HINT^m: originals/replicas divisions only, unsorted,
/// full interval triples, partitions kept in ordered maps. Inserts append;
/// deletes are tombstones.
#[derive(Debug, Clone)]
pub struct DynamicHintM {
    mapper: DomainMapper,
    levels: Vec<BTreeMap<u32, Partition>>,
    live: HashSet<RecordId>,
    tombstones: HashSet<RecordId>,
    entries: u64,
}

impl DynamicHintM {
    pub fn new(mapper: DomainMapper) -> Self {
        DynamicHintM {
            levels: vec![BTreeMap::new(); mapper.levels() as usize + 1],
            mapper,
            live: HashSet::new(),
            tombstones: HashSet::new(),
            entries: 0,
        }
    }

    pub fn build(intervals: &[Interval], mapper: DomainMapper) -> Result<Self> {
        let mut idx = Self::new(mapper);
        for s in intervals {
            idx.insert(*s)?;
        }
        Ok(idx)
    }

    pub fn mapper(&self) -> &DomainMapper {
        &self.mapper
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn contains(&self, id: RecordId) -> bool {
        self.live.contains(&id)
    }

    pub fn is_tombstoned(&self, id: RecordId) -> bool {
        self.tombstones.contains(&id)
    }

    /// Stored entries, including those of deleted ids.
    pub fn total_entries(&self) -> u64 {
        self.entries
    }

    pub fn heap_bytes(&self) -> usize {
        let part = std::mem::size_of::<Partition>() + 8;
        self.levels
            .iter()
            .flat_map(|l| l.values())
            .map(|p| part + std::mem::size_of::<Interval>() * (p.originals.len() + p.replicas.len()))
            .sum()
    }

    /// Live intervals, in no particular order.
    pub fn live_intervals(&self) -> Vec<Interval> {
        self.levels
            .iter()
            .flat_map(|l| l.values())
            .flat_map(|p| p.originals.iter())
            .filter(|s| !self.tombstones.contains(&s.id))
            .copied()
            .collect()
    }

    /// Ids stored as (originals, replicas) in one partition.
    pub fn partition(&self, level: u32, offset: u32) -> (Vec<RecordId>, Vec<RecordId>) {
        match self.levels[level as usize].get(&offset) {
            Some(p) => (p.originals.iter().map(|s| s.id).collect(), p.replicas.iter().map(|s| s.id).collect()),
            None => (Vec::new(), Vec::new()),
        }
    }

    pub fn insert(&mut self, s: Interval) -> Result<()> {
        if s.id.is_reserved() {
            return Err(Error::ReservedId(s.id));
        }
        if self.tombstones.contains(&s.id) {
            return Err(Error::Tombstoned(s.id));
        }
        if self.live.contains(&s.id) {
            return Err(Error::DuplicateId(s.id));
        }
        let (a, b) = self.mapper.map_interval(&s)?;
        if a > b {
            return Err(Error::InvertedInterval { id: s.id, st: s.st, end: s.end });
        }
        let levels = &mut self.levels;
        let mut added = 0;
        for_each_assignment(a, b, self.mapper.levels(), |level, offset, original| {
            let p = levels[level as usize].entry(offset).or_default();
            if original {
                p.originals.push(s);
            } else {
                p.replicas.push(s);
            }
            added += 1;
        });
        self.entries += added;
        self.live.insert(s.id);
        Ok(())
    }

    pub fn delete(&mut self, id: RecordId) -> Result<()> {
        if !self.live.remove(&id) {
            return Err(Error::NotFound(id));
        }
        self.tombstones.insert(id);
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
        let Some(q) = self.mapper.clamp_query(q) else {
            return;
        };
        if self.tombstones.is_empty() {
            self.evaluate(&q, probe, sink);
        } else {
            let tomb = &self.tombstones;
            self.evaluate(&q, probe, &mut |id| {
                if !tomb.contains(&id) {
                    sink(id)
                }
            });
        }
    }

    /// Bottom-up evaluation over originals/replicas divisions.
    fn evaluate<P: Probe>(&self, q: &QueryRange, probe: &mut P, sink: &mut impl FnMut(RecordId)) {
        let m = self.mapper.levels();
        let qa = self.mapper.map_unchecked(q.st);
        let qb = self.mapper.map_unchecked(q.end);
        let mut comp_first = true;
        let mut comp_last = true;
        for level in (0..=m).rev() {
            let f = prefix(m, level, qa);
            let l = prefix(m, level, qb);
            for (&i, p) in self.levels[level as usize].range(f..=l) {
                let mut cmps = 0u64;
                if i == f {
                    if i == l && comp_first && comp_last {
                        for s in &p.originals {
                            cmps += 1;
                            if q.st <= s.end {
                                cmps += 1;
                                if s.st <= q.end {
                                    sink(s.id);
                                }
                            }
                        }
                        for s in &p.replicas {
                            cmps += 1;
                            if q.st <= s.end {
                                sink(s.id);
                            }
                        }
                    } else if i == l && comp_last {
                        for s in &p.originals {
                            cmps += 1;
                            if s.st <= q.end {
                                sink(s.id);
                            }
                        }
                        p.replicas.iter().for_each(|s| sink(s.id));
                    } else if comp_first {
                        for s in p.originals.iter().chain(&p.replicas) {
                            cmps += 1;
                            if q.st <= s.end {
                                sink(s.id);
                            }
                        }
                    } else {
                        p.originals.iter().chain(&p.replicas).for_each(|s| sink(s.id));
                    }
                } else if i == l && comp_last {
                    for s in &p.originals {
                        cmps += 1;
                        if s.st <= q.end {
                            sink(s.id);
                        }
                    }
                } else {
                    p.originals.iter().for_each(|s| sink(s.id));
                }
                probe.partition_compared(level, i, cmps);
            }
            if f & 1 == 0 {
                comp_first = false;
            }
            if l & 1 == 1 {
                comp_last = false;
            }
        }
    }
}
