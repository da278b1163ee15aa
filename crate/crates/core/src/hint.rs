//! Comparison-free HINT for discrete domains `[0, 2^m - 1]`.
//!
//! Each interval is decomposed into the smallest set of hierarchical
//! partitions that exactly covers it. Queries report whole partitions and
//! never look at an endpoint, so partitions store ids only.

use std::collections::HashSet;

use crate::domain::{prefix, Interval, QueryRange, RecordId, MAX_LEVELS};
use crate::error::{Error, Result};
use crate::layout::{Columnar, Columns, Cursor, Fields, Row, Table};
use crate::probe::{NoProbe, Probe, QueryStats};

/// Partition `offset` of level `level`; level 0 is the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionAddress {
    pub level: u32,
    pub offset: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub addr: PartitionAddress,
    /// The interval starts inside this partition.
    pub original: bool,
}

/// Bottom-up decomposition of `[st, end]` into at most two partitions per
/// level. Exactly one emitted partition is marked original: the one holding
/// `st`, i.e. the partition `p` at level `l` with `prefix(l, st) = p`.
#[inline]
pub(crate) fn for_each_assignment(st: u32, end: u32, m: u32, mut emit: impl FnMut(u32, u32, bool)) {
    debug_assert!(st <= end && u64::from(end) < 1u64 << m);
    let mut a = i64::from(st);
    let mut b = i64::from(end);
    let mut level = m as i64;
    while level >= 0 && a <= b {
        let lvl = level as u32;
        let home = i64::from(prefix(m, lvl, st));
        if a & 1 == 1 {
            emit(lvl, a as u32, a == home);
            a += 1;
        }
        if b & 1 == 0 {
            emit(lvl, b as u32, b == home);
            b -= 1;
        }
        a >>= 1;
        b >>= 1;
        level -= 1;
    }
}

/// Partitions (and original/replica role) an index-domain interval is stored in.
pub fn assign_partitions(st: u32, end: u32, m: u32) -> Vec<Assignment> {
    assert!(m <= MAX_LEVELS, "m = {m} exceeds {MAX_LEVELS}");
    assert!(st <= end && u64::from(end) < 1u64 << m, "[{st}, {end}] is not inside [0, 2^{m} - 1]");
    let mut out = Vec::new();
    for_each_assignment(st, end, m, |level, offset, original| {
        out.push(Assignment { addr: PartitionAddress { level, offset }, original })
    });
    out
}

#[derive(Debug, Clone)]
struct HintLevel {
    originals: Table<Columnar>,
    replicas: Table<Columnar>,
}

/// Comparison-free hierarchical interval index.
#[derive(Debug, Clone)]
pub struct HintIndex {
    m: u32,
    n: usize,
    levels: Vec<HintLevel>,
}

impl HintIndex {
    /// Builds with sparse per-level directories.
    pub fn build(intervals: &[Interval], m: u32) -> Result<Self> {
        Self::build_with(intervals, m, true)
    }

    /// `sparse = false` gives every partition of a level its own directory slot.
    pub fn build_with(intervals: &[Interval], m: u32, sparse: bool) -> Result<Self> {
        if m == 0 || m > MAX_LEVELS {
            return Err(Error::InvalidLevels(m));
        }
        let limit = 1u64 << m;
        let mut seen = HashSet::with_capacity(intervals.len());
        let mut orig_rows: Vec<Vec<Row>> = vec![Vec::new(); m as usize + 1];
        let mut repl_rows: Vec<Vec<Row>> = vec![Vec::new(); m as usize + 1];
        for s in intervals {
            if s.id.is_reserved() {
                return Err(Error::ReservedId(s.id));
            }
            if s.st > s.end {
                return Err(Error::InvertedInterval { id: s.id, st: s.st, end: s.end });
            }
            if s.end >= limit {
                return Err(Error::EndpointTooWide { value: s.end, m });
            }
            if !seen.insert(s.id) {
                return Err(Error::DuplicateId(s.id));
            }
            for_each_assignment(s.st as u32, s.end as u32, m, |level, offset, original| {
                let row = Row { offset, id: s.id, st: 0, end: 0 };
                if original {
                    orig_rows[level as usize].push(row);
                } else {
                    repl_rows[level as usize].push(row);
                }
            });
        }
        let levels = orig_rows
            .iter_mut()
            .zip(repl_rows.iter_mut())
            .enumerate()
            .map(|(level, (o, r))| {
                o.sort_by_key(|row| row.offset);
                r.sort_by_key(|row| row.offset);
                HintLevel {
                    originals: Table::build(o, level as u32, Fields::NONE, sparse),
                    replicas: Table::build(r, level as u32, Fields::NONE, sparse),
                }
            })
            .collect::<Vec<_>>();
        let mut index = HintIndex { m, n: intervals.len(), levels };
        if sparse {
            for level in (1..=m as usize).rev() {
                let (above, below) = index.levels.split_at_mut(level);
                let above = &above[level - 1];
                below[0].originals.dir.link_to(&above.originals.dir);
                below[0].replicas.dir.link_to(&above.replicas.dir);
            }
        }
        Ok(index)
    }

    pub fn levels(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Stored (id, partition) entries, originals plus replicas.
    pub fn total_entries(&self) -> usize {
        self.levels.iter().map(|l| l.originals.cols.len() + l.replicas.cols.len()).sum()
    }

    pub fn non_empty_partitions(&self) -> usize {
        self.levels.iter().map(|l| l.originals.dir.non_empty() + l.replicas.dir.non_empty()).sum()
    }

    pub fn heap_bytes(&self) -> usize {
        self.levels.iter().map(|l| l.originals.heap_bytes() + l.replicas.heap_bytes()).sum()
    }

    /// Original and replica ids stored in one partition.
    pub fn partition(&self, addr: PartitionAddress) -> (Vec<RecordId>, Vec<RecordId>) {
        let level = &self.levels[addr.level as usize];
        let collect = |t: &Table<Columnar>| {
            let r = t.dir.partition(addr.offset, &mut Cursor::default());
            t.cols.ids[r].to_vec()
        };
        (collect(&level.originals), collect(&level.replicas))
    }

    pub fn range_query(&self, q: &QueryRange) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_with(q, |id| out.push(id));
        out
    }

    pub fn query_stats(&self, q: &QueryRange) -> QueryStats {
        let mut stats = QueryStats::default();
        let mut results = 0;
        self.query_probed(q, &mut stats, &mut |_| results += 1);
        stats.results = results;
        stats
    }

    pub fn query_with(&self, q: &QueryRange, mut sink: impl FnMut(RecordId)) {
        self.query_probed(q, &mut NoProbe, &mut sink);
    }

    /// Relevant partitions per level; the first one contributes originals
    /// and replicas, the following ones originals only.
    pub fn query_probed<P: Probe>(&self, q: &QueryRange, _probe: &mut P, sink: &mut impl FnMut(RecordId)) {
        let top = (1u64 << self.m) - 1;
        if q.st > top {
            return;
        }
        let qst = q.st as u32;
        let qend = q.end.min(top) as u32;
        let mut ocur = Cursor::default();
        let mut rcur = Cursor::default();
        for level in (0..=self.m).rev() {
            let lv = &self.levels[level as usize];
            let f = prefix(self.m, level, qst);
            let l = prefix(self.m, level, qend);
            let rr = lv.replicas.dir.partition(f, &mut rcur);
            lv.replicas.cols.emit(rr, sink);
            let cols = &lv.originals.cols;
            lv.originals.dir.visit(f, l, &mut ocur, |_, rows| cols.emit(rows, sink));
        }
    }
}
