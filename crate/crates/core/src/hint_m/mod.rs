//! HINT^m: hierarchical index over arbitrary integer domains.
//!
//! Raw endpoints are mapped onto `[0, 2^m - 1]` and each mapped interval is
//! placed with the same decomposition as the comparison-free index. Every
//! partition is split four ways:
//!
//! | subdivision | holds intervals that           | sorted by | columns kept |
//! |-------------|--------------------------------|-----------|--------------|
//! | `OIn`       | start and end in the partition | `st`      | id, st, end  |
//! | `OAft`      | start in it, end after it      | `st`      | id, st       |
//! | `RIn`       | start before it, end in it     | `end`     | id, end      |
//! | `RAft`      | start before it, end after it  | none      | id           |
//!
//! Routing uses mapped prefixes; every comparison uses raw endpoints against
//! the raw query, so mapping never introduces false hits.
//!
//! Queries walk the levels bottom-up. Comparisons are only needed in the
//! first and last relevant partition of a level, and stop being needed at
//! all levels above once the first (last) relevant offset is even (odd).

mod dynamic;
mod hybrid;
mod scan;
pub mod snapshot;

pub use dynamic::DynamicHintM;
pub use hybrid::{HybridIndex, DEFAULT_MERGE_THRESHOLD};

use std::collections::HashSet;

use crate::domain::{prefix, DomainMapper, Interval, QueryRange, RecordId};
use crate::error::{Error, Result};
use crate::hint::for_each_assignment;
use crate::layout::{Columnar, Columns, Cursor, Fields, RowMajor, Row, Table};
use crate::probe::{NoProbe, Probe, QueryStats};
use scan::ScanMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubdivisionKind {
    OIn = 0,
    OAft = 1,
    RIn = 2,
    RAft = 3,
}

impl SubdivisionKind {
    pub const ALL: [SubdivisionKind; 4] =
        [SubdivisionKind::OIn, SubdivisionKind::OAft, SubdivisionKind::RIn, SubdivisionKind::RAft];

    pub fn classify(original: bool, ends_inside: bool) -> Self {
        match (original, ends_inside) {
            (true, true) => SubdivisionKind::OIn,
            (true, false) => SubdivisionKind::OAft,
            (false, true) => SubdivisionKind::RIn,
            (false, false) => SubdivisionKind::RAft,
        }
    }

    pub fn is_original(self) -> bool {
        matches!(self, SubdivisionKind::OIn | SubdivisionKind::OAft)
    }

    /// Endpoint columns needed by queries.
    pub(crate) fn fields(self) -> Fields {
        match self {
            SubdivisionKind::OIn => Fields::BOTH,
            SubdivisionKind::OAft => Fields { st: true, end: false },
            SubdivisionKind::RIn => Fields { st: false, end: true },
            SubdivisionKind::RAft => Fields::NONE,
        }
    }
}

/// Layout switches of the query-optimized index. All on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Keep each subdivision sorted so boundary scans can stop early.
    pub sorted: bool,
    /// Drop endpoint columns a subdivision never compares.
    pub storage_opt: bool,
    /// Store ids in their own column instead of inside each row.
    pub ids_column: bool,
    /// Index only non-empty partitions, with links between levels.
    pub sparse_dir: bool,
    /// Sorted runs longer than this are binary searched.
    pub scan_threshold: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { sorted: true, storage_opt: true, ids_column: true, sparse_dir: true, scan_threshold: 32 }
    }
}

impl BuildOptions {
    pub fn unoptimized() -> Self {
        BuildOptions { sorted: false, storage_opt: false, ids_column: false, sparse_dir: false, scan_threshold: 32 }
    }

    /// Parses a comma-separated subset of `sorted,sopt,idscol,sparse`;
    /// named options are enabled, the rest disabled. `all` and `none` are accepted.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut o = Self::unoptimized();
        for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "sorted" => o.sorted = true,
                "sopt" => o.storage_opt = true,
                "idscol" => o.ids_column = true,
                "sparse" => o.sparse_dir = true,
                "all" => o = Self::default(),
                "none" => o = Self::unoptimized(),
                other => return Err(Error::InvalidParameter(format!("unknown index option `{other}`"))),
            }
        }
        Ok(o)
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.sorted {
            parts.push("sorted");
        }
        if self.storage_opt {
            parts.push("sopt");
        }
        if self.ids_column {
            parts.push("idscol");
        }
        if self.sparse_dir {
            parts.push("sparse");
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join("+")
        }
    }

    fn scan_mode(&self) -> ScanMode {
        ScanMode { sorted: self.sorted, threshold: self.scan_threshold }
    }
}

/// Entry counts gathered at build time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub n: usize,
    pub total_entries: u64,
    pub per_level: Vec<u64>,
    pub per_kind: [u64; 4],
    pub non_empty_partitions: u64,
}

impl BuildStats {
    /// Stored entries per indexed interval.
    pub fn replication(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.total_entries as f64 / self.n as f64
        }
    }
}

/// Physical entries, with and without those of tombstoned ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryCounts {
    pub total: u64,
    pub live: u64,
    pub live_ids: usize,
}

impl EntryCounts {
    pub fn live_replication(&self) -> f64 {
        if self.live_ids == 0 {
            0.0
        } else {
            self.live as f64 / self.live_ids as f64
        }
    }
}

type Level<C> = [Table<C>; 4];

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Store {
    Columnar(Vec<Level<Columnar>>),
    Rows(Vec<Level<RowMajor>>),
}

/// Query-optimized HINT^m. Immutable after build apart from tombstones.
#[derive(Debug, Clone)]
pub struct HintMIndex {
    mapper: DomainMapper,
    opts: BuildOptions,
    store: Store,
    tombstones: HashSet<RecordId>,
    stats: BuildStats,
}

/// Per-level rows, one vector per subdivision, in assignment order.
pub(crate) fn assign_rows(intervals: &[Interval], mapper: &DomainMapper) -> Result<Vec<[Vec<Row>; 4]>> {
    let m = mapper.levels();
    let mut seen = HashSet::with_capacity(intervals.len());
    let mut rows: Vec<[Vec<Row>; 4]> = (0..=m).map(|_| Default::default()).collect();
    for s in intervals {
        if s.id.is_reserved() {
            return Err(Error::ReservedId(s.id));
        }
        if !seen.insert(s.id) {
            return Err(Error::DuplicateId(s.id));
        }
        let (a, b) = mapper.map_interval(s)?;
        if a > b {
            return Err(Error::InvertedInterval { id: s.id, st: s.st, end: s.end });
        }
        for_each_assignment(a, b, m, |level, offset, original| {
            let inside = prefix(m, level, b) == offset;
            let kind = SubdivisionKind::classify(original, inside);
            rows[level as usize][kind as usize].push(Row { offset, id: s.id, st: s.st, end: s.end });
        });
    }
    Ok(rows)
}

fn layout_levels<C: Columns>(rows: &[[Vec<Row>; 4]], opts: &BuildOptions) -> Vec<Level<C>> {
    let mut levels: Vec<Level<C>> = rows
        .iter()
        .enumerate()
        .map(|(level, tables)| {
            std::array::from_fn(|k| {
                let kind = SubdivisionKind::ALL[k];
                let fields = if opts.storage_opt { kind.fields() } else { Fields::BOTH };
                Table::build(&tables[k], level as u32, fields, opts.sparse_dir)
            })
        })
        .collect();
    if opts.sparse_dir {
        for level in (1..levels.len()).rev() {
            let (above, below) = levels.split_at_mut(level);
            for k in 0..4 {
                below[0][k].dir.link_to(&above[level - 1][k].dir);
            }
        }
    }
    levels
}

fn sort_rows(rows: &mut [[Vec<Row>; 4]], sorted: bool) {
    for tables in rows.iter_mut() {
        for (k, t) in tables.iter_mut().enumerate() {
            match (sorted, SubdivisionKind::ALL[k]) {
                (true, SubdivisionKind::OIn | SubdivisionKind::OAft) => t.sort_by_key(|r| (r.offset, r.st)),
                (true, SubdivisionKind::RIn) => t.sort_by_key(|r| (r.offset, r.end)),
                _ => t.sort_by_key(|r| r.offset),
            }
        }
    }
}

impl HintMIndex {
    pub fn build(intervals: &[Interval], mapper: DomainMapper, opts: BuildOptions) -> Result<Self> {
        let mut rows = assign_rows(intervals, &mapper)?;
        sort_rows(&mut rows, opts.sorted);
        let store = if opts.ids_column {
            Store::Columnar(layout_levels(&rows, &opts))
        } else {
            Store::Rows(layout_levels(&rows, &opts))
        };
        Ok(Self::from_parts(mapper, opts, store, HashSet::new(), intervals.len()))
    }

    /// Builds over the span of `intervals` with `m` levels below the root.
    pub fn build_covering(intervals: &[Interval], m: u32, opts: BuildOptions) -> Result<Self> {
        Self::build(intervals, DomainMapper::covering(intervals, m)?, opts)
    }

    pub(crate) fn from_parts(
        mapper: DomainMapper,
        opts: BuildOptions,
        store: Store,
        tombstones: HashSet<RecordId>,
        n: usize,
    ) -> Self {
        let mut stats = BuildStats { n, per_level: vec![0; mapper.levels() as usize + 1], ..Default::default() };
        fn count<C: Columns>(levels: &[Level<C>], stats: &mut BuildStats) {
            for (l, level) in levels.iter().enumerate() {
                for (k, t) in level.iter().enumerate() {
                    let len = t.cols.len() as u64;
                    stats.per_level[l] += len;
                    stats.per_kind[k] += len;
                    stats.total_entries += len;
                    stats.non_empty_partitions += t.dir.non_empty() as u64;
                }
            }
        }
        match &store {
            Store::Columnar(levels) => count(levels, &mut stats),
            Store::Rows(levels) => count(levels, &mut stats),
        }
        HintMIndex { mapper, opts, store, tombstones, stats }
    }

    pub fn mapper(&self) -> &DomainMapper {
        &self.mapper
    }

    pub fn levels(&self) -> u32 {
        self.mapper.levels()
    }

    pub fn options(&self) -> &BuildOptions {
        &self.opts
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub(crate) fn store(&self) -> &Store {
        &self.store
    }

    pub fn tombstones(&self) -> &HashSet<RecordId> {
        &self.tombstones
    }

    /// Live (not deleted) interval count.
    pub fn len(&self) -> usize {
        self.stats.n - self.tombstones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn heap_bytes(&self) -> usize {
        match &self.store {
            Store::Columnar(levels) => levels.iter().flatten().map(Table::heap_bytes).sum(),
            Store::Rows(levels) => levels.iter().flatten().map(Table::heap_bytes).sum(),
        }
    }

    pub fn entry_counts(&self) -> EntryCounts {
        fn dead<C: Columns>(levels: &[Level<C>], tomb: &HashSet<RecordId>) -> u64 {
            levels
                .iter()
                .flatten()
                .map(|t| (0..t.cols.len()).filter(|&i| tomb.contains(&t.cols.id(i))).count() as u64)
                .sum()
        }
        let dead = if self.tombstones.is_empty() {
            0
        } else {
            match &self.store {
                Store::Columnar(l) => dead(l, &self.tombstones),
                Store::Rows(l) => dead(l, &self.tombstones),
            }
        };
        EntryCounts { total: self.stats.total_entries, live: self.stats.total_entries - dead, live_ids: self.len() }
    }

    /// Ids stored in one subdivision of one partition, in storage order.
    pub fn subdivision(&self, level: u32, offset: u32, kind: SubdivisionKind) -> Vec<RecordId> {
        fn get<C: Columns>(levels: &[Level<C>], level: u32, offset: u32, kind: SubdivisionKind) -> Vec<RecordId> {
            let t = &levels[level as usize][kind as usize];
            t.dir.partition(offset, &mut Cursor::default()).map(|i| t.cols.id(i)).collect()
        }
        match &self.store {
            Store::Columnar(l) => get(l, level, offset, kind),
            Store::Rows(l) => get(l, level, offset, kind),
        }
    }

    /// The optimized layout cannot take single inserts.
    pub fn insert(&mut self, _s: Interval) -> Result<()> {
        Err(Error::ImmutableIndex)
    }

    /// Logically deletes `id`; its entries stay in place until a rebuild.
    pub fn delete(&mut self, id: RecordId) -> Result<()> {
        if self.tombstones.contains(&id) || !self.stores_original(id) {
            return Err(Error::NotFound(id));
        }
        self.tombstones.insert(id);
        Ok(())
    }

    pub(crate) fn tombstone_unchecked(&mut self, id: RecordId) {
        self.tombstones.insert(id);
    }

    fn stores_original(&self, id: RecordId) -> bool {
        fn find<C: Columns>(levels: &[Level<C>], id: RecordId) -> bool {
            levels.iter().any(|lv| {
                lv[..2].iter().any(|t| (0..t.cols.len()).any(|i| t.cols.id(i) == id))
            })
        }
        match &self.store {
            Store::Columnar(l) => find(l, id),
            Store::Rows(l) => find(l, id),
        }
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

    /// Query with an arbitrary probe observing comparison work.
    pub fn query_probed<P: Probe>(&self, q: &QueryRange, probe: &mut P, sink: &mut impl FnMut(RecordId)) {
        let Some(q) = self.mapper.clamp_query(q) else {
            return;
        };
        if self.tombstones.is_empty() {
            self.dispatch(&q, probe, sink);
        } else {
            let tomb = &self.tombstones;
            self.dispatch(&q, probe, &mut |id| {
                if !tomb.contains(&id) {
                    sink(id)
                }
            });
        }
    }

    fn dispatch<P: Probe>(&self, q: &QueryRange, probe: &mut P, sink: &mut impl FnMut(RecordId)) {
        let mapped = (self.mapper.map_unchecked(q.st), self.mapper.map_unchecked(q.end));
        let mode = self.opts.scan_mode();
        match &self.store {
            Store::Columnar(levels) => query_levels(levels, self.levels(), mapped, q, mode, probe, sink),
            Store::Rows(levels) => query_levels(levels, self.levels(), mapped, q, mode, probe, sink),
        }
    }
}

/// Bottom-up evaluation over the four subdivisions of every level.
/// `q` is the raw query, already clamped; `mapped` its image in the index domain.
fn query_levels<C: Columns, P: Probe>(
    levels: &[Level<C>],
    m: u32,
    mapped: (u32, u32),
    q: &QueryRange,
    mode: ScanMode,
    probe: &mut P,
    sink: &mut impl FnMut(RecordId),
) {
    let mut comp_first = true;
    let mut comp_last = true;
    let mut cursors = [Cursor::default(); 4];
    for level in (0..=m).rev() {
        let [o_in, o_aft, r_in, r_aft] = &levels[level as usize];
        let f = prefix(m, level, mapped.0);
        let l = prefix(m, level, mapped.1);
        let single = f == l;
        let mut cmp_first = 0u64;
        let mut cmp_last = 0u64;

        let cols = &o_in.cols;
        o_in.dir.visit(f, l, &mut cursors[0], |off, rows| {
            if off == f {
                cmp_first += match (single, comp_first, comp_last) {
                    (true, true, true) => scan::overlap(cols, rows, q.st, q.end, mode, sink),
                    (true, false, true) => scan::st_le(cols, rows, q.end, mode, sink),
                    (_, true, _) => scan::end_ge_scan(cols, rows, q.st, sink),
                    _ => {
                        cols.emit(rows, sink);
                        0
                    }
                };
            } else if off == l && comp_last {
                cmp_last += scan::st_le(cols, rows, q.end, mode, sink);
            } else {
                cols.emit(rows, sink);
            }
        });

        let cols = &o_aft.cols;
        o_aft.dir.visit(f, l, &mut cursors[1], |off, rows| {
            if off == l && comp_last {
                let c = scan::st_le(cols, rows, q.end, mode, sink);
                if single {
                    cmp_first += c;
                } else {
                    cmp_last += c;
                }
            } else {
                cols.emit(rows, sink);
            }
        });

        let rows = r_in.dir.partition(f, &mut cursors[2]);
        if comp_first {
            cmp_first += scan::end_ge(&r_in.cols, rows, q.st, mode, sink);
        } else {
            r_in.cols.emit(rows, sink);
        }

        let rows = r_aft.dir.partition(f, &mut cursors[3]);
        r_aft.cols.emit(rows, sink);

        probe.partition_compared(level, f, cmp_first);
        if !single {
            probe.partition_compared(level, l, cmp_last);
        }
        if f & 1 == 0 {
            comp_first = false;
        }
        if l & 1 == 1 {
            comp_last = false;
        }
    }
}
