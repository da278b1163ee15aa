//! Benchmark harness behind the `hint-bench` binary: builds any index kind
//! over a dataset, times query and update workloads and writes CSV reports.
//!
//! Every query run folds the reported ids into a checksum that does not
//! depend on the order in which one query reports its results. Index kinds
//! answering the same workload must agree on it; [`check_checksums`] turns
//! disagreement into [`Error::ChecksumMismatch`].

mod report;
mod run;

pub use report::{BenchReport, CSV_HEADER, SCHEMA_LINE};
pub use run::{cmd_build, cmd_mixed, cmd_query, cmd_sweep, run_query_parallel, MixedOutcome, MixedScript};

use std::fmt;
use std::str::FromStr;

use crate::baselines::{BruteForce, Grid1D};
use crate::domain::{DomainMapper, Interval, QueryRange, RecordId};
use crate::error::{Error, Result};
use crate::hint::HintIndex;
use crate::hint_m::{BuildOptions, DynamicHintM, HintMIndex, HybridIndex, DEFAULT_MERGE_THRESHOLD};
use crate::probe::{NoProbe, Probe, QueryStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexKind {
    /// Linear scan.
    Brute,
    /// Uniform 1D-grid with `p` cells.
    Grid,
    /// Comparison-free HINT over `[0, 2^m - 1]`.
    Hint,
    /// Query-optimized HINT^m.
    HintM,
    /// Update-friendly HINT^m.
    Dynamic,
    /// HINT^m plus a dynamic delta.
    Hybrid,
}

impl IndexKind {
    pub const ALL: [IndexKind; 6] =
        [IndexKind::Brute, IndexKind::Grid, IndexKind::Hint, IndexKind::HintM, IndexKind::Dynamic, IndexKind::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            IndexKind::Brute => "brute",
            IndexKind::Grid => "grid",
            IndexKind::Hint => "hint",
            IndexKind::HintM => "hintm",
            IndexKind::Dynamic => "dynamic",
            IndexKind::Hybrid => "hybrid",
        }
    }

    /// Kinds parameterized by the number of levels.
    pub fn uses_levels(self) -> bool {
        matches!(self, IndexKind::Hint | IndexKind::HintM | IndexKind::Dynamic | IndexKind::Hybrid)
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IndexKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown index kind `{s}`")))
    }
}

/// Build parameters. Fields that do not apply to a kind are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexParams {
    pub m: u32,
    pub p: usize,
    pub opts: BuildOptions,
    /// Raw domain `[min, max]`; defaults to the span of the data.
    pub domain: Option<(u64, u64)>,
    pub merge_threshold: f64,
}

impl Default for IndexParams {
    fn default() -> Self {
        IndexParams { m: 10, p: 1000, opts: BuildOptions::default(), domain: None, merge_threshold: DEFAULT_MERGE_THRESHOLD }
    }
}

impl IndexParams {
    fn mapper(&self, data: &[Interval]) -> Result<DomainMapper> {
        match self.domain {
            Some((lo, hi)) => DomainMapper::new(lo, hi, self.m),
            None => DomainMapper::covering(data, self.m),
        }
    }

    fn grid(&self, data: &[Interval]) -> Result<Grid1D> {
        match self.domain {
            Some((lo, hi)) => Grid1D::build_over(data, self.p, lo, hi),
            None => Grid1D::build(data, self.p),
        }
    }
}

/// Any index the harness can drive.
#[derive(Debug, Clone)]
pub enum AnyIndex {
    Brute(BruteForce),
    Grid(Grid1D),
    Hint(HintIndex),
    HintM(HintMIndex),
    Dynamic(DynamicHintM),
    Hybrid(HybridIndex),
}

impl AnyIndex {
    pub fn build(kind: IndexKind, data: &[Interval], params: &IndexParams) -> Result<Self> {
        Ok(match kind {
            IndexKind::Brute => AnyIndex::Brute(BruteForce::new(data)?),
            IndexKind::Grid => AnyIndex::Grid(params.grid(data)?),
            IndexKind::Hint => AnyIndex::Hint(HintIndex::build(data, params.m)?),
            IndexKind::HintM => AnyIndex::HintM(HintMIndex::build(data, params.mapper(data)?, params.opts)?),
            IndexKind::Dynamic => AnyIndex::Dynamic(DynamicHintM::build(data, params.mapper(data)?)?),
            IndexKind::Hybrid => {
                AnyIndex::Hybrid(HybridIndex::new(data, params.mapper(data)?, params.opts, params.merge_threshold)?)
            }
        })
    }

    pub fn kind(&self) -> IndexKind {
        match self {
            AnyIndex::Brute(_) => IndexKind::Brute,
            AnyIndex::Grid(_) => IndexKind::Grid,
            AnyIndex::Hint(_) => IndexKind::Hint,
            AnyIndex::HintM(_) => IndexKind::HintM,
            AnyIndex::Dynamic(_) => IndexKind::Dynamic,
            AnyIndex::Hybrid(_) => IndexKind::Hybrid,
        }
    }

    pub fn levels(&self) -> Option<u32> {
        match self {
            AnyIndex::Hint(i) => Some(i.levels()),
            AnyIndex::HintM(i) => Some(i.levels()),
            AnyIndex::Dynamic(i) => Some(i.mapper().levels()),
            AnyIndex::Hybrid(i) => Some(i.mapper().levels()),
            _ => None,
        }
    }

    pub fn partitions(&self) -> Option<usize> {
        match self {
            AnyIndex::Grid(g) => Some(g.partitions()),
            _ => None,
        }
    }

    pub fn options(&self) -> Option<BuildOptions> {
        match self {
            AnyIndex::HintM(i) => Some(*i.options()),
            AnyIndex::Hybrid(i) => Some(*i.main().options()),
            _ => None,
        }
    }

    /// Live intervals.
    pub fn len(&self) -> usize {
        match self {
            AnyIndex::Brute(i) => i.len(),
            AnyIndex::Grid(i) => i.len(),
            AnyIndex::Hint(i) => i.len(),
            AnyIndex::HintM(i) => i.len(),
            AnyIndex::Dynamic(i) => i.len(),
            AnyIndex::Hybrid(i) => i.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn heap_bytes(&self) -> usize {
        match self {
            AnyIndex::Brute(i) => i.len() * std::mem::size_of::<Interval>(),
            AnyIndex::Grid(i) => i.heap_bytes(),
            AnyIndex::Hint(i) => i.heap_bytes(),
            AnyIndex::HintM(i) => i.heap_bytes(),
            AnyIndex::Dynamic(i) => i.heap_bytes(),
            AnyIndex::Hybrid(i) => i.heap_bytes(),
        }
    }

    /// Stored entries per live interval. Entries of tombstoned ids are left
    /// out for the query-optimized index and kept for the dynamic one.
    pub fn replication(&self) -> f64 {
        let ratio = |entries: u64, n: usize| if n == 0 { 0.0 } else { entries as f64 / n as f64 };
        match self {
            AnyIndex::Brute(i) => ratio(i.len() as u64, i.len()),
            AnyIndex::Grid(i) => i.replication(),
            AnyIndex::Hint(i) => ratio(i.total_entries() as u64, i.len()),
            AnyIndex::HintM(i) => i.entry_counts().live_replication(),
            AnyIndex::Dynamic(i) => ratio(i.total_entries(), i.len()),
            AnyIndex::Hybrid(i) => ratio(i.main().entry_counts().live + i.delta().total_entries(), i.len()),
        }
    }

    pub fn insert(&mut self, s: Interval) -> Result<()> {
        match self {
            AnyIndex::Brute(i) => i.insert(s),
            AnyIndex::HintM(i) => i.insert(s),
            AnyIndex::Dynamic(i) => i.insert(s),
            AnyIndex::Hybrid(i) => i.insert(s),
            AnyIndex::Grid(_) | AnyIndex::Hint(_) => Err(Error::ImmutableIndex),
        }
    }

    pub fn delete(&mut self, id: RecordId) -> Result<()> {
        match self {
            AnyIndex::Brute(i) => i.delete(id),
            AnyIndex::HintM(i) => i.delete(id),
            AnyIndex::Dynamic(i) => i.delete(id),
            AnyIndex::Hybrid(i) => i.delete(id),
            AnyIndex::Grid(_) | AnyIndex::Hint(_) => Err(Error::ImmutableIndex),
        }
    }

    #[inline]
    pub fn query_probed<P: Probe>(&self, q: &QueryRange, probe: &mut P, sink: &mut impl FnMut(RecordId)) {
        match self {
            AnyIndex::Brute(i) => i.query_probed(q, probe, sink),
            AnyIndex::Grid(i) => i.query_probed(q, probe, sink),
            AnyIndex::Hint(i) => i.query_probed(q, probe, sink),
            AnyIndex::HintM(i) => i.query_probed(q, probe, sink),
            AnyIndex::Dynamic(i) => i.query_probed(q, probe, sink),
            AnyIndex::Hybrid(i) => i.query_probed(q, probe, sink),
        }
    }

    pub fn query_with(&self, q: &QueryRange, mut sink: impl FnMut(RecordId)) {
        self.query_probed(q, &mut NoProbe, &mut sink);
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
}

#[inline]
fn mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Running checksum over a sequence of queries. Within one query the ids
/// are summed after mixing, so their order does not matter; the sequence
/// of queries is folded in order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Checksum {
    acc: u64,
    results: u64,
}

impl Checksum {
    /// Runs `q` on `index` and folds its answer.
    #[inline]
    pub fn fold_query(&mut self, index: &AnyIndex, q: &QueryRange) {
        let mut sum = 0u64;
        let mut count = 0u64;
        index.query_with(q, |id| {
            sum = sum.wrapping_add(mix(u64::from(id.0) + 1));
            count += 1;
        });
        self.fold(sum, count);
    }

    /// Folds one answer given as an id list.
    pub fn fold_ids(&mut self, ids: &[RecordId]) {
        let sum = ids.iter().fold(0u64, |s, id| s.wrapping_add(mix(u64::from(id.0) + 1)));
        self.fold(sum, ids.len() as u64);
    }

    #[inline]
    fn fold(&mut self, sum: u64, count: u64) {
        self.acc = mix(self.acc ^ sum ^ 0x9e37_79b9_7f4a_7c15).wrapping_add(count);
        self.results += count;
    }

    pub fn value(&self) -> u64 {
        self.acc
    }

    /// Total results folded so far.
    pub fn results(&self) -> u64 {
        self.results
    }
}

/// Fails if reports that carry a checksum disagree.
pub fn check_checksums(reports: &[BenchReport]) -> Result<()> {
    let sums: Vec<(String, u64)> = reports.iter().filter_map(|r| r.checksum.map(|c| (r.label(), c))).collect();
    if sums.windows(2).all(|w| w[0].1 == w[1].1) {
        return Ok(());
    }
    let detail = sums.iter().map(|(l, c)| format!("{l}={c:016x}")).collect::<Vec<_>>().join(", ");
    Err(Error::ChecksumMismatch(detail))
}
