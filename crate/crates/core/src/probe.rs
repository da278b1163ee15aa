//! Query instrumentation. Query code is generic over [`Probe`]; the default
//! [`NoProbe`] compiles to nothing.

/// Counters collected while evaluating one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Endpoint comparisons against the query bounds.
    pub comparisons: u64,
    /// Partitions in which at least one comparison was executed.
    pub partitions_compared: u64,
    /// Ids reported.
    pub results: u64,
}

impl std::ops::AddAssign for QueryStats {
    fn add_assign(&mut self, o: Self) {
        self.comparisons += o.comparisons;
        self.partitions_compared += o.partitions_compared;
        self.results += o.results;
    }
}

pub trait Probe {
    /// `n` comparisons were spent in partition `offset` of `level`.
    fn partition_compared(&mut self, level: u32, offset: u32, n: u64);
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NoProbe;

impl Probe for NoProbe {
    #[inline(always)]
    fn partition_compared(&mut self, _level: u32, _offset: u32, _n: u64) {}
}

impl Probe for QueryStats {
    #[inline]
    fn partition_compared(&mut self, _level: u32, _offset: u32, n: u64) {
        if n > 0 {
            self.comparisons += n;
            self.partitions_compared += 1;
        }
    }
}

/// Records every partition in which comparisons were made.
#[derive(Debug, Default, Clone)]
pub struct TraceProbe {
    pub events: Vec<(u32, u32, u64)>,
}

impl Probe for TraceProbe {
    fn partition_compared(&mut self, level: u32, offset: u32, n: u64) {
        if n > 0 {
            self.events.push((level, offset, n));
        }
    }
}
