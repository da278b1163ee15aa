use crate::domain::{Interval, QueryRange, RecordId};
use crate::error::{Error, Result};
use crate::probe::{NoProbe, Probe, QueryStats};

/// Uniform 1D-grid: the raw domain is cut into `p` equal cells and every
/// interval is copied into each cell it overlaps. Duplicates are avoided at
/// query time with the reference value `max(s.st, q.st)`: an interval is
/// reported only by the cell that contains it.
#[derive(Debug, Clone)]
pub struct Grid1D {
    p: u64,
    min: u64,
    max: u64,
    /// `p + 1` positions into `entries`.
    cell_starts: Vec<u32>,
    entries: Vec<Interval>,
    n: usize,
}

impl Grid1D {
    /// Grid over the span of `intervals`.
    pub fn build(intervals: &[Interval], p: usize) -> Result<Self> {
        let min = intervals.iter().map(|s| s.st).min().unwrap_or(0);
        let max = intervals.iter().map(|s| s.end).max().unwrap_or(0);
        Self::build_over(intervals, p, min, max)
    }

    pub fn build_over(intervals: &[Interval], p: usize, min: u64, max: u64) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidParameter("grid needs at least one partition".into()));
        }
        if min > max {
            return Err(Error::InvalidParameter(format!("grid domain [{min}, {max}] is empty")));
        }
        let mut grid = Grid1D { p: p as u64, min, max, cell_starts: vec![0; p + 1], entries: Vec::new(), n: intervals.len() };
        for s in intervals {
            if s.st < min || s.end > max {
                return Err(Error::OutOfDomain { value: if s.st < min { s.st } else { s.end }, min, max });
            }
            for c in grid.cell_of(s.st)..=grid.cell_of(s.end) {
                grid.cell_starts[c + 1] += 1;
            }
        }
        for c in 0..p {
            grid.cell_starts[c + 1] += grid.cell_starts[c];
        }
        let mut fill = grid.cell_starts.clone();
        let mut entries = vec![Interval { id: RecordId(0), st: 0, end: 0 }; grid.cell_starts[p] as usize];
        for s in intervals {
            for c in grid.cell_of(s.st)..=grid.cell_of(s.end) {
                entries[fill[c] as usize] = *s;
                fill[c] += 1;
            }
        }
        grid.entries = entries;
        Ok(grid)
    }

    pub fn partitions(&self) -> usize {
        self.p as usize
    }

    /// `floor((x - min) * p / (span + 1))`; the last cell absorbs the maximum.
    #[inline]
    pub fn cell_of(&self, x: u64) -> usize {
        let width = u128::from(self.max - self.min) + 1;
        let c = (u128::from(x - self.min) * u128::from(self.p) / width) as u64;
        c.min(self.p - 1) as usize
    }

    /// First raw value of cell `c`.
    pub fn cell_start(&self, c: usize) -> u64 {
        let width = u128::from(self.max - self.min) + 1;
        let num = c as u128 * width;
        self.min + num.div_ceil(u128::from(self.p)) as u64
    }

    /// Last raw value of cell `c`.
    pub fn cell_end(&self, c: usize) -> u64 {
        if c + 1 == self.p as usize {
            self.max
        } else {
            self.cell_start(c + 1) - 1
        }
    }

    /// `p + 1` split points.
    pub fn bounds(&self) -> Vec<u64> {
        let mut b: Vec<u64> = (0..self.p as usize).map(|c| self.cell_start(c)).collect();
        b.push(self.max + 1);
        b
    }

    pub fn cell(&self, c: usize) -> &[Interval] {
        &self.entries[self.cell_starts[c] as usize..self.cell_starts[c + 1] as usize]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn total_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn replication(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.entries.len() as f64 / self.n as f64
        }
    }

    pub fn heap_bytes(&self) -> usize {
        4 * self.cell_starts.len() + std::mem::size_of::<Interval>() * self.entries.len()
    }

    pub fn range_query(&self, q: &QueryRange) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_with(q, |id| out.push(id));
        out
    }

    pub fn query_with(&self, q: &QueryRange, mut sink: impl FnMut(RecordId)) {
        self.query_probed(q, &mut NoProbe, &mut sink)
    }

    pub fn query_stats(&self, q: &QueryRange) -> QueryStats {
        let mut stats = QueryStats::default();
        let mut results = 0;
        self.query_probed(q, &mut stats, &mut |_| results += 1);
        stats.results = results;
        stats
    }

    pub fn query_probed<P: Probe>(&self, q: &QueryRange, probe: &mut P, sink: &mut impl FnMut(RecordId)) {
        if self.p == 0 || q.end < self.min || q.st > self.max {
            return;
        }
        let q = QueryRange { st: q.st.max(self.min), end: q.end.min(self.max) };
        let first = self.cell_of(q.st);
        let last = self.cell_of(q.end);
        for c in first..=last {
            let cell = self.cell(c);
            let (lo, hi) = (self.cell_start(c), self.cell_end(c));
            if c == first || c == last {
                // Boundary cell: full overlap test, then the reference value.
                let mut cmps = 0;
                for s in cell {
                    cmps += 2;
                    if s.overlaps(&q) {
                        let v = s.st.max(q.st);
                        cmps += 2;
                        if lo <= v && v <= hi {
                            sink(s.id);
                        }
                    }
                }
                probe.partition_compared(0, c as u32, cmps);
            } else {
                // Inner cell lies inside q; max(s.st, q.st) falls in this
                // cell iff s starts here.
                for s in cell {
                    if s.st >= lo {
                        sink(s.id);
                    }
                }
                probe.partition_compared(0, c as u32, cell.len() as u64);
            }
        }
    }
}
