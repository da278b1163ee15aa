//! Reference implementations: a linear scan oracle and the uniform 1D-grid.

mod grid;

pub use grid::Grid1D;

use std::collections::HashMap;

use crate::domain::{Interval, QueryRange, RecordId};
use crate::error::{Error, Result};
use crate::probe::Probe;

/// Ids of all intervals overlapping `q`, in input order.
pub fn brute_force_query(intervals: &[Interval], q: &QueryRange) -> Vec<RecordId> {
    intervals.iter().filter(|s| s.overlaps(q)).map(|s| s.id).collect()
}

/// Linear scan over an updatable interval list.
#[derive(Debug, Clone, Default)]
pub struct BruteForce {
    intervals: Vec<Interval>,
    pos: HashMap<RecordId, usize>,
}

impl BruteForce {
    pub fn new(intervals: &[Interval]) -> Result<Self> {
        let mut b = BruteForce::default();
        for s in intervals {
            b.insert(*s)?;
        }
        Ok(b)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn insert(&mut self, s: Interval) -> Result<()> {
        if self.pos.contains_key(&s.id) {
            return Err(Error::DuplicateId(s.id));
        }
        self.pos.insert(s.id, self.intervals.len());
        self.intervals.push(s);
        Ok(())
    }

    pub fn delete(&mut self, id: RecordId) -> Result<()> {
        let k = self.pos.remove(&id).ok_or(Error::NotFound(id))?;
        self.intervals.swap_remove(k);
        if let Some(moved) = self.intervals.get(k) {
            self.pos.insert(moved.id, k);
        }
        Ok(())
    }

    pub fn range_query(&self, q: &QueryRange) -> Vec<RecordId> {
        brute_force_query(&self.intervals, q)
    }

    /// Every interval costs two comparisons at most, all in one partition.
    pub fn query_probed<P: Probe>(&self, q: &QueryRange, probe: &mut P, sink: &mut impl FnMut(RecordId)) {
        let mut cmps = 0;
        for s in &self.intervals {
            cmps += 1;
            if s.st <= q.end {
                cmps += 1;
                if q.st <= s.end {
                    sink(s.id);
                }
            }
        }
        probe.partition_compared(0, 0, cmps);
    }
}
