//! Shared domain model: records, closed intervals, queries and the mapping
//! of raw endpoints onto the `[0, 2^m - 1]` index domain.
//!
//! All intervals are closed at both ends. Half-open data `[st, end)` is
//! indexed as `[st, end - 1]`, and open data `(st, end)` as
//! `[st + 1, end - 1]`; queries are transformed the same way.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported level parameter. Level tables grow as `2^m`.
pub const MAX_LEVELS: u32 = 30;

/// Identifier of an indexed interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RecordId(pub u32);

impl RecordId {
    /// Never assigned to a live record.
    pub const RESERVED: RecordId = RecordId(u32::MAX);

    pub fn is_reserved(self) -> bool {
        self == Self::RESERVED
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for RecordId {
    fn from(v: u32) -> Self {
        RecordId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub id: RecordId,
    pub st: u64,
    pub end: u64,
}

impl Interval {
    pub fn new(id: impl Into<RecordId>, st: u64, end: u64) -> Result<Self> {
        let id = id.into();
        if st > end {
            return Err(Error::InvertedInterval { id, st, end });
        }
        Ok(Interval { id, st, end })
    }

    #[inline]
    pub fn overlaps(&self, q: &QueryRange) -> bool {
        self.st <= q.end && q.st <= self.end
    }

    pub fn len(&self) -> u64 {
        self.end - self.st + 1
    }
}

/// A closed query range; `st == end` is a stabbing query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QueryRange {
    pub st: u64,
    pub end: u64,
}

impl QueryRange {
    /// Swaps the endpoints if they are given in reverse.
    pub fn new(st: u64, end: u64) -> Self {
        if st <= end {
            QueryRange { st, end }
        } else {
            QueryRange { st: end, end: st }
        }
    }

    pub fn stab(x: u64) -> Self {
        QueryRange { st: x, end: x }
    }

    pub fn is_stabbing(&self) -> bool {
        self.st == self.end
    }
}

/// `prefix(k, x)` for a domain of `m` bits: the partition of `x` at level `k`.
#[inline(always)]
pub fn prefix(m: u32, k: u32, x: u32) -> u32 {
    debug_assert!(k <= m && m <= MAX_LEVELS);
    debug_assert!(u64::from(x) < 1u64 << m);
    x >> (m - k)
}

/// Linear rescaling of raw endpoints in `[min_x, max_x]` onto `[0, 2^m - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainMapper {
    min_x: u64,
    max_x: u64,
    m: u32,
}

impl DomainMapper {
    pub fn new(min_x: u64, max_x: u64, m: u32) -> Result<Self> {
        if m == 0 || m > MAX_LEVELS {
            return Err(Error::InvalidLevels(m));
        }
        if min_x > max_x {
            return Err(Error::InvalidParameter(format!(
                "domain minimum {min_x} exceeds maximum {max_x}"
            )));
        }
        Ok(DomainMapper { min_x, max_x, m })
    }

    /// Identity-like mapper for data already inside `[0, 2^m - 1]`.
    pub fn identity(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_LEVELS {
            return Err(Error::InvalidLevels(m));
        }
        Self::new(0, (1u64 << m) - 1, m)
    }

    /// Mapper spanning the smallest start and largest end of `intervals`.
    /// An empty input yields the degenerate domain `[0, 0]`.
    pub fn covering(intervals: &[Interval], m: u32) -> Result<Self> {
        let min = intervals.iter().map(|s| s.st).min().unwrap_or(0);
        let max = intervals.iter().map(|s| s.end).max().unwrap_or(0);
        Self::new(min, max, m)
    }

    pub fn min_x(&self) -> u64 {
        self.min_x
    }

    pub fn max_x(&self) -> u64 {
        self.max_x
    }

    pub fn levels(&self) -> u32 {
        self.m
    }

    /// Raw span `max - min`.
    pub fn span(&self) -> u64 {
        self.max_x - self.min_x
    }

    /// Bits needed to address the raw span (reported only).
    pub fn raw_bits(&self) -> u32 {
        64 - self.span().leading_zeros()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.min_x <= x && x <= self.max_x
    }

    pub fn map_value(&self, x: u64) -> Result<u32> {
        if !self.contains(x) {
            return Err(Error::OutOfDomain { value: x, min: self.min_x, max: self.max_x });
        }
        Ok(self.map_unchecked(x))
    }

    /// `floor((x - min) / (max - min) * (2^m - 1))`, evaluated exactly.
    #[inline]
    pub(crate) fn map_unchecked(&self, x: u64) -> u32 {
        let span = self.span();
        if span == 0 {
            return 0;
        }
        let top = (1u128 << self.m) - 1;
        ((u128::from(x - self.min_x) * top) / u128::from(span)) as u32
    }

    pub fn map_interval(&self, s: &Interval) -> Result<(u32, u32)> {
        Ok((self.map_value(s.st)?, self.map_value(s.end)?))
    }

    /// Restricts `q` to the raw domain; `None` if they do not intersect.
    pub fn clamp_query(&self, q: &QueryRange) -> Option<QueryRange> {
        if q.end < self.min_x || q.st > self.max_x {
            return None;
        }
        Some(QueryRange { st: q.st.max(self.min_x), end: q.end.min(self.max_x) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_worked_example() {
        let mp = DomainMapper::new(0, 63, 4).unwrap();
        assert_eq!(mp.map_value(21).unwrap(), 5);
        assert_eq!(mp.map_value(38).unwrap(), 9);
        assert_eq!(mp.map_value(63).unwrap(), 15);
        let s = Interval::new(0, 21, 38).unwrap();
        assert_eq!(mp.map_interval(&s).unwrap(), (5, 9));
        assert_eq!(mp.map_interval(&Interval::new(1, 0, 0).unwrap()).unwrap(), (0, 0));
    }

    #[test]
    fn degenerate_domain_maps_to_zero() {
        let mp = DomainMapper::new(7, 7, 4).unwrap();
        assert_eq!(mp.map_value(7).unwrap(), 0);
        assert_eq!(mp.raw_bits(), 0);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let mp = DomainMapper::new(10, 20, 4).unwrap();
        assert!(matches!(mp.map_value(9), Err(Error::OutOfDomain { .. })));
        assert!(matches!(mp.map_value(21), Err(Error::OutOfDomain { .. })));
        assert!(DomainMapper::new(0, 1, 0).is_err());
        assert!(DomainMapper::new(0, 1, 31).is_err());
        assert!(DomainMapper::new(5, 1, 4).is_err());
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(prefix(4, 3, 9), 9 / 2);
        assert_eq!(prefix(4, 4, 5), 5);
        assert_eq!(prefix(4, 0, 13), 0);
    }

    #[test]
    fn prefix_identifies_level_partitions_exhaustively() {
        for m in 1..=8u32 {
            for k in 0..=m {
                let width = 1u32 << (m - k);
                for x in 0..(1u32 << m) {
                    for y in 0..(1u32 << m) {
                        let same = x / width == y / width;
                        assert_eq!(prefix(m, k, x) == prefix(m, k, y), same);
                    }
                }
            }
        }
    }

    #[test]
    fn map_value_is_monotone_on_small_domains() {
        for (min, max) in [(0u64, 63u64), (3, 100), (1000, 1017), (0, 5)] {
            for m in 1..=8 {
                let mp = DomainMapper::new(min, max, m).unwrap();
                let mut prev = 0;
                for x in min..=max {
                    let v = mp.map_value(x).unwrap();
                    assert!(v >= prev);
                    assert!(u64::from(v) < 1 << m);
                    prev = v;
                }
                assert_eq!(mp.map_value(max).unwrap(), (1 << m) - 1);
            }
        }
    }

    #[test]
    fn clamp_query_handles_disjoint_ranges() {
        let mp = DomainMapper::new(10, 20, 4).unwrap();
        assert_eq!(mp.clamp_query(&QueryRange::new(0, 9)), None);
        assert_eq!(mp.clamp_query(&QueryRange::new(21, 30)), None);
        assert_eq!(mp.clamp_query(&QueryRange::new(5, 15)), Some(QueryRange { st: 10, end: 15 }));
    }

    #[test]
    fn inverted_interval_rejected() {
        assert!(matches!(Interval::new(3, 10, 5), Err(Error::InvertedInterval { .. })));
        assert_eq!(QueryRange::new(9, 5), QueryRange { st: 5, end: 9 });
    }
}
