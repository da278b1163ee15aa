//! Filtered scans over one subdivision. Each returns the number of endpoint
//! comparisons it executed.

use std::ops::Range;

use crate::domain::RecordId;
use crate::layout::Columns;

#[derive(Debug, Clone, Copy)]
pub(crate) struct ScanMode {
    /// Rows follow the per-subdivision sort order.
    pub sorted: bool,
    /// Sorted runs longer than this use binary search.
    pub threshold: usize,
}

/// First position in `rows` where `pred` turns false; `pred` must be
/// monotone (true then false).
#[inline]
fn partition_point_counted(rows: Range<usize>, pred: impl Fn(usize) -> bool) -> (usize, u64) {
    let (mut lo, mut hi) = (rows.start, rows.end);
    let mut cmps = 0;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        cmps += 1;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    (lo, cmps)
}

/// Reports rows with `end >= q_st`, scanning every row.
#[inline]
pub(crate) fn end_ge_scan<C: Columns>(cols: &C, rows: Range<usize>, q_st: u64, sink: &mut impl FnMut(RecordId)) -> u64 {
    let n = rows.len() as u64;
    for i in rows {
        if cols.end(i) >= q_st {
            sink(cols.id(i));
        }
    }
    n
}

/// Reports rows with `end >= q_st` in a run sorted by `end` when `mode.sorted`.
#[inline]
pub(crate) fn end_ge<C: Columns>(
    cols: &C,
    rows: Range<usize>,
    q_st: u64,
    mode: ScanMode,
    sink: &mut impl FnMut(RecordId),
) -> u64 {
    if !mode.sorted {
        return end_ge_scan(cols, rows, q_st, sink);
    }
    let end = rows.end;
    let (cut, cmps) = if rows.len() > mode.threshold {
        partition_point_counted(rows, |i| cols.end(i) < q_st)
    } else {
        let mut k = rows.start;
        let mut cmps = 0;
        while k < end {
            cmps += 1;
            if cols.end(k) >= q_st {
                break;
            }
            k += 1;
        }
        (k, cmps)
    };
    cols.emit(cut..end, sink);
    cmps
}

/// Reports rows with `st <= q_end` in a run sorted by `st` when `mode.sorted`.
#[inline]
pub(crate) fn st_le<C: Columns>(
    cols: &C,
    rows: Range<usize>,
    q_end: u64,
    mode: ScanMode,
    sink: &mut impl FnMut(RecordId),
) -> u64 {
    if !mode.sorted {
        let n = rows.len() as u64;
        for i in rows {
            if cols.st(i) <= q_end {
                sink(cols.id(i));
            }
        }
        return n;
    }
    let start = rows.start;
    let (cut, cmps) = if rows.len() > mode.threshold {
        partition_point_counted(rows, |i| cols.st(i) <= q_end)
    } else {
        let mut k = rows.start;
        let mut cmps = 0;
        while k < rows.end {
            cmps += 1;
            if cols.st(k) > q_end {
                break;
            }
            k += 1;
        }
        (k, cmps)
    };
    cols.emit(start..cut, sink);
    cmps
}

/// Reports rows with `st <= q_end && end >= q_st` in a run sorted by `st`
/// when `mode.sorted`.
#[inline]
pub(crate) fn overlap<C: Columns>(
    cols: &C,
    rows: Range<usize>,
    q_st: u64,
    q_end: u64,
    mode: ScanMode,
    sink: &mut impl FnMut(RecordId),
) -> u64 {
    let mut cmps = 0;
    if !mode.sorted {
        for i in rows {
            cmps += 1;
            if cols.st(i) <= q_end {
                cmps += 1;
                if cols.end(i) >= q_st {
                    sink(cols.id(i));
                }
            }
        }
        return cmps;
    }
    let start = rows.start;
    let cut = if rows.len() > mode.threshold {
        let (cut, c) = partition_point_counted(rows, |i| cols.st(i) <= q_end);
        cmps += c;
        cut
    } else {
        let mut k = rows.start;
        while k < rows.end {
            cmps += 1;
            if cols.st(k) > q_end {
                break;
            }
            k += 1;
        }
        k
    };
    cmps + end_ge_scan(cols, start..cut, q_st, sink)
}
