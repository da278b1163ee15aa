//! Physical layout shared by the hierarchical indexes.
//!
//! Every (level, division) pair is one [`Table`]: the rows of all its
//! partitions stored back to back, ordered by partition offset, plus a
//! [`Directory`] mapping partition offsets to row ranges. A sparse directory
//! lists only non-empty partitions and links each of them to the level above;
//! a dense directory has one slot per partition of the level.

use std::ops::Range;

use crate::domain::RecordId;

pub(crate) const NO_LINK: u32 = u32::MAX;

/// A row as produced by the assignment step, before it is laid out.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Row {
    pub offset: u32,
    pub id: RecordId,
    pub st: u64,
    pub end: u64,
}

/// Which endpoint fields a table keeps next to the ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Fields {
    pub st: bool,
    pub end: bool,
}

impl Fields {
    pub const NONE: Fields = Fields { st: false, end: false };
    pub const BOTH: Fields = Fields { st: true, end: true };
}

/// Position of the first relevant partition found at the previous level, as
/// a link into the current level's directory.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Cursor {
    link: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Directory {
    Sparse {
        offsets: Vec<u32>,
        /// `offsets.len() + 1` row positions.
        starts: Vec<u32>,
        /// Index into the level above of the first non-empty partition with
        /// offset `>= offset / 2`, or `NO_LINK`.
        up: Vec<u32>,
    },
    Dense {
        /// `2^level + 1` row positions.
        starts: Vec<u32>,
    },
}

impl Directory {
    /// `rows` must be sorted by offset.
    pub fn build(rows: &[Row], level: u32, sparse: bool) -> Directory {
        if sparse {
            let mut offsets = Vec::new();
            let mut starts = Vec::new();
            for (pos, r) in rows.iter().enumerate() {
                if offsets.last() != Some(&r.offset) {
                    offsets.push(r.offset);
                    starts.push(pos as u32);
                }
            }
            starts.push(rows.len() as u32);
            let up = vec![NO_LINK; offsets.len()];
            Directory::Sparse { offsets, starts, up }
        } else {
            let parts = 1usize << level;
            let mut starts = vec![0u32; parts + 1];
            for r in rows {
                starts[r.offset as usize + 1] += 1;
            }
            for i in 0..parts {
                starts[i + 1] += starts[i];
            }
            Directory::Dense { starts }
        }
    }

    /// Fills the cross-level links of `self` (level `l`) against `above` (level `l - 1`).
    pub fn link_to(&mut self, above: &Directory) {
        if let (Directory::Sparse { offsets, up, .. }, Directory::Sparse { offsets: above_off, .. }) =
            (self, above)
        {
            for (slot, &off) in up.iter_mut().zip(offsets.iter()) {
                let target = off / 2;
                let j = above_off.partition_point(|&o| o < target);
                *slot = if j < above_off.len() { j as u32 } else { NO_LINK };
            }
        }
    }

    pub fn non_empty(&self) -> usize {
        match self {
            Directory::Sparse { offsets, .. } => offsets.len(),
            Directory::Dense { starts } => starts.windows(2).filter(|w| w[0] != w[1]).count(),
        }
    }

    pub fn heap_bytes(&self) -> usize {
        match self {
            Directory::Sparse { offsets, starts, up } => 4 * (offsets.len() + starts.len() + up.len()),
            Directory::Dense { starts } => 4 * starts.len(),
        }
    }

    /// First sparse-directory index whose offset is `>= f`.
    #[inline]
    fn locate(offsets: &[u32], f: u32, cursor: &Cursor) -> usize {
        match cursor.link {
            Some(mut j) => {
                while j > 0 && offsets[j as usize - 1] >= f {
                    j -= 1;
                }
                j as usize
            }
            None => offsets.partition_point(|&o| o < f),
        }
    }

    /// Calls `visit(offset, rows)` for each non-empty partition in `f..=l`,
    /// in offset order, and advances `cursor` to the next level up.
    #[inline]
    pub fn visit(&self, f: u32, l: u32, cursor: &mut Cursor, mut visit: impl FnMut(u32, Range<usize>)) {
        match self {
            Directory::Sparse { offsets, starts, up } => {
                let first = Self::locate(offsets, f, cursor);
                cursor.link = match up.get(first) {
                    Some(&link) if link != NO_LINK => Some(link),
                    _ => None,
                };
                let mut k = first;
                while k < offsets.len() && offsets[k] <= l {
                    visit(offsets[k], starts[k] as usize..starts[k + 1] as usize);
                    k += 1;
                }
            }
            Directory::Dense { starts } => {
                for i in f..=l {
                    let r = starts[i as usize] as usize..starts[i as usize + 1] as usize;
                    if !r.is_empty() {
                        visit(i, r);
                    }
                }
            }
        }
    }

    /// Rows of partition `f` only.
    #[inline]
    pub fn partition(&self, f: u32, cursor: &mut Cursor) -> Range<usize> {
        match self {
            Directory::Sparse { offsets, starts, up } => {
                let k = Self::locate(offsets, f, cursor);
                cursor.link = match up.get(k) {
                    Some(&link) if link != NO_LINK => Some(link),
                    _ => None,
                };
                if k < offsets.len() && offsets[k] == f {
                    starts[k] as usize..starts[k + 1] as usize
                } else {
                    0..0
                }
            }
            Directory::Dense { starts } => starts[f as usize] as usize..starts[f as usize + 1] as usize,
        }
    }

    /// `(offset, rows)` for every non-empty partition.
    #[cfg(test)]
    pub fn partitions(&self) -> Vec<(u32, Range<usize>)> {
        match self {
            Directory::Sparse { offsets, starts, .. } => offsets
                .iter()
                .enumerate()
                .map(|(k, &o)| (o, starts[k] as usize..starts[k + 1] as usize))
                .collect(),
            Directory::Dense { starts } => starts
                .windows(2)
                .enumerate()
                .filter(|(_, w)| w[0] != w[1])
                .map(|(i, w)| (i as u32, w[0] as usize..w[1] as usize))
                .collect(),
        }
    }
}

/// Storage of the rows of one table.
pub(crate) trait Columns: Sized {
    fn from_rows(rows: &[Row], fields: Fields) -> Self;
    fn len(&self) -> usize;
    fn id(&self, i: usize) -> RecordId;
    /// Panics if the table does not keep start points.
    fn st(&self, i: usize) -> u64;
    /// Panics if the table does not keep end points.
    fn end(&self, i: usize) -> u64;
    fn emit(&self, rows: Range<usize>, sink: &mut impl FnMut(RecordId));
    fn heap_bytes(&self) -> usize;
}

/// Ids in a dedicated column; endpoints in separate columns.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Columnar {
    pub ids: Vec<RecordId>,
    pub st: Vec<u64>,
    pub end: Vec<u64>,
}

impl Columns for Columnar {
    fn from_rows(rows: &[Row], fields: Fields) -> Self {
        Columnar {
            ids: rows.iter().map(|r| r.id).collect(),
            st: if fields.st { rows.iter().map(|r| r.st).collect() } else { Vec::new() },
            end: if fields.end { rows.iter().map(|r| r.end).collect() } else { Vec::new() },
        }
    }

    #[inline]
    fn len(&self) -> usize {
        self.ids.len()
    }

    #[inline(always)]
    fn id(&self, i: usize) -> RecordId {
        self.ids[i]
    }

    #[inline(always)]
    fn st(&self, i: usize) -> u64 {
        self.st[i]
    }

    #[inline(always)]
    fn end(&self, i: usize) -> u64 {
        self.end[i]
    }

    #[inline]
    fn emit(&self, rows: Range<usize>, sink: &mut impl FnMut(RecordId)) {
        for &id in &self.ids[rows] {
            sink(id);
        }
    }

    fn heap_bytes(&self) -> usize {
        4 * self.ids.len() + 8 * (self.st.len() + self.end.len())
    }
}

/// Row-major storage: `[id, st?, end?]` per row in one array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RowMajor {
    pub data: Vec<u64>,
    pub stride: usize,
    pub st_at: usize,
    pub end_at: usize,
}

impl RowMajor {
    pub fn layout(fields: Fields) -> (usize, usize, usize) {
        let st_at = if fields.st { 1 } else { usize::MAX };
        let end_at = match (fields.st, fields.end) {
            (true, true) => 2,
            (false, true) => 1,
            _ => usize::MAX,
        };
        let stride = 1 + fields.st as usize + fields.end as usize;
        (stride, st_at, end_at)
    }
}

impl Columns for RowMajor {
    fn from_rows(rows: &[Row], fields: Fields) -> Self {
        let (stride, st_at, end_at) = Self::layout(fields);
        let mut data = Vec::with_capacity(rows.len() * stride);
        for r in rows {
            data.push(u64::from(r.id.0));
            if fields.st {
                data.push(r.st);
            }
            if fields.end {
                data.push(r.end);
            }
        }
        RowMajor { data, stride, st_at, end_at }
    }

    #[inline]
    fn len(&self) -> usize {
        self.data.len() / self.stride
    }

    #[inline(always)]
    fn id(&self, i: usize) -> RecordId {
        RecordId(self.data[i * self.stride] as u32)
    }

    #[inline(always)]
    fn st(&self, i: usize) -> u64 {
        assert!(self.st_at != usize::MAX, "start points are not stored in this table");
        self.data[i * self.stride + self.st_at]
    }

    #[inline(always)]
    fn end(&self, i: usize) -> u64 {
        assert!(self.end_at != usize::MAX, "end points are not stored in this table");
        self.data[i * self.stride + self.end_at]
    }

    #[inline]
    fn emit(&self, rows: Range<usize>, sink: &mut impl FnMut(RecordId)) {
        let words = &self.data[rows.start * self.stride..rows.end * self.stride];
        for row in words.chunks_exact(self.stride) {
            sink(RecordId(row[0] as u32));
        }
    }

    fn heap_bytes(&self) -> usize {
        8 * self.data.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Table<C> {
    pub dir: Directory,
    pub cols: C,
}

impl<C: Columns> Table<C> {
    pub fn build(rows: &[Row], level: u32, fields: Fields, sparse: bool) -> Self {
        Table { dir: Directory::build(rows, level, sparse), cols: C::from_rows(rows, fields) }
    }

    pub fn heap_bytes(&self) -> usize {
        self.dir.heap_bytes() + self.cols.heap_bytes()
    }
}
