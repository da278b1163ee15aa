//! Binary snapshots of a [`HintMIndex`].
//!
//! All integers are little-endian. Layout:
//!
//! ```text
//! magic        6 bytes  "HINTM1"
//! version      u16      1
//! m            u8
//! flags        u8       bit0 sorted, bit1 storage_opt, bit2 ids_column, bit3 sparse_dir
//! threshold    u32      binary-search threshold
//! min_x, max_x u64, u64 mapper domain
//! n            u64      intervals indexed (including tombstoned)
//! tables       for level 0..=m, for subdivision O_in, O_aft, R_in, R_aft:
//!   directory    sparse: u64 k, u32[k] offsets, u32[k+1] starts, u32[k] links
//!                dense:  u64 k (= 2^level + 1), u32[k] starts
//!   columns      ids_column: u64 r, u64 s, u64 e, u32[r] ids, u64[s] st, u64[e] end
//!                row-major:  u8 stride, u8 st_at, u8 end_at (255 = absent), u64 w, u64[w] words
//! tombstones   u64 t, u32[t] ids (ascending)
//! ```
//!
//! Link value `0xFFFF_FFFF` means "no partition above".

use std::collections::HashSet;
use std::path::Path;

use crate::domain::{DomainMapper, RecordId, MAX_LEVELS};
use crate::error::{Error, Result};
use crate::layout::{Columnar, Directory, RowMajor, Table, NO_LINK};

use super::{BuildOptions, HintMIndex, Level, Store};

pub const MAGIC: &[u8; 6] = b"HINTM1";
pub const VERSION: u16 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32s(&mut self, v: impl IntoIterator<Item = u32>) {
        v.into_iter().for_each(|x| self.u32(x));
    }
    fn u64s(&mut self, v: &[u64]) {
        v.iter().for_each(|&x| self.u64(x));
    }

    fn directory(&mut self, d: &Directory) {
        match d {
            Directory::Sparse { offsets, starts, up } => {
                self.u64(offsets.len() as u64);
                self.u32s(offsets.iter().copied());
                self.u32s(starts.iter().copied());
                self.u32s(up.iter().copied());
            }
            Directory::Dense { starts } => {
                self.u64(starts.len() as u64);
                self.u32s(starts.iter().copied());
            }
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Snapshot(msg.into())
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| bad("truncated"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self) -> Result<usize> {
        let n = self.u64()?;
        // Every element takes at least four bytes.
        if n > (self.buf.len() - self.pos) as u64 / 4 + 1 {
            return Err(bad(format!("length {n} exceeds the remaining input")));
        }
        Ok(n as usize)
    }
    fn u32s(&mut self, n: usize) -> Result<Vec<u32>> {
        let raw = self.take(n.checked_mul(4).ok_or_else(|| bad("length overflow"))?)?;
        Ok(raw.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect())
    }
    fn u64s(&mut self, n: usize) -> Result<Vec<u64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| bad("length overflow"))?)?;
        Ok(raw.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn directory(&mut self, level: u32, sparse: bool) -> Result<Directory> {
        if sparse {
            let k = self.len()?;
            let offsets = self.u32s(k)?;
            let starts = self.u32s(k + 1)?;
            let up = self.u32s(k)?;
            if offsets.windows(2).any(|w| w[0] >= w[1]) || offsets.last().is_some_and(|&o| u64::from(o) >> level != 0) {
                return Err(bad(format!("directory offsets at level {level} are not strictly increasing in range")));
            }
            if starts[0] != 0 || starts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(bad(format!("directory positions at level {level} are not increasing")));
            }
            Ok(Directory::Sparse { offsets, starts, up })
        } else {
            let k = self.len()?;
            if k as u64 != (1u64 << level) + 1 {
                return Err(bad(format!("dense directory at level {level} has {k} slots")));
            }
            let starts = self.u32s(k)?;
            if starts[0] != 0 || starts.windows(2).any(|w| w[0] > w[1]) {
                return Err(bad(format!("directory positions at level {level} are not increasing")));
            }
            Ok(Directory::Dense { starts })
        }
    }
}

fn dir_rows(d: &Directory) -> usize {
    match d {
        Directory::Sparse { starts, .. } | Directory::Dense { starts } => *starts.last().unwrap() as usize,
    }
}

fn check_links(levels_dirs: &[&Directory]) -> Result<()> {
    for (l, d) in levels_dirs.iter().enumerate().skip(1) {
        if let (Directory::Sparse { up, .. }, Directory::Sparse { offsets: above, .. }) = (d, levels_dirs[l - 1]) {
            if up.iter().any(|&j| j != NO_LINK && j as usize >= above.len()) {
                return Err(bad(format!("link out of range at level {l}")));
            }
        }
    }
    Ok(())
}

pub fn to_bytes(index: &HintMIndex) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    let o = index.options();
    w.0.extend_from_slice(MAGIC);
    w.u16(VERSION);
    w.u8(index.levels() as u8);
    w.u8(o.sorted as u8 | (o.storage_opt as u8) << 1 | (o.ids_column as u8) << 2 | (o.sparse_dir as u8) << 3);
    w.u32(o.scan_threshold as u32);
    w.u64(index.mapper().min_x());
    w.u64(index.mapper().max_x());
    w.u64(index.stats().n as u64);
    match index.store() {
        Store::Columnar(levels) => {
            for t in levels.iter().flatten() {
                w.directory(&t.dir);
                let c = &t.cols;
                w.u64(c.ids.len() as u64);
                w.u64(c.st.len() as u64);
                w.u64(c.end.len() as u64);
                w.u32s(c.ids.iter().map(|r| r.0));
                w.u64s(&c.st);
                w.u64s(&c.end);
            }
        }
        Store::Rows(levels) => {
            for t in levels.iter().flatten() {
                w.directory(&t.dir);
                let c = &t.cols;
                w.u8(c.stride as u8);
                w.u8(c.st_at.min(255) as u8);
                w.u8(c.end_at.min(255) as u8);
                w.u64(c.data.len() as u64);
                w.u64s(&c.data);
            }
        }
    }
    let mut tomb: Vec<u32> = index.tombstones().iter().map(|r| r.0).collect();
    tomb.sort_unstable();
    w.u64(tomb.len() as u64);
    w.u32s(tomb);
    w.0
}

pub fn from_bytes(buf: &[u8]) -> Result<HintMIndex> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(6)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let m = u32::from(r.u8()?);
    if m == 0 || m > MAX_LEVELS {
        return Err(Error::InvalidLevels(m));
    }
    let flags = r.u8()?;
    let opts = BuildOptions {
        sorted: flags & 1 != 0,
        storage_opt: flags & 2 != 0,
        ids_column: flags & 4 != 0,
        sparse_dir: flags & 8 != 0,
        scan_threshold: r.u32()? as usize,
    };
    let mapper = DomainMapper::new(r.u64()?, r.u64()?, m)?;
    let n = r.u64()? as usize;

    let store = if opts.ids_column {
        let mut levels: Vec<Level<Columnar>> = Vec::with_capacity(m as usize + 1);
        for level in 0..=m {
            let mut tables = Vec::with_capacity(4);
            for _ in 0..4 {
                let dir = r.directory(level, opts.sparse_dir)?;
                let (ni, ns, ne) = (r.len()?, r.len()?, r.len()?);
                let ids = r.u32s(ni)?.into_iter().map(RecordId).collect();
                let cols = Columnar { ids, st: r.u64s(ns)?, end: r.u64s(ne)? };
                if dir_rows(&dir) != ni || (ns != 0 && ns != ni) || (ne != 0 && ne != ni) {
                    return Err(bad(format!("column lengths disagree at level {level}")));
                }
                tables.push(Table { dir, cols });
            }
            levels.push(tables.try_into().map_err(|_| bad("table count"))?);
        }
        let dirs: Vec<Vec<&Directory>> = (0..4).map(|k| levels.iter().map(|l| &l[k].dir).collect()).collect();
        dirs.iter().try_for_each(|d| check_links(d))?;
        Store::Columnar(levels)
    } else {
        let mut levels: Vec<Level<RowMajor>> = Vec::with_capacity(m as usize + 1);
        for level in 0..=m {
            let mut tables = Vec::with_capacity(4);
            for _ in 0..4 {
                let dir = r.directory(level, opts.sparse_dir)?;
                let stride = r.u8()? as usize;
                let at = |v: u8| if v == 255 { usize::MAX } else { v as usize };
                let (st_at, end_at) = (at(r.u8()?), at(r.u8()?));
                let words = r.len()?;
                let data = r.u64s(words)?;
                if !(1..=3).contains(&stride)
                    || words % stride != 0
                    || words / stride != dir_rows(&dir)
                    || (st_at != usize::MAX && st_at >= stride)
                    || (end_at != usize::MAX && end_at >= stride)
                {
                    return Err(bad(format!("row layout is inconsistent at level {level}")));
                }
                tables.push(Table { dir, cols: RowMajor { data, stride, st_at, end_at } });
            }
            levels.push(tables.try_into().map_err(|_| bad("table count"))?);
        }
        let dirs: Vec<Vec<&Directory>> = (0..4).map(|k| levels.iter().map(|l| &l[k].dir).collect()).collect();
        dirs.iter().try_for_each(|d| check_links(d))?;
        Store::Rows(levels)
    };

    let t = r.len()?;
    let tombstones: HashSet<RecordId> = r.u32s(t)?.into_iter().map(RecordId).collect();
    if r.pos != buf.len() {
        return Err(bad(format!("{} trailing bytes", buf.len() - r.pos)));
    }
    if tombstones.len() > n {
        return Err(bad("more tombstones than records"));
    }
    Ok(HintMIndex::from_parts(mapper, opts, store, tombstones, n))
}

pub fn save(index: &HintMIndex, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_bytes(index))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<HintMIndex> {
    from_bytes(&std::fs::read(path)?)
}
