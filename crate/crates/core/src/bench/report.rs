use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// First line of every report file.
pub const SCHEMA_LINE: &str = "# hint-bench report v1";

/// Column names, in order. Empty cells mean "not applicable".
///
/// | column | meaning |
/// |---|---|
/// | `command` | `build`, `query`, `mixed` or `sweep` |
/// | `index`, `m`, `p`, `opts` | index kind and its parameters |
/// | `n` | live intervals |
/// | `queries`, `repeats` | queries per pass and timed passes |
/// | `build_secs`, `index_bytes`, `replication` | build cost, heap size, entries per live interval |
/// | `qps_best`, `qps_mean` | throughput of the fastest pass and over all passes |
/// | `qps_parallel`, `threads` | reader-parallel throughput, if measured |
/// | `mean_comparisons`, `mean_partitions_compared`, `mean_results` | per query |
/// | `checksum` | order-insensitive fold of the results, hex |
/// | `inserts`, `deletes`, `insert_ops_per_sec`, `delete_ops_per_sec` | update workload |
/// | `total_secs` | wall time of all timed operations |
pub const CSV_HEADER: &str = "command,index,m,p,opts,n,queries,repeats,build_secs,index_bytes,replication,\
qps_best,qps_mean,qps_parallel,threads,mean_comparisons,mean_partitions_compared,mean_results,checksum,\
inserts,deletes,insert_ops_per_sec,delete_ops_per_sec,total_secs";

/// One row of a benchmark report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub command: String,
    pub index: String,
    pub m: Option<u32>,
    pub p: Option<usize>,
    pub opts: Option<String>,
    pub n: usize,
    pub queries: usize,
    pub repeats: usize,
    pub build_secs: Option<f64>,
    pub index_bytes: Option<usize>,
    pub replication: Option<f64>,
    pub qps_best: Option<f64>,
    pub qps_mean: Option<f64>,
    pub qps_parallel: Option<f64>,
    pub threads: Option<usize>,
    pub mean_comparisons: Option<f64>,
    pub mean_partitions_compared: Option<f64>,
    pub mean_results: Option<f64>,
    pub checksum: Option<u64>,
    pub inserts: usize,
    pub deletes: usize,
    pub insert_ops_per_sec: Option<f64>,
    pub delete_ops_per_sec: Option<f64>,
    pub total_secs: Option<f64>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn float(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.6}"),
        Some(_) | None => String::new(),
    }
}

impl BenchReport {
    /// Index kind with its parameters, e.g. `hintm(m=10,sorted+sopt)`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(m) = self.m {
            parts.push(format!("m={m}"));
        }
        if let Some(p) = self.p {
            parts.push(format!("p={p}"));
        }
        if let Some(o) = &self.opts {
            parts.push(o.clone());
        }
        if parts.is_empty() {
            self.index.clone()
        } else {
            format!("{}({})", self.index, parts.join(","))
        }
    }

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.command,
            self.index,
            opt(&self.m),
            opt(&self.p),
            opt(&self.opts),
            self.n,
            self.queries,
            self.repeats,
            float(self.build_secs),
            opt(&self.index_bytes),
            float(self.replication),
            float(self.qps_best),
            float(self.qps_mean),
            float(self.qps_parallel),
            opt(&self.threads),
            float(self.mean_comparisons),
            float(self.mean_partitions_compared),
            float(self.mean_results),
            self.checksum.map(|c| format!("{c:016x}")).unwrap_or_default(),
            self.inserts,
            self.deletes,
            float(self.insert_ops_per_sec),
            float(self.delete_ops_per_sec),
            float(self.total_secs),
        );
        s
    }

    /// Schema line, header and rows.
    pub fn to_csv(rows: &[BenchReport]) -> String {
        let mut s = format!("{SCHEMA_LINE}\n{CSV_HEADER}\n");
        for r in rows {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }

    /// Appends rows to `path`. A new or empty file gets the schema line and
    /// header first; an existing file must carry the same schema.
    pub fn append_csv(path: impl AsRef<Path>, rows: &[BenchReport]) -> Result<()> {
        let path = path.as_ref();
        let existing = match std::fs::File::open(path) {
            Ok(f) => {
                let mut first = String::new();
                BufReader::new(f).read_line(&mut first)?;
                Some(first.trim_end().to_string())
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => return Err(e.into()),
        };
        let mut out = OpenOptions::new().create(true).append(true).open(path)?;
        match existing.as_deref() {
            None | Some("") => write!(out, "{SCHEMA_LINE}\n{CSV_HEADER}\n")?,
            Some(SCHEMA_LINE) => {}
            Some(other) => {
                return Err(Error::InvalidParameter(format!(
                    "{} holds a different report schema (`{other}`)",
                    path.display()
                )))
            }
        }
        for r in rows {
            writeln!(out, "{}", r.csv_row())?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_match_header_width() {
        let r = BenchReport { command: "query".into(), index: "hintm".into(), m: Some(10), checksum: Some(3), ..Default::default() };
        assert_eq!(r.csv_row().split(',').count(), CSV_HEADER.split(',').count());
        assert_eq!(r.label(), "hintm(m=10)");
        assert!(r.csv_row().contains("0000000000000003"));
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(BenchReport::to_csv(&[]), format!("{SCHEMA_LINE}\n{CSV_HEADER}\n"));
    }

    #[test]
    fn appends_without_repeating_the_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let r = BenchReport { command: "build".into(), index: "grid".into(), ..Default::default() };
        BenchReport::append_csv(&p, &[r.clone()]).unwrap();
        BenchReport::append_csv(&p, &[r.clone(), r]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.matches(SCHEMA_LINE).count(), 1);
        std::fs::write(&p, "# other v9\n").unwrap();
        assert!(BenchReport::append_csv(&p, &[]).is_err());
    }
}
