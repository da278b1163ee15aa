//! Synthetic datasets and query workloads, plus dataset files.
//!
//! Interval lengths follow a Zipf law truncated to `[1, domain_len]`;
//! midpoints are normal around the middle of the domain. Intervals that
//! stick out of the domain are clipped.
//!
//! Dataset files hold one interval per line, either whitespace separated
//! (`id<TAB>st<TAB>end`) or comma separated (`id,st,end`), with no header.
//! Blank lines and lines starting with `#` are skipped. A `.gz` suffix
//! means gzip. Query files use the same layout with `st end` per line; a
//! leading id column is accepted and ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Zipf};

use crate::domain::{Interval, QueryRange, RecordId};
use crate::error::{Error, Result};

/// Where query ranges are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryPositions {
    Uniform,
    /// Centered on the midpoint of a dataset interval chosen uniformly.
    DataFollowing,
}

/// Parameters of a synthetic experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadSpec {
    pub domain_len: u64,
    pub n: usize,
    /// Zipf exponent of interval lengths, `> 1`.
    pub alpha: f64,
    /// Spread of interval midpoints.
    pub sigma: f64,
    pub query_count: usize,
    /// Query extent as a fraction of the domain, in `[0, 1]`.
    pub query_extent_pct: f64,
    pub query_positions: QueryPositions,
    pub seed: u64,
}

impl Default for WorkloadSpec {
    /// Desk-scale version of the default synthetic setting: 128M domain,
    /// α = 1.2, σ = 1M, query extent 0.1%, but 100k intervals and 10k queries.
    fn default() -> Self {
        WorkloadSpec {
            domain_len: 128_000_000,
            n: 100_000,
            alpha: 1.2,
            sigma: 1_000_000.0,
            query_count: 10_000,
            query_extent_pct: 0.001,
            query_positions: QueryPositions::DataFollowing,
            seed: 42,
        }
    }
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.domain_len == 0 {
            return bad("domain length must be positive".into());
        }
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return bad(format!("alpha {} must be > 1", self.alpha));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return bad(format!("sigma {} must be > 0", self.sigma));
        }
        if !(0.0..=1.0).contains(&self.query_extent_pct) {
            return bad(format!("query extent {} must be in [0, 1]", self.query_extent_pct));
        }
        Ok(())
    }

    /// Query extent in raw units.
    pub fn query_extent(&self) -> u64 {
        ((self.query_extent_pct * self.domain_len as f64).round() as u64).min(self.domain_len - 1)
    }
}

/// Generates `spec.n` intervals with ids `0..n`, deterministic in the seed.
pub fn gen_intervals(spec: &WorkloadSpec) -> Result<Vec<Interval>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let lengths = Zipf::new(spec.domain_len as f64, spec.alpha)
        .map_err(|e| Error::InvalidParameter(format!("length distribution: {e}")))?;
    let mu = (spec.domain_len - 1) as f64 / 2.0;
    let mids = Normal::new(mu, spec.sigma).map_err(|e| Error::InvalidParameter(format!("position distribution: {e}")))?;
    let top = (spec.domain_len - 1) as i128;
    Ok((0..spec.n)
        .map(|i| {
            let len = lengths.sample(&mut rng) as i128;
            let mid = mids.sample(&mut rng).round() as i128;
            let st = mid - (len - 1) / 2;
            let end = st + len - 1;
            Interval {
                id: RecordId(i as u32),
                st: st.clamp(0, top) as u64,
                end: end.clamp(0, top) as u64,
            }
        })
        .collect())
}

/// Generates `spec.query_count` ranges of extent `spec.query_extent()`,
/// kept inside the domain. An empty dataset falls back to uniform positions.
pub fn gen_queries(spec: &WorkloadSpec, data: &[Interval]) -> Result<Vec<QueryRange>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let extent = spec.query_extent();
    let last_start = spec.domain_len - 1 - extent;
    Ok((0..spec.query_count)
        .map(|_| {
            let st = match spec.query_positions {
                QueryPositions::DataFollowing if !data.is_empty() => {
                    let s = data[rng.random_range(0..data.len())];
                    let mid = s.st + (s.end - s.st) / 2;
                    mid.saturating_sub(extent / 2).min(last_start)
                }
                _ => rng.random_range(0..=last_start),
            };
            QueryRange { st, end: st + extent }
        })
        .collect())
}

/// Dataset file layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Whitespace separated columns.
    Text,
    Csv,
}

impl Format {
    /// CSV for `*.csv` and `*.csv.gz`, text otherwise.
    pub fn from_path(path: &Path) -> Format {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("").to_ascii_lowercase();
        let name = name.strip_suffix(".gz").unwrap_or(&name);
        if name.ends_with(".csv") {
            Format::Csv
        } else {
            Format::Text
        }
    }
}

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}

fn open(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path)?;
    let inner: Box<dyn Read> = if is_gzip(path) { Box::new(GzDecoder::new(file)) } else { Box::new(file) };
    Ok(Box::new(BufReader::new(inner)))
}

fn create(path: &Path) -> Result<Box<dyn Write>> {
    let file = BufWriter::new(File::create(path)?);
    Ok(if is_gzip(path) { Box::new(GzEncoder::new(file, Compression::default())) } else { Box::new(file) })
}

/// Non-comment lines split into fields, with 1-based line numbers.
fn records(path: &Path, format: Format, mut each: impl FnMut(usize, Vec<&str>) -> Result<()>) -> Result<()> {
    let reader = open(path)?;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match format {
            Format::Text => line.split_whitespace().collect(),
            Format::Csv => line.split(',').map(str::trim).collect(),
        };
        each(i + 1, fields)?;
    }
    Ok(())
}

fn parse_error(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, name: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| parse_error(path, line, format!("invalid {name} `{raw}`")))
}

pub fn load_dataset(path: impl AsRef<Path>, format: Format) -> Result<Vec<Interval>> {
    let path = path.as_ref();
    let mut out = Vec::new();
    records(path, format, |line, f| {
        if f.len() != 3 {
            return Err(parse_error(path, line, format!("expected 3 fields, found {}", f.len())));
        }
        let id: u32 = field(path, line, "id", f[0])?;
        let st = field(path, line, "start", f[1])?;
        let end = field(path, line, "end", f[2])?;
        let s = Interval::new(id, st, end).map_err(|e| parse_error(path, line, e.to_string()))?;
        out.push(s);
        Ok(())
    })?;
    Ok(out)
}

pub fn save_dataset(path: impl AsRef<Path>, format: Format, intervals: &[Interval]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    let sep = if format == Format::Csv { ',' } else { '\t' };
    for s in intervals {
        writeln!(w, "{}{sep}{}{sep}{}", s.id, s.st, s.end)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_queries(path: impl AsRef<Path>, format: Format) -> Result<Vec<QueryRange>> {
    let path = path.as_ref();
    let mut out = Vec::new();
    records(path, format, |line, f| {
        let (st, end) = match f.len() {
            2 => (f[0], f[1]),
            3 => (f[1], f[2]),
            k => return Err(parse_error(path, line, format!("expected 2 or 3 fields, found {k}"))),
        };
        let st: u64 = field(path, line, "start", st)?;
        let end: u64 = field(path, line, "end", end)?;
        if st > end {
            return Err(parse_error(path, line, format!("start {st} after end {end}")));
        }
        out.push(QueryRange { st, end });
        Ok(())
    })?;
    Ok(out)
}

pub fn save_queries(path: impl AsRef<Path>, format: Format, queries: &[QueryRange]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    let sep = if format == Format::Csv { ',' } else { '\t' };
    for q in queries {
        writeln!(w, "{}{sep}{}", q.st, q.end)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> WorkloadSpec {
        WorkloadSpec { domain_len: 1 << 20, n: 20_000, sigma: 100_000.0, query_count: 500, ..Default::default() }
    }

    /// Truncated zeta: sum of k^-alpha for k in 1..=n, with an integral tail past 10^6.
    fn zeta(alpha: f64, n: u64) -> f64 {
        let direct = n.min(1_000_000);
        let mut h: f64 = (1..=direct).map(|k| (k as f64).powf(-alpha)).sum();
        if n > direct {
            let a = direct as f64 + 0.5;
            let b = n as f64 + 0.5;
            h += (a.powf(1.0 - alpha) - b.powf(1.0 - alpha)) / (alpha - 1.0);
        }
        h
    }

    #[test]
    fn zipf_head_mass_matches_zeta() {
        let spec = WorkloadSpec { n: 100_000, alpha: 1.8, ..Default::default() };
        let data = gen_intervals(&spec).unwrap();
        let ones = data.iter().filter(|s| s.len() == 1).count() as f64 / data.len() as f64;
        let expect = 1.0 / zeta(1.8, spec.domain_len);
        assert!(ones > 0.5, "{ones}");
        assert!((ones / expect - 1.0).abs() <= 0.05, "{ones} vs {expect}");
        for alpha in [1.2, 1.4] {
            let data = gen_intervals(&WorkloadSpec { alpha, ..spec }).unwrap();
            let ones = data.iter().filter(|s| s.len() == 1).count() as f64 / data.len() as f64;
            let expect = 1.0 / zeta(alpha, spec.domain_len);
            assert!((ones / expect - 1.0).abs() <= 0.05, "alpha {alpha}: {ones} vs {expect}");
        }
    }

    #[test]
    fn generated_intervals_are_valid_and_deterministic() {
        let spec = small();
        let a = gen_intervals(&spec).unwrap();
        assert_eq!(a.len(), spec.n);
        assert!(a.iter().enumerate().all(|(i, s)| s.id.0 as usize == i && s.st <= s.end && s.end < spec.domain_len));
        assert_eq!(a, gen_intervals(&spec).unwrap());
        assert_ne!(a, gen_intervals(&WorkloadSpec { seed: 7, ..spec }).unwrap());
        let qa = gen_queries(&spec, &a).unwrap();
        assert_eq!(qa, gen_queries(&spec, &a).unwrap());
    }

    #[test]
    fn tiny_sigma_centres_midpoints() {
        let spec = WorkloadSpec { sigma: 1e-9, alpha: 3.0, ..small() };
        let mu = (spec.domain_len - 1) as f64 / 2.0;
        for s in gen_intervals(&spec).unwrap() {
            let mid = (s.st + s.end) as f64 / 2.0;
            assert!((mid - mu).abs() <= 1.0, "{s:?}");
        }
    }

    #[test]
    fn midpoints_follow_sigma() {
        let spec = WorkloadSpec { alpha: 3.0, ..small() };
        let data = gen_intervals(&spec).unwrap();
        let mu = (spec.domain_len - 1) as f64 / 2.0;
        let var = data.iter().map(|s| ((s.st + s.end) as f64 / 2.0 - mu).powi(2)).sum::<f64>() / data.len() as f64;
        assert!((var.sqrt() / spec.sigma - 1.0).abs() < 0.05);
    }

    #[test]
    fn rejects_invalid_specs() {
        for spec in [
            WorkloadSpec { alpha: 1.0, ..small() },
            WorkloadSpec { sigma: 0.0, ..small() },
            WorkloadSpec { query_extent_pct: 1.5, ..small() },
            WorkloadSpec { domain_len: 0, ..small() },
        ] {
            assert!(gen_intervals(&spec).is_err());
        }
    }

    #[test]
    fn query_extents() {
        let spec = WorkloadSpec::default();
        assert_eq!(spec.query_extent(), 128_000);
        let spec = small();
        let data = gen_intervals(&spec).unwrap();
        let stabs = gen_queries(&WorkloadSpec { query_extent_pct: 0.0, ..spec }, &data).unwrap();
        assert!(stabs.iter().all(|q| q.is_stabbing()));
        let qs = gen_queries(&spec, &data).unwrap();
        assert!(qs.iter().all(|q| q.end - q.st == spec.query_extent() && q.end < spec.domain_len));
    }

    #[test]
    fn uniform_positions_cover_the_domain() {
        let spec = WorkloadSpec { query_positions: QueryPositions::Uniform, query_count: 20_000, ..small() };
        let qs = gen_queries(&spec, &[]).unwrap();
        let span = (spec.domain_len - spec.query_extent()) as f64;
        let mut starts: Vec<f64> = qs.iter().map(|q| q.st as f64 / span).collect();
        starts.sort_by(f64::total_cmp);
        let k = starts.len() as f64;
        let d = starts
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - i as f64 / k).abs().max(((i + 1) as f64 / k - x).abs()))
            .fold(0.0, f64::max);
        // Kolmogorov-Smirnov critical value at the 0.1% level.
        assert!(d < 1.95 / k.sqrt(), "KS statistic {d}");
    }

    #[test]
    fn data_following_queries_track_the_data() {
        let spec = small();
        let data = gen_intervals(&spec).unwrap();
        let qs = gen_queries(&spec, &data).unwrap();
        let mu = spec.domain_len as f64 / 2.0;
        let near = qs.iter().filter(|q| ((q.st + q.end) as f64 / 2.0 - mu).abs() < 3.0 * spec.sigma).count();
        assert!(near as f64 > 0.95 * qs.len() as f64);
    }

    #[test]
    fn file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let data = gen_intervals(&small()).unwrap();
        let qs = gen_queries(&small(), &data).unwrap();
        for name in ["d.tsv", "d.csv", "d.txt.gz", "d.csv.gz"] {
            let p = dir.path().join(name);
            let fmt = Format::from_path(&p);
            save_dataset(&p, fmt, &data).unwrap();
            assert_eq!(load_dataset(&p, fmt).unwrap(), data);
            save_queries(&p, fmt, &qs).unwrap();
            assert_eq!(load_queries(&p, fmt).unwrap(), qs);
        }
        assert_eq!(Format::from_path(Path::new("x.CSV.gz")), Format::Csv);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.txt");
        std::fs::write(&p, "# header\n1 2 3\n\n3 10 5\n").unwrap();
        match load_dataset(&p, Format::Text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        std::fs::write(&p, "1 2 x\n").unwrap();
        assert!(matches!(load_dataset(&p, Format::Text), Err(Error::Parse { line: 1, .. })));
        std::fs::write(&p, "").unwrap();
        assert!(load_dataset(&p, Format::Text).unwrap().is_empty());
        assert!(load_dataset(dir.path().join("missing"), Format::Text).is_err());
    }
}
