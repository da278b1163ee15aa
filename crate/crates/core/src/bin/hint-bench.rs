//! Benchmark CLI. See `hint-bench --help`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hint_index::bench::{
    check_checksums, cmd_build, cmd_mixed, cmd_query, cmd_sweep, run_query_parallel, AnyIndex, BenchReport, IndexKind,
    IndexParams, MixedScript,
};
use hint_index::domain::{Interval, QueryRange};
use hint_index::error::{Error, Result};
use hint_index::hint_m::{snapshot, BuildOptions, DEFAULT_MERGE_THRESHOLD};
use hint_index::workload::{self, Format, QueryPositions, WorkloadSpec};

#[derive(Parser, Debug)]
#[command(name = "hint-bench", version, about = "Build, query and update benchmarks for interval indexes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    args: Args,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Cmd {
    /// Build each index and report build time, size and replication.
    Build,
    /// Run a query workload on each index; exits with 2 if answers differ.
    Query,
    /// Run a preload/query/insert/delete script on each index.
    Mixed,
    /// One row per value of --m (level-based kinds) or --p (grid).
    Sweep,
    /// Write a synthetic dataset to --dataset and queries to --queries.
    Gen,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Positions {
    Uniform,
    Data,
}

#[derive(clap::Args, Debug)]
struct Args {
    /// Dataset file (`id st end` per line; `.csv` and `.gz` by extension). Generated if absent.
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    /// Query file (`st end` per line). Generated if absent.
    #[arg(long, global = true)]
    queries: Option<PathBuf>,
    /// Index kinds, comma separated: brute, grid, hint, hintm, dynamic, hybrid.
    #[arg(long, global = true, value_delimiter = ',', default_value = "hintm")]
    index: Vec<String>,
    /// Levels; a list such as `8,10` or a range such as `4-16`.
    #[arg(long, global = true, default_value = "10")]
    m: String,
    /// Grid partitions; list or range like --m.
    #[arg(long, global = true, default_value = "1000")]
    p: String,
    /// Zipf exponent of generated interval lengths.
    #[arg(long, global = true, default_value_t = 1.2)]
    alpha: f64,
    /// Spread of generated interval midpoints.
    #[arg(long, global = true, default_value_t = 1_000_000.0)]
    sigma: f64,
    /// Query extent in percent of the domain.
    #[arg(long = "extent-pct", global = true, default_value_t = 0.1)]
    extent_pct: f64,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// HINT^m layout options: any of sorted,sopt,idscol,sparse, or all / none.
    #[arg(long, global = true, default_value = "all")]
    opts: String,
    /// Append report rows to this CSV file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Generated dataset size.
    #[arg(long, global = true, default_value_t = 100_000)]
    n: usize,
    /// Generated domain length.
    #[arg(long, global = true, default_value_t = 128_000_000)]
    domain: u64,
    /// Generated query count.
    #[arg(long = "query-count", global = true, default_value_t = 10_000)]
    query_count: usize,
    /// Placement of generated queries.
    #[arg(long, global = true, value_enum, default_value = "data")]
    positions: Positions,
    /// Timed passes per query run.
    #[arg(long, global = true, default_value_t = 3)]
    repeats: usize,
    /// Also measure throughput with this many reader threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// HINT^m snapshot: written by `build`, read by `query`.
    #[arg(long, global = true)]
    snapshot: Option<PathBuf>,
    /// Delta/main size ratio that triggers a hybrid merge.
    #[arg(long = "merge-threshold", global = true, default_value_t = DEFAULT_MERGE_THRESHOLD)]
    merge_threshold: f64,
    /// Fraction of the dataset loaded before a mixed script.
    #[arg(long, global = true, default_value_t = 0.9)]
    preload: f64,
    #[arg(long = "mix-queries", global = true, default_value_t = 10_000)]
    mix_queries: usize,
    #[arg(long, global = true, default_value_t = 5_000)]
    inserts: usize,
    #[arg(long, global = true, default_value_t = 1_000)]
    deletes: usize,
}

fn parse_list<T: std::str::FromStr + Copy + Into<u64> + TryFrom<u64>>(raw: &str, what: &str) -> Result<Vec<T>> {
    let bad = || Error::InvalidParameter(format!("cannot parse --{what} `{raw}`"));
    let mut out = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                for v in a..=b {
                    out.push(T::try_from(v).map_err(|_| bad())?);
                }
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

impl Args {
    fn kinds(&self) -> Result<Vec<IndexKind>> {
        self.index.iter().map(|s| s.trim().parse()).collect()
    }

    fn levels(&self) -> Result<Vec<u32>> {
        parse_list(&self.m, "m")
    }

    fn partitions(&self) -> Result<Vec<usize>> {
        Ok(parse_list::<u64>(&self.p, "p")?.into_iter().map(|p| p as usize).collect())
    }

    fn params(&self) -> Result<IndexParams> {
        fn first<T>(v: Vec<T>, what: &str) -> Result<T> {
            v.into_iter().next().ok_or_else(|| Error::InvalidParameter(format!("--{what} is empty")))
        }
        Ok(IndexParams {
            m: first(self.levels()?, "m")?,
            p: first(self.partitions()?, "p")?,
            opts: BuildOptions::parse(&self.opts)?,
            domain: None,
            merge_threshold: self.merge_threshold,
        })
    }

    fn spec(&self, domain_len: u64) -> WorkloadSpec {
        WorkloadSpec {
            domain_len,
            n: self.n,
            alpha: self.alpha,
            sigma: self.sigma,
            query_count: self.query_count,
            query_extent_pct: self.extent_pct / 100.0,
            query_positions: match self.positions {
                Positions::Uniform => QueryPositions::Uniform,
                Positions::Data => QueryPositions::DataFollowing,
            },
            seed: self.seed,
        }
    }

    fn data(&self) -> Result<(Vec<Interval>, WorkloadSpec)> {
        match &self.dataset {
            Some(path) => {
                let data = workload::load_dataset(path, Format::from_path(path))?;
                let top = data.iter().map(|s| s.end).max().unwrap_or(0);
                Ok((data, self.spec(top + 1)))
            }
            None => {
                let spec = self.spec(self.domain);
                Ok((workload::gen_intervals(&spec)?, spec))
            }
        }
    }

    fn workload(&self) -> Result<(Vec<Interval>, Vec<QueryRange>)> {
        let (data, spec) = self.data()?;
        let queries = match &self.queries {
            Some(path) => workload::load_queries(path, Format::from_path(path))?,
            None => workload::gen_queries(&spec, &data)?,
        };
        Ok((data, queries))
    }
}

fn emit(args: &Args, rows: &[BenchReport]) -> Result<()> {
    print!("{}", BenchReport::to_csv(rows));
    if let Some(out) = &args.out {
        BenchReport::append_csv(out, rows)?;
    }
    Ok(())
}

fn gen(args: &Args) -> Result<()> {
    let path = args.dataset.as_deref().ok_or_else(|| Error::InvalidParameter("gen needs --dataset".into()))?;
    let spec = args.spec(args.domain);
    let data = workload::gen_intervals(&spec)?;
    workload::save_dataset(path, Format::from_path(path), &data)?;
    eprintln!("wrote {} intervals to {}", data.len(), path.display());
    if let Some(qpath) = &args.queries {
        let queries = workload::gen_queries(&spec, &data)?;
        workload::save_queries(qpath, Format::from_path(qpath), &queries)?;
        eprintln!("wrote {} queries to {}", queries.len(), qpath.display());
    }
    Ok(())
}

fn build(args: &Args) -> Result<Vec<BenchReport>> {
    let (data, _) = args.data()?;
    let params = args.params()?;
    let mut rows = Vec::new();
    for kind in args.kinds()? {
        let (index, report) = cmd_build(&data, kind, &params)?;
        if let (Some(path), AnyIndex::HintM(idx)) = (&args.snapshot, &index) {
            snapshot::save(idx, path)?;
            eprintln!("saved snapshot to {}", path.display());
        }
        rows.push(report);
    }
    Ok(rows)
}

fn query_one(args: &Args, index: &AnyIndex, queries: &[QueryRange]) -> Result<BenchReport> {
    let mut row = cmd_query(index, queries, args.repeats)?;
    if let Some(t) = args.threads {
        row.qps_parallel = Some(run_query_parallel(index, queries, t)?);
        row.threads = Some(t);
    }
    Ok(row)
}

/// Runs the queries on each requested kind. With an existing --snapshot,
/// `hintm` is loaded from it instead of built, and the dataset is only read
/// if other kinds need it.
fn query(args: &Args) -> Result<Vec<BenchReport>> {
    let snap = match args.snapshot.as_deref().filter(|p| Path::exists(p)) {
        Some(path) => Some(AnyIndex::HintM(snapshot::load(path)?)),
        None => None,
    };
    let kinds = args.kinds()?;
    let from_data = |k: &IndexKind| snap.is_none() || *k != IndexKind::HintM;
    let (data, queries) = if kinds.iter().any(from_data) {
        args.workload()?
    } else {
        let queries = match (&args.queries, &snap) {
            (Some(q), _) => workload::load_queries(q, Format::from_path(q))?,
            (None, Some(AnyIndex::HintM(i))) => workload::gen_queries(&args.spec(i.mapper().max_x() + 1), &[])?,
            (None, _) => Vec::new(),
        };
        (Vec::new(), queries)
    };
    let params = args.params()?;
    let mut rows = Vec::new();
    for kind in kinds {
        let row = match &snap {
            Some(index) if !from_data(&kind) => query_one(args, index, &queries)?,
            _ => {
                let (index, built) = cmd_build(&data, kind, &params)?;
                let mut row = query_one(args, &index, &queries)?;
                row.build_secs = built.build_secs;
                row
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn mixed(args: &Args) -> Result<Vec<BenchReport>> {
    let (data, queries) = args.workload()?;
    let params = args.params()?;
    let script = MixedScript {
        preload_frac: args.preload,
        queries: args.mix_queries,
        inserts: args.inserts,
        deletes: args.deletes,
        seed: args.seed,
    };
    let mut rows = Vec::new();
    for kind in args.kinds()? {
        let out = cmd_mixed(&data, &queries, kind, &params, &script)?;
        for q in &queries {
            let mut got = out.index.range_query(q);
            got.sort_unstable();
            let mut want = hint_index::baselines::brute_force_query(&out.live, q);
            want.sort_unstable();
            if got != want {
                return Err(Error::ChecksumMismatch(format!("{kind} disagrees with a rebuild after the script on {q:?}")));
            }
        }
        rows.push(out.report);
    }
    Ok(rows)
}

fn sweep(args: &Args) -> Result<Vec<BenchReport>> {
    let (data, queries) = args.workload()?;
    let base = args.params()?;
    let mut rows = Vec::new();
    for kind in args.kinds()? {
        let grid: Vec<IndexParams> = match kind {
            IndexKind::Grid => args.partitions()?.into_iter().map(|p| IndexParams { p, ..base }).collect(),
            IndexKind::Brute => vec![base],
            _ => args.levels()?.into_iter().map(|m| IndexParams { m, ..base }).collect(),
        };
        rows.extend(cmd_sweep(&data, &queries, kind, &grid, args.repeats)?);
    }
    Ok(rows)
}

fn run(cli: &Cli) -> Result<()> {
    let args = &cli.args;
    let rows = match cli.cmd {
        Cmd::Gen => return gen(args),
        Cmd::Build => build(args)?,
        Cmd::Query => query(args)?,
        Cmd::Mixed => mixed(args)?,
        Cmd::Sweep => sweep(args)?,
    };
    emit(args, &rows)?;
    check_checksums(&rows)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::ChecksumMismatch(_)) => {
            eprintln!("hint-bench: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("hint-bench: {e}");
            ExitCode::from(1)
        }
    }
}
