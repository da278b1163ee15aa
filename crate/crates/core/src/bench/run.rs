use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Interval, QueryRange};
use crate::error::{Error, Result};
use crate::probe::QueryStats;

use super::{check_checksums, AnyIndex, BenchReport, Checksum, IndexKind, IndexParams};

fn describe(index: &AnyIndex, command: &str) -> BenchReport {
    BenchReport {
        command: command.into(),
        index: index.kind().name().into(),
        m: index.levels(),
        p: index.partitions(),
        opts: index.options().map(|o| o.label()),
        n: index.len(),
        index_bytes: Some(index.heap_bytes()),
        replication: Some(index.replication()),
        ..Default::default()
    }
}

/// Builds one index and reports its build time and size.
pub fn cmd_build(data: &[Interval], kind: IndexKind, params: &IndexParams) -> Result<(AnyIndex, BenchReport)> {
    let t = Instant::now();
    let index = AnyIndex::build(kind, data, params)?;
    let secs = t.elapsed().as_secs_f64();
    let mut report = describe(&index, "build");
    report.build_secs = Some(secs);
    Ok((index, report))
}

/// One untimed warm-up pass, then `repeats` timed passes. `qps_best` comes
/// from the fastest pass and `qps_mean` from the total time of all passes.
/// Comparison counts come from a separate instrumented pass.
pub fn cmd_query(index: &AnyIndex, queries: &[QueryRange], repeats: usize) -> Result<BenchReport> {
    Ok(measure(&[index], queries, repeats)?.remove(0))
}

/// [`cmd_query`] over several indexes, with the timed passes taken in
/// round-robin order so that drift in machine speed spreads over all of them.
fn measure(indexes: &[&AnyIndex], queries: &[QueryRange], repeats: usize) -> Result<Vec<BenchReport>> {
    if queries.is_empty() {
        return Err(Error::InvalidParameter("no queries to run".into()));
    }
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let warm: Vec<u64> = indexes
        .iter()
        .map(|index| {
            let mut c = Checksum::default();
            for q in queries {
                c.fold_query(index, q);
            }
            c.value()
        })
        .collect();
    let mut best = vec![f64::INFINITY; indexes.len()];
    let mut total = vec![0.0; indexes.len()];
    for _ in 0..repeats {
        for (i, index) in indexes.iter().enumerate() {
            let mut c = Checksum::default();
            let t = Instant::now();
            for q in queries {
                c.fold_query(index, q);
            }
            let secs = t.elapsed().as_secs_f64();
            std::hint::black_box(c);
            best[i] = best[i].min(secs);
            total[i] += secs;
        }
    }
    let k = queries.len() as f64;
    let mut reports = Vec::with_capacity(indexes.len());
    for (i, index) in indexes.iter().enumerate() {
        let mut stats = QueryStats::default();
        for q in queries {
            stats += index.query_stats(q);
        }
        let mut report = describe(index, "query");
        report.queries = queries.len();
        report.repeats = repeats;
        report.qps_best = Some(k / best[i].max(f64::MIN_POSITIVE));
        report.qps_mean = Some(k * repeats as f64 / total[i].max(f64::MIN_POSITIVE));
        report.mean_comparisons = Some(stats.comparisons as f64 / k);
        report.mean_partitions_compared = Some(stats.partitions_compared as f64 / k);
        report.mean_results = Some(stats.results as f64 / k);
        report.checksum = Some(warm[i]);
        report.total_secs = Some(total[i]);
        reports.push(report);
    }
    Ok(reports)
}

/// Throughput with `threads` readers sharing the index, each taking an
/// interleaved slice of the queries. Not used for acceptance numbers.
pub fn run_query_parallel(index: &AnyIndex, queries: &[QueryRange], threads: usize) -> Result<f64> {
    if queries.is_empty() || threads == 0 {
        return Err(Error::InvalidParameter("parallel run needs queries and at least one thread".into()));
    }
    let t = Instant::now();
    std::thread::scope(|scope| {
        for k in 0..threads {
            scope.spawn(move || {
                let mut c = Checksum::default();
                for q in queries.iter().skip(k).step_by(threads) {
                    c.fold_query(index, q);
                }
                std::hint::black_box(c);
            });
        }
    });
    Ok(queries.len() as f64 / t.elapsed().as_secs_f64().max(f64::MIN_POSITIVE))
}

/// An update workload: a bulk-loaded prefix of the data, then queries,
/// inserts of the remaining intervals and deletes of random live ids, in a
/// seeded random order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedScript {
    /// Fraction of the data loaded before timing starts.
    pub preload_frac: f64,
    pub queries: usize,
    pub inserts: usize,
    pub deletes: usize,
    pub seed: u64,
}

impl Default for MixedScript {
    fn default() -> Self {
        MixedScript { preload_frac: 0.9, queries: 10_000, inserts: 5_000, deletes: 1_000, seed: 7 }
    }
}

/// Result of [`cmd_mixed`]: the final index, its report and the live set.
#[derive(Debug)]
pub struct MixedOutcome {
    pub index: AnyIndex,
    pub report: BenchReport,
    pub live: Vec<Interval>,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Query(usize),
    Insert(usize),
    Delete,
}

/// Runs `script` against a fresh index of `kind`. Queries are drawn from
/// `query_pool` in order, wrapping around. Inserted intervals come from
/// the data after the preloaded prefix; fewer are inserted if the data
/// runs out.
pub fn cmd_mixed(
    data: &[Interval],
    query_pool: &[QueryRange],
    kind: IndexKind,
    params: &IndexParams,
    script: &MixedScript,
) -> Result<MixedOutcome> {
    if !(0.0..=1.0).contains(&script.preload_frac) {
        return Err(Error::InvalidParameter(format!("preload fraction {} must be in [0, 1]", script.preload_frac)));
    }
    if script.queries > 0 && query_pool.is_empty() {
        return Err(Error::InvalidParameter("mixed script has queries but the query pool is empty".into()));
    }
    let preload = ((data.len() as f64) * script.preload_frac).round() as usize;
    let (loaded, rest) = data.split_at(preload.min(data.len()));
    let inserts = script.inserts.min(rest.len());

    // Domain-based indexes must cover intervals inserted later.
    let mut params = *params;
    if params.domain.is_none() && !data.is_empty() {
        let lo = data.iter().map(|s| s.st).min().unwrap_or(0);
        let hi = data.iter().map(|s| s.end).max().unwrap_or(0);
        params.domain = Some((lo, hi));
    }
    let t = Instant::now();
    let mut index = AnyIndex::build(kind, loaded, &params)?;
    let build_secs = t.elapsed().as_secs_f64();

    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    let mut ops: Vec<Op> = (0..script.queries)
        .map(Op::Query)
        .chain((0..inserts).map(Op::Insert))
        .chain(std::iter::repeat_n(Op::Delete, script.deletes))
        .collect();
    ops.shuffle(&mut rng);

    let mut live: Vec<Interval> = loaded.to_vec();
    let mut checksum = Checksum::default();
    let (mut t_query, mut t_insert, mut t_delete) = (Duration::ZERO, Duration::ZERO, Duration::ZERO);
    let mut deletes = 0;
    for op in ops {
        match op {
            Op::Query(k) => {
                let q = &query_pool[k % query_pool.len()];
                let t = Instant::now();
                checksum.fold_query(&index, q);
                t_query += t.elapsed();
            }
            Op::Insert(k) => {
                let s = rest[k];
                let t = Instant::now();
                index.insert(s)?;
                t_insert += t.elapsed();
                live.push(s);
            }
            Op::Delete => {
                if live.is_empty() {
                    continue;
                }
                let victim = live.swap_remove(rng.random_range(0..live.len())).id;
                let t = Instant::now();
                index.delete(victim)?;
                t_delete += t.elapsed();
                deletes += 1;
            }
        }
    }

    let rate = |count: usize, d: Duration| (count > 0).then(|| count as f64 / d.as_secs_f64().max(f64::MIN_POSITIVE));
    let mut report = describe(&index, "mixed");
    report.build_secs = Some(build_secs);
    report.queries = script.queries;
    report.repeats = 1;
    report.qps_best = rate(script.queries, t_query);
    report.qps_mean = report.qps_best;
    report.checksum = (script.queries > 0).then(|| checksum.value());
    report.mean_results = (script.queries > 0).then(|| checksum.results() as f64 / script.queries as f64);
    report.inserts = inserts;
    report.deletes = deletes;
    report.insert_ops_per_sec = rate(inserts, t_insert);
    report.delete_ops_per_sec = rate(deletes, t_delete);
    report.total_secs = Some((t_query + t_insert + t_delete).as_secs_f64());
    Ok(MixedOutcome { index, report, live })
}

/// Builds `kind` once per grid point, then times all of them with their
/// passes interleaved. Rows follow grid order. Fails with
/// [`Error::ChecksumMismatch`] if any two points disagree.
pub fn cmd_sweep(
    data: &[Interval],
    queries: &[QueryRange],
    kind: IndexKind,
    grid: &[IndexParams],
    repeats: usize,
) -> Result<Vec<BenchReport>> {
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    let built = grid.iter().map(|params| cmd_build(data, kind, params)).collect::<Result<Vec<_>>>()?;
    let indexes: Vec<&AnyIndex> = built.iter().map(|(index, _)| index).collect();
    let mut rows = measure(&indexes, queries, repeats)?;
    for (row, (_, b)) in rows.iter_mut().zip(&built) {
        row.command = "sweep".into();
        row.build_secs = b.build_secs;
    }
    check_checksums(&rows)?;
    Ok(rows)
}

#[cfg(test)]
/// Ids of `live` overlapping `q`, sorted; the oracle for update workloads.
pub(crate) fn oracle(live: &[Interval], q: &QueryRange) -> Vec<crate::domain::RecordId> {
    let mut v = crate::baselines::brute_force_query(live, q);
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{gen_intervals, gen_queries, WorkloadSpec};

    fn workload() -> (Vec<Interval>, Vec<QueryRange>) {
        let spec = WorkloadSpec { domain_len: 1 << 22, n: 5000, sigma: 500_000.0, query_count: 400, ..Default::default() };
        let data = gen_intervals(&spec).unwrap();
        let queries = gen_queries(&spec, &data).unwrap();
        (data, queries)
    }

    #[test]
    fn query_reports_agree_across_kinds() {
        let (data, queries) = workload();
        let params = IndexParams { m: 22, p: 500, ..Default::default() };
        let mut rows = Vec::new();
        for kind in IndexKind::ALL {
            let (index, _) = cmd_build(&data, kind, &params).unwrap();
            let r = cmd_query(&index, &queries, 2).unwrap();
            assert!(r.qps_best.unwrap() >= r.qps_mean.unwrap() * 0.999);
            rows.push(r);
        }
        check_checksums(&rows).unwrap();
        let hint = rows.iter().find(|r| r.index == "hint").unwrap();
        assert_eq!(hint.mean_comparisons, Some(0.0));
        let mut bad = rows[0].clone();
        bad.checksum = Some(bad.checksum.unwrap() ^ 1);
        rows.push(bad);
        assert!(matches!(check_checksums(&rows), Err(Error::ChecksumMismatch(_))));
    }

    #[test]
    fn query_argument_errors() {
        let (data, queries) = workload();
        let (index, _) = cmd_build(&data, IndexKind::HintM, &IndexParams::default()).unwrap();
        assert!(cmd_query(&index, &[], 3).is_err());
        assert!(cmd_query(&index, &queries, 0).is_err());
        assert!(run_query_parallel(&index, &queries, 4).unwrap() > 0.0);
    }

    #[test]
    fn build_is_deterministic_and_truncation_saves_space() {
        let (data, _) = workload();
        let p = IndexParams { m: 12, ..Default::default() };
        let (a, ra) = cmd_build(&data, IndexKind::HintM, &p).unwrap();
        let (b, rb) = cmd_build(&data, IndexKind::HintM, &p).unwrap();
        let (AnyIndex::HintM(a), AnyIndex::HintM(b)) = (a, b) else { unreachable!() };
        assert_eq!(crate::hint_m::snapshot::to_bytes(&a), crate::hint_m::snapshot::to_bytes(&b));
        assert_eq!(ra.index_bytes, rb.index_bytes);
        let mut full = p;
        full.opts.storage_opt = false;
        let (_, rf) = cmd_build(&data, IndexKind::HintM, &full).unwrap();
        assert!(ra.index_bytes < rf.index_bytes);
    }

    #[test]
    fn mixed_workload_matches_oracle() {
        let (data, queries) = workload();
        let script = MixedScript { queries: 300, inserts: 400, deletes: 150, ..Default::default() };
        let params = IndexParams { m: 12, ..Default::default() };
        let mut sums = Vec::new();
        for kind in [IndexKind::Brute, IndexKind::Dynamic, IndexKind::Hybrid] {
            let out = cmd_mixed(&data, &queries, kind, &params, &script).unwrap();
            assert_eq!(out.report.inserts, 400);
            assert_eq!(out.report.deletes, 150);
            assert_eq!(out.index.len(), out.live.len());
            for q in &queries {
                let mut got = out.index.range_query(q);
                got.sort_unstable();
                assert_eq!(got, oracle(&out.live, q), "{kind}");
            }
            sums.push(out.report);
        }
        check_checksums(&sums).unwrap();
    }

    #[test]
    fn hybrid_flushes_during_long_scripts() {
        let (data, queries) = workload();
        let script = MixedScript { preload_frac: 0.5, queries: 100, inserts: 2500, deletes: 500, seed: 3 };
        let params = IndexParams { m: 12, merge_threshold: 0.1, ..Default::default() };
        let out = cmd_mixed(&data, &queries, IndexKind::Hybrid, &params, &script).unwrap();
        let AnyIndex::Hybrid(h) = &out.index else { unreachable!() };
        assert!(h.main().len() > 2500);
        for q in &queries {
            let mut got = out.index.range_query(q);
            got.sort_unstable();
            assert_eq!(got, oracle(&out.live, q));
        }
    }

    #[test]
    fn empty_script_reports_nothing() {
        let (data, queries) = workload();
        let script = MixedScript { queries: 0, inserts: 0, deletes: 0, ..Default::default() };
        let out = cmd_mixed(&data, &queries, IndexKind::Hybrid, &IndexParams::default(), &script).unwrap();
        let r = out.report;
        assert_eq!((r.queries, r.inserts, r.deletes), (0, 0, 0));
        assert!(r.qps_best.is_none() && r.insert_ops_per_sec.is_none() && r.checksum.is_none());
    }

    #[test]
    fn immutable_kinds_fail_on_inserts() {
        let (data, queries) = workload();
        let script = MixedScript { queries: 10, inserts: 10, deletes: 0, ..Default::default() };
        assert!(cmd_mixed(&data, &queries, IndexKind::Grid, &IndexParams::default(), &script).is_err());
        assert!(cmd_mixed(&data, &queries, IndexKind::HintM, &IndexParams::default(), &script).is_err());
    }

    #[test]
    fn sweep_rows_follow_grid_order() {
        let (data, queries) = workload();
        let grid: Vec<IndexParams> = (4..=8).map(|m| IndexParams { m, ..Default::default() }).collect();
        let rows = cmd_sweep(&data, &queries, IndexKind::HintM, &grid, 1).unwrap();
        assert_eq!(rows.iter().map(|r| r.m.unwrap()).collect::<Vec<_>>(), vec![4, 5, 6, 7, 8]);
        assert!(rows.iter().all(|r| r.command == "sweep"));
        assert!(cmd_sweep(&data, &queries, IndexKind::HintM, &[], 1).unwrap().is_empty());
    }
}
