//! End-to-end acceptance checks, one PASS/FAIL line each. Runs without the
//! test harness so the lines always show and the throughput measurements
//! never share the machine with other tests.

use std::time::Instant;

use hint_index::baselines::brute_force_query;
use hint_index::bench::{cmd_build, cmd_mixed, cmd_query, cmd_sweep, AnyIndex, Checksum, IndexKind, IndexParams, MixedScript};
use hint_index::domain::{DomainMapper, Interval, QueryRange, RecordId};
use hint_index::hint::HintIndex;
use hint_index::hint_m::{BuildOptions, HintMIndex};
use hint_index::tuning::{calibrate_betas, estimate_m_opt, predict_replication, DatasetStats, DEFAULT_TOLERANCE};
use hint_index::workload::{gen_intervals, gen_queries, QueryPositions, WorkloadSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let domain = 1u64 << 20;
    let kinds: Vec<(IndexKind, IndexParams)> = {
        let base = IndexParams { domain: Some((0, domain - 1)), p: 512, ..IndexParams::default() };
        let mut v = vec![(IndexKind::Brute, base), (IndexKind::Grid, base), (IndexKind::Hint, IndexParams { m: 20, ..base })];
        for m in [8, 12, 16] {
            v.push((IndexKind::HintM, IndexParams { m, ..base }));
        }
        v.push((IndexKind::Hybrid, IndexParams { m: 12, ..base }));
        v
    };
    for w in 0..50 {
        let spec = WorkloadSpec {
            domain_len: domain,
            n: 10_000,
            alpha: rng.random_range(1.01..=1.8),
            sigma: rng.random_range(10_000.0..=1_000_000.0),
            query_count: 200,
            query_positions: if w % 2 == 0 { QueryPositions::Uniform } else { QueryPositions::DataFollowing },
            seed: rng.random(),
            ..WorkloadSpec::default()
        };
        let data = gen_intervals(&spec).map_err(|e| e.to_string())?;
        let queries = gen_queries(&spec, &data).map_err(|e| e.to_string())?;
        let mut reference = Checksum::default();
        for q in &queries {
            reference.fold_ids(&brute_force_query(&data, q));
        }
        for (kind, params) in &kinds {
            let index = AnyIndex::build(*kind, &data, params).map_err(|e| e.to_string())?;
            let mut sum = Checksum::default();
            for q in &queries {
                sum.fold_query(&index, q);
            }
            if sum.value() != reference.value() {
                return Err(format!("workload {w} (alpha {:.2}, sigma {:.0}): {} differs", spec.alpha, spec.sigma, kind.name()));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    check(secs < 120.0, format!("50 workloads x {} indexes agree in {secs:.1}s", kinds.len()))
}

fn zero_comparison_hint() -> Outcome {
    let m = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let data: Vec<Interval> = (0..3_000u32)
        .map(|i| {
            let a = rng.random_range(0..256u64);
            let b = rng.random_range(0..256u64);
            Interval::new(i, a.min(b), a.max(b)).unwrap()
        })
        .collect();
    let index = HintIndex::build(&data, m).map_err(|e| e.to_string())?;
    let (mut queries, mut cmps) = (0u64, 0u64);
    for a in 0..256u64 {
        for b in a..256u64 {
            let q = QueryRange::new(a, b);
            let st = index.query_stats(&q);
            cmps += st.comparisons;
            queries += 1;
            let mut got = index.range_query(&q);
            let mut want = brute_force_query(&data, &q);
            got.sort_unstable();
            want.sort_unstable();
            if got != want {
                return Err(format!("wrong answer for [{a}, {b}]"));
            }
        }
    }
    check(cmps == 0, format!("{queries} queries, {cmps} comparisons"))
}

fn partitions_compared() -> Outcome {
    let m = 12;
    // Spread the data so that most queries meet non-empty partitions.
    let spec = WorkloadSpec { n: 100_000, sigma: 32_000_000.0, ..WorkloadSpec::default() };
    let data = gen_intervals(&spec).map_err(|e| e.to_string())?;
    let mapper = DomainMapper::new(0, spec.domain_len - 1, m).map_err(|e| e.to_string())?;
    let index = HintMIndex::build(&data, mapper, BuildOptions::default()).map_err(|e| e.to_string())?;
    let width = spec.domain_len >> m;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let k = 10_000;
    let mut total = 0;
    for _ in 0..k {
        let extent = rng.random_range(2 * width..=256 * width);
        let st = rng.random_range(0..spec.domain_len - extent);
        total += index.query_stats(&QueryRange::new(st, st + extent)).partitions_compared;
    }
    let mean = total as f64 / k as f64;
    check(mean <= 4.5, format!("mean {mean:.3} partitions with comparisons per query (limit 4.5)"))
}

fn replication_model() -> Outcome {
    let bits = 24;
    let domain = 1u64 << bits;
    let mean_len = 1u64 << 14;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let data: Vec<Interval> = (0..100_000u32)
        .map(|i| {
            let len = rng.random_range(1..=2 * mean_len - 1);
            let st = rng.random_range(0..domain - len);
            Interval::new(i, st, st + len - 1).unwrap()
        })
        .collect();
    let lambda = data.iter().map(|s| s.len() as f64).sum::<f64>() / data.len() as f64;
    let mut prev = 0.0;
    let mut parts = Vec::new();
    let mut ok = true;
    for m in 8..=16 {
        let mapper = DomainMapper::new(0, domain - 1, m).map_err(|e| e.to_string())?;
        let index = HintMIndex::build(&data, mapper, BuildOptions::default()).map_err(|e| e.to_string())?;
        let measured = index.stats().replication();
        let predicted = predict_replication(lambda, bits, m);
        let ratio = measured / predicted;
        ok &= (0.5..=2.0).contains(&ratio) && measured > prev;
        prev = measured;
        parts.push(format!("m{m} {measured:.2}/{predicted:.2}"));
    }
    check(ok, format!("measured/predicted: {}", parts.join(", ")))
}

fn tuning_model() -> Outcome {
    let spec = WorkloadSpec::default();
    let data = gen_intervals(&spec).map_err(|e| e.to_string())?;
    let queries = gen_queries(&spec, &data).map_err(|e| e.to_string())?;
    let stats = DatasetStats::from_intervals(&data, spec.query_extent() as f64);
    let coeffs = calibrate_betas(1 << 16).map_err(|e| e.to_string())?;
    let m_opt = estimate_m_opt(&stats, &coeffs, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    let grid: Vec<IndexParams> = (4..=20).map(|m| IndexParams { m, ..IndexParams::default() }).collect();
    let rows = cmd_sweep(&data, &queries, IndexKind::HintM, &grid, 5).map_err(|e| e.to_string())?;
    let best = rows
        .iter()
        .max_by(|a, b| a.qps_best.partial_cmp(&b.qps_best).unwrap())
        .and_then(|r| r.m)
        .unwrap_or(0);
    check(
        m_opt.abs_diff(best) <= 2,
        format!("model m_opt {m_opt} (beta ratio {:.2}), sweep best m {best}", coeffs.beta_cmp / coeffs.beta_acc),
    )
}

fn update_soundness() -> Outcome {
    let spec = WorkloadSpec { n: 100_000, query_count: 1_000, ..WorkloadSpec::default() };
    let data = gen_intervals(&spec).map_err(|e| e.to_string())?;
    let queries = gen_queries(&spec, &data).map_err(|e| e.to_string())?;
    let script = MixedScript { preload_frac: 0.9, queries: 1_000, inserts: 500, deletes: 100, seed: 6 };
    let params = IndexParams::default();
    let out = cmd_mixed(&data, &queries, IndexKind::Hybrid, &params, &script).map_err(|e| e.to_string())?;
    let rebuilt = HintMIndex::build(&out.live, *out_mapper(&out.index)?, BuildOptions::default()).map_err(|e| e.to_string())?;
    let sorted = |mut v: Vec<RecordId>| {
        v.sort_unstable();
        v
    };
    let mismatches = queries.iter().filter(|q| sorted(out.index.range_query(q)) != sorted(rebuilt.range_query(q))).count();
    check(
        mismatches == 0 && out.index.len() == out.live.len(),
        format!("{} live after {} inserts and {} deletes, {mismatches} of {} queries differ", out.live.len(), out.report.inserts, out.report.deletes, queries.len()),
    )
}

fn out_mapper(index: &AnyIndex) -> Result<&DomainMapper, String> {
    match index {
        AnyIndex::Hybrid(h) => Ok(h.mapper()),
        _ => Err("mixed run did not produce a hybrid index".into()),
    }
}

fn directional_performance() -> Outcome {
    let spec = WorkloadSpec::default();
    let data = gen_intervals(&spec).map_err(|e| e.to_string())?;
    let queries = gen_queries(&spec, &data).map_err(|e| e.to_string())?;
    let hint_grid: Vec<IndexParams> = (6..=18).map(|m| IndexParams { m, ..IndexParams::default() }).collect();
    let grid_grid: Vec<IndexParams> =
        [250, 500, 1_000, 2_000, 3_000, 5_000, 10_000].iter().map(|&p| IndexParams { p, ..IndexParams::default() }).collect();
    let best = |rows: &[hint_index::bench::BenchReport]| {
        rows.iter().max_by(|a, b| a.qps_best.partial_cmp(&b.qps_best).unwrap()).cloned().unwrap()
    };
    let h = best(&cmd_sweep(&data, &queries, IndexKind::HintM, &hint_grid, 3).map_err(|e| e.to_string())?);
    let g = best(&cmd_sweep(&data, &queries, IndexKind::Grid, &grid_grid, 3).map_err(|e| e.to_string())?);
    if h.checksum != g.checksum {
        return Err("grid and HINT^m checksums differ".into());
    }
    let speedup = h.qps_best.unwrap() / g.qps_best.unwrap();

    let m = h.m.unwrap();
    let with = AnyIndex::build(IndexKind::HintM, &data, &IndexParams { m, ..IndexParams::default() }).map_err(|e| e.to_string())?;
    let without_opts = BuildOptions { storage_opt: false, ..BuildOptions::default() };
    let without = AnyIndex::build(IndexKind::HintM, &data, &IndexParams { m, opts: without_opts, ..IndexParams::default() })
        .map_err(|e| e.to_string())?;
    let saving = 1.0 - with.heap_bytes() as f64 / without.heap_bytes() as f64;
    check(
        speedup >= 1.5 && saving >= 0.20,
        format!(
            "HINT^m m={m} {:.0} qps vs grid p={} {:.0} qps ({speedup:.2}x); storage_opt saves {:.1}%",
            h.qps_best.unwrap(),
            g.p.unwrap(),
            g.qps_best.unwrap(),
            saving * 100.0
        ),
    )
}

fn sorted_subdivisions() -> Outcome {
    let spec = WorkloadSpec::default();
    let data = gen_intervals(&spec).map_err(|e| e.to_string())?;
    let queries = gen_queries(&spec, &data).map_err(|e| e.to_string())?;
    let run = |sorted: bool| {
        let opts = BuildOptions { sorted, ..BuildOptions::default() };
        let (index, _) = cmd_build(&data, IndexKind::HintM, &IndexParams { m: 12, opts, ..IndexParams::default() })?;
        let report = cmd_query(&index, &queries, 1)?;
        let comparisons: u64 = queries.iter().map(|q| index.query_stats(q).comparisons).sum();
        Ok::<_, hint_index::error::Error>((comparisons, report.checksum))
    };
    let (on, sum_on) = run(true).map_err(|e| e.to_string())?;
    let (off, sum_off) = run(false).map_err(|e| e.to_string())?;
    check(on <= off && sum_on == sum_off, format!("{on} comparisons sorted vs {off} unsorted, checksums equal: {}", sum_on == sum_off))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("zero-comparison HINT", zero_comparison_hint),
        ("partitions compared per query", partitions_compared),
        ("replication model", replication_model),
        ("tuning model", tuning_model),
        ("update soundness", update_soundness),
        ("directional performance", directional_performance),
        ("sorted subdivisions", sorted_subdivisions),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                println!("FAIL {} {name}: {detail} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
