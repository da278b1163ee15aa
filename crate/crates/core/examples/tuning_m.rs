//! Picks the number of levels for a synthetic dataset with the cost model,
//! then measures throughput around the chosen value.
//!
//! cargo run --release --example tuning_m

use hint_index::bench::{cmd_sweep, IndexKind, IndexParams};
use hint_index::tuning::{self, DatasetStats, DEFAULT_TOLERANCE};
use hint_index::workload::{gen_intervals, gen_queries, WorkloadSpec};

fn main() -> hint_index::error::Result<()> {
    let spec = WorkloadSpec { query_count: 5_000, ..WorkloadSpec::default() };
    let data = gen_intervals(&spec)?;
    let queries = gen_queries(&spec, &data)?;

    let stats = DatasetStats::from_intervals(&data, spec.query_extent() as f64);
    let betas = tuning::calibrate_betas(1 << 16)?;
    let m_opt = tuning::estimate_m_opt(&stats, &betas, DEFAULT_TOLERANCE)?;
    println!(
        "n = {}, mean length = {:.0}, domain = {:.0} ({} bits)",
        stats.n, stats.lambda_s, stats.domain, stats.m_prime
    );
    println!(
        "beta_cmp = {:.3} ns, beta_acc = {:.3} ns, expected results = {:.0}",
        betas.beta_cmp * 1e9,
        betas.beta_acc * 1e9,
        tuning::estimate_result_size(&stats)?
    );
    println!("model m_opt = {m_opt}");

    let lo = m_opt.saturating_sub(4).max(1);
    let grid: Vec<IndexParams> = (lo..=m_opt + 4).map(|m| IndexParams { m, ..Default::default() }).collect();
    println!("{:>3} {:>12} {:>12} {:>10}", "m", "queries/s", "model ns", "k");
    for row in cmd_sweep(&data, &queries, IndexKind::HintM, &grid, 3)? {
        let m = row.m.unwrap_or_default();
        let cost = tuning::estimate_query_cost(&stats, &betas, m)?;
        println!(
            "{m:>3} {:>12.0} {:>12.0} {:>10.3}",
            row.qps_best.unwrap_or_default(),
            cost * 1e9,
            row.replication.unwrap_or_default()
        );
    }
    Ok(())
}
