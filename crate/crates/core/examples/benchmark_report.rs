//! Runs one query workload on every index kind, checks that their answers
//! agree and prints the report as CSV.
//!
//! cargo run --release --example benchmark_report

use hint_index::bench::{check_checksums, cmd_build, cmd_query, BenchReport, IndexKind, IndexParams};
use hint_index::workload::{gen_intervals, gen_queries, WorkloadSpec};

fn main() -> hint_index::error::Result<()> {
    let spec = WorkloadSpec { domain_len: 1 << 24, n: 50_000, sigma: 2_000_000.0, query_count: 2_000, ..WorkloadSpec::default() };
    let data = gen_intervals(&spec)?;
    let queries = gen_queries(&spec, &data)?;
    let params = IndexParams { m: 24, p: 2_000, ..IndexParams::default() };

    let mut rows = Vec::new();
    for kind in IndexKind::ALL {
        // The comparison-free index needs one level per domain bit; the others use fewer.
        let params = if kind == IndexKind::Hint { params } else { IndexParams { m: 12, ..params } };
        let (index, built) = cmd_build(&data, kind, &params)?;
        let mut row = cmd_query(&index, &queries, 3)?;
        row.build_secs = built.build_secs;
        rows.push(row);
    }
    check_checksums(&rows)?;
    print!("{}", BenchReport::to_csv(&rows));
    Ok(())
}
