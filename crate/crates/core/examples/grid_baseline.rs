//! The uniform 1D-grid baseline and its duplicate-free reporting, checked
//! against a linear scan.
//!
//! cargo run --release --example grid_baseline

use hint_index::baselines::{brute_force_query, Grid1D};
use hint_index::domain::{Interval, QueryRange};
use hint_index::workload::{gen_intervals, gen_queries, WorkloadSpec};

fn main() -> hint_index::error::Result<()> {
    let data = vec![
        Interval::new(1, 0, 3)?,
        Interval::new(2, 4, 6)?,
        Interval::new(3, 9, 12)?,
        Interval::new(4, 2, 14)?,
        Interval::new(5, 7, 8)?,
    ];
    let grid = Grid1D::build_over(&data, 4, 0, 15)?;
    for c in 0..grid.partitions() {
        let ids: Vec<u32> = grid.cell(c).iter().map(|s| s.id.0).collect();
        println!("cell {c} [{}, {}]: {ids:?}", grid.cell_start(c), grid.cell_end(c));
    }
    let q = QueryRange::new(5, 9);
    let mut got = grid.range_query(&q);
    got.sort();
    println!("query [5, 9] -> {got:?} (interval 4 spans three cells, reported once)");

    let spec = WorkloadSpec { n: 50_000, query_count: 1_000, ..WorkloadSpec::default() };
    let data = gen_intervals(&spec)?;
    let queries = gen_queries(&spec, &data)?;
    for p in [100, 1_000, 10_000] {
        let grid = Grid1D::build(&data, p)?;
        let mut mismatches = 0;
        for q in &queries {
            let mut a = grid.range_query(q);
            let mut b = brute_force_query(&data, q);
            a.sort();
            b.sort();
            mismatches += usize::from(a != b);
        }
        println!("p = {p:>6}: replication {:>7.2}, {} bytes, {mismatches} mismatching queries", grid.replication(), grid.heap_bytes());
    }
    Ok(())
}
