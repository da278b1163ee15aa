//! HINT^m over raw timestamps: mapping, subdivisions, layout options and
//! per-query statistics.
//!
//! cargo run --release --example hint_m_queries

use hint_index::domain::{DomainMapper, Interval, QueryRange};
use hint_index::hint_m::{BuildOptions, HintMIndex, SubdivisionKind};
use hint_index::probe::TraceProbe;
use hint_index::workload::{gen_intervals, gen_queries, WorkloadSpec};

fn main() -> hint_index::error::Result<()> {
    // The mapping from raw values to partitions.
    let mapper = DomainMapper::new(0, 63, 4)?;
    let s = Interval::new(1, 21, 38)?;
    let tiny = HintMIndex::build(&[s], mapper, BuildOptions::default())?;
    println!("[21, 38] maps to {:?}", mapper.map_interval(&s)?);
    for (level, offset, kind) in [(4, 5, SubdivisionKind::OAft), (3, 3, SubdivisionKind::RAft), (3, 4, SubdivisionKind::RIn)] {
        println!("  P({level},{offset}) {kind:?}: {:?}", tiny.subdivision(level, offset, kind));
    }

    // A synthetic dataset under every layout.
    let spec = WorkloadSpec { n: 200_000, query_count: 2_000, ..WorkloadSpec::default() };
    let data = gen_intervals(&spec)?;
    let queries = gen_queries(&spec, &data)?;
    let mapper = DomainMapper::covering(&data, 12)?;
    println!("\n{:<28} {:>12} {:>14} {:>10}", "options", "bytes", "comparisons/q", "results/q");
    for opts in [BuildOptions::unoptimized(), BuildOptions { sorted: true, ..BuildOptions::unoptimized() }, BuildOptions::default()] {
        let index = HintMIndex::build(&data, mapper, opts)?;
        let (mut cmps, mut results) = (0, 0);
        for q in &queries {
            let st = index.query_stats(q);
            cmps += st.comparisons;
            results += st.results;
        }
        let k = queries.len() as f64;
        println!("{:<28} {:>12} {:>14.1} {:>10.1}", opts.label(), index.heap_bytes(), cmps as f64 / k, results as f64 / k);
    }

    // Where one query compares.
    let index = HintMIndex::build(&data, mapper, BuildOptions::default())?;
    let q = QueryRange::new(queries[0].st, queries[0].end);
    let mut trace = TraceProbe::default();
    let mut n = 0;
    index.query_probed(&q, &mut trace, &mut |_| n += 1);
    println!("\nquery [{}, {}]: {n} results", q.st, q.end);
    for (level, offset, cmps) in trace.events {
        println!("  level {level:>2} offset {offset:>5}: {cmps} comparisons");
    }
    println!("replication factor {:.3}", index.stats().replication());
    Ok(())
}
