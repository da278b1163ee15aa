//! Comparison-free HINT over a small integer domain.
//!
//! cargo run --example comparison_free_hint

use hint_index::domain::{Interval, QueryRange};
use hint_index::hint::{assign_partitions, HintIndex, PartitionAddress};

fn main() -> hint_index::error::Result<()> {
    let m = 4;
    let data = vec![
        Interval::new(0, 5, 9)?,
        Interval::new(1, 0, 15)?,
        Interval::new(2, 3, 4)?,
        Interval::new(3, 10, 12)?,
        Interval::new(4, 6, 6)?,
    ];

    println!("partitions of [5, 9] with m = {m}:");
    for a in assign_partitions(5, 9, m) {
        let role = if a.original { "original" } else { "replica" };
        println!("  level {} offset {} ({role})", a.addr.level, a.addr.offset);
    }

    let index = HintIndex::build(&data, m)?;
    println!("{} intervals, {} entries, {} non-empty partitions", index.len(), index.total_entries(), index.non_empty_partitions());
    let (orig, repl) = index.partition(PartitionAddress { level: 3, offset: 3 });
    println!("P(3,3): originals {orig:?}, replicas {repl:?}");

    for q in [QueryRange::new(5, 9), QueryRange::stab(11), QueryRange::new(13, 100)] {
        let mut ids = index.range_query(&q);
        ids.sort();
        let stats = index.query_stats(&q);
        println!("query [{}, {}] -> {ids:?} with {} comparisons", q.st, q.end, stats.comparisons);
    }
    Ok(())
}
