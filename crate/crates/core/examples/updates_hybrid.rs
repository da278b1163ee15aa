//! Inserts and deletes through a hybrid index: a read-optimized HINT^m
//! plus an update-friendly delta, merged when the delta grows.
//!
//! cargo run --release --example updates_hybrid

use hint_index::domain::{DomainMapper, Interval, QueryRange, RecordId};
use hint_index::hint_m::{BuildOptions, HybridIndex};

fn main() -> hint_index::error::Result<()> {
    let mapper = DomainMapper::new(0, 1_000_000, 12)?;
    let base: Vec<Interval> = (0..10_000u32)
        .map(|i| {
            let st = u64::from(i) * 97 % 990_000;
            Interval::new(i, st, st + 5_000)
        })
        .collect::<Result<_, _>>()?;
    let mut index = HybridIndex::new(&base, mapper, BuildOptions::default(), 0.05)?;
    let q = QueryRange::new(500_000, 500_100);
    println!("before: {} results", index.range_query(&q).len());

    for i in 0..400u32 {
        index.insert(Interval::new(10_000 + i, 499_000 + u64::from(i), 501_000)?)?;
    }
    println!("after 400 inserts: {} results, delta holds {}", index.range_query(&q).len(), index.delta().len());

    for id in index.range_query(&q).into_iter().take(50) {
        index.delete(id)?;
    }
    println!("after 50 deletes: {} results", index.range_query(&q).len());
    match index.delete(RecordId(999_999)) {
        Err(e) => println!("deleting an unknown id: {e}"),
        Ok(()) => unreachable!(),
    }

    let before = index.total_entries();
    index.flush_delta()?;
    println!(
        "flush: {} -> {} entries, {} live, same answer: {} results",
        before,
        index.total_entries(),
        index.len(),
        index.range_query(&q).len()
    );
    Ok(())
}
