//! Saves a built HINT^m index to a binary snapshot and loads it back.
//!
//! cargo run --release --example snapshot

use hint_index::domain::DomainMapper;
use hint_index::hint_m::{snapshot, BuildOptions, HintMIndex};
use hint_index::workload::{gen_intervals, gen_queries, WorkloadSpec};

fn main() -> hint_index::error::Result<()> {
    let spec = WorkloadSpec { n: 100_000, query_count: 1_000, ..WorkloadSpec::default() };
    let data = gen_intervals(&spec)?;
    let mut index = HintMIndex::build(&data, DomainMapper::covering(&data, 14)?, BuildOptions::default())?;
    index.delete(data[0].id)?;

    let path = std::env::temp_dir().join("hint-example.hintm");
    snapshot::save(&index, &path)?;
    let loaded = snapshot::load(&path)?;
    let size = std::fs::metadata(&path)?.len();
    println!("snapshot {} ({size} bytes, {} bytes in memory)", path.display(), index.heap_bytes());

    let same = gen_queries(&spec, &data)?.iter().all(|q| {
        let mut a = index.range_query(q);
        let mut b = loaded.range_query(q);
        a.sort();
        b.sort();
        a == b
    });
    println!("loaded index answers identically: {same}; tombstones kept: {}", loaded.tombstones().len());
    std::fs::remove_file(&path)?;
    Ok(())
}
