//! Generates a synthetic dataset and query set and round-trips them
//! through files.
//!
//! cargo run --release --example synthetic_workload -- /tmp/data.tsv.gz

use hint_index::workload::{self, Format, QueryPositions, WorkloadSpec};

fn main() -> hint_index::error::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("hint-data.tsv.gz").display().to_string());
    let spec = WorkloadSpec { n: 100_000, alpha: 1.8, query_positions: QueryPositions::Uniform, ..WorkloadSpec::default() };
    let data = workload::gen_intervals(&spec)?;
    let queries = workload::gen_queries(&spec, &data)?;

    let ones = data.iter().filter(|s| s.len() == 1).count();
    let mean = data.iter().map(|s| s.len() as f64).sum::<f64>() / data.len() as f64;
    println!("{} intervals, {:.1}% of length 1, mean length {mean:.1}", data.len(), 100.0 * ones as f64 / data.len() as f64);
    println!("{} queries of extent {}", queries.len(), spec.query_extent());

    let fmt = Format::from_path(path.as_ref());
    workload::save_dataset(&path, fmt, &data)?;
    let back = workload::load_dataset(&path, fmt)?;
    println!("wrote and re-read {path}: identical = {}", back == data);
    Ok(())
}
