use std::path::Path;
use std::process::{Command, Output};

fn bench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hint-bench")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: [&str; 6] = ["--n", "3000", "--query-count", "200", "--repeats", "1"];

#[test]
fn gen_then_query_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["gen", "--dataset", "d.tsv", "--queries", "q.tsv", "--domain", "1048576"];
    args.extend(SMALL);
    assert!(bench(dir.path(), &args).status.success());

    let mut args = vec!["query", "--dataset", "d.tsv", "--queries", "q.tsv", "--index", "brute,grid,hint,hintm,dynamic,hybrid", "--m", "20", "--out", "r.csv"];
    args.extend(SMALL);
    let o = bench(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 6);
    let checksum_col = hint_index::bench::CSV_HEADER.split(',').position(|c| c == "checksum").unwrap();
    let sums: Vec<&str> = rows.iter().map(|r| r.split(',').nth(checksum_col).unwrap()).collect();
    assert!(sums.iter().all(|s| *s == sums[0] && !s.is_empty()));
    let report = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(report, text);
}

#[test]
fn stale_snapshot_is_a_checksum_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["build", "--index", "hintm", "--snapshot", "s.hintm", "--seed", "1"];
    args.extend(SMALL);
    assert!(bench(dir.path(), &args).status.success());

    let mut args = vec!["query", "--index", "hintm", "--snapshot", "s.hintm", "--seed", "1"];
    args.extend(SMALL);
    assert_eq!(bench(dir.path(), &args).status.code(), Some(0));

    // Different data for the scan than the snapshot was built from.
    let mut args = vec!["query", "--index", "brute,hintm", "--snapshot", "s.hintm", "--seed", "2"];
    args.extend(SMALL);
    let o = bench(dir.path(), &args);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum"));
}

#[test]
fn sweep_and_mixed() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "--index", "hintm,grid", "--m", "6-9", "--p", "100,400"];
    args.extend(SMALL);
    let o = bench(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2 + 4 + 2);

    let mut args = vec!["mixed", "--index", "hybrid,brute", "--mix-queries", "100", "--inserts", "200", "--deletes", "50"];
    args.extend(SMALL);
    let o = bench(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().nth(2).unwrap().starts_with("mixed,hybrid"));
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.tsv"), "0 1 5\n1 9 3\n").unwrap();
    let o = bench(dir.path(), &["query", "--dataset", "bad.tsv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.tsv:2:"));
    assert_eq!(bench(dir.path(), &["build", "--index", "btree"]).status.code(), Some(1));
    assert_eq!(bench(dir.path(), &["gen"]).status.code(), Some(1));
}
