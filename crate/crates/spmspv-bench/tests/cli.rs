//! End-to-end checks of the benchmark binary: flag validation, CSV schema,
//! and agreement between what the rows claim and what an oracle run says.

use spmspv::io::{read_csv, read_mtx};
use spmspv::{dense_spmspv, gen_er_matrix, gen_sparse_vec, ErConfig, PlusTimes};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spmspv-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spmspv-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| {
        panic!("column {name} missing from {header:?}");
    })
}

#[test]
fn multiply_single_row_matches_oracle_bound() {
    let dir = tmpdir("single");
    let out = dir.join("r.csv");
    let st = bench(&[
        "multiply",
        "--gen",
        "er:m=1000,n=1000,d=4,seed=7",
        "--alg",
        "bucket",
        "--threads",
        "1",
        "--nnzx",
        "10",
        "--reps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let (header, rows) = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 1, "one algorithm x one thread count x one vector x one rep");

    // The row's output size must equal an oracle run on the same inputs.
    let a = gen_er_matrix(&ErConfig {
        nrows: 1000,
        ncols: 1000,
        avg_nnz_per_col: 4.0,
        seed: 7,
    })
    .unwrap();
    // Same derivation the harness uses for per-sparsity seeds.
    let (mut z, salt) = (1u64, 10u64);
    z ^= salt.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    let x = gen_sparse_vec(1000, 10, z ^ (z >> 31)).unwrap();
    let y = dense_spmspv(&a, &x, &PlusTimes::<f64>::new()).unwrap();

    let nnz_y: usize = rows[0][column(&header, "nnz_y")].parse().unwrap();
    assert_eq!(nnz_y, y.nnz());
    // At most one output entry per scanned entry; the scanned count sits
    // near d * nnz(x) = 40, so twice that covers the binomial spread.
    let selected: usize = x.iter().map(|(j, _)| a.col_len(j)).sum();
    assert!(nnz_y <= selected);
    assert!(nnz_y <= 80, "nnz_y {nnz_y} far above d * nnz(x) = 40");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn multiply_nnzx_zero_gives_empty_output_row() {
    let dir = tmpdir("zero");
    let out = dir.join("r.csv");
    let st = bench(&[
        "multiply",
        "--gen",
        "er:m=200,n=200,d=3,seed=1",
        "--alg",
        "bucket",
        "--threads",
        "1",
        "--nnzx",
        "0",
        "--reps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let (header, rows) = read_csv(&out).unwrap();
    assert_eq!(rows[0][column(&header, "nnz_y")], "0");
    assert_eq!(rows[0][column(&header, "nnz_x")], "0");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn multiply_all_algorithms_agree_on_output_size() {
    let dir = tmpdir("all");
    let out = dir.join("r.csv");
    let st = bench(&[
        "multiply",
        "--gen",
        "er:m=600,n=600,d=5,seed=11",
        "--alg",
        "all",
        "--threads",
        "1,2",
        "--nnzx",
        "25",
        "--reps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let (header, rows) = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 10); // 5 algorithms x 2 thread counts
    let k = column(&header, "nnz_y");
    let first = &rows[0][k];
    assert!(rows.iter().all(|r| &r[k] == first), "output sizes differ");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn duplicate_thread_values_rejected() {
    let st = bench(&[
        "multiply",
        "--gen",
        "er:m=10,n=10,d=1,seed=1",
        "--threads",
        "2,2",
    ]);
    assert!(!st.status.success());
    let msg = String::from_utf8_lossy(&st.stderr);
    assert!(msg.contains("duplicate thread count"), "stderr: {msg}");
}

#[test]
fn sweep_threads_single_value_and_validation() {
    let dir = tmpdir("sweep");
    let out = dir.join("r.csv");
    let st = bench(&[
        "sweep-threads",
        "--gen",
        "er:m=500,n=500,d=4,seed=2",
        "--alg",
        "bucket",
        "--threads",
        "1",
        "--nnzx",
        "64",
        "--reps",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let (header, rows) = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 2); // one row group, two reps
    assert!(rows.iter().all(|r| r[column(&header, "threads")] == "1"));

    // sweep-threads takes exactly one vector sparsity
    let st = bench(&[
        "sweep-threads",
        "--gen",
        "er:m=500,n=500,d=4,seed=2",
        "--threads",
        "1,2",
        "--nnzx",
        "8,16",
    ]);
    assert!(!st.status.success());
    let _ = std::fs::remove_dir_all(&dir);
}

fn write_path_graph(dir: &Path) -> PathBuf {
    // directed path 0 -> 1 -> 2 -> 3, column = source vertex
    let path = dir.join("path.mtx");
    std::fs::write(
        &path,
        "%%MatrixMarket matrix coordinate pattern general\n4 4 3\n2 1\n3 2\n4 3\n",
    )
    .unwrap();
    path
}

#[test]
fn bfs_path_graph_iterations_and_reached() {
    let dir = tmpdir("bfs");
    let mtx = write_path_graph(&dir);
    let out = dir.join("r.csv");
    let st = bench(&[
        "bfs",
        "--matrix",
        mtx.to_str().unwrap(),
        "--alg",
        "all",
        "--threads",
        "1",
        "--source",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let (header, rows) = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert_eq!(r[column(&header, "iterations")], "4");
        assert_eq!(r[column(&header, "reached")], "4");
    }

    // source with no out-edges stops after one multiply
    let st = bench(&[
        "bfs",
        "--matrix",
        mtx.to_str().unwrap(),
        "--alg",
        "bucket",
        "--threads",
        "1",
        "--source",
        "3",
    ]);
    assert!(st.status.success());
    let msg = String::from_utf8_lossy(&st.stderr);
    assert!(msg.contains("1 iterations"), "stderr: {msg}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn bfs_er_graph_reached_counts_agree() {
    let dir = tmpdir("bfs-er");
    let out = dir.join("r.csv");
    let st = bench(&[
        "bfs",
        "--gen",
        "er:m=100000,n=100000,d=8,seed=6",
        "--alg",
        "bucket,rowsplit-spa",
        "--threads",
        "1",
        "--source",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let (header, rows) = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 2);
    let k = column(&header, "reached");
    assert_eq!(rows[0][k], rows[1][k]);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn stdout_csv_is_parseable_without_out_flag() {
    let st = bench(&[
        "multiply",
        "--gen",
        "er:m=100,n=100,d=2,seed=5",
        "--alg",
        "sort",
        "--threads",
        "1",
        "--nnzx",
        "4,8",
        "--reps",
        "1",
    ]);
    assert!(st.status.success());
    let text = String::from_utf8(st.stdout).unwrap();
    let rows = spmspv::io::parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 3); // header + 2 data rows
    assert_eq!(rows[0].len(), spmspv_bench::MULTIPLY_HEADER.len());
}

/// The corpus seeds checked in for the fuzz targets must stay parseable by
/// the parsers they seed.
#[test]
fn fuzz_corpus_seeds_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let list = |sub: &str| {
        let mut files: Vec<PathBuf> = std::fs::read_dir(root.join(sub))
            .unwrap_or_else(|_| panic!("corpus dir {sub} exists"))
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        assert!(!files.is_empty(), "{sub} has seeds");
        files
    };
    for f in list("read_mtx") {
        read_mtx(&f).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
    }
    for f in list("read_vec") {
        spmspv::io::read_vec(&f).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
    }
    for f in list("parse_csv") {
        let text = std::fs::read_to_string(&f).unwrap();
        spmspv::io::parse_csv(&text).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
    }
}
