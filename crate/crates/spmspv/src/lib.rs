//! Sparse matrix x sparse vector multiplication, semiring-generic and
//! instrumented.
//!
//! The centerpiece is a bucket-partitioned multiply
//! ([`spmspv_bucket`]) whose total work is proportional to the entries of
//! the columns the input vector actually selects: a counting pre-pass gives
//! every thread a precomputed, disjoint write range in every bucket (no
//! synchronization), and an epoch-stamped accumulator avoids ever clearing
//! all m slots. Four competing kernel classes — row-split with a fully
//! initialized accumulator, row-split with a heap merge, gather-sort-reduce,
//! and a matrix-driven bitvector kernel — run over the same CSC storage and
//! report through the same [`WorkCounters`], so their work profiles can be
//! compared measurement-for-measurement.
//!
//! Also here: Matrix Market and vector-text I/O, deterministic Erdős–Rényi
//! generators, a BFS driver that exercises the kernels the way iterative
//! graph algorithms do, and brute-force oracles everything is tested
//! against.
//!
//! ```
//! use spmspv::{spmspv_bucket, BucketWorkspace, CscMatrix, PlusTimes, SparseVec, Mode, WorkCounters};
//!
//! let a = CscMatrix::from_triples(3, 3, &[(0, 0, 2i64), (2, 1, 4)]).unwrap();
//! let x = SparseVec::new(3, vec![(1, 10i64)], Mode::Sorted).unwrap();
//! let mut ws = BucketWorkspace::new(a.nrows(), a.nnz(), 1, 4).unwrap();
//! let mut counters = WorkCounters::new();
//! let y = spmspv_bucket(&a, &x, &PlusTimes::new(), &mut ws, 1, &mut counters).unwrap();
//! assert_eq!(y.entries(), &[(2, 40)]);
//! assert_eq!(counters.columns_touched, 1);
//! ```

pub mod baselines;
pub mod bfs;
pub mod bucket;
pub mod counters;
pub mod csc;
pub mod error;
pub mod gen;
pub mod io;
pub mod oracle;
pub mod runner;
pub mod semiring;
pub mod vector;

pub use baselines::{
    row_split, spmspv_matrixdriven, spmspv_rowsplit_heap, spmspv_rowsplit_spa, spmspv_sort,
    RowSplitMatrix,
};
pub use bfs::{bfs, bfs_with_stats, frontier_sequence, BfsResult, BfsStats, NO_PARENT, UNREACHED_LEVEL};
pub use bucket::{
    bucket_of, concat_output, estimate_buckets, spa_merge_bucket, spmspv_bucket,
    spmspv_bucket_into, BucketWorkspace, StepTimes,
};
pub use counters::WorkCounters;
pub use csc::CscMatrix;
pub use error::{Error, Result};
pub use gen::{gen_er_matrix, gen_sparse_vec, with_uniform_values, ErConfig, GenRng};
pub use oracle::{dense_spmspv, queue_bfs};
pub use runner::{Algorithm, KernelRunner};
pub use semiring::{MinPlus, PlusTimes, SelectMin, Semiring};
pub use vector::{BitVec, Mode, SparseVec};
