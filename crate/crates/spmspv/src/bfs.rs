//! Breadth-first search by repeated multiply: the adjacency matrix times the
//! current frontier yields the next one. A stored A(i,j) is the directed
//! edge j -> i, so `y = A x` pushes the frontier forward. Frontier vectors
//! carry each vertex's own id as its value; the parent-selection semiring
//! forwards those ids and keeps the smallest, making parents deterministic
//! across kernels and thread counts. The visited mask is applied outside the
//! multiply.

use crate::counters::WorkCounters;
use crate::csc::CscMatrix;
use crate::error::{Error, Result};
use crate::runner::{Algorithm, KernelRunner};
use crate::semiring::SelectMin;
use crate::vector::{Mode, SparseVec};
use std::time::{Duration, Instant};

/// Level assigned to vertices the search never reaches.
pub const UNREACHED_LEVEL: u32 = u32::MAX;
/// Parent marker for the unreached.
pub const NO_PARENT: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsResult {
    /// Distance from the source in edges; `UNREACHED_LEVEL` if unreached.
    pub levels: Vec<u32>,
    /// Discoverer of each reached vertex (the source is its own parent);
    /// `NO_PARENT` if unreached.
    pub parents: Vec<usize>,
    /// nnz of each frontier fed to the multiply, in iteration order.
    pub frontier_sizes: Vec<usize>,
}

impl BfsResult {
    pub fn reached(&self) -> usize {
        self.levels.iter().filter(|&&l| l != UNREACHED_LEVEL).count()
    }
}

/// Timing of the multiply calls alone, excluding mask and bookkeeping.
#[derive(Debug, Clone, Copy, Default)]
pub struct BfsStats {
    pub spmspv_time: Duration,
    pub iterations: usize,
}

/// BFS from `source` using the chosen multiply kernel.
pub fn bfs<T: Copy + Send + Sync>(
    a: &CscMatrix<T>,
    source: usize,
    algorithm: Algorithm,
    nthreads: usize,
) -> Result<BfsResult> {
    bfs_with_stats(a, source, algorithm, nthreads).map(|(r, _)| r)
}

/// As [`bfs`], also reporting how much time the multiplies took.
pub fn bfs_with_stats<T: Copy + Send + Sync>(
    a: &CscMatrix<T>,
    source: usize,
    algorithm: Algorithm,
    nthreads: usize,
) -> Result<(BfsResult, BfsStats)> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    let n = a.ncols();
    if source >= n {
        return Err(Error::SourceOutOfRange {
            source,
            nverts: n,
        });
    }

    let sr = SelectMin::<T>::new();
    let mut runner = KernelRunner::<SelectMin<T>>::prepare(algorithm, a, nthreads, 4)?;
    let mut counters = WorkCounters::new();

    let mut levels = vec![UNREACHED_LEVEL; n];
    let mut parents = vec![NO_PARENT; n];
    levels[source] = 0;
    parents[source] = source;

    let mut frontier = SparseVec::from_parts(n, vec![(source, source)], Mode::Sorted);
    let mut frontier_sizes = Vec::new();
    let mut spmspv_time = Duration::ZERO;
    let mut level = 0u32;

    loop {
        frontier_sizes.push(frontier.nnz());
        let start = Instant::now();
        let product = runner.run(&frontier, &sr, &mut counters)?;
        spmspv_time += start.elapsed();
        level += 1;

        // Subtract the visited set; survivors become the next frontier and
        // carry their own ids forward.
        let mut next: Vec<(usize, usize)> = Vec::with_capacity(product.nnz());
        for (i, parent) in product.iter() {
            if levels[i] == UNREACHED_LEVEL {
                levels[i] = level;
                parents[i] = parent;
                next.push((i, i));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = SparseVec::from_parts(n, next, Mode::Sorted);
    }

    let iterations = frontier_sizes.len();
    Ok((
        BfsResult {
            levels,
            parents,
            frontier_sizes,
        },
        BfsStats {
            spmspv_time,
            iterations,
        },
    ))
}

/// The exact sequence of input vectors a BFS from `source` feeds to the
/// multiply, reusable as a benchmark workload with realistic sparsity.
pub fn frontier_sequence<T: Copy + Send + Sync>(
    a: &CscMatrix<T>,
    source: usize,
) -> Result<Vec<SparseVec<usize>>> {
    let result = bfs(a, source, Algorithm::Bucket, 1)?;
    let depth = result.frontier_sizes.len();
    let mut by_level: Vec<Vec<(usize, usize)>> = vec![Vec::new(); depth];
    for (v, &l) in result.levels.iter().enumerate() {
        if l != UNREACHED_LEVEL {
            by_level[l as usize].push((v, v));
        }
    }
    Ok(by_level
        .into_iter()
        .map(|entries| SparseVec::from_parts(a.ncols(), entries, Mode::Sorted))
        .collect())
}
