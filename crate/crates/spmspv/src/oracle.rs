//! Brute-force references the fast kernels are tested against.
//!
//! These share no accumulation logic with the kernels: the multiply runs
//! over a dense length-m accumulator and the BFS is a textbook FIFO queue.
//! Single-threaded, intended for small instances.

use crate::bfs::UNREACHED_LEVEL;
use crate::csc::CscMatrix;
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::vector::{Mode, SparseVec};

/// Dense-accumulator multiply: y(i) = add over stored A(i,j) with x(j)
/// nonzero of mult(A(i,j), x(j)). Emits every structurally produced entry,
/// including exact zeros, in ascending row order.
pub fn dense_spmspv<S: Semiring>(
    a: &CscMatrix<S::MatScalar>,
    x: &SparseVec<S::Scalar>,
    sr: &S,
) -> Result<SparseVec<S::Scalar>> {
    if a.ncols() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, vector has length {}",
            a.nrows(),
            a.ncols(),
            x.len()
        )));
    }
    let mut acc = vec![sr.zero(); a.nrows()];
    let mut touched = vec![false; a.nrows()];
    for (j, xv) in x.iter() {
        let (rows, vals) = a.col(j);
        for (&i, &av) in rows.iter().zip(vals) {
            acc[i] = sr.add(acc[i], sr.mult(av, xv));
            touched[i] = true;
        }
    }
    let entries: Vec<(usize, S::Scalar)> = touched
        .iter()
        .enumerate()
        .filter(|&(_, &t)| t)
        .map(|(i, _)| (i, acc[i]))
        .collect();
    Ok(SparseVec::from_parts(a.nrows(), entries, Mode::Sorted))
}

/// Textbook FIFO breadth-first search over column-to-row edges:
/// a stored A(i,j) is the directed edge j -> i.
pub fn queue_bfs<T: Copy>(a: &CscMatrix<T>, source: usize) -> Result<Vec<u32>> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    if source >= a.ncols() {
        return Err(Error::SourceOutOfRange {
            source,
            nverts: a.ncols(),
        });
    }
    let mut levels = vec![UNREACHED_LEVEL; a.nrows()];
    levels[source] = 0;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = levels[u] + 1;
        let (rows, _) = a.col(u);
        for &i in rows {
            if levels[i] == UNREACHED_LEVEL {
                levels[i] = next;
                queue.push_back(i);
            }
        }
    }
    Ok(levels)
}
