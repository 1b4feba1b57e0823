//! The competing multiply strategies the bucket kernel is measured against.
//!
//! Each kernel is faithful to its algorithm class — partitioning scheme,
//! merge data structure and vector access pattern — rather than to any
//! particular library's code. All of them run over CSC (row-split kernels
//! over row-split CSC pieces) and report through the same [`WorkCounters`],
//! so the differences in their work profiles are directly observable:
//! row-split kernels read the whole input vector on every thread, and the
//! matrix-driven kernel walks every column no matter how sparse the vector.

mod matrixdriven;
mod rowsplit;
mod sortmerge;

pub use matrixdriven::spmspv_matrixdriven;
pub use rowsplit::{row_split, spmspv_rowsplit_heap, spmspv_rowsplit_spa, RowSplitMatrix};
pub use sortmerge::spmspv_sort;

use crate::counters::WorkCounters;

/// Run `f(t)` on `nt` threads and collect the results in thread order.
/// Inline when `nt == 1`.
pub(crate) fn fan_out<R: Send>(nt: usize, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
    if nt == 1 {
        return vec![f(0)];
    }
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..nt).map(|t| s.spawn(move || f(t))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

pub(crate) fn absorb_all(counters: &mut WorkCounters, parts: impl IntoIterator<Item = WorkCounters>) {
    for p in parts {
        counters.absorb(&p);
    }
}
