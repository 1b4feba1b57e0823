//! Work counters: the measurable side of the work-efficiency arguments.
//!
//! Every kernel tallies the same quantities so their access patterns can be
//! compared directly: a vector-driven kernel touches `nnz(x)` columns, a
//! matrix-driven one touches every nonempty column no matter how sparse the
//! vector is, and a row-split kernel reads the input vector once per thread.

/// Per-call tallies, summed over all threads. Reset at the start of every
/// kernel call and monotone within it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkCounters {
    /// Matrix columns whose pointer range was dereferenced in the main pass.
    pub columns_touched: u64,
    /// Stored matrix entries read in the main pass.
    pub matrix_entries_scanned: u64,
    /// Reads of input-vector entries (or bitvector membership probes),
    /// summed across threads.
    pub input_vector_accesses: u64,
    /// Accumulator slots initialized this call (first touches only).
    pub spa_slots_initialized: u64,
    /// Entries in the produced output vector.
    pub output_nnz: u64,
    /// Matrix entries read by the bucket kernel's counting pre-pass, kept
    /// separate so the main-pass tallies stay exact.
    pub pre_entries_scanned: u64,
    /// Column-pointer gaps examined by the matrix-driven kernel's full
    /// column scan (n per thread), distinct from nonempty-column touches.
    pub ncols_scanned: u64,
}

impl WorkCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub(crate) fn absorb(&mut self, p: &WorkCounters) {
        self.columns_touched += p.columns_touched;
        self.matrix_entries_scanned += p.matrix_entries_scanned;
        self.input_vector_accesses += p.input_vector_accesses;
        self.spa_slots_initialized += p.spa_slots_initialized;
        self.output_nnz += p.output_nnz;
        self.pre_entries_scanned += p.pre_entries_scanned;
        self.ncols_scanned += p.ncols_scanned;
    }
}
