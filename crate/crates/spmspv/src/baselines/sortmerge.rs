//! Sort-based multiply: gather every scaled entry of the selected columns,
//! sort the pile by row, reduce adjacent equal rows. The gather is split
//! over threads; the sort is sequential (its class carries no parallel
//! complexity claim here). Structurally produced zeros are kept, matching
//! the other kernels' structural-sparsity semantics.

use super::{absorb_all, fan_out};
use crate::counters::WorkCounters;
use crate::csc::CscMatrix;
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::vector::SparseVec;

pub fn spmspv_sort<S: Semiring>(
    a: &CscMatrix<S::MatScalar>,
    x: &SparseVec<S::Scalar>,
    sr: &S,
    nthreads: usize,
    counters: &mut WorkCounters,
) -> Result<SparseVec<S::Scalar>> {
    counters.reset();
    if a.ncols() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, vector has length {}",
            a.nrows(),
            a.ncols(),
            x.len()
        )));
    }
    let xs = x.entries();
    let nt = if xs.len() < nthreads { 1 } else { nthreads };

    let gathered = fan_out(nt, |t| {
        let (lo, hi) = (xs.len() * t / nt, xs.len() * (t + 1) / nt);
        let mut part = WorkCounters::new();
        let mut pairs: Vec<(usize, S::Scalar)> = Vec::new();
        for &(j, xv) in &xs[lo..hi] {
            part.input_vector_accesses += 1;
            part.columns_touched += 1;
            let (rows, vals) = a.col(j);
            part.matrix_entries_scanned += rows.len() as u64;
            for (&i, &av) in rows.iter().zip(vals) {
                pairs.push((i, sr.mult(av, xv)));
            }
        }
        (pairs, part)
    });

    let mut pairs = Vec::new();
    let mut parts = Vec::with_capacity(nt);
    for (chunk, part) in gathered {
        pairs.extend(chunk);
        parts.push(part);
    }
    absorb_all(counters, parts);

    // Stable by row: equal rows reduce in gather order, which is the
    // column-major scan order of x regardless of the chunking.
    pairs.sort_by_key(|&(i, _)| i);
    let mut entries: Vec<(usize, S::Scalar)> = Vec::new();
    for (i, v) in pairs {
        match entries.last_mut() {
            Some(last) if last.0 == i => last.1 = sr.add(last.1, v),
            _ => entries.push((i, v)),
        }
    }
    counters.output_nnz = entries.len() as u64;
    Ok(SparseVec::from_parts(a.nrows(), entries, x.mode()))
}
