//! Matrix-driven multiply over a bitvector-format input.
//!
//! The column loop drives everything: every column pointer gap is examined
//! and every nonempty column probes the input bitmap, whether or not the
//! vector has anything there. That O(n + nzc) floor per call is the defining
//! cost of the class — `columns_touched` stays constant as `nnz(x)` shrinks
//! — and the counters make it visible. Parallelization is row-split with a
//! per-band accumulator; with more than one thread each band binary-searches
//! its row range inside the selected columns, so stored entries are still
//! scanned exactly once in total.

use super::{absorb_all, fan_out};
use crate::counters::WorkCounters;
use crate::csc::CscMatrix;
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::vector::{BitVec, SparseVec};
use crate::vector::Mode;

pub fn spmspv_matrixdriven<S: Semiring>(
    a: &CscMatrix<S::MatScalar>,
    xb: &BitVec<S::Scalar>,
    sr: &S,
    nthreads: usize,
    counters: &mut WorkCounters,
) -> Result<BitVec<S::Scalar>> {
    counters.reset();
    if a.ncols() != xb.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, bitvector has length {}",
            a.nrows(),
            a.ncols(),
            xb.len()
        )));
    }
    if nthreads > 1 && !a.sorted_cols() {
        return Err(Error::UnsortedColumns("matrix-driven row split"));
    }

    let m = a.nrows();
    let band = |t: usize| (m * t / nthreads, m * (t + 1) / nthreads);

    let results = fan_out(nthreads, |t| {
        let (rlo, rhi) = band(t);
        let mut part = WorkCounters::new();
        let mut vals = vec![sr.zero(); rhi - rlo];
        let mut live = vec![false; rhi - rlo];
        let mut uind: Vec<usize> = Vec::new();

        for j in 0..a.ncols() {
            part.ncols_scanned += 1;
            let (rows, avals) = a.col(j);
            if rows.is_empty() {
                continue;
            }
            part.columns_touched += 1; // nonempty-column touch, paid per thread
            part.input_vector_accesses += 1; // bitmap membership probe
            let Some(xv) = xb.get(j) else { continue };

            // Restrict to this band's rows. A single band scans the column
            // as-is; multiple bands locate their range by binary search.
            let (lo, hi) = if nthreads == 1 {
                (0, rows.len())
            } else {
                (
                    rows.partition_point(|&i| i < rlo),
                    rows.partition_point(|&i| i < rhi),
                )
            };
            part.matrix_entries_scanned += (hi - lo) as u64;
            for (&i, &av) in rows[lo..hi].iter().zip(&avals[lo..hi]) {
                let local = i - rlo;
                let contrib = sr.mult(av, xv);
                if live[local] {
                    vals[local] = sr.add(vals[local], contrib);
                } else {
                    live[local] = true;
                    vals[local] = contrib;
                    uind.push(local);
                    part.spa_slots_initialized += 1;
                }
            }
        }
        // Bitvector output wants ascending indices.
        uind.sort_unstable();
        let entries: Vec<(usize, S::Scalar)> =
            uind.into_iter().map(|i| (i + rlo, vals[i])).collect();
        part.output_nnz = entries.len() as u64;
        (entries, part)
    });

    let mut entries = Vec::new();
    let mut parts = Vec::with_capacity(nthreads);
    for (piece_entries, part) in results {
        entries.extend(piece_entries);
        parts.push(part);
    }
    absorb_all(counters, parts);
    Ok(SparseVec::from_parts(m, entries, Mode::Sorted).to_bitvec())
}
