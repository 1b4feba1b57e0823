//! Row-split kernels: the matrix is cut into nthreads row bands ahead of
//! time and every thread multiplies its band against the whole input vector.
//! No synchronization is needed — each band owns a disjoint output range —
//! but every thread scans all of `x`, so the total vector-access work grows
//! with the thread count. One kernel merges through a fully initialized
//! per-band accumulator, the other k-way-merges the selected column
//! segments with a binary heap.

use super::{absorb_all, fan_out};
use crate::counters::WorkCounters;
use crate::csc::CscMatrix;
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::vector::{Mode, SparseVec};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// A matrix split into uniform horizontal bands, each stored as its own CSC
/// with band-local row ids.
#[derive(Debug, Clone)]
pub struct RowSplitMatrix<T> {
    pieces: Vec<CscMatrix<T>>,
    /// Global row of each piece's local row 0; length `pieces.len() + 1`
    /// with the matrix row count as the final sentinel.
    row_starts: Vec<usize>,
    ncols: usize,
}

impl<T: Copy> RowSplitMatrix<T> {
    pub fn pieces(&self) -> &[CscMatrix<T>] {
        &self.pieces
    }

    pub fn row_base(&self, piece: usize) -> usize {
        self.row_starts[piece]
    }

    pub fn nrows(&self) -> usize {
        *self.row_starts.last().unwrap()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.pieces.iter().map(|p| p.nnz()).sum()
    }

    /// Rebuild the original triple set (tests use this as a reassembly
    /// oracle).
    pub fn to_triples(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::with_capacity(self.nnz());
        for (t, piece) in self.pieces.iter().enumerate() {
            let base = self.row_starts[t];
            for (r, c, v) in piece.to_triples() {
                out.push((r + base, c, v));
            }
        }
        out
    }
}

/// Split into `nthreads` uniform row bands: piece `t` covers global rows
/// `[t*m/nthreads, (t+1)*m/nthreads)`. Bands are uniform by rows, not by
/// nonzeros; the imbalance that causes is part of what the counters expose.
pub fn row_split<T: Copy>(a: &CscMatrix<T>, nthreads: usize) -> RowSplitMatrix<T> {
    assert!(nthreads >= 1, "row_split needs at least one piece");
    let m = a.nrows();
    let row_starts: Vec<usize> = (0..=nthreads).map(|t| m * t / nthreads).collect();

    let piece_of = |row: usize| -> usize {
        // Bands are uniform, so an integer guess lands on or next to the
        // right band; nudge for the rounding of the boundaries.
        let mut p = (row * nthreads).checked_div(m).unwrap_or(0).min(nthreads - 1);
        while row < row_starts[p] {
            p -= 1;
        }
        while row >= row_starts[p + 1] {
            p += 1;
        }
        p
    };

    // Column-major fill preserves the per-column row order of `a`, so the
    // pieces inherit its sortedness.
    let mut colptrs: Vec<Vec<usize>> = vec![Vec::with_capacity(a.ncols() + 1); nthreads];
    let mut rowids: Vec<Vec<usize>> = vec![Vec::new(); nthreads];
    let mut values: Vec<Vec<T>> = vec![Vec::new(); nthreads];
    for t in 0..nthreads {
        colptrs[t].push(0);
    }
    for j in 0..a.ncols() {
        let (rows, vals) = a.col(j);
        for (&i, &v) in rows.iter().zip(vals) {
            let t = piece_of(i);
            rowids[t].push(i - row_starts[t]);
            values[t].push(v);
        }
        for t in 0..nthreads {
            colptrs[t].push(rowids[t].len());
        }
    }

    let mut pieces = Vec::with_capacity(nthreads);
    for (t, (cp, (ri, vs))) in colptrs
        .into_iter()
        .zip(rowids.into_iter().zip(values))
        .enumerate()
    {
        pieces.push(CscMatrix::from_parts(
            row_starts[t + 1] - row_starts[t],
            a.ncols(),
            cp,
            ri,
            vs,
            a.sorted_cols(),
        ));
    }

    RowSplitMatrix {
        pieces,
        row_starts,
        ncols: a.ncols(),
    }
}

fn check_dims<T, V: Copy>(a: &RowSplitMatrix<T>, x: &SparseVec<V>, nthreads: usize) -> Result<()> {
    if a.ncols != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns, vector has length {}",
            a.ncols,
            x.len()
        )));
    }
    if nthreads != a.pieces.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix was split into {} pieces but {} threads requested",
            a.pieces.len(),
            nthreads
        )));
    }
    Ok(())
}

/// Row-split multiply with one fully initialized accumulator per band.
///
/// Every thread scans the entire input vector (`input_vector_accesses`
/// totals `nthreads * nnz(x)`) and pays an O(band rows) accumulator setup
/// per call regardless of how little of it the output uses.
pub fn spmspv_rowsplit_spa<S: Semiring>(
    a: &RowSplitMatrix<S::MatScalar>,
    x: &SparseVec<S::Scalar>,
    sr: &S,
    nthreads: usize,
    counters: &mut WorkCounters,
) -> Result<SparseVec<S::Scalar>> {
    counters.reset();
    check_dims(a, x, nthreads)?;
    let sorted = x.mode() == Mode::Sorted;

    let results = fan_out(nthreads, |t| {
        let piece = &a.pieces[t];
        let base = a.row_starts[t];
        let mut part = WorkCounters::new();

        // Full initialization: both arrays, every slot, every call.
        let mut vals = vec![sr.zero(); piece.nrows()];
        let mut live = vec![false; piece.nrows()];
        part.spa_slots_initialized += piece.nrows() as u64;

        let mut uind: Vec<usize> = Vec::new();
        for (j, xv) in x.iter() {
            part.input_vector_accesses += 1;
            part.columns_touched += 1;
            let (rows, avals) = piece.col(j);
            part.matrix_entries_scanned += rows.len() as u64;
            for (&i, &av) in rows.iter().zip(avals) {
                let contrib = sr.mult(av, xv);
                if live[i] {
                    vals[i] = sr.add(vals[i], contrib);
                } else {
                    live[i] = true;
                    vals[i] = contrib;
                    uind.push(i);
                }
            }
        }
        if sorted {
            uind.sort_unstable();
        }
        let entries: Vec<(usize, S::Scalar)> =
            uind.into_iter().map(|i| (i + base, vals[i])).collect();
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
    Ok(SparseVec::from_parts(a.nrows(), entries, x.mode()))
}

/// Row-split multiply that k-way-merges each band's selected column
/// segments with a binary min-heap keyed on (row, segment). Requires
/// per-column sorted row ids; emits each band's rows in increasing order.
pub fn spmspv_rowsplit_heap<S: Semiring>(
    a: &RowSplitMatrix<S::MatScalar>,
    x: &SparseVec<S::Scalar>,
    sr: &S,
    nthreads: usize,
    counters: &mut WorkCounters,
) -> Result<SparseVec<S::Scalar>> {
    counters.reset();
    check_dims(a, x, nthreads)?;
    if a.pieces.iter().any(|p| !p.sorted_cols()) {
        return Err(Error::UnsortedColumns("row-split heap merge"));
    }

    let results = fan_out(nthreads, |t| {
        let piece = &a.pieces[t];
        let base = a.row_starts[t];
        let mut part = WorkCounters::new();

        // One cursor per selected column segment present in this band.
        struct Seg<V> {
            pos: usize,
            end: usize,
            xval: V,
        }
        let mut segs: Vec<Seg<S::Scalar>> = Vec::with_capacity(x.nnz());
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
        for (j, xv) in x.iter() {
            part.input_vector_accesses += 1;
            part.columns_touched += 1;
            let (lo, hi) = (piece.colptrs()[j], piece.colptrs()[j + 1]);
            if lo < hi {
                let s = segs.len();
                segs.push(Seg {
                    pos: lo,
                    end: hi,
                    xval: xv,
                });
                heap.push(Reverse((piece.rowids()[lo], s)));
            }
        }

        let mut entries: Vec<(usize, S::Scalar)> = Vec::new();
        while let Some(Reverse((row, s))) = heap.pop() {
            part.matrix_entries_scanned += 1;
            let contrib = {
                let seg = &mut segs[s];
                let v = sr.mult(piece.values()[seg.pos], seg.xval);
                seg.pos += 1;
                if seg.pos < seg.end {
                    heap.push(Reverse((piece.rowids()[seg.pos], s)));
                }
                v
            };
            match entries.last_mut() {
                Some(last) if last.0 == row + base => last.1 = sr.add(last.1, contrib),
                _ => entries.push((row + base, contrib)),
            }
        }
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
    Ok(SparseVec::from_parts(a.nrows(), entries, x.mode()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dense_spmspv;
    use crate::semiring::PlusTimes;
    use rand::{Rng, SeedableRng};

    type Pt = PlusTimes<i64>;

    fn identity(n: usize) -> CscMatrix<i64> {
        let t: Vec<(usize, usize, i64)> = (0..n).map(|i| (i, i, 1)).collect();
        CscMatrix::from_triples(n, n, &t).unwrap()
    }

    fn random_matrix(m: usize, n: usize, seed: u64, density: f64) -> CscMatrix<i64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut triples = Vec::new();
        for c in 0..n {
            for r in 0..m {
                if rng.gen_bool(density) {
                    triples.push((r, c, rng.gen_range(-9i64..10)));
                }
            }
        }
        CscMatrix::from_triples(m, n, &triples).unwrap()
    }

    fn random_vec(n: usize, f: usize, seed: u64) -> SparseVec<i64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, n, f).into_vec();
        idx.sort_unstable();
        let entries = idx
            .into_iter()
            .map(|i| (i, rng.gen_range(-9i64..10)))
            .collect();
        SparseVec::new(n, entries, Mode::Sorted).unwrap()
    }

    #[test]
    fn split_single_piece_is_whole_matrix() {
        let a = random_matrix(10, 8, 1, 0.3);
        let split = row_split(&a, 1);
        assert_eq!(split.pieces().len(), 1);
        assert_eq!(split.pieces()[0], a);
    }

    #[test]
    fn split_identity_into_halves() {
        let split = row_split(&identity(4), 2);
        assert_eq!(split.pieces().len(), 2);
        assert_eq!(split.pieces()[0].nnz(), 2);
        assert_eq!(split.pieces()[1].nnz(), 2);
        assert_eq!(split.pieces()[0].nrows(), 2);
        assert_eq!(split.row_base(1), 2);
    }

    #[test]
    fn split_reassembles() {
        let a = random_matrix(100, 80, 2, 0.05);
        let split = row_split(&a, 3);
        assert_eq!(split.nnz(), a.nnz());
        let mut got = split.to_triples();
        got.sort_unstable_by_key(|&(r, c, _)| (c, r));
        assert_eq!(got, a.to_triples());
        for p in split.pieces() {
            p.check_invariants().unwrap();
        }
    }

    #[test]
    fn spa_identity() {
        let split = row_split(&identity(4), 2);
        let x = SparseVec::new(4, vec![(1, 5i64)], Mode::Sorted).unwrap();
        let mut c = WorkCounters::new();
        let y = spmspv_rowsplit_spa(&split, &x, &Pt::new(), 2, &mut c).unwrap();
        assert_eq!(y.entries(), &[(1, 5)]);
        assert_eq!(c.input_vector_accesses, 2); // each thread scans all of x
        assert_eq!(c.spa_slots_initialized, 4); // full init of both bands
    }

    #[test]
    fn spa_empty_vector_still_pays_init() {
        let split = row_split(&identity(6), 2);
        let x = SparseVec::<i64>::empty(6, Mode::Sorted);
        let mut c = WorkCounters::new();
        let y = spmspv_rowsplit_spa(&split, &x, &Pt::new(), 2, &mut c).unwrap();
        assert!(y.entries().is_empty());
        assert_eq!(c.input_vector_accesses, 0);
        assert_eq!(c.spa_slots_initialized, 6);
    }

    #[test]
    fn spa_vector_access_count_is_threads_times_nnz() {
        let a = random_matrix(40, 40, 3, 0.1);
        let x = random_vec(40, 13, 4);
        for nt in [1usize, 2, 4] {
            let split = row_split(&a, nt);
            let mut c = WorkCounters::new();
            spmspv_rowsplit_spa(&split, &x, &Pt::new(), nt, &mut c).unwrap();
            assert_eq!(c.input_vector_accesses, (nt * x.nnz()) as u64);
        }
    }

    #[test]
    fn heap_single_column_copies_it() {
        let a = CscMatrix::from_triples(5, 3, &[(0, 1, 2i64), (2, 1, 3), (4, 1, 4)]).unwrap();
        let split = row_split(&a, 1);
        let x = SparseVec::new(3, vec![(1, 10i64)], Mode::Sorted).unwrap();
        let mut c = WorkCounters::new();
        let y = spmspv_rowsplit_heap(&split, &x, &Pt::new(), 1, &mut c).unwrap();
        assert_eq!(y.entries(), &[(0, 20), (2, 30), (4, 40)]);
    }

    #[test]
    fn heap_empty_vector() {
        let split = row_split(&identity(4), 2);
        let x = SparseVec::<i64>::empty(4, Mode::Sorted);
        let mut c = WorkCounters::new();
        let y = spmspv_rowsplit_heap(&split, &x, &Pt::new(), 2, &mut c).unwrap();
        assert!(y.entries().is_empty());
    }

    #[test]
    fn both_kernels_match_dense_oracle() {
        let a = random_matrix(37, 29, 5, 0.12);
        let x = random_vec(29, 11, 6);
        let expect = dense_spmspv(&a, &x, &Pt::new()).unwrap().to_map();
        for nt in [1usize, 2, 3] {
            let split = row_split(&a, nt);
            let mut c = WorkCounters::new();
            let spa = spmspv_rowsplit_spa(&split, &x, &Pt::new(), nt, &mut c).unwrap();
            assert_eq!(spa.to_map(), expect, "spa nt={nt}");
            let heap = spmspv_rowsplit_heap(&split, &x, &Pt::new(), nt, &mut c).unwrap();
            assert_eq!(heap.to_map(), expect, "heap nt={nt}");
            // heap emits nondecreasing rows per piece; with sorted pieces the
            // whole output is sorted
            for w in heap.entries().windows(2) {
                assert!(w[0].0 < w[1].0);
            }
        }
    }

    #[test]
    fn thread_count_mismatch_rejected() {
        let split = row_split(&identity(4), 2);
        let x = SparseVec::<i64>::empty(4, Mode::Sorted);
        let mut c = WorkCounters::new();
        assert!(spmspv_rowsplit_spa(&split, &x, &Pt::new(), 3, &mut c).is_err());
    }
}
