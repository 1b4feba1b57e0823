//! Compressed-sparse-column matrix storage.
//!
//! The only matrix format in this crate. Kernels that pull selected columns
//! rely on `colptrs` for constant-time access to the start of a column.

use crate::error::{Error, Result};
use crate::semiring::Semiring;

/// Sparse matrix in CSC form.
///
/// `colptrs` has length `ncols + 1` with `colptrs[0] == 0` and
/// `colptrs[ncols] == nnz`; `rowids` and `values` run in column-major order.
/// When `sorted_cols` is set the row ids within each column strictly
/// increase, which also rules out duplicate coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix<T> {
    nrows: usize,
    ncols: usize,
    colptrs: Vec<usize>,
    rowids: Vec<usize>,
    values: Vec<T>,
    sorted_cols: bool,
}

impl<T: Copy> CscMatrix<T> {
    /// Build from coordinate triples, sorting each column by row id.
    /// Duplicate coordinates are an error; use [`CscMatrix::from_triples_dedup`]
    /// to combine them instead. Silent last-wins is deliberately not offered.
    pub fn from_triples(
        nrows: usize,
        ncols: usize,
        triples: &[(usize, usize, T)],
    ) -> Result<Self> {
        Self::build(nrows, ncols, triples, None::<fn(T, T) -> T>)
    }

    /// Build from triples, combining duplicate coordinates with the
    /// semiring's `add`.
    pub fn from_triples_dedup<S>(
        nrows: usize,
        ncols: usize,
        triples: &[(usize, usize, T)],
        sr: &S,
    ) -> Result<Self>
    where
        S: Semiring<MatScalar = T, Scalar = T>,
    {
        Self::build(nrows, ncols, triples, Some(|a, b| sr.add(a, b)))
    }

    fn build(
        nrows: usize,
        ncols: usize,
        triples: &[(usize, usize, T)],
        combine: Option<impl Fn(T, T) -> T>,
    ) -> Result<Self> {
        for &(r, c, _) in triples {
            if r >= nrows || c >= ncols {
                return Err(Error::IndexOutOfBounds {
                    index: (r, c),
                    bounds: (nrows, ncols),
                });
            }
        }

        let mut order: Vec<usize> = (0..triples.len()).collect();
        order.sort_unstable_by_key(|&e| (triples[e].1, triples[e].0));

        let mut colptrs = vec![0usize; ncols + 1];
        let mut rowids: Vec<usize> = Vec::with_capacity(triples.len());
        let mut values: Vec<T> = Vec::with_capacity(triples.len());
        let mut last: Option<(usize, usize)> = None;

        for &e in &order {
            let (r, c, v) = triples[e];
            if last == Some((c, r)) {
                match &combine {
                    Some(f) => {
                        let lv = values.last_mut().expect("kept entry has a value");
                        *lv = f(*lv, v);
                    }
                    None => return Err(Error::DuplicateEntry { row: r, col: c }),
                }
            } else {
                rowids.push(r);
                values.push(v);
                colptrs[c + 1] += 1;
                last = Some((c, r));
            }
        }
        for c in 0..ncols {
            colptrs[c + 1] += colptrs[c];
        }

        Ok(CscMatrix {
            nrows,
            ncols,
            colptrs,
            rowids,
            values,
            sorted_cols: true,
        })
    }

    /// Assemble from prebuilt arrays. Callers guarantee the CSC invariants;
    /// they are checked only under debug assertions.
    pub(crate) fn from_parts(
        nrows: usize,
        ncols: usize,
        colptrs: Vec<usize>,
        rowids: Vec<usize>,
        values: Vec<T>,
        sorted_cols: bool,
    ) -> Self {
        let m = CscMatrix {
            nrows,
            ncols,
            colptrs,
            rowids,
            values,
            sorted_cols,
        };
        debug_assert!(m.check_invariants().is_ok());
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rowids.len()
    }

    /// Number of nonempty columns, derived by scanning `colptrs`.
    pub fn nzc(&self) -> usize {
        self.colptrs
            .windows(2)
            .filter(|w| w[1] > w[0])
            .count()
    }

    pub fn colptrs(&self) -> &[usize] {
        &self.colptrs
    }

    pub fn rowids(&self) -> &[usize] {
        &self.rowids
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn sorted_cols(&self) -> bool {
        self.sorted_cols
    }

    pub fn col_len(&self, j: usize) -> usize {
        self.colptrs[j + 1] - self.colptrs[j]
    }

    /// Row ids and values of column `j`.
    pub fn col(&self, j: usize) -> (&[usize], &[T]) {
        let (lo, hi) = (self.colptrs[j], self.colptrs[j + 1]);
        (&self.rowids[lo..hi], &self.values[lo..hi])
    }

    /// Same pattern with every value passed through `f`.
    pub fn map_values<U: Copy>(&self, f: impl Fn(T) -> U) -> CscMatrix<U> {
        CscMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            colptrs: self.colptrs.clone(),
            rowids: self.rowids.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            sorted_cols: self.sorted_cols,
        }
    }

    /// Coordinate triples in column-major order.
    pub fn to_triples(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::with_capacity(self.nnz());
        for j in 0..self.ncols {
            let (rows, vals) = self.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                out.push((i, j, v));
            }
        }
        out
    }

    /// Verify the structural invariants; used by tests and debug builds.
    pub fn check_invariants(&self) -> Result<()> {
        if self.colptrs.len() != self.ncols + 1 {
            return Err(Error::DimensionMismatch(format!(
                "colptrs length {} != ncols + 1 = {}",
                self.colptrs.len(),
                self.ncols + 1
            )));
        }
        if self.colptrs[0] != 0 || self.colptrs[self.ncols] != self.rowids.len() {
            return Err(Error::DimensionMismatch(
                "colptrs must start at 0 and end at nnz".into(),
            ));
        }
        if self.rowids.len() != self.values.len() {
            return Err(Error::DimensionMismatch(
                "rowids and values lengths differ".into(),
            ));
        }
        for w in self.colptrs.windows(2) {
            if w[1] < w[0] {
                return Err(Error::DimensionMismatch("colptrs must be nondecreasing".into()));
            }
        }
        for &r in &self.rowids {
            if r >= self.nrows {
                return Err(Error::IndexOutOfBounds {
                    index: (r, 0),
                    bounds: (self.nrows, self.ncols),
                });
            }
        }
        if self.sorted_cols {
            for j in 0..self.ncols {
                let (rows, _) = self.col(j);
                for w in rows.windows(2) {
                    if w[1] <= w[0] {
                        return Err(Error::DuplicateEntry { row: w[1], col: j });
                    }
                }
            }
        }
        Ok(())
    }
}
