//! Uniform driver over the five multiply kernels: owns whatever per-matrix
//! state a kernel needs (bucket workspace, row-split pieces) so callers can
//! run many vectors against one matrix the way iterative algorithms do.

use crate::baselines::{
    row_split, spmspv_matrixdriven, spmspv_rowsplit_heap, spmspv_rowsplit_spa, spmspv_sort,
    RowSplitMatrix,
};
use crate::bucket::{spmspv_bucket, BucketWorkspace, StepTimes};
use crate::counters::WorkCounters;
use crate::csc::CscMatrix;
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::vector::SparseVec;

/// The five multiply strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Bucket,
    RowSplitSpa,
    RowSplitHeap,
    Sort,
    MatrixDriven,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Bucket,
        Algorithm::RowSplitSpa,
        Algorithm::RowSplitHeap,
        Algorithm::Sort,
        Algorithm::MatrixDriven,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Bucket => "bucket",
            Algorithm::RowSplitSpa => "rowsplit-spa",
            Algorithm::RowSplitHeap => "rowsplit-heap",
            Algorithm::Sort => "sort",
            Algorithm::MatrixDriven => "matrixdriven",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bucket" => Ok(Algorithm::Bucket),
            "rowsplit-spa" => Ok(Algorithm::RowSplitSpa),
            "rowsplit-heap" => Ok(Algorithm::RowSplitHeap),
            "sort" => Ok(Algorithm::Sort),
            "matrixdriven" => Ok(Algorithm::MatrixDriven),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm '{other}' (expected bucket, rowsplit-spa, rowsplit-heap, sort or matrixdriven)"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A kernel bound to one matrix and thread count, ready to multiply many
/// vectors.
pub struct KernelRunner<'a, S: Semiring> {
    algorithm: Algorithm,
    a: &'a CscMatrix<S::MatScalar>,
    nthreads: usize,
    ws: Option<BucketWorkspace<S::Scalar>>,
    split: Option<RowSplitMatrix<S::MatScalar>>,
}

impl<'a, S: Semiring> KernelRunner<'a, S>
where
    S::Scalar: Default,
{
    /// Build per-matrix state: the bucket kernel preallocates its workspace
    /// (sized from `nnz(A)`, `4 * nthreads` buckets by default), the
    /// row-split kernels cut the matrix into bands. `buckets_per_thread`
    /// only affects the bucket kernel.
    pub fn prepare(
        algorithm: Algorithm,
        a: &'a CscMatrix<S::MatScalar>,
        nthreads: usize,
        buckets_per_thread: usize,
    ) -> Result<Self> {
        if nthreads < 1 {
            return Err(Error::InvalidConfig("nthreads must be at least 1".into()));
        }
        let mut runner = KernelRunner {
            algorithm,
            a,
            nthreads,
            ws: None,
            split: None,
        };
        match algorithm {
            Algorithm::Bucket => {
                let nb = (buckets_per_thread * nthreads).max(1);
                runner.ws = Some(BucketWorkspace::new(
                    a.nrows(),
                    a.nnz().max(1),
                    nthreads,
                    nb,
                )?);
            }
            Algorithm::RowSplitSpa | Algorithm::RowSplitHeap => {
                runner.split = Some(row_split(a, nthreads));
            }
            Algorithm::Sort | Algorithm::MatrixDriven => {}
        }
        Ok(runner)
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    /// Multiply one vector. The matrix-driven kernel works natively on
    /// bitvectors, so the runner converts on the way in and out; that cost
    /// is part of using it in a list-format pipeline.
    pub fn run(
        &mut self,
        x: &SparseVec<S::Scalar>,
        sr: &S,
        counters: &mut WorkCounters,
    ) -> Result<SparseVec<S::Scalar>> {
        match self.algorithm {
            Algorithm::Bucket => {
                let ws = self.ws.as_mut().expect("prepared for bucket");
                spmspv_bucket(self.a, x, sr, ws, self.nthreads, counters)
            }
            Algorithm::RowSplitSpa => {
                let split = self.split.as_ref().expect("prepared for row split");
                spmspv_rowsplit_spa(split, x, sr, self.nthreads, counters)
            }
            Algorithm::RowSplitHeap => {
                let split = self.split.as_ref().expect("prepared for row split");
                spmspv_rowsplit_heap(split, x, sr, self.nthreads, counters)
            }
            Algorithm::Sort => spmspv_sort(self.a, x, sr, self.nthreads, counters),
            Algorithm::MatrixDriven => {
                let xb = x.to_bitvec();
                let yb = spmspv_matrixdriven(self.a, &xb, sr, self.nthreads, counters)?;
                Ok(yb.to_sparse(x.mode()))
            }
        }
    }

    /// Per-step durations of the last multiply; present for the bucket
    /// kernel only.
    pub fn step_times(&self) -> Option<StepTimes> {
        self.ws.as_ref().map(|w| w.last_step_times)
    }
}
