//! Deterministic synthetic inputs: Erdős–Rényi matrices and random sparse
//! vectors, for property tests and desk-scale benchmarks.
//!
//! All randomness flows through one pinned counter-based generator
//! ([`GenRng`]); a (seed, column) pair fully determines each column, so
//! generation could be parallelized across columns without changing output.

use crate::csc::CscMatrix;
use crate::error::{Error, Result};
use crate::vector::{Mode, SparseVec};
use rand::{Rng, SeedableRng};
use rand_distr::{Binomial, Distribution};

/// The crate-wide generator algorithm. Changing this type changes every
/// generated instance, so it is pinned here and nowhere else.
pub type GenRng = rand_chacha::ChaCha8Rng;

/// G(n, p) model parameters with p = d/m: every (i, j) present independently,
/// so each column carries `avg_nnz_per_col` entries in expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErConfig {
    pub nrows: usize,
    pub ncols: usize,
    pub avg_nnz_per_col: f64,
    pub seed: u64,
}

impl ErConfig {
    fn validate(&self) -> Result<()> {
        let d = self.avg_nnz_per_col;
        if !d.is_finite() || d < 0.0 || d > self.nrows as f64 {
            return Err(Error::InvalidConfig(format!(
                "avg_nnz_per_col {d} must lie in [0, nrows = {}]",
                self.nrows
            )));
        }
        Ok(())
    }
}

fn column_rng(seed: u64, column: usize) -> GenRng {
    let mut rng = GenRng::seed_from_u64(seed);
    rng.set_stream(column as u64);
    rng
}

/// Sample an Erdős–Rényi matrix. Column j draws its entry count from
/// Binomial(m, d/m) and then picks that many distinct rows uniformly, which
/// matches per-cell Bernoulli sampling in distribution at O(nnz) cost.
/// Values are uniform in [1, 2). Same config, same matrix.
pub fn gen_er_matrix(cfg: &ErConfig) -> Result<CscMatrix<f64>> {
    cfg.validate()?;
    let (m, n) = (cfg.nrows, cfg.ncols);
    let mut colptrs = Vec::with_capacity(n + 1);
    colptrs.push(0usize);
    let mut rowids = Vec::new();
    let mut values = Vec::new();

    if m == 0 || cfg.avg_nnz_per_col == 0.0 {
        colptrs.resize(n + 1, 0);
        return Ok(CscMatrix::from_parts(m, n, colptrs, rowids, values, true));
    }

    let p = cfg.avg_nnz_per_col / m as f64;
    let binom = Binomial::new(m as u64, p)
        .map_err(|e| Error::InvalidConfig(format!("binomial({m}, {p}): {e}")))?;

    for j in 0..n {
        let mut rng = column_rng(cfg.seed, j);
        let count = binom.sample(&mut rng) as usize;
        let mut rows = rand::seq::index::sample(&mut rng, m, count).into_vec();
        rows.sort_unstable();
        for i in rows {
            rowids.push(i);
            values.push(rng.gen_range(1.0..2.0));
        }
        colptrs.push(rowids.len());
    }
    Ok(CscMatrix::from_parts(m, n, colptrs, rowids, values, true))
}

/// Sample a sorted sparse vector with exactly `nnz` distinct indices drawn
/// uniformly without replacement. Values are uniform in [1, 2).
pub fn gen_sparse_vec(length: usize, nnz: usize, seed: u64) -> Result<SparseVec<f64>> {
    if nnz > length {
        return Err(Error::InvalidConfig(format!(
            "requested nnz {nnz} exceeds vector length {length}"
        )));
    }
    let mut rng = GenRng::seed_from_u64(seed);
    rng.set_stream(u64::MAX); // keep vector draws off the matrix column streams
    let mut idx = rand::seq::index::sample(&mut rng, length, nnz).into_vec();
    idx.sort_unstable();
    let entries = idx
        .into_iter()
        .map(|i| (i, rng.gen_range(1.0..2.0)))
        .collect();
    Ok(SparseVec::new(length, entries, Mode::Sorted).expect("sampled indices are distinct"))
}

/// Attach deterministic uniform [1, 2) values to a fixed index set, e.g. to
/// turn a frontier pattern into a numeric benchmark vector.
pub fn with_uniform_values(
    length: usize,
    indices: impl IntoIterator<Item = usize>,
    seed: u64,
) -> Result<SparseVec<f64>> {
    let mut rng = GenRng::seed_from_u64(seed);
    rng.set_stream(u64::MAX - 1);
    let entries: Vec<(usize, f64)> = indices
        .into_iter()
        .map(|i| (i, rng.gen_range(1.0..2.0)))
        .collect();
    let sorted = entries.windows(2).all(|w| w[0].0 < w[1].0);
    let mode = if sorted { Mode::Sorted } else { Mode::Unsorted };
    SparseVec::new(length, entries, mode)
}
