//! Bucket-partitioned sparse matrix x sparse vector multiply.
//!
//! The multiply runs in three steps over a preallocated workspace:
//!
//! 1. *Scatter*: the selected columns of `A` (those with a nonzero in `x`)
//!    are scaled and routed into `nb` buckets by output row, so bucket `k`
//!    holds exactly the entries with `floor(i * nb / m) == k`.
//! 2. *Merge*: each bucket is reduced independently through a shared sparse
//!    accumulator; buckets cover disjoint row ranges, so no two threads ever
//!    touch the same accumulator slot.
//! 3. *Concatenate*: per-bucket unique indices are placed into the output at
//!    offsets from a prefix sum over bucket result sizes.
//!
//! A counting pre-pass ([`estimate_buckets`]) runs before step 1 and records
//! how many entries each thread will route to each bucket; prefix sums over
//! those counts give every thread a private, precomputed write range in each
//! bucket, which is what makes step 1 free of synchronization.
//!
//! Total work is proportional to the entries of the selected columns: the
//! column list is never scanned, and the accumulator is reset by bumping an
//! epoch stamp instead of clearing all m slots.

use crate::counters::WorkCounters;
use crate::csc::CscMatrix;
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::vector::{Mode, SparseVec};
use std::mem::MaybeUninit;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Barrier;
use std::time::{Duration, Instant};

/// Staging-buffer capacity per thread, in entries. Small enough to live in
/// L1/L2; see [`BucketWorkspace::with_stage_capacity`] to tune.
pub const DEFAULT_STAGE_CAPACITY: usize = 8192;

/// Durations of the four phases of the last multiply on a workspace.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepTimes {
    /// Counting pre-pass plus write-range setup.
    pub pre: Duration,
    /// Step 1: scatter into buckets.
    pub bucket: Duration,
    /// Step 2: per-bucket accumulator merge.
    pub merge: Duration,
    /// Step 3: output concatenation (including optional in-bucket sort).
    pub concat: Duration,
}

/// Destination bucket for row `i` of an `m`-row matrix split into `nb`
/// buckets: `floor(i * nb / m)`. Nondecreasing in `i`, so each bucket covers
/// a contiguous row range.
#[inline]
pub fn bucket_of(i: usize, m: usize, nb: usize) -> usize {
    debug_assert!(i < m && nb >= 1);
    i * nb / m
}

/// First row of bucket `k`, i.e. the smallest `i` with `bucket_of(i) == k`.
#[inline]
pub fn bucket_row_start(k: usize, m: usize, nb: usize) -> usize {
    k.saturating_mul(m).div_ceil(nb)
}

/// Preallocated state reused across multiply calls: the bucket arena, the
/// epoch-stamped accumulator, per-(thread, bucket) offset tables and the
/// unique-index store. Constructed once, then shared (exclusively, one call
/// at a time) by unboundedly many multiplies without further allocation.
#[derive(Debug)]
pub struct BucketWorkspace<T> {
    m: usize,
    capacity: usize,
    max_threads: usize,
    nbuckets: usize,
    stage_cap: usize,

    // Step-1 arena: scaled entries routed by destination bucket.
    arena_rows: Vec<usize>,
    arena_vals: Vec<T>,

    // nthreads x nbuckets tables, row-major by thread.
    boffset: Vec<usize>, // counts from the pre-pass
    wstart: Vec<usize>,  // first write slot per (thread, bucket)
    cursor: Vec<usize>,  // live write position per (thread, bucket)

    bucket_start: Vec<usize>, // nbuckets + 1 arena extents

    // Sparse accumulator: a slot is live this call iff its stamp equals the
    // current epoch, so resetting is one counter bump instead of m writes.
    spa_vals: Vec<T>,
    spa_stamp: Vec<u32>,
    epoch: u32,

    // Merge results: unique row ids per bucket, stored at the bucket's own
    // arena offset (|uind_k| <= |B_k| always holds).
    uind: Vec<usize>,
    uind_len: Vec<usize>,
    offsets: Vec<usize>, // nbuckets + 1 output offsets

    // Per-thread staging buffers for step-1 writes.
    stage_pos: Vec<usize>,
    stage_rows: Vec<usize>,
    stage_vals: Vec<T>,

    /// Phase durations of the most recent [`spmspv_bucket`] call.
    pub last_step_times: StepTimes,
}

fn alloc_vec<T: Clone>(len: usize, fill: T) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| Error::AllocationFailure)?;
    v.resize(len, fill);
    Ok(v)
}

impl<T: Copy + Default> BucketWorkspace<T> {
    /// Allocate a workspace for matrices with up to `m` rows, calls whose
    /// selected columns hold at most `nnz_capacity` entries (size from
    /// `nnz(A)` to cover every possible input vector), up to `nthreads`
    /// worker threads and `nbuckets` buckets.
    pub fn new(m: usize, nnz_capacity: usize, nthreads: usize, nbuckets: usize) -> Result<Self> {
        Self::with_stage_capacity(m, nnz_capacity, nthreads, nbuckets, DEFAULT_STAGE_CAPACITY)
    }

    /// As [`BucketWorkspace::new`] with an explicit staging-buffer capacity.
    pub fn with_stage_capacity(
        m: usize,
        nnz_capacity: usize,
        nthreads: usize,
        nbuckets: usize,
        stage_cap: usize,
    ) -> Result<Self> {
        if nbuckets < 1 || nnz_capacity < 1 || nthreads < 1 || stage_cap < 1 {
            return Err(Error::InvalidConfig(
                "workspace needs at least one bucket, one entry, one thread and one staging slot"
                    .into(),
            ));
        }
        let table = nthreads * nbuckets;
        Ok(BucketWorkspace {
            m,
            capacity: nnz_capacity,
            max_threads: nthreads,
            nbuckets,
            stage_cap,
            arena_rows: alloc_vec(nnz_capacity, 0)?,
            arena_vals: alloc_vec(nnz_capacity, T::default())?,
            boffset: alloc_vec(table, 0)?,
            wstart: alloc_vec(table, 0)?,
            cursor: alloc_vec(table, 0)?,
            bucket_start: alloc_vec(nbuckets + 1, 0)?,
            spa_vals: alloc_vec(m, T::default())?,
            spa_stamp: alloc_vec(m, 0)?,
            epoch: 0,
            uind: alloc_vec(nnz_capacity, 0)?,
            uind_len: alloc_vec(nbuckets, 0)?,
            offsets: alloc_vec(nbuckets + 1, 0)?,
            stage_pos: alloc_vec(nthreads * stage_cap, 0)?,
            stage_rows: alloc_vec(nthreads * stage_cap, 0)?,
            stage_vals: alloc_vec(nthreads * stage_cap, T::default())?,
            last_step_times: StepTimes::default(),
        })
    }

}

impl<T> BucketWorkspace<T> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn max_threads(&self) -> usize {
        self.max_threads
    }

    pub fn nbuckets(&self) -> usize {
        self.nbuckets
    }

    /// Counts filled in by the last [`estimate_buckets`] pass, row-major by
    /// thread: `boffset()[t * nbuckets() + b]` entries go from thread `t` to
    /// bucket `b`.
    pub fn boffset(&self) -> &[usize] {
        &self.boffset
    }

    /// Start a new call: one counter bump, except on wrap where the stamps
    /// genuinely need clearing.
    fn advance_epoch(&mut self) {
        if self.epoch == u32::MAX {
            self.spa_stamp.fill(0);
            self.epoch = 1;
        } else {
            self.epoch += 1;
        }
    }

    #[cfg(test)]
    pub(crate) fn force_epoch(&mut self, e: u32) {
        self.epoch = e;
    }
}

/// Contiguous chunk bounds splitting `len` items into `nt` near-equal runs.
#[inline]
fn chunk_bounds(len: usize, nt: usize, t: usize) -> (usize, usize) {
    (len * t / nt, len * (t + 1) / nt)
}

/// Alg.-2-style counting pass for one chunk of `x`. Returns entries seen.
fn count_chunk<M: Copy, V: Copy>(
    a: &CscMatrix<M>,
    xs: &[(usize, V)],
    m: usize,
    nb: usize,
    boffset_row: &mut [usize],
) -> u64 {
    boffset_row.fill(0);
    let mut entries = 0u64;
    for &(j, _) in xs {
        let (rows, _) = a.col(j);
        entries += rows.len() as u64;
        for &i in rows {
            boffset_row[bucket_of(i, m, nb)] += 1;
        }
    }
    entries
}

/// Counting pre-pass: fills `ws.boffset` with the number of entries each of
/// `nthreads` contiguous chunks of `x` routes to each bucket. The multiply
/// uses the identical chunking, which is what makes the counts authoritative.
pub fn estimate_buckets<M, V, W>(
    a: &CscMatrix<M>,
    x: &SparseVec<V>,
    ws: &mut BucketWorkspace<W>,
    nthreads: usize,
) -> Result<()>
where
    M: Copy + Sync,
    V: Copy + Sync,
{
    if a.ncols() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, vector has length {}",
            a.nrows(),
            a.ncols(),
            x.len()
        )));
    }
    if nthreads > ws.max_threads {
        return Err(Error::CapacityExceeded {
            what: "threads",
            needed: nthreads,
            capacity: ws.max_threads,
        });
    }
    let nb = ws.nbuckets;
    let m = a.nrows();
    let xs = x.entries();
    ws.boffset.fill(0);
    if nthreads == 1 {
        count_chunk(a, xs, m, nb, &mut ws.boffset[..nb]);
    } else {
        let rows: Vec<&mut [usize]> = ws.boffset[..nthreads * nb].chunks_mut(nb).collect();
        std::thread::scope(|s| {
            for (t, row) in rows.into_iter().enumerate() {
                let (lo, hi) = chunk_bounds(xs.len(), nthreads, t);
                s.spawn(move || count_chunk(a, &xs[lo..hi], m, nb, row));
            }
        });
    }
    Ok(())
}

/// Raw shared view of a slice for the fork-join phases. Threads may only
/// touch indices assigned to them by the phase protocol spelled out in
/// [`spmspv_bucket_into`]; every access is bounds-checked under debug
/// assertions.
struct Shared<E> {
    ptr: *mut E,
    len: usize,
}

unsafe impl<E: Send> Send for Shared<E> {}
unsafe impl<E: Send> Sync for Shared<E> {}

impl<E> Shared<E> {
    fn new(s: &mut [E]) -> Self {
        Shared {
            ptr: s.as_mut_ptr(),
            len: s.len(),
        }
    }

    /// Callers guarantee exclusive access to slot `i` for the duration of
    /// the current phase.
    #[inline]
    unsafe fn write(&self, i: usize, v: E) {
        debug_assert!(i < self.len);
        unsafe { self.ptr.add(i).write(v) };
    }

    /// Callers guarantee no thread writes slot `i` during the current phase.
    #[inline]
    unsafe fn read(&self, i: usize) -> E
    where
        E: Copy,
    {
        debug_assert!(i < self.len);
        unsafe { self.ptr.add(i).read() }
    }
}

/// Everything the fork-join workers share read-only or under the phase
/// protocol. One instance per multiply call.
struct Ctx<'a, S: Semiring> {
    a: &'a CscMatrix<S::MatScalar>,
    xs: &'a [(usize, S::Scalar)],
    sr: &'a S,
    m: usize,
    nb: usize,
    nt: usize,
    epoch: u32,
    stage_cap: usize,
    sorted: bool,

    boffset: Shared<usize>,
    wstart: Shared<usize>,
    cursor: Shared<usize>,
    bucket_start: Shared<usize>,
    arena_rows: Shared<usize>,
    arena_vals: Shared<S::Scalar>,
    spa_vals: Shared<S::Scalar>,
    spa_stamp: Shared<u32>,
    uind: Shared<usize>,
    uind_len: Shared<usize>,
    offsets: Shared<usize>,
    stage_pos: Shared<usize>,
    stage_rows: Shared<usize>,
    stage_vals: Shared<S::Scalar>,
    out: Shared<MaybeUninit<(usize, S::Scalar)>>,

    merge_next: AtomicUsize,
    emit_next: AtomicUsize,
}

/// Per-thread counter partials, merged after the join.
#[derive(Default, Clone, Copy)]
struct Partial {
    cols: u64,
    entries: u64,
    xacc: u64,
    pre_entries: u64,
    inits: u64,
}

impl<'a, S: Semiring> Ctx<'a, S> {
    /// Phase A (thread `t`): count chunk `t` into boffset row `t`.
    ///
    /// Writes: boffset[t*nb .. (t+1)*nb] only.
    unsafe fn phase_count(&self, t: usize, part: &mut Partial) {
        let (lo, hi) = chunk_bounds(self.xs.len(), self.nt, t);
        let base = t * self.nb;
        for b in 0..self.nb {
            unsafe { self.boffset.write(base + b, 0) };
        }
        for &(j, _) in &self.xs[lo..hi] {
            let (rows, _) = self.a.col(j);
            part.pre_entries += rows.len() as u64;
            for &i in rows {
                let slot = base + bucket_of(i, self.m, self.nb);
                unsafe { self.boffset.write(slot, self.boffset.read(slot) + 1) };
            }
        }
    }

    /// Master-only, between barriers: turn counts into bucket extents and
    /// per-(thread, bucket) write starts.
    ///
    /// For bucket b the layout is
    ///   bucket_start[b] | thread 0's range | thread 1's range | ...
    /// so ranges tile each bucket exactly and never overlap.
    unsafe fn phase_ranges(&self) {
        let mut acc = 0usize;
        for b in 0..self.nb {
            unsafe { self.bucket_start.write(b, acc) };
            for t in 0..self.nt {
                unsafe { self.wstart.write(t * self.nb + b, acc) };
                acc += unsafe { self.boffset.read(t * self.nb + b) };
            }
        }
        unsafe { self.bucket_start.write(self.nb, acc) };
    }

    /// Phase B (thread `t`): scale chunk `t` and scatter it into the
    /// precomputed ranges, batching writes through the staging buffer.
    ///
    /// Writes: cursor row `t`, staging region `t`, and arena positions in
    /// `[wstart[t][b], wstart[t][b] + boffset[t][b])` per bucket — disjoint
    /// from every other thread by construction of `phase_ranges`.
    unsafe fn phase_scatter(&self, t: usize, part: &mut Partial) {
        let (lo, hi) = chunk_bounds(self.xs.len(), self.nt, t);
        let base = t * self.nb;
        for b in 0..self.nb {
            let start = unsafe { self.wstart.read(base + b) };
            unsafe { self.cursor.write(base + b, start) };
        }
        let sbase = t * self.stage_cap;
        let mut staged = 0usize;
        for &(j, xv) in &self.xs[lo..hi] {
            part.xacc += 1;
            part.cols += 1;
            let (rows, vals) = self.a.col(j);
            part.entries += rows.len() as u64;
            for (&i, &av) in rows.iter().zip(vals) {
                let slot = base + bucket_of(i, self.m, self.nb);
                let pos = unsafe { self.cursor.read(slot) };
                unsafe { self.cursor.write(slot, pos + 1) };
                unsafe {
                    self.stage_pos.write(sbase + staged, pos);
                    self.stage_rows.write(sbase + staged, i);
                    self.stage_vals.write(sbase + staged, self.sr.mult(av, xv));
                }
                staged += 1;
                if staged == self.stage_cap {
                    unsafe { self.flush_stage(sbase, staged) };
                    staged = 0;
                }
            }
        }
        unsafe { self.flush_stage(sbase, staged) };
    }

    /// Copy a full staging buffer out to the arena. The staged positions are
    /// inside this thread's disjoint write ranges.
    #[inline]
    unsafe fn flush_stage(&self, sbase: usize, n: usize) {
        for k in 0..n {
            let pos = unsafe { self.stage_pos.read(sbase + k) };
            unsafe {
                self.arena_rows.write(pos, self.stage_rows.read(sbase + k));
                self.arena_vals.write(pos, self.stage_vals.read(sbase + k));
            }
        }
    }

    /// Master-only, after phase B under debug assertions: every (thread,
    /// bucket) cursor must have landed exactly at the end of its range and
    /// the ranges must tile each bucket.
    unsafe fn debug_check_tiling(&self) {
        if cfg!(debug_assertions) {
            for b in 0..self.nb {
                let mut expect = unsafe { self.bucket_start.read(b) };
                for t in 0..self.nt {
                    let slot = t * self.nb + b;
                    let start = unsafe { self.wstart.read(slot) };
                    let count = unsafe { self.boffset.read(slot) };
                    let cur = unsafe { self.cursor.read(slot) };
                    debug_assert_eq!(start, expect, "range start for thread {t} bucket {b}");
                    debug_assert_eq!(cur, start + count, "cursor for thread {t} bucket {b}");
                    expect = start + count;
                }
                debug_assert_eq!(
                    expect,
                    unsafe { self.bucket_start.read(b + 1) },
                    "ranges must tile bucket {b}"
                );
            }
        }
    }

    /// Phase C (any thread, one bucket at a time): merge bucket `k` through
    /// the accumulator and record its unique row ids.
    ///
    /// Writes: spa slots whose row lies in bucket `k`'s row range, the uind
    /// region `[bucket_start[k], bucket_start[k] + |uind_k|)`, and
    /// `uind_len[k]`. All are private to bucket `k`.
    unsafe fn phase_merge(&self, k: usize, part: &mut Partial) {
        let lo = unsafe { self.bucket_start.read(k) };
        let hi = unsafe { self.bucket_start.read(k + 1) };
        let mut nu = 0usize;
        for p in lo..hi {
            let i = unsafe { self.arena_rows.read(p) };
            let v = unsafe { self.arena_vals.read(p) };
            debug_assert_eq!(bucket_of(i, self.m, self.nb), k);
            if unsafe { self.spa_stamp.read(i) } == self.epoch {
                let acc = unsafe { self.spa_vals.read(i) };
                unsafe { self.spa_vals.write(i, self.sr.add(acc, v)) };
            } else {
                unsafe {
                    self.spa_stamp.write(i, self.epoch);
                    self.spa_vals.write(i, v);
                    self.uind.write(lo + nu, i);
                }
                nu += 1;
                part.inits += 1;
            }
        }
        unsafe { self.uind_len.write(k, nu) };
    }

    /// Master-only, between merge and emit: exclusive prefix sum of the
    /// per-bucket unique counts. Returns total output nnz.
    unsafe fn phase_offsets(&self) -> usize {
        let mut acc = 0usize;
        for k in 0..self.nb {
            unsafe { self.offsets.write(k, acc) };
            acc += unsafe { self.uind_len.read(k) };
        }
        unsafe { self.offsets.write(self.nb, acc) };
        acc
    }

    /// Phase D (any thread, one bucket at a time): couple bucket `k`'s
    /// unique indices with their accumulated values and write them at the
    /// bucket's output offset, sorting first when the output is sorted.
    ///
    /// Writes: uind region of bucket `k` (sort) and out slots
    /// `[offsets[k], offsets[k+1])`; reads spa slots of bucket `k` only.
    unsafe fn phase_emit(&self, k: usize) {
        let lo = unsafe { self.bucket_start.read(k) };
        let nu = unsafe { self.uind_len.read(k) };
        if self.sorted && nu > 1 {
            // In-bucket sort; buckets cover increasing row ranges, so sorted
            // buckets concatenate into a globally sorted vector.
            let region: &mut [usize] =
                unsafe { std::slice::from_raw_parts_mut(self.uind.ptr.add(lo), nu) };
            region.sort_unstable();
        }
        let out0 = unsafe { self.offsets.read(k) };
        for q in 0..nu {
            let i = unsafe { self.uind.read(lo + q) };
            let v = unsafe { self.spa_vals.read(i) };
            unsafe { self.out.write(out0 + q, MaybeUninit::new((i, v))) };
        }
    }
}

/// Multiply `y = A x` over `sr`, reusing `y`'s buffer. See [`spmspv_bucket`].
pub fn spmspv_bucket_into<S: Semiring>(
    a: &CscMatrix<S::MatScalar>,
    x: &SparseVec<S::Scalar>,
    sr: &S,
    ws: &mut BucketWorkspace<S::Scalar>,
    nthreads: usize,
    counters: &mut WorkCounters,
    y: &mut SparseVec<S::Scalar>,
) -> Result<()> {
    counters.reset();
    if a.ncols() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, vector has length {}",
            a.nrows(),
            a.ncols(),
            x.len()
        )));
    }
    if a.nrows() > ws.m {
        return Err(Error::CapacityExceeded {
            what: "spa",
            needed: a.nrows(),
            capacity: ws.m,
        });
    }
    if nthreads < 1 {
        return Err(Error::InvalidConfig("nthreads must be at least 1".into()));
    }

    // Not enough vector entries to share: run the same code single-threaded.
    let nt = if x.nnz() < nthreads { 1 } else { nthreads };
    if nt > ws.max_threads {
        return Err(Error::CapacityExceeded {
            what: "threads",
            needed: nt,
            capacity: ws.max_threads,
        });
    }

    // Upper-bound the arena demand before touching the workspace. The same
    // quantity is recomputed per chunk as the counting pre-pass; this O(f)
    // sweep only reads column pointers.
    let demand: usize = x.iter().map(|(j, _)| a.col_len(j)).sum();
    if demand > ws.capacity {
        return Err(Error::CapacityExceeded {
            what: "bucket arena",
            needed: demand,
            capacity: ws.capacity,
        });
    }

    ws.advance_epoch();

    let mut entries = y.take_entries();
    entries.clear();
    entries.reserve(demand.min(a.nrows()));

    // The single-threaded path must not allocate; the forked path owns its
    // per-thread partial slots.
    let mut single = Partial::default();
    let mut partials: Vec<Partial> = if nt == 1 {
        Vec::new()
    } else {
        vec![Partial::default(); nt]
    };
    let times;

    {
        let spare = entries.spare_capacity_mut();
        let ctx: Ctx<'_, S> = Ctx {
            a,
            xs: x.entries(),
            sr,
            m: a.nrows(),
            nb: ws.nbuckets,
            nt,
            epoch: ws.epoch,
            stage_cap: ws.stage_cap,
            sorted: x.mode() == Mode::Sorted,
            boffset: Shared::new(&mut ws.boffset),
            wstart: Shared::new(&mut ws.wstart),
            cursor: Shared::new(&mut ws.cursor),
            bucket_start: Shared::new(&mut ws.bucket_start),
            arena_rows: Shared::new(&mut ws.arena_rows),
            arena_vals: Shared::new(&mut ws.arena_vals),
            spa_vals: Shared::new(&mut ws.spa_vals),
            spa_stamp: Shared::new(&mut ws.spa_stamp),
            uind: Shared::new(&mut ws.uind),
            uind_len: Shared::new(&mut ws.uind_len),
            offsets: Shared::new(&mut ws.offsets),
            stage_pos: Shared::new(&mut ws.stage_pos),
            stage_rows: Shared::new(&mut ws.stage_rows),
            stage_vals: Shared::new(&mut ws.stage_vals),
            out: Shared::new(spare),
            merge_next: AtomicUsize::new(0),
            emit_next: AtomicUsize::new(0),
        };

        times = if nt == 1 {
            run_single(&ctx, &mut single)
        } else {
            run_forked(&ctx, &mut partials)
        };
    }

    // SAFETY: phase D wrote every slot in [0, offsets[nb]) exactly once
    // (offsets are the exclusive prefix sum of the bucket result sizes).
    let total = ws.offsets[ws.nbuckets];
    unsafe { entries.set_len(total) };

    y.set_from(a.nrows(), entries, x.mode());
    ws.last_step_times = times;

    for p in std::iter::once(&single).chain(partials.iter()) {
        counters.columns_touched += p.cols;
        counters.matrix_entries_scanned += p.entries;
        counters.input_vector_accesses += p.xacc;
        counters.pre_entries_scanned += p.pre_entries;
        counters.spa_slots_initialized += p.inits;
    }
    counters.output_nnz = total as u64;
    Ok(())
}

fn run_single<S: Semiring>(ctx: &Ctx<'_, S>, part: &mut Partial) -> StepTimes {
    // Single-threaded: every phase-protocol obligation holds trivially.
    let t0 = Instant::now();
    unsafe {
        ctx.phase_count(0, part);
        ctx.phase_ranges();
    }
    let t1 = Instant::now();
    unsafe { ctx.phase_scatter(0, part) };
    unsafe { ctx.debug_check_tiling() };
    let t2 = Instant::now();
    for k in 0..ctx.nb {
        unsafe { ctx.phase_merge(k, part) };
    }
    let t3 = Instant::now();
    unsafe { ctx.phase_offsets() };
    for k in 0..ctx.nb {
        unsafe { ctx.phase_emit(k) };
    }
    let t4 = Instant::now();
    StepTimes {
        pre: t1 - t0,
        bucket: t2 - t1,
        merge: t3 - t2,
        concat: t4 - t3,
    }
}

/// Fork-join execution: one spawn per call, barriers between phases. Thread
/// 0 is the master; it computes the range tables and the output prefix sum
/// while the other threads wait, and records the phase times at its own
/// barrier crossings.
fn run_forked<S: Semiring>(ctx: &Ctx<'_, S>, partials: &mut [Partial]) -> StepTimes {
    let nt = ctx.nt;
    let barrier = Barrier::new(nt);
    let mut times = StepTimes::default();

    std::thread::scope(|s| {
        let mut workers = Vec::with_capacity(nt - 1);
        let mut parts = partials.iter_mut();
        let first = parts.next().expect("nt >= 1");
        for (t, part) in parts.enumerate() {
            let t = t + 1;
            let barrier = &barrier;
            let ctx = &*ctx;
            workers.push(s.spawn(move || {
                unsafe { ctx.phase_count(t, part) };
                barrier.wait(); // counts ready
                barrier.wait(); // master published ranges
                unsafe { ctx.phase_scatter(t, part) };
                barrier.wait(); // arena fully populated
                loop {
                    let k = ctx.merge_next.fetch_add(1, Ordering::Relaxed);
                    if k >= ctx.nb {
                        break;
                    }
                    unsafe { ctx.phase_merge(k, part) };
                }
                barrier.wait(); // merges done
                barrier.wait(); // master published offsets
                loop {
                    let k = ctx.emit_next.fetch_add(1, Ordering::Relaxed);
                    if k >= ctx.nb {
                        break;
                    }
                    unsafe { ctx.phase_emit(k) };
                }
            }));
        }

        // Master (thread 0).
        let t0 = Instant::now();
        unsafe { ctx.phase_count(0, first) };
        barrier.wait();
        unsafe { ctx.phase_ranges() };
        barrier.wait();
        let t1 = Instant::now();
        unsafe { ctx.phase_scatter(0, first) };
        barrier.wait();
        unsafe { ctx.debug_check_tiling() };
        let t2 = Instant::now();
        loop {
            let k = ctx.merge_next.fetch_add(1, Ordering::Relaxed);
            if k >= ctx.nb {
                break;
            }
            unsafe { ctx.phase_merge(k, first) };
        }
        barrier.wait();
        let t3 = Instant::now();
        unsafe { ctx.phase_offsets() };
        barrier.wait();
        loop {
            let k = ctx.emit_next.fetch_add(1, Ordering::Relaxed);
            if k >= ctx.nb {
                break;
            }
            unsafe { ctx.phase_emit(k) };
        }
        for w in workers {
            w.join().expect("worker panicked");
        }
        let t4 = Instant::now();
        times = StepTimes {
            pre: t1 - t0,
            bucket: t2 - t1,
            merge: t3 - t2,
            concat: t4 - t3,
        };
    });
    times
}

/// Multiply `y = A x` over the semiring `sr` with the bucket kernel.
///
/// The output mirrors the input's mode: sorted in, sorted out. Entries whose
/// accumulated value equals `sr.zero()` are kept whenever a stored entry
/// produced them — sparsity is structural, not numerical. The workspace must
/// have been sized for the matrix (`ws.m() >= a.nrows()`, capacity at least
/// the selected columns' entry count); it is never grown implicitly.
pub fn spmspv_bucket<S: Semiring>(
    a: &CscMatrix<S::MatScalar>,
    x: &SparseVec<S::Scalar>,
    sr: &S,
    ws: &mut BucketWorkspace<S::Scalar>,
    nthreads: usize,
    counters: &mut WorkCounters,
) -> Result<SparseVec<S::Scalar>> {
    let mut y = SparseVec::empty(a.nrows(), x.mode());
    spmspv_bucket_into(a, x, sr, ws, nthreads, counters, &mut y)?;
    Ok(y)
}

/// Merge one populated bucket through the accumulator and return its unique
/// row indices in first-insertion order. Building block of the sequential
/// path, exposed so the merge can be tested in isolation; expects the arena
/// populated for the current epoch (see [`estimate_buckets`] plus the step-1
/// scatter, or load the workspace by hand in tests).
pub fn spa_merge_bucket<'w, S: Semiring>(
    ws: &'w mut BucketWorkspace<S::Scalar>,
    bucket: usize,
    sr: &S,
) -> &'w [usize] {
    let (lo, hi) = (ws.bucket_start[bucket], ws.bucket_start[bucket + 1]);
    let mut nu = 0usize;
    for p in lo..hi {
        let i = ws.arena_rows[p];
        let v = ws.arena_vals[p];
        if ws.spa_stamp[i] == ws.epoch {
            ws.spa_vals[i] = sr.add(ws.spa_vals[i], v);
        } else {
            ws.spa_stamp[i] = ws.epoch;
            ws.spa_vals[i] = v;
            ws.uind[lo + nu] = i;
            nu += 1;
        }
    }
    ws.uind_len[bucket] = nu;
    &ws.uind[lo..lo + nu]
}

/// Concatenate merged buckets into an output vector: offsets come from an
/// exclusive prefix sum over the per-bucket unique counts, and sorted mode
/// sorts each bucket's indices first (bucket row ranges increase, so the
/// concatenation is globally sorted). Exposed for testing alongside
/// [`spa_merge_bucket`].
pub fn concat_output<T: Copy>(ws: &mut BucketWorkspace<T>, mode: Mode) -> SparseVec<T> {
    let nb = ws.nbuckets;
    let mut acc = 0usize;
    for k in 0..nb {
        ws.offsets[k] = acc;
        acc += ws.uind_len[k];
    }
    ws.offsets[nb] = acc;

    let mut entries = Vec::with_capacity(acc);
    for k in 0..nb {
        let lo = ws.bucket_start[k];
        let region = &mut ws.uind[lo..lo + ws.uind_len[k]];
        if mode == Mode::Sorted {
            region.sort_unstable();
        }
        for &i in region.iter() {
            entries.push((i, ws.spa_vals[i]));
        }
    }
    SparseVec::from_parts(ws.m, entries, mode)
}

/// Output offsets of the last call (exclusive prefix sum per bucket).
pub fn output_offsets<T>(ws: &BucketWorkspace<T>) -> &[usize] {
    &ws.offsets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dense_spmspv;
    use crate::semiring::{MinPlus, PlusTimes};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    type Pt = PlusTimes<i64>;

    fn ws_for(a: &CscMatrix<i64>, nt: usize, nb: usize) -> BucketWorkspace<i64> {
        BucketWorkspace::new(a.nrows(), a.nnz().max(1), nt, nb).unwrap()
    }

    #[test]
    fn bucket_of_examples() {
        assert_eq!(bucket_of(0, 8, 4), 0);
        assert_eq!(bucket_of(5, 8, 4), 2);
        assert_eq!(bucket_of(7, 8, 4), 3);
    }

    #[test]
    fn bucket_of_is_contiguous_and_in_range() {
        for &(m, nb) in &[(8usize, 4usize), (7, 4), (5, 16), (1000, 3), (3, 3)] {
            let mut prev = 0;
            for i in 0..m {
                let k = bucket_of(i, m, nb);
                assert!(k < nb);
                assert!(k >= prev, "nondecreasing");
                assert!(i >= bucket_row_start(k, m, nb));
                assert!(i < bucket_row_start(k + 1, m, nb));
                prev = k;
            }
        }
    }

    #[test]
    fn workspace_trivial_shapes() {
        let ws = BucketWorkspace::<i64>::new(8, 16, 2, 8).unwrap();
        assert_eq!(ws.m(), 8);
        assert_eq!(ws.capacity(), 16);
        let degenerate = BucketWorkspace::<i64>::new(0, 1, 1, 1).unwrap();
        assert_eq!(degenerate.m(), 0);
        assert!(BucketWorkspace::<i64>::new(4, 0, 1, 1).is_err());
        assert!(BucketWorkspace::<i64>::new(4, 4, 1, 0).is_err());
    }

    #[test]
    fn estimate_single_entry_routes_to_middle_bucket() {
        let a = CscMatrix::from_triples(3, 3, &[(0, 0, 1i64), (1, 1, 1), (2, 2, 1)]).unwrap();
        let x = SparseVec::new(3, vec![(1, 7i64)], Mode::Sorted).unwrap();
        let mut ws = ws_for(&a, 1, 3);
        estimate_buckets(&a, &x, &mut ws, 1).unwrap();
        assert_eq!(&ws.boffset()[..3], &[0, 1, 0]);
    }

    #[test]
    fn estimate_empty_vector_is_all_zero() {
        let a = CscMatrix::from_triples(3, 3, &[(0, 0, 1i64), (2, 1, 1)]).unwrap();
        let x = SparseVec::<i64>::empty(3, Mode::Sorted);
        let mut ws = ws_for(&a, 2, 4);
        estimate_buckets(&a, &x, &mut ws, 2).unwrap();
        assert!(ws.boffset().iter().all(|&c| c == 0));
    }

    #[test]
    fn estimate_matches_sequential_recount() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut triples = Vec::new();
        for c in 0..50usize {
            for r in 0..50usize {
                if rng.gen_bool(0.08) {
                    triples.push((r, c, rng.gen_range(-4i64..5)));
                }
            }
        }
        let a = CscMatrix::from_triples(50, 50, &triples).unwrap();
        let idx = rand::seq::index::sample(&mut rng, 50, 10).into_vec();
        let mut entries: Vec<(usize, i64)> = idx.into_iter().map(|i| (i, 1)).collect();
        entries.sort_unstable_by_key(|&(i, _)| i);
        let x = SparseVec::new(50, entries, Mode::Sorted).unwrap();

        let (nt, nb) = (4usize, 16usize);
        let mut ws = ws_for(&a, nt, nb);
        estimate_buckets(&a, &x, &mut ws, nt).unwrap();

        // Sequential recount over the same chunk split.
        let xs = x.entries();
        let mut expect = vec![0usize; nt * nb];
        for t in 0..nt {
            let (lo, hi) = (xs.len() * t / nt, xs.len() * (t + 1) / nt);
            for &(j, _) in &xs[lo..hi] {
                let (rows, _) = a.col(j);
                for &i in rows {
                    expect[t * nb + bucket_of(i, 50, nb)] += 1;
                }
            }
        }
        assert_eq!(ws.boffset(), &expect[..]);

        let total: usize = ws.boffset().iter().sum();
        let demand: usize = x.iter().map(|(j, _)| a.col_len(j)).sum();
        assert_eq!(total, demand);
    }

    #[test]
    fn identity_multiply() {
        let a = CscMatrix::from_triples(3, 3, &[(0, 0, 1i64), (1, 1, 1), (2, 2, 1)]).unwrap();
        let x = SparseVec::new(3, vec![(1, 5i64)], Mode::Sorted).unwrap();
        let mut ws = ws_for(&a, 1, 4);
        let mut c = WorkCounters::new();
        let y = spmspv_bucket(&a, &x, &Pt::new(), &mut ws, 1, &mut c).unwrap();
        assert_eq!(y.entries(), &[(1, 5)]);
        assert_eq!(c.columns_touched, 1);
        assert_eq!(c.matrix_entries_scanned, 1);
        assert_eq!(c.output_nnz, 1);
    }

    #[test]
    fn empty_vector_gives_empty_output() {
        let a = CscMatrix::from_triples(4, 4, &[(0, 0, 2i64), (3, 0, 1)]).unwrap();
        let x = SparseVec::<i64>::empty(4, Mode::Unsorted);
        let mut ws = ws_for(&a, 2, 8);
        let mut c = WorkCounters::new();
        let y = spmspv_bucket(&a, &x, &Pt::new(), &mut ws, 2, &mut c).unwrap();
        assert!(y.entries().is_empty());
        assert_eq!(y.mode(), Mode::Unsorted);
        assert_eq!(c.output_nnz, 0);
    }

    /// The worked 4x4 instance: col0 = {(0,2),(3,1)}, col2 = {(0,3),(1,4)},
    /// x = {(0,1),(2,2)} under (+, *) gives y = {(0,8),(1,8),(3,1)}.
    fn worked_example() -> (CscMatrix<i64>, SparseVec<i64>) {
        let a = CscMatrix::from_triples(
            4,
            4,
            &[(0, 0, 2i64), (3, 0, 1), (0, 2, 3), (1, 2, 4)],
        )
        .unwrap();
        let x = SparseVec::new(4, vec![(0, 1i64), (2, 2)], Mode::Sorted).unwrap();
        (a, x)
    }

    #[test]
    fn worked_example_plus_times() {
        let (a, x) = worked_example();
        for nt in [1usize, 2] {
            let mut ws = ws_for(&a, nt, 4);
            let mut c = WorkCounters::new();
            let y = spmspv_bucket(&a, &x, &Pt::new(), &mut ws, nt, &mut c).unwrap();
            assert_eq!(y.entries(), &[(0, 8), (1, 8), (3, 1)], "nt={nt}");
            assert_eq!(c.columns_touched, 2);
            assert_eq!(c.matrix_entries_scanned, 4);
        }
    }

    #[test]
    fn worked_example_min_plus() {
        let (ai, xi) = worked_example();
        let a = ai.map_values(|v| v as f64);
        let entries: Vec<(usize, f64)> = xi.iter().map(|(i, v)| (i, v as f64)).collect();
        let x = SparseVec::new(4, entries, Mode::Sorted).unwrap();
        let mut ws = BucketWorkspace::new(4, 4, 1, 4).unwrap();
        let mut c = WorkCounters::new();
        let y = spmspv_bucket(&a, &x, &MinPlus, &mut ws, 1, &mut c).unwrap();
        // y(0) = min(2 + 1, 3 + 2) = 3
        assert_eq!(y.to_map()[&0], 3.0);
        assert_eq!(y.to_map()[&3], 2.0);
    }

    #[test]
    fn structural_zeros_are_kept() {
        // (0,0)*1 + (0,1)*1 = 1 - 1 = 0 must still appear in y.
        let a = CscMatrix::from_triples(2, 2, &[(0, 0, 1i64), (0, 1, -1)]).unwrap();
        let x = SparseVec::new(2, vec![(0, 1i64), (1, 1)], Mode::Sorted).unwrap();
        let mut ws = ws_for(&a, 1, 2);
        let mut c = WorkCounters::new();
        let y = spmspv_bucket(&a, &x, &Pt::new(), &mut ws, 1, &mut c).unwrap();
        assert_eq!(y.entries(), &[(0, 0)]);
    }

    #[test]
    fn dimension_and_capacity_errors() {
        let (a, x) = worked_example();
        let bad = SparseVec::<i64>::empty(3, Mode::Sorted);
        let mut ws = ws_for(&a, 1, 4);
        let mut c = WorkCounters::new();
        assert!(matches!(
            spmspv_bucket(&a, &bad, &Pt::new(), &mut ws, 1, &mut c),
            Err(Error::DimensionMismatch(_))
        ));

        // Arena smaller than the selected columns' entries: error, no growth.
        let mut tiny = BucketWorkspace::<i64>::new(4, 2, 1, 4).unwrap();
        assert!(matches!(
            spmspv_bucket(&a, &x, &Pt::new(), &mut tiny, 1, &mut c),
            Err(Error::CapacityExceeded { what: "bucket arena", .. })
        ));

        // SPA shorter than the matrix rows.
        let mut short = BucketWorkspace::<i64>::new(2, 8, 1, 4).unwrap();
        assert!(matches!(
            spmspv_bucket(&a, &x, &Pt::new(), &mut short, 1, &mut c),
            Err(Error::CapacityExceeded { what: "spa", .. })
        ));

        // More threads than the workspace was built for.
        let mut narrow = BucketWorkspace::<i64>::new(4, 8, 1, 4).unwrap();
        assert!(matches!(
            spmspv_bucket(&a, &x, &Pt::new(), &mut narrow, 2, &mut c),
            Err(Error::CapacityExceeded { what: "threads", .. })
        ));
    }

    #[test]
    fn spa_merge_bucket_accumulates_duplicates() {
        // Hand-load bucket 1 of a 3-bucket workspace over 9 rows
        // (bucket 1 covers rows 3..6) with [(4,a),(4,b),(5,c)].
        let mut ws = BucketWorkspace::<i64>::new(9, 8, 1, 3).unwrap();
        ws.advance_epoch();
        ws.bucket_start[..4].copy_from_slice(&[0, 0, 3, 3]);
        ws.arena_rows[..3].copy_from_slice(&[4, 4, 5]);
        ws.arena_vals[..3].copy_from_slice(&[10, 32, 7]);
        let uind = spa_merge_bucket(&mut ws, 1, &Pt::new());
        assert_eq!(uind, &[4, 5]);
        assert_eq!(ws.spa_vals[4], 42);
        assert_eq!(ws.spa_vals[5], 7);
        // Bucket 0 and 2 are empty.
        assert!(spa_merge_bucket(&mut ws, 0, &Pt::new()).is_empty());
        assert!(spa_merge_bucket(&mut ws, 2, &Pt::new()).is_empty());
    }

    #[test]
    fn spa_merge_matches_hash_accumulation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let m = 100usize;
        let n_entries = 1000usize;
        let mut ws = BucketWorkspace::<i64>::new(m, n_entries, 1, 1).unwrap();
        ws.advance_epoch();
        let mut expect: std::collections::HashMap<usize, i64> = Default::default();
        for p in 0..n_entries {
            let i = rng.gen_range(0..m);
            let v = rng.gen_range(-100i64..100);
            ws.arena_rows[p] = i;
            ws.arena_vals[p] = v;
            *expect.entry(i).or_insert(0) += v;
        }
        ws.bucket_start[0] = 0;
        ws.bucket_start[1] = n_entries;
        let uind: Vec<usize> = spa_merge_bucket(&mut ws, 0, &Pt::new()).to_vec();
        assert_eq!(uind.len(), expect.len());
        for &i in &uind {
            assert_eq!(ws.spa_vals[i], expect[&i], "row {i}");
        }
    }

    #[test]
    fn concat_offsets_are_prefix_sums() {
        let mut ws = BucketWorkspace::<i64>::new(12, 8, 1, 3).unwrap();
        ws.advance_epoch();
        // |uind| = [2, 0, 3] -> offsets [0, 2, 2] (exclusive).
        ws.bucket_start[..4].copy_from_slice(&[0, 2, 2, 5]);
        ws.uind_len[..3].copy_from_slice(&[2, 0, 3]);
        for (slot, row) in [(0usize, 1usize), (1, 2), (2, 8), (3, 9), (4, 10)] {
            ws.uind[slot] = row;
            ws.spa_vals[row] = row as i64;
            ws.spa_stamp[row] = 1;
        }
        let y = concat_output(&mut ws, Mode::Sorted);
        assert_eq!(&ws.offsets[..3], &[0, 2, 2]);
        assert_eq!(
            y.entries(),
            &[(1, 1), (2, 2), (8, 8), (9, 9), (10, 10)]
        );
    }

    #[test]
    fn concat_single_bucket_is_that_bucket() {
        let mut ws = BucketWorkspace::<i64>::new(4, 4, 1, 1).unwrap();
        ws.advance_epoch();
        ws.bucket_start[..2].copy_from_slice(&[0, 2]);
        ws.uind_len[0] = 2;
        ws.uind[..2].copy_from_slice(&[3, 1]);
        ws.spa_vals[3] = 30;
        ws.spa_vals[1] = 10;
        let y = concat_output(&mut ws, Mode::Unsorted);
        assert_eq!(y.entries(), &[(3, 30), (1, 10)]);
    }

    #[test]
    fn sequential_building_blocks_match_fused_kernel() {
        // 16 buckets of random content: estimate + scatter + merge + concat
        // must equal the flatten-then-accumulate path taken by the kernel.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut triples = Vec::new();
        for c in 0..64usize {
            for r in 0..64usize {
                if rng.gen_bool(0.1) {
                    triples.push((r, c, rng.gen_range(-9i64..10)));
                }
            }
        }
        let a = CscMatrix::from_triples(64, 64, &triples).unwrap();
        let idx = rand::seq::index::sample(&mut rng, 64, 20).into_vec();
        let mut entries: Vec<(usize, i64)> =
            idx.into_iter().map(|i| (i, rng.gen_range(1i64..5))).collect();
        entries.sort_unstable_by_key(|&(i, _)| i);
        let x = SparseVec::new(64, entries, Mode::Sorted).unwrap();

        let mut ws = ws_for(&a, 1, 16);
        let mut c = WorkCounters::new();
        let fused = spmspv_bucket(&a, &x, &Pt::new(), &mut ws, 1, &mut c).unwrap();

        let mut ws2 = ws_for(&a, 1, 16);
        estimate_buckets(&a, &x, &mut ws2, 1).unwrap();
        // Drive the exposed pieces: ranges, scatter, merge, concat.
        ws2.advance_epoch();
        let mut acc = 0usize;
        for b in 0..16 {
            ws2.bucket_start[b] = acc;
            ws2.wstart[b] = acc;
            acc += ws2.boffset[b];
        }
        ws2.bucket_start[16] = acc;
        ws2.cursor[..16].copy_from_slice(&ws2.wstart[..16]);
        for (j, xv) in x.iter() {
            let (rows, vals) = a.col(j);
            for (&i, &av) in rows.iter().zip(vals) {
                let b = bucket_of(i, 64, 16);
                let pos = ws2.cursor[b];
                ws2.cursor[b] += 1;
                ws2.arena_rows[pos] = i;
                ws2.arena_vals[pos] = av * xv;
            }
        }
        for k in 0..16 {
            spa_merge_bucket(&mut ws2, k, &Pt::new());
        }
        let step = concat_output(&mut ws2, Mode::Sorted);
        assert_eq!(fused.entries(), step.entries());
    }

    #[test]
    fn workspace_reuse_is_stable() {
        let (a, x) = worked_example();
        let mut ws = ws_for(&a, 2, 8);
        let mut c = WorkCounters::new();
        let first = spmspv_bucket(&a, &x, &Pt::new(), &mut ws, 1, &mut c).unwrap();
        for nt in [1usize, 2, 1, 2] {
            for _ in 0..50 {
                let y = spmspv_bucket(&a, &x, &Pt::new(), &mut ws, nt, &mut c).unwrap();
                assert_eq!(y.entries(), first.entries());
            }
        }
    }

    #[test]
    fn epoch_wrap_resets_stamps() {
        let (a, x) = worked_example();
        let mut ws = ws_for(&a, 1, 4);
        let mut c = WorkCounters::new();
        let before = spmspv_bucket(&a, &x, &Pt::new(), &mut ws, 1, &mut c).unwrap();
        ws.force_epoch(u32::MAX - 1);
        for _ in 0..4 {
            // crosses the wrap; stale stamps must never read as initialized
            let y = spmspv_bucket(&a, &x, &Pt::new(), &mut ws, 1, &mut c).unwrap();
            assert_eq!(y.entries(), before.entries());
        }
    }

    #[test]
    fn unsorted_mode_is_preserved_and_duplicate_free() {
        let (a, x) = worked_example();
        let xu = x.convert(Mode::Unsorted);
        let mut ws = ws_for(&a, 2, 8);
        let mut c = WorkCounters::new();
        let y = spmspv_bucket(&a, &xu, &Pt::new(), &mut ws, 2, &mut c).unwrap();
        assert_eq!(y.mode(), Mode::Unsorted);
        let mut seen = std::collections::HashSet::new();
        for (i, _) in y.iter() {
            assert!(seen.insert(i));
        }
        assert_eq!(y.to_map(), dense_spmspv(&a, &xu, &Pt::new()).unwrap().to_map());
    }

    fn arb_instance() -> impl Strategy<Value = (CscMatrix<i64>, SparseVec<i64>)> {
        (1usize..40, 1usize..40, any::<u64>()).prop_map(|(m, n, seed)| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut triples = Vec::new();
            for c in 0..n {
                for r in 0..m {
                    if rng.gen_bool(0.15) {
                        triples.push((r, c, rng.gen_range(-9i64..10)));
                    }
                }
            }
            let a = CscMatrix::from_triples(m, n, &triples).unwrap();
            let f = rng.gen_range(0..=n);
            let idx = rand::seq::index::sample(&mut rng, n, f).into_vec();
            let mut entries: Vec<(usize, i64)> =
                idx.into_iter().map(|i| (i, rng.gen_range(-9i64..10))).collect();
            entries.sort_unstable_by_key(|&(i, _)| i);
            let x = SparseVec::new(n, entries, Mode::Sorted).unwrap();
            (a, x)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_dense_oracle_across_thread_counts((a, x) in arb_instance()) {
            let sr = Pt::new();
            let expect = dense_spmspv(&a, &x, &sr).unwrap();
            for nt in [1usize, 2, 4] {
                let mut ws = BucketWorkspace::new(a.nrows(), a.nnz().max(1), nt, 4 * nt).unwrap();
                let mut c = WorkCounters::new();
                let y = spmspv_bucket(&a, &x, &sr, &mut ws, nt, &mut c).unwrap();
                prop_assert_eq!(y.to_map(), expect.to_map());
                // Work-efficiency equalities hold at every thread count.
                prop_assert_eq!(c.columns_touched, x.nnz() as u64);
                let demand: usize = x.iter().map(|(j, _)| a.col_len(j)).sum();
                prop_assert_eq!(c.matrix_entries_scanned, demand as u64);
                prop_assert_eq!(c.pre_entries_scanned, demand as u64);
                prop_assert!(c.spa_slots_initialized <= c.matrix_entries_scanned);
                prop_assert_eq!(c.spa_slots_initialized, y.nnz() as u64);
                // Sorted in, sorted out, strictly increasing.
                for w in y.entries().windows(2) {
                    prop_assert!(w[0].0 < w[1].0);
                }
            }
        }

        #[test]
        fn deterministic_for_fixed_threads((a, x) in arb_instance()) {
            let sr = Pt::new();
            let mut ws = BucketWorkspace::new(a.nrows(), a.nnz().max(1), 2, 8).unwrap();
            let mut c = WorkCounters::new();
            let y1 = spmspv_bucket(&a, &x, &sr, &mut ws, 2, &mut c).unwrap();
            let y2 = spmspv_bucket(&a, &x, &sr, &mut ws, 2, &mut c).unwrap();
            prop_assert_eq!(y1.entries(), y2.entries());
        }
    }
}
