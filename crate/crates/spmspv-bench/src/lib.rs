//! Benchmark harness over the multiply kernels: vector-sparsity sweeps, BFS
//! kernel comparisons and thread-scaling runs, all emitting CSV.
//!
//! Timing rows go to `--out` (append, header written once) or stdout;
//! human-readable medians go to stderr so stdout stays machine-readable.

use clap::{Args, Parser, Subcommand, ValueEnum};
use spmspv::io::{append_csv_row, format_csv_row};
use spmspv::{
    bfs_with_stats, frontier_sequence, gen_er_matrix, gen_sparse_vec, Algorithm, CscMatrix,
    ErConfig, Error, KernelRunner, Mode, PlusTimes, Result, SparseVec, StepTimes, WorkCounters,
};
use std::path::PathBuf;
use std::time::{Duration, Instant};

/// Schema of `multiply` and `sweep-threads` rows.
pub const MULTIPLY_HEADER: &[&str] = &[
    "run_id",
    "algorithm",
    "threads",
    "m",
    "n",
    "nnz_A",
    "nnz_x",
    "nnz_y",
    "rep",
    "t_total_us",
    "t_pre_us",
    "t_bucket_us",
    "t_merge_us",
    "t_concat_us",
    "cols_touched",
    "entries_scanned",
    "x_accesses",
    "spa_inits",
];

/// Schema of `bfs` rows.
pub const BFS_HEADER: &[&str] = &[
    "run_id",
    "algorithm",
    "threads",
    "m",
    "n",
    "nnz_A",
    "source",
    "iterations",
    "reached",
    "t_spmspv_us",
];

#[derive(Parser, Debug)]
#[command(
    name = "spmspv-bench",
    about = "Sparse matrix x sparse vector multiplication benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Multiply one matrix by vectors of different sparsities.
    Multiply(MultiplyArgs),
    /// Run BFS with each kernel and compare their multiply time.
    Bfs(BfsArgs),
    /// Fixed instance, varying thread count, with per-step times.
    SweepThreads(SweepArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Matrix Market file (coordinate format).
    #[arg(long, conflicts_with = "gen")]
    pub matrix: Option<PathBuf>,
    /// Synthetic matrix, e.g. er:m=1000,n=1000,d=4,seed=7
    #[arg(long)]
    pub gen: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum YesNo {
    Yes,
    No,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorSource {
    /// Uniform random indices from the seed.
    Gen,
    /// Successive BFS frontiers of the same matrix (realistic sparsity).
    Frontier,
}

#[derive(Args, Debug)]
pub struct MultiplyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// bucket, rowsplit-spa, rowsplit-heap, sort, matrixdriven or all.
    #[arg(long, default_value = "bucket")]
    pub alg: String,
    /// Comma-separated thread counts, e.g. 1,2,4.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub threads: Vec<usize>,
    /// Comma-separated input-vector nonzero counts.
    #[arg(long, value_delimiter = ',', default_value = "16")]
    pub nnzx: Vec<usize>,
    /// Timed repetitions per configuration (one extra warm-up run is
    /// discarded).
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Keep vectors sorted by index.
    #[arg(long, value_enum, default_value = "yes")]
    pub sorted: YesNo,
    #[arg(long, default_value_t = 4)]
    pub buckets_per_thread: usize,
    /// Where input vectors come from.
    #[arg(long, value_enum, default_value = "gen")]
    pub vectors: VectorSource,
    /// BFS source vertex for --vectors frontier.
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    /// Append CSV rows here; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BfsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "all")]
    pub alg: String,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub threads: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    #[arg(long, default_value_t = 4)]
    pub buckets_per_thread: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "bucket")]
    pub alg: String,
    /// Thread counts to sweep, e.g. 1,2,4,8.
    #[arg(long, value_delimiter = ',')]
    pub threads: Vec<usize>,
    /// Single input-vector nonzero count for the fixed instance.
    #[arg(long, value_delimiter = ',')]
    pub nnzx: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "yes")]
    pub sorted: YesNo,
    #[arg(long, default_value_t = 4)]
    pub buckets_per_thread: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse `er:m=..,n=..,d=..,seed=..` into a generator config.
pub fn parse_gen_spec(spec: &str) -> Result<ErConfig> {
    let body = spec.strip_prefix("er:").ok_or_else(|| {
        Error::InvalidConfig(format!(
            "generator spec must look like er:m=1000,n=1000,d=4,seed=7, got '{spec}'"
        ))
    })?;
    let mut cfg = ErConfig {
        nrows: 0,
        ncols: 0,
        avg_nnz_per_col: 0.0,
        seed: 0,
    };
    let (mut saw_m, mut saw_n) = (false, false);
    for part in body.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("generator spec item '{part}' is not key=value"))
        })?;
        let bad = |what: &str| Error::InvalidConfig(format!("cannot parse {what} from '{value}'"));
        match key {
            "m" => {
                cfg.nrows = value.parse().map_err(|_| bad("m"))?;
                saw_m = true;
            }
            "n" => {
                cfg.ncols = value.parse().map_err(|_| bad("n"))?;
                saw_n = true;
            }
            "d" => cfg.avg_nnz_per_col = value.parse().map_err(|_| bad("d"))?,
            "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown generator key '{other}'"
                )))
            }
        }
    }
    if !saw_m || !saw_n {
        return Err(Error::InvalidConfig(
            "generator spec needs at least m= and n=".into(),
        ));
    }
    Ok(cfg)
}

fn load_matrix(input: &InputArgs) -> Result<CscMatrix<f64>> {
    match (&input.matrix, &input.gen) {
        (Some(path), None) => spmspv::io::read_mtx(path),
        (None, Some(spec)) => gen_er_matrix(&parse_gen_spec(spec)?),
        _ => Err(Error::InvalidConfig(
            "exactly one of --matrix and --gen is required".into(),
        )),
    }
}

fn parse_algorithms(s: &str) -> Result<Vec<Algorithm>> {
    if s == "all" {
        Ok(Algorithm::ALL.to_vec())
    } else {
        s.split(',').map(|p| p.parse()).collect()
    }
}

fn check_thread_list(threads: &[usize]) -> Result<()> {
    if threads.is_empty() {
        return Err(Error::InvalidConfig("--threads must not be empty".into()));
    }
    for (k, &t) in threads.iter().enumerate() {
        if t == 0 {
            return Err(Error::InvalidConfig("thread counts must be positive".into()));
        }
        if threads[..k].contains(&t) {
            return Err(Error::InvalidConfig(format!(
                "duplicate thread count {t} in --threads"
            )));
        }
    }
    Ok(())
}

/// Stable per-vector seed derivation (splitmix64 step).
fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

struct RowSink {
    out: Option<PathBuf>,
    header: &'static [&'static str],
    printed_header: bool,
}

impl RowSink {
    fn new(out: Option<PathBuf>, header: &'static [&'static str]) -> Self {
        RowSink {
            out,
            header,
            printed_header: false,
        }
    }

    fn emit(&mut self, fields: Vec<String>) -> Result<()> {
        match &self.out {
            Some(path) => append_csv_row(path, self.header, &fields),
            None => {
                if !self.printed_header {
                    let head: Vec<String> = self.header.iter().map(|s| s.to_string()).collect();
                    println!("{}", format_csv_row(&head));
                    self.printed_header = true;
                }
                println!("{}", format_csv_row(&fields));
                Ok(())
            }
        }
    }
}

fn median_us(mut xs: Vec<u128>) -> u128 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

fn dur_us(d: Duration) -> u128 {
    d.as_micros()
}

struct MeasuredRep {
    total: Duration,
    steps: Option<StepTimes>,
    counters: WorkCounters,
    nnz_y: usize,
}

fn measure_reps(
    runner: &mut KernelRunner<'_, PlusTimes<f64>>,
    x: &SparseVec<f64>,
    reps: usize,
) -> Result<Vec<MeasuredRep>> {
    let sr = PlusTimes::<f64>::new();
    let mut counters = WorkCounters::new();
    runner.run(x, &sr, &mut counters)?; // warm-up, excluded
    let mut out = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let y = runner.run(x, &sr, &mut counters)?;
        let total = start.elapsed();
        out.push(MeasuredRep {
            total,
            steps: runner.step_times(),
            counters,
            nnz_y: y.nnz(),
        });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn emit_multiply_rows(
    sink: &mut RowSink,
    run_id: usize,
    alg: Algorithm,
    nt: usize,
    a: &CscMatrix<f64>,
    nnz_x: usize,
    reps: &[MeasuredRep],
) -> Result<()> {
    for (rep, r) in reps.iter().enumerate() {
        let steps = r.steps.unwrap_or_default();
        let zero = StepTimes::default();
        let steps = if alg == Algorithm::Bucket { steps } else { zero };
        sink.emit(vec![
            run_id.to_string(),
            alg.to_string(),
            nt.to_string(),
            a.nrows().to_string(),
            a.ncols().to_string(),
            a.nnz().to_string(),
            nnz_x.to_string(),
            r.nnz_y.to_string(),
            rep.to_string(),
            dur_us(r.total).to_string(),
            dur_us(steps.pre).to_string(),
            dur_us(steps.bucket).to_string(),
            dur_us(steps.merge).to_string(),
            dur_us(steps.concat).to_string(),
            r.counters.columns_touched.to_string(),
            r.counters.matrix_entries_scanned.to_string(),
            r.counters.input_vector_accesses.to_string(),
            r.counters.spa_slots_initialized.to_string(),
        ])?;
    }
    eprintln!(
        "{alg} threads={nt} nnz_x={nnz_x}: median {} us over {} reps",
        median_us(reps.iter().map(|r| dur_us(r.total)).collect()),
        reps.len()
    );
    Ok(())
}

/// Build the input vectors for a sweep: either seeded uniform draws of the
/// requested sparsities or the BFS frontier sequence of the matrix itself.
fn sweep_vectors(
    a: &CscMatrix<f64>,
    source: VectorSource,
    nnzx: &[usize],
    seed: u64,
    sorted: YesNo,
    bfs_source: usize,
) -> Result<Vec<SparseVec<f64>>> {
    let mut vectors = Vec::new();
    match source {
        VectorSource::Gen => {
            for &k in nnzx {
                vectors.push(gen_sparse_vec(a.ncols(), k, derive_seed(seed, k as u64))?);
            }
        }
        VectorSource::Frontier => {
            for (step, frontier) in frontier_sequence(a, bfs_source)?.into_iter().enumerate() {
                vectors.push(spmspv::with_uniform_values(
                    a.ncols(),
                    frontier.iter().map(|(i, _)| i),
                    derive_seed(seed, step as u64),
                )?);
            }
        }
    }
    if sorted == YesNo::No {
        vectors = vectors.into_iter().map(|v| v.convert(Mode::Unsorted)).collect();
    }
    Ok(vectors)
}

pub fn cmd_multiply(args: &MultiplyArgs) -> Result<()> {
    check_thread_list(&args.threads)?;
    let algorithms = parse_algorithms(&args.alg)?;
    let a = load_matrix(&args.input)?;
    let vectors = sweep_vectors(
        &a,
        args.vectors,
        &args.nnzx,
        args.seed,
        args.sorted,
        args.source,
    )?;

    let mut sink = RowSink::new(args.out.clone(), MULTIPLY_HEADER);
    let mut run_id = 0usize;
    for &alg in &algorithms {
        for &nt in &args.threads {
            let mut runner = KernelRunner::prepare(alg, &a, nt, args.buckets_per_thread)?;
            for x in &vectors {
                let reps = measure_reps(&mut runner, x, args.reps.max(1))?;
                emit_multiply_rows(&mut sink, run_id, alg, nt, &a, x.nnz(), &reps)?;
                run_id += 1;
            }
        }
    }
    Ok(())
}

pub fn cmd_sweep_threads(args: &SweepArgs) -> Result<()> {
    check_thread_list(&args.threads)?;
    if args.nnzx.len() != 1 {
        return Err(Error::InvalidConfig(
            "sweep-threads takes exactly one --nnzx value".into(),
        ));
    }
    let algorithms = parse_algorithms(&args.alg)?;
    let a = load_matrix(&args.input)?;
    let x_all = sweep_vectors(
        &a,
        VectorSource::Gen,
        &args.nnzx,
        args.seed,
        args.sorted,
        0,
    )?;
    let x = &x_all[0];

    let mut sink = RowSink::new(args.out.clone(), MULTIPLY_HEADER);
    let mut run_id = 0usize;
    for &alg in &algorithms {
        for &nt in &args.threads {
            let mut runner = KernelRunner::prepare(alg, &a, nt, args.buckets_per_thread)?;
            let reps = measure_reps(&mut runner, x, args.reps.max(1))?;
            emit_multiply_rows(&mut sink, run_id, alg, nt, &a, x.nnz(), &reps)?;
            run_id += 1;
        }
    }
    Ok(())
}

pub fn cmd_bfs(args: &BfsArgs) -> Result<()> {
    check_thread_list(&args.threads)?;
    let algorithms = parse_algorithms(&args.alg)?;
    let a = load_matrix(&args.input)?;

    let mut sink = RowSink::new(args.out.clone(), BFS_HEADER);
    let mut run_id = 0usize;
    for &nt in &args.threads {
        let mut reference: Option<Vec<u32>> = None;
        for &alg in &algorithms {
            let (result, stats) = bfs_with_stats(&a, args.source, alg, nt)?;
            // Same graph, same source: every kernel must see identical levels.
            match &reference {
                None => reference = Some(result.levels.clone()),
                Some(expect) => {
                    for (v, (&e, &g)) in expect.iter().zip(&result.levels).enumerate() {
                        if e != g {
                            return Err(Error::LevelMismatch {
                                vertex: v,
                                expected: e,
                                got: g,
                            });
                        }
                    }
                }
            }
            sink.emit(vec![
                run_id.to_string(),
                alg.to_string(),
                nt.to_string(),
                a.nrows().to_string(),
                a.ncols().to_string(),
                a.nnz().to_string(),
                args.source.to_string(),
                stats.iterations.to_string(),
                result.reached().to_string(),
                dur_us(stats.spmspv_time).to_string(),
            ])?;
            eprintln!(
                "bfs {alg} threads={nt}: {} iterations, {} reached, {} us in multiplies",
                stats.iterations,
                result.reached(),
                dur_us(stats.spmspv_time)
            );
            run_id += 1;
        }
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Multiply(args) => cmd_multiply(&args),
        Command::Bfs(args) => cmd_bfs(&args),
        Command::SweepThreads(args) => cmd_sweep_threads(&args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_spec_parses() {
        let cfg = parse_gen_spec("er:m=1000,n=500,d=4,seed=7").unwrap();
        assert_eq!(cfg.nrows, 1000);
        assert_eq!(cfg.ncols, 500);
        assert_eq!(cfg.avg_nnz_per_col, 4.0);
        assert_eq!(cfg.seed, 7);
        assert!(parse_gen_spec("er:m=10").is_err());
        assert!(parse_gen_spec("rmat:m=10,n=10").is_err());
        assert!(parse_gen_spec("er:m=10,n=10,q=3").is_err());
    }

    #[test]
    fn duplicate_threads_rejected() {
        assert!(check_thread_list(&[1, 2, 4]).is_ok());
        assert!(check_thread_list(&[1, 2, 2]).is_err());
        assert!(check_thread_list(&[]).is_err());
        assert!(check_thread_list(&[0]).is_err());
    }

    #[test]
    fn algorithm_list_parses() {
        assert_eq!(parse_algorithms("all").unwrap().len(), 5);
        assert_eq!(
            parse_algorithms("bucket,sort").unwrap(),
            vec![Algorithm::Bucket, Algorithm::Sort]
        );
        assert!(parse_algorithms("magic").is_err());
    }

    #[test]
    fn seed_derivation_is_stable_and_spread() {
        assert_eq!(derive_seed(1, 10), derive_seed(1, 10));
        assert_ne!(derive_seed(1, 10), derive_seed(1, 11));
        assert_ne!(derive_seed(1, 10), derive_seed(2, 10));
    }
}
