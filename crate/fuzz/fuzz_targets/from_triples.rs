#![no_main]

use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;
use spmspv::{CscMatrix, PlusTimes};

#[derive(Arbitrary, Debug)]
struct Input {
    nrows: u8,
    ncols: u8,
    triples: Vec<(u8, u8, i16)>,
}

// Constructor fuzz: arbitrary triples either error cleanly or produce a
// matrix satisfying every structural invariant.
fuzz_target!(|input: Input| {
    let (m, n) = (input.nrows as usize, input.ncols as usize);
    let triples: Vec<(usize, usize, i64)> = input
        .triples
        .iter()
        .map(|&(r, c, v)| (r as usize, c as usize, v as i64))
        .collect();

    if let Ok(a) = CscMatrix::from_triples(m, n, &triples) {
        a.check_invariants().expect("accepted matrix is valid");
        assert!(a.nzc() <= a.ncols().min(a.nnz()));
    }
    if let Ok(a) = CscMatrix::from_triples_dedup(m, n, &triples, &PlusTimes::<i64>::new()) {
        a.check_invariants().expect("accepted matrix is valid");
        assert!(a.nnz() <= triples.len());
    }
});
