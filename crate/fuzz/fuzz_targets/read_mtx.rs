#![no_main]

use libfuzzer_sys::fuzz_target;

// The Matrix Market reader must reject malformed input with an error, never
// a panic; anything it accepts must satisfy the CSC invariants.
fuzz_target!(|data: &[u8]| {
    if let Ok(matrix) = spmspv::io::read_mtx_from(data) {
        matrix.check_invariants().expect("accepted matrix is valid");
    }
});
