#![no_main]

use libfuzzer_sys::fuzz_target;
use std::io::Write;

fuzz_target!(|data: &[u8]| {
    if let Ok(v) = spmspv::io::read_vec_from(data) {
        // Whatever parses must round-trip.
        let mut buf = Vec::new();
        spmspv::io::write_vec_to(&mut buf, &v).expect("write to memory");
        buf.flush().unwrap();
        let back = spmspv::io::read_vec_from(&buf[..]).expect("own output parses");
        assert_eq!(back.to_map(), v.to_map());
    }
});
