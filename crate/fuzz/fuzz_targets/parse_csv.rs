#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = spmspv::io::parse_csv(text) {
        // Accepted rows re-format to something the parser agrees on.
        for row in &rows {
            let line = spmspv::io::format_csv_row(row);
            let again = spmspv::io::parse_csv(&format!("{line}\n")).expect("own output parses");
            assert_eq!(&again[0], row);
        }
    }
});
