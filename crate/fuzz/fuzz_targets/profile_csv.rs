#![no_main]

use fracdrift::io::{parse_profile_csv, write_profile_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_profile_csv(text) {
        let mut out = Vec::new();
        write_profile_csv(&mut out, &rows, &[]).expect("in-memory write");
        let again = parse_profile_csv(std::str::from_utf8(&out).unwrap()).expect("written profile parses");
        assert_eq!(again, rows);
    }
});
