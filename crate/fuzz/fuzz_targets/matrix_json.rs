#![no_main]

use libfuzzer_sys::fuzz_target;
use pertkit::io::{matrix_to_json, parse_matrix};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix(text) {
        let back = parse_matrix(&matrix_to_json(&m)).expect("written matrices parse");
        assert_eq!(back, m);
    }
});
