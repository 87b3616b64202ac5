#![no_main]

use libfuzzer_sys::fuzz_target;
use pertkit::io::parse_schedule;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_schedule(text, None) {
        assert_eq!(s.a.shape(), s.b.shape());
    }
});
