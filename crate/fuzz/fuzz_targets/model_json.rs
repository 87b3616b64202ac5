#![no_main]

use libfuzzer_sys::fuzz_target;
use pertkit::io::{format_state, parse_model, parse_state};
use pertkit::symdiag::MultisetState;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(model) = parse_model(text) {
        let vac = MultisetState::vacuum();
        assert_eq!(parse_state(&format_state(&vac, &model), &model), Ok(vac));
    }
});
