#![no_main]

use libfuzzer_sys::fuzz_target;
use pertkit::io::{format_state, parse_model, parse_state};

const MODEL: &str = r#"{"dim":2,"grid_bound":3,
  "species":[{"name":"a","mass":1.0},{"name":"b","mass":0.5}],
  "vertices":[{"legs":["a","a","b"]}]}"#;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let model = parse_model(MODEL).expect("fixed model");
    if let Ok(state) = parse_state(text, &model) {
        let again = parse_state(&format_state(&state, &model), &model).expect("formatted states parse");
        assert_eq!(again, state);
    }
});
