#![no_main]

use jcover::gl2q::parse_matrix_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(g) = parse_matrix_json(text) else {
        return;
    };
    let again = parse_matrix_json(&serde_json::to_string(&g).unwrap()).expect("roundtrip");
    assert_eq!(g, again);
});
