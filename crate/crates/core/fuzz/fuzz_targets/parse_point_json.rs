#![no_main]

use jcover::halfplane::parse_point_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(tau) = parse_point_json(text) else {
        return;
    };
    let again = parse_point_json(&serde_json::to_string(&tau).unwrap()).expect("roundtrip");
    if tau.is_exact() {
        assert_eq!(tau, again);
    }
});
