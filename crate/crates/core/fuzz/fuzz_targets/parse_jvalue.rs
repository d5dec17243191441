#![no_main]

use jcover::JValue;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = JValue::parse(text) {
        assert!(v.is_exact());
    }
});
