#![no_main]

use jcover::poly::IntPolynomial;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok((d, p)) = IntPolynomial::parse_hclass_text(text) else {
        return;
    };
    assert_eq!(p.to_hclass_text(d), text);
});
