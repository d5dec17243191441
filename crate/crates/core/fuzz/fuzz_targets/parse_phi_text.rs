#![no_main]

use jcover::poly::BivariatePolynomial;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok((n, p)) = BivariatePolynomial::parse_phi_text(text) else {
        return;
    };
    // accepted input is already canonical
    assert_eq!(p.to_phi_text(n), text);
});
