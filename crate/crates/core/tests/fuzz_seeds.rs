//! The checked-in fuzz seeds stay meaningful: every seed parses except the
//! ones named as malformed.

use std::fs;
use std::path::PathBuf;

use jcover::gl2q::parse_matrix_json;
use jcover::halfplane::parse_point_json;
use jcover::modelcheck::parse_structure_json;
use jcover::poly::{BivariatePolynomial, IntPolynomial};
use jcover::JValue;

const MALFORMED: &[&str] = &["leading_zero"];

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz")
        .join("corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read_to_string(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn check(target: &str, parses: impl Fn(&str) -> bool) {
    for (name, text) in seeds(target) {
        assert_eq!(
            parses(&text),
            !MALFORMED.contains(&name.as_str()),
            "{target}/{name}"
        );
    }
}

#[test]
fn seeds_parse() {
    check("parse_phi_text", |s| {
        BivariatePolynomial::parse_phi_text(s).is_ok()
    });
    check("parse_hclass_text", |s| {
        IntPolynomial::parse_hclass_text(s).is_ok()
    });
    check("parse_matrix_json", |s| parse_matrix_json(s).is_ok());
    check("parse_point_json", |s| parse_point_json(s).is_ok());
    check("parse_structure_json", |s| parse_structure_json(s).is_ok());
    check("parse_jvalue", |s| JValue::parse(s).is_ok());
}
