//! Invariants of the j-function, modular and class polynomials, and Hecke
//! orbits, checked at certified precision.

use jcover::cm::{
    class_number, class_polynomial, class_polynomial_auto, discriminants_up_to, suggested_digits,
};
use jcover::gl2q::{coset_representatives, psi, GroupElement};
use jcover::halfplane::{apply, fixed_point, is_special, HalfPlanePoint};
use jcover::hecke::{j_of_image, j_value, orbit_at_level, related_at_level};
use jcover::jfun::{
    curve_from_j, evaluate_j, j_coefficients, j_invariant, log_tail_bound, truncation_order,
};
use jcover::modpoly::{initial_digits, modular_polynomial, phi};
use jcover::{Ball, JValue, Truth};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A numeric point near the fundamental domain, known to 60 digits.
fn numeric_point() -> impl Strategy<Value = HalfPlanePoint> {
    (-500i64..=500, 900i64..=2000)
        .prop_map(|(x, y)| HalfPlanePoint::numeric(&q(x, 1000), &q(y, 1000), 60).unwrap())
}

fn gamma() -> impl Strategy<Value = GroupElement> {
    prop::collection::vec(-3i64..=3, 1..4).prop_map(|ks| {
        ks.into_iter().fold(GroupElement::identity(), |g, k| {
            g.multiply(&GroupElement::from_i64(1, k, 0, 1).unwrap())
                .multiply(&GroupElement::s())
        })
    })
}

fn quadratic_point() -> impl Strategy<Value = HalfPlanePoint> {
    (1i64..5, -5i64..=5, 1i64..6).prop_filter_map("negative discriminant", |(a, b, c)| {
        let d = b * b - 4 * a * c;
        HalfPlanePoint::exact(a, b, d).ok().filter(|_| d < 0)
    })
}

fn bound(digits: u32) -> BigRational {
    q(1, 1) / BigRational::from_integer(BigInt::from(10).pow(digits))
}

fn close(a: &Ball, b: &Ball, digits: u32) -> bool {
    (a - b).abs_upper() < bound(digits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn j_is_gamma_invariant_on_quadratic_points(tau in quadratic_point(), g in gamma()) {
        let a = evaluate_j(&tau, 30).unwrap();
        let b = evaluate_j(&apply(&g, &tau), 30).unwrap();
        prop_assert!(close(&a, &b, 29));
    }

    #[test]
    fn j_is_gamma_invariant_on_numeric_points(tau in numeric_point(), g in gamma()) {
        let a = evaluate_j(&tau, 30).unwrap();
        let b = evaluate_j(&apply(&g, &tau), 30).unwrap();
        prop_assert!(close(&a, &b, 25));
    }

    #[test]
    fn curve_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..1000) {
        let j = q(n, d);
        prop_assume!(j != q(0, 1) && j != q(1728, 1));
        prop_assert_eq!(j_invariant(&curve_from_j(&j).unwrap()).unwrap(), j);
    }

    #[test]
    fn tail_bound_dominates_series_tail(order in 2usize..200, x in -0.5f64..0.5, y in 0.866f64..3.0) {
        let series = j_coefficients(2 * order);
        let (r, theta) = ((-2.0 * std::f64::consts::PI * y).exp(), 2.0 * std::f64::consts::PI * x);
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for n in order + 1..=2 * order {
            let c = series.coefficient(n as i64).to_f64().unwrap();
            let m = c * r.powi(n as i32);
            re += m * (theta * n as f64).cos();
            im += m * (theta * n as f64).sin();
        }
        let observed = re.hypot(im).ln();
        prop_assert!(observed <= log_tail_bound(order, y) + 1e-9, "{observed} vs bound");
    }

    #[test]
    fn orbit_is_gamma_invariant(tau in numeric_point(), g in gamma(), n in 2u64..=5) {
        let a = orbit_at_level(&tau, n, 25).unwrap();
        let mut b = orbit_at_level(&apply(&g, &tau), n, 25).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for x in &a {
            let k = b.iter().position(|y| close(x, y, 15));
            prop_assert!(k.is_some(), "orbit value without a partner at level {}", n);
            b.swap_remove(k.unwrap());
        }
    }

    #[test]
    fn relation_is_symmetric(tau in numeric_point(), k in 0usize..12, n in 1u64..=6) {
        let reps = coset_representatives(n);
        let g = &reps.representatives()[k % reps.len()];
        let a = j_value(&tau, 40).unwrap();
        let b = JValue::Approx(j_of_image(g, &tau, 40).unwrap());
        let forward = related_at_level(&a, &b, n).unwrap();
        prop_assert_eq!(forward, related_at_level(&b, &a, n).unwrap());
        prop_assert_eq!(forward, Truth::True);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn modular_polynomial_vanishes_on_images(tau in numeric_point(), k in 0usize..1000, n in 2u64..=10) {
        let reps = coset_representatives(n);
        let g = &reps.representatives()[k % reps.len()];
        let a = JValue::Approx(evaluate_j(&tau, 50).unwrap());
        let b = JValue::Approx(j_of_image(g, &tau, 50).unwrap());
        prop_assert_eq!(related_at_level(&a, &b, n).unwrap(), Truth::True);
    }
}

#[test]
fn truncation_order_meets_its_target() {
    for bits in [32u32, 128, 512] {
        for y in [0.866, 1.0, 2.5] {
            let m = truncation_order(bits, y);
            assert!(log_tail_bound(m, y) <= -(bits as f64) * std::f64::consts::LN_2);
            assert!(m == 1 || log_tail_bound(m - 1, y) > -(bits as f64) * std::f64::consts::LN_2);
        }
    }
}

#[test]
fn modular_polynomial_shape() {
    for n in 2..=10u64 {
        let p = phi(n).unwrap();
        let d = psi(n) as u32;
        assert_eq!(p.degree_x(), Some(d), "N={n}");
        assert_eq!(coset_representatives(n).len() as u32, d);
        assert!(p.is_symmetric() && p.is_monic_in_x());
    }
}

#[test]
fn modular_polynomial_is_precision_stable() {
    for n in [2u64, 3, 5] {
        let d = initial_digits(n);
        assert_eq!(
            modular_polynomial(n, d).unwrap(),
            modular_polynomial(n, d + 30).unwrap(),
            "N={n}"
        );
    }
}

#[test]
fn class_degree_is_class_number() {
    for d in discriminants_up_to(200) {
        let h = class_polynomial_auto(d).unwrap();
        assert_eq!(h.degree(), class_number(d).unwrap(), "D={d}");
        assert!(h.polynomial().is_monic());
    }
}

#[test]
fn class_polynomial_is_precision_stable() {
    for d in [-23i64, -47, -71, -151] {
        let digits = suggested_digits(d).unwrap();
        assert_eq!(
            class_polynomial(d, digits).unwrap(),
            class_polynomial(d, digits + 30).unwrap(),
            "D={d}"
        );
    }
}

#[test]
fn elliptic_fixed_points_are_cm_roots() {
    let mut checked = 0;
    for a in -6i64..=6 {
        for b in -6i64..=6 {
            for c in -6i64..=6 {
                for d in -6i64..=6 {
                    let det = a * d - b * c;
                    if !(1..=6).contains(&det) {
                        continue;
                    }
                    let g = GroupElement::from_i64(a, b, c, d).unwrap();
                    if g.is_identity() || !is_special(&g) {
                        continue;
                    }
                    let s = fixed_point(&g)
                        .unwrap()
                        .expect("elliptic element has a fixed point");
                    let disc = s.discriminant().unwrap().to_i64().unwrap();
                    let h = class_polynomial_auto(disc).unwrap();
                    let j = j_value(&s, 60).unwrap();
                    assert_eq!(
                        h.vanishes_at(&j),
                        Truth::True,
                        "{g} fixes a point of discriminant {disc}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn exact_special_values() {
    assert!(
        JValue::Approx(evaluate_j(&HalfPlanePoint::i(), 40).unwrap())
            .certified_equal(&JValue::int(1728))
            .is_true()
    );
    assert!(evaluate_j(&HalfPlanePoint::rho(), 40).unwrap().abs_upper() < bound(39));
}
