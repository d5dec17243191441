//! Algebraic invariants: the rational group, its action on the half-plane,
//! and the finite groups `PSL2(Z/N)` with their torsors.

use std::collections::HashSet;

use jcover::fingal::{
    act_on_subgroups, cyclic_subgroups, group_elements, subgroup_coset_bijection,
    FiniteGroupElement, Flavor, TorsorLabel,
};
use jcover::gl2q::{normalize, same_left_coset, GroupElement};
use jcover::halfplane::{apply, fixed_point, is_special, HalfPlanePoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = GroupElement> {
    (-9i64..=9, -9i64..=9, -9i64..=9, -9i64..=9)
        .prop_filter("positive determinant", |(a, b, c, d)| a * d - b * c > 0)
        .prop_map(|(a, b, c, d)| GroupElement::from_i64(a, b, c, d).unwrap())
}

/// Products of `T^k S` give every element of `Γ`.
fn gamma() -> impl Strategy<Value = GroupElement> {
    prop::collection::vec(-4i64..=4, 1..5).prop_map(|ks| {
        ks.into_iter().fold(GroupElement::identity(), |g, k| {
            g.multiply(&GroupElement::from_i64(1, k, 0, 1).unwrap())
                .multiply(&GroupElement::s())
        })
    })
}

fn quadratic_point() -> impl Strategy<Value = HalfPlanePoint> {
    (1i64..6, -6i64..=6, 1i64..8).prop_filter_map(
        "primitive form with negative discriminant",
        |(a, b, c)| {
            let d = b * b - 4 * a * c;
            HalfPlanePoint::exact(a, b, d).ok().filter(|_| d < 0)
        },
    )
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative(g in matrix(), h in matrix(), k in matrix()) {
        prop_assert_eq!(g.multiply(&h).multiply(&k), g.multiply(&h.multiply(&k)));
    }

    #[test]
    fn scaling_is_invisible(g in matrix(), h in matrix(), num in 1i64..20, den in 1i64..20) {
        let lambda = rational(num, den);
        let scaled = [
            [BigRational::from_integer(g.a().clone()) * &lambda, BigRational::from_integer(g.b().clone()) * &lambda],
            [BigRational::from_integer(g.c().clone()) * &lambda, BigRational::from_integer(g.d().clone()) * &lambda],
        ];
        let g2 = normalize(&scaled).unwrap();
        prop_assert_eq!(g2.multiply(&h), g.multiply(&h));
    }

    #[test]
    fn left_cosets_absorb_gamma(g in matrix(), gam in gamma()) {
        prop_assert!(same_left_coset(&g, &g));
        prop_assert!(same_left_coset(&gam.multiply(&g), &g));
        prop_assert!(same_left_coset(&g, &gam.multiply(&g)));
    }

    #[test]
    fn left_coset_relation_is_transitive(g in matrix(), a in gamma(), b in gamma()) {
        let (x, y) = (a.multiply(&g), b.multiply(&g));
        prop_assert!(same_left_coset(&x, &y));
    }

    #[test]
    fn action_composes(g in matrix(), h in matrix(), tau in quadratic_point()) {
        prop_assert_eq!(apply(&g, &apply(&h, &tau)), apply(&g.multiply(&h), &tau));
    }

    #[test]
    fn fixed_points_are_fixed(g in matrix()) {
        prop_assume!(!g.is_identity());
        if let Some(s) = fixed_point(&g).unwrap() {
            prop_assert!(is_special(&g));
            prop_assert_eq!(apply(&g, &s), s);
        }
    }

    #[test]
    fn fixed_points_move_under_conjugation(g in matrix(), gam in gamma()) {
        prop_assume!(!g.is_identity());
        let conj = gam.multiply(&g).multiply(&gam.inverse());
        let moved = fixed_point(&g).unwrap().map(|s| apply(&gam, &s));
        prop_assert_eq!(fixed_point(&conj).unwrap(), moved);
    }
}

#[test]
fn identity_has_no_unique_fixpoint() {
    assert!(fixed_point(&GroupElement::identity()).is_err());
    assert!(!is_special(&GroupElement::identity()));
}

#[test]
fn subgroup_action_axioms() {
    for n in 2..=4 {
        let elements = group_elements(n, Flavor::Psl);
        let id = FiniteGroupElement::identity(n, Flavor::Psl);
        for c in cyclic_subgroups(n) {
            assert_eq!(act_on_subgroups(&id, &c).unwrap(), c);
            for g in elements.iter() {
                for h in elements.iter() {
                    let gh = g.multiply(h).unwrap();
                    let step = act_on_subgroups(g, &act_on_subgroups(h, &c).unwrap()).unwrap();
                    assert_eq!(act_on_subgroups(&gh, &c).unwrap(), step);
                }
            }
        }
    }
}

#[test]
fn torsor_action_is_free_and_transitive() {
    for n in 2..=4 {
        let elements = group_elements(n, Flavor::Psl);
        for base in elements.iter() {
            let label = TorsorLabel::new(*base).unwrap();
            let orbit: HashSet<TorsorLabel> =
                elements.iter().map(|s| label.act(s).unwrap()).collect();
            assert_eq!(orbit.len(), elements.len(), "free at N={n}");
            for other in elements.iter() {
                let target = TorsorLabel::new(*other).unwrap();
                let sigma = label.difference(&target).unwrap();
                assert_eq!(label.act(&sigma).unwrap(), target, "transitive at N={n}");
            }
        }
    }
}

#[test]
fn bijection_intertwines_gamma() {
    for n in 2..=6 {
        let bij = subgroup_coset_bijection(n).unwrap();
        for gam in [GroupElement::s(), GroupElement::t()] {
            let g_bar = FiniteGroupElement::from_gamma(&gam, n, Flavor::Psl).unwrap();
            let inverse = g_bar.inverse();
            for i in 0..bij.len() {
                // h·γ lies in the coset whose subgroup is γ⁻¹·C_i
                let hg = bij.representative(i).multiply(&gam);
                let j = (0..bij.len())
                    .find(|&j| same_left_coset(&hg, bij.representative(j)))
                    .unwrap();
                assert_eq!(
                    *bij.subgroup(j),
                    act_on_subgroups(&inverse, bij.subgroup(i)).unwrap()
                );
            }
        }
    }
}
