//! Finite-level structures: type invariance, truncation, the SF condition
//! and extension of partial isomorphisms.

use jcover::fingal::{group_elements, FiniteGroupElement, Flavor, TorsorLabel};
use jcover::gl2q::GroupElement;
use jcover::halfplane::HalfPlanePoint;
use jcover::modelcheck::{
    extend_partial_iso, finite_type, sample_point, satisfies_sf, sf_identify, sf_violations,
    FiniteLevelStructure,
};
use proptest::prelude::*;

fn gamma() -> impl Strategy<Value = GroupElement> {
    prop::collection::vec(-3i64..=3, 1..4).prop_map(|ks| {
        ks.into_iter().fold(GroupElement::identity(), |g, k| {
            g.multiply(&GroupElement::from_i64(1, k, 0, 1).unwrap())
                .multiply(&GroupElement::s())
        })
    })
}

/// Three points: two generic ones and `2i`, with labels chosen by index.
fn structure(n: u64, k: usize, labels: [usize; 3]) -> FiniteLevelStructure {
    let elements = group_elements(n, Flavor::Psl);
    let pick = |i: usize| TorsorLabel::new(elements[i % elements.len()]).unwrap();
    let mut s = FiniteLevelStructure::new(n).unwrap();
    s.add_point(&sample_point(k, 40).unwrap(), pick(labels[0]))
        .unwrap();
    s.add_point(&HalfPlanePoint::exact(1, 0, -16).unwrap(), pick(labels[1]))
        .unwrap();
    s.add_point(&sample_point(k + 7, 40).unwrap(), pick(labels[2]))
        .unwrap();
    s
}

fn element(n: u64, i: usize) -> FiniteGroupElement {
    let elements = group_elements(n, Flavor::Psl);
    elements[i % elements.len()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn type_is_twist_invariant(n in 2u64..=4, k in 0usize..20, labels in any::<[usize; 3]>(), t in any::<usize>()) {
        let s = structure(n, k, labels);
        let twisted = s.twisted(&element(n, t)).unwrap();
        prop_assert_eq!(finite_type(&s, &[0, 1, 2], n).unwrap(), finite_type(&twisted, &[0, 1, 2], n).unwrap());
    }

    #[test]
    fn type_and_coordinates_are_deck_invariant(n in 2u64..=3, k in 0usize..20, labels in any::<[usize; 3]>(), g in gamma()) {
        let s = structure(n, k, labels);
        let moved = s.translated(&g).unwrap();
        prop_assert_eq!(finite_type(&s, &[0, 1, 2], n).unwrap(), finite_type(&moved, &[0, 1, 2], n).unwrap());
        for p in 0..3 {
            let (a, b) = (s.coordinates(p, n).unwrap(), moved.coordinates(p, n).unwrap());
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!(x.certified_equal(y).is_true());
            }
        }
    }

    #[test]
    fn truncation_factors_through_the_type(k in 0usize..20, labels in any::<[usize; 3]>()) {
        let s = structure(4, k, labels);
        let ty = finite_type(&s, &[0, 1, 2], 4).unwrap();
        for m in [1u64, 2] {
            let direct = finite_type(&s.truncate(m).unwrap(), &[0, 1, 2], m).unwrap();
            prop_assert_eq!(ty.truncate(m).unwrap(), direct);
        }
    }

    #[test]
    fn global_twists_extend(n in 2u64..=3, k in 0usize..20, labels in any::<[usize; 3]>(), t in any::<usize>()) {
        let s = structure(n, k, labels);
        let target = s.twisted(&element(n, t)).unwrap();
        let e = extend_partial_iso(&s, &target, &[(0, 0), (1, 1)], 2).unwrap();
        prop_assert!(e.is_some());
        let e = e.unwrap();
        prop_assert!(e.image < e.target.len());
    }

    #[test]
    fn sf_matches_violations(n in 2u64..=4, k in 0usize..20, labels in any::<[usize; 3]>()) {
        let s = structure(n, k, labels);
        prop_assert_eq!(satisfies_sf(&s).unwrap(), sf_violations(&s).unwrap().is_empty());
        prop_assert!(satisfies_sf(&s).unwrap());
    }

    #[test]
    fn identification_merges_only_equal_labels(n in 2u64..=4, k in 0usize..20, a in any::<usize>(), b in any::<usize>()) {
        prop_assume!(element(n, a) != element(n, b));
        let tau = sample_point(k, 40).unwrap();
        let (la, lb) = (TorsorLabel::new(element(n, a)).unwrap(), TorsorLabel::new(element(n, b)).unwrap());
        let mut s = FiniteLevelStructure::new(n).unwrap();
        s.add_point(&tau, la).unwrap();
        s.add_point(&tau, lb).unwrap();
        s.add_point(&tau, la).unwrap();
        prop_assert_eq!(sf_violations(&s).unwrap(), vec![(0, 1), (1, 2)]);
        let merged = sf_identify(&s).unwrap();
        prop_assert_eq!(merged.len(), 2);
        prop_assert!(!satisfies_sf(&merged).unwrap());
    }

    #[test]
    fn json_round_trip_keeps_the_type(n in 2u64..=3, k in 0usize..20, labels in any::<[usize; 3]>()) {
        let s = structure(n, k, labels);
        let back = FiniteLevelStructure::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.len(), s.len());
        prop_assert_eq!(finite_type(&s, &[0, 1, 2], n).unwrap(), finite_type(&back, &[0, 1, 2], n).unwrap());
    }
}

#[test]
fn gamma_translate_with_matching_label_is_the_same_point() {
    let tau = sample_point(5, 40).unwrap();
    let g = GroupElement::from_i64(2, 1, 1, 1).unwrap();
    let mut s = FiniteLevelStructure::new(3).unwrap();
    s.add_standard_point(&tau).unwrap();
    let moved = s.translated(&g).unwrap();
    assert!(sf_violations(&moved).unwrap().is_empty());
    assert_eq!(moved.points()[0].label(), s.points()[0].label());
}
