mod common;

use common::{chase_entails, concept, name, tbox};
use el_abduct_core::reasoner::Reasoner;
use el_abduct_core::Concept;
use proptest::prelude::*;

const NAMES: usize = 5;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_matches_chase(t in tbox(6, NAMES, 2)) {
        let table = Reasoner::new(&t).table();
        for a in (0..NAMES).map(name) {
            for b in (0..NAMES).map(name) {
                let expected = chase_entails(&t, &Concept::atomic(a.clone()), &Concept::atomic(b.clone()));
                if t.signature().concepts.contains(&a) {
                    prop_assert_eq!(table.subsumes(&a, &b), expected, "{} SubClassOf {}", a, b);
                }
            }
        }
    }

    #[test]
    fn complex_queries_match_chase(t in tbox(6, NAMES, 2), lhs in concept(NAMES, 2), rhs in concept(NAMES, 2)) {
        let r = Reasoner::new(&t);
        prop_assert_eq!(r.entails(&lhs, &rhs), chase_entails(&t, &lhs, &rhs));
    }

    #[test]
    fn entailment_is_reflexive_and_monotone(t in tbox(6, NAMES, 2), c in concept(NAMES, 2), extra in concept(NAMES, 1)) {
        let r = Reasoner::new(&t);
        prop_assert!(r.entails(&c, &c));
        prop_assert!(r.entails(&Concept::and([c.clone(), extra]), &c));
        prop_assert!(r.entails(&c, &Concept::top()));
    }
}
