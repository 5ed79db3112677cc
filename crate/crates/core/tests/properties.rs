mod common;

use std::collections::BTreeSet;
use std::time::Duration;

use common::{acyclic_tbox, all_subsets, chase_entails, concept, name, tbox, WallClock};
use el_abduct_core::bench::{compute_justification, compute_repair, generate, Family};
use el_abduct_core::clock::{Deadline, NoClock};
use el_abduct_core::engine::{saturate, SaturationConfig};
use el_abduct_core::fol::translate;
use el_abduct_core::oracle::{
    check_connection_minimal, enumerate_packed, ground_implicates, naive_saturation, OracleConfig,
    OracleError,
};
use el_abduct_core::pipeline::{run_abduce, PipelineConfig};
use el_abduct_core::preprocess::{normalize, prepare, FreshNames, PrepareOptions};
use el_abduct_core::recombine::{subset_minimal_filter, verify_solution};
use el_abduct_core::tree::preceq_and;
use el_abduct_core::{AbductionProblem, Concept, ConceptInclusion, ConceptName, Hypothesis, TBox};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn problem(t: TBox, lhs: usize, rhs: usize) -> Option<AbductionProblem> {
    AbductionProblem::with_full_signature(t, ConceptInclusion::atomic(name(lhs), name(rhs))).ok()
}

fn quick() -> PipelineConfig {
    PipelineConfig {
        soft_limit: Some(Duration::from_millis(500)),
        hard_limit: None,
        ..Default::default()
    }
}

/// Hypotheses as sets of `(lhs, single rhs name)` pairs.
fn split(hs: &[Hypothesis]) -> BTreeSet<BTreeSet<(BTreeSet<ConceptName>, ConceptName)>> {
    hs.iter()
        .map(|h| {
            h.axioms
                .iter()
                .flat_map(|a| a.rhs.iter().map(|b| (a.lhs.clone(), b.clone())))
                .collect()
        })
        .collect()
}

fn acyclic_problem() -> impl Strategy<Value = AbductionProblem> {
    acyclic_problem_sized(8, 2)
}

fn acyclic_problem_sized(axioms: usize, depth: u32) -> impl Strategy<Value = AbductionProblem> {
    (acyclic_tbox(axioms, 6, depth), 1usize..6, 0usize..5).prop_filter_map(
        "observation entailed or trivial",
        |(t, hi, lo)| {
            if lo < hi {
                problem(t, hi, lo)
            } else {
                None
            }
        },
    )
}

/// A TBox with one of its entailed `A{i} ⊑ A{j}`, `i != j`.
fn entailed_pair() -> impl Strategy<Value = (TBox, ConceptInclusion)> {
    (tbox(8, 5, 1), any::<prop::sample::Index>()).prop_filter_map(
        "nothing entailed",
        |(t, pick)| {
            let pairs: Vec<ConceptInclusion> = (0..5)
                .flat_map(|a| {
                    (0..5)
                        .filter(move |&b| b != a)
                        .map(move |b| ConceptInclusion::atomic(name(a), name(b)))
                })
                .filter(|ci| chase_entails(&t, &ci.lhs, &ci.rhs))
                .collect();
            (!pairs.is_empty()).then(|| (t, pick.get(&pairs).clone()))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalization_is_conservative(t in tbox(6, 5, 2)) {
        let mut fresh = FreshNames::new("__fresh_");
        let n = normalize(&t, &mut fresh).tbox;
        for a in (0..5).map(|i| Concept::atomic(name(i))) {
            for b in (0..5).map(|i| Concept::atomic(name(i))) {
                prop_assert_eq!(chase_entails(&t, &a, &b), chase_entails(&n, &a, &b));
            }
        }
    }

    #[test]
    fn canonical_form_is_stable(c in concept(5, 3)) {
        prop_assert_eq!(c.canonical(), c.canonical().canonical());
        prop_assert!(preceq_and(&c, &c));
        prop_assert!(preceq_and(&Concept::top(), &c) || !c.conjuncts().is_empty());
    }

    #[test]
    fn emitted_hypotheses_are_sound(
        p in (tbox(10, 8, 2), 0usize..8, 0usize..8).prop_filter_map("entailed", |(t, a, b)| problem(t, a, b)),
    ) {
        let clock = WallClock::start();
        let out = run_abduce(&p, &quick(), &clock).unwrap();
        for h in &out.hypotheses {
            prop_assert!(verify_solution(p.background(), h, p.observation()), "{}", h);
            prop_assert!(h.signature().is_subset(p.abducibles()));
            prop_assert!(h.axioms.iter().all(|a| !a.rhs.is_empty() && a.rhs.is_disjoint(&a.lhs)));
        }
        let negatives: Vec<_> = out.implicates.negative.iter().collect();
        for n in &negatives {
            prop_assert!(!negatives.iter().any(|m| m.len() < n.len() && m.is_subset(n)));
        }
        for (t, names) in &out.implicates.positive {
            prop_assert!(t.depth() <= out.depth_bound);
            prop_assert!(names.is_subset(p.abducibles()));
        }
    }

    #[test]
    fn engine_matches_packed_enumeration(p in acyclic_problem()) {
        let cfg = OracleConfig { max_tree_depth: 4, max_nodes: 10, max_term_depth: 4 };
        let out = run_abduce(&p, &PipelineConfig::default(), &NoClock).unwrap();
        prop_assert!(out.complete());
        let packed = enumerate_packed(p.background(), p.observation(), p.abducibles(), cfg);
        if !packed.truncated {
            prop_assert_eq!(split(&subset_minimal_filter(packed.hypotheses)), split(&out.hypotheses));
        }
        for h in &out.hypotheses {
            let verdict = check_connection_minimal(p.background(), p.observation(), h, cfg);
            prop_assert!(matches!(verdict, Ok(true) | Err(OracleError::BoundsExhausted)), "{}", h);
        }
    }

    #[test]
    fn engine_matches_naive_saturation(p in acyclic_problem_sized(5, 1)) {
        let prepared = prepare(&p, &PrepareOptions::default());
        let phi = translate(&prepared);
        let depth = 2;
        let Some(closure) = naive_saturation(&phi, depth) else { return Ok(()) };
        let naive = ground_implicates(&closure, &phi.abducibles);
        let engine = saturate(&phi, &SaturationConfig { depth_bound: depth, record_trace: false }, &NoClock, Deadline::never());
        prop_assert_eq!(&engine.implicates.positive, &naive.positive);
        prop_assert_eq!(&engine.implicates.negative, &naive.negative);
    }

    #[test]
    fn modules_preserve_hypotheses(
        p in (tbox(15, 6, 2), 0usize..6, 0usize..6).prop_filter_map("entailed", |(t, a, b)| problem(t, a, b)),
    ) {
        let clock = WallClock::start();
        let with = run_abduce(&p, &quick(), &clock).unwrap();
        let without = run_abduce(&p, &PipelineConfig { use_modules: false, ..quick() }, &clock).unwrap();
        if with.complete() && without.complete() {
            prop_assert_eq!(split(&with.hypotheses), split(&without.hypotheses));
        }
    }

    #[test]
    fn bench_problems_satisfy_precondition(t in tbox(8, 5, 1), seed in any::<u64>()) {
        for family in Family::ALL {
            if let Ok(bp) = generate(family, &t, seed) {
                let obs = bp.problem.observation();
                prop_assert!(!chase_entails(bp.problem.background(), &obs.lhs, &obs.rhs));
            }
        }
    }

    #[test]
    fn justifications_are_minimal((t, alpha) in entailed_pair()) {
        let j = compute_justification(&t, &alpha).unwrap();
        prop_assert!(chase_entails(&j, &alpha.lhs, &alpha.rhs));
        if j.len() <= 6 {
            for subset in all_subsets(j.axioms()).filter(|s| s.len() < j.len()) {
                let s: TBox = subset.into_iter().collect();
                prop_assert!(!chase_entails(&s, &alpha.lhs, &alpha.rhs));
            }
        }
    }

    #[test]
    fn repairs_are_maximal((t, alpha) in entailed_pair(), seed in any::<u64>()) {
        let r = compute_repair(&t, &alpha, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(!chase_entails(&r, &alpha.lhs, &alpha.rhs));
        for ci in t.iter().filter(|ci| !r.contains(ci)) {
            let mut bigger = r.clone();
            bigger.insert(ci.clone());
            prop_assert!(chase_entails(&bigger, &alpha.lhs, &alpha.rhs), "{} could be kept", ci);
        }
    }
}
