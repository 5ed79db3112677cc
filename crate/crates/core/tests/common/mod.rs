//! Test-only helpers: random TBoxes and a wall clock.

#![allow(dead_code)]

use std::time::{Duration, Instant};

use el_abduct_core::clock::Clock;
pub use el_abduct_core::oracle::chase_entails;
use el_abduct_core::{Concept, ConceptInclusion, ConceptName, TBox};
use proptest::prelude::*;

pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        Self(Instant::now())
    }
}

impl Clock for WallClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

pub fn name(i: usize) -> ConceptName {
    ConceptName::new(&format!("A{i}"))
}

const ROLES: [&str; 2] = ["r", "s"];

/// Concepts over `A0..A{names-1}` and two roles with role depth at most `depth`.
pub fn concept(names: usize, depth: u32) -> BoxedStrategy<Concept> {
    let atom = (0..names).prop_map(|i| Concept::atomic(name(i)));
    let leaf = prop_oneof![9 => atom, 1 => Just(Concept::top())];
    leaf.prop_recursive(depth, 8, 3, move |inner| {
        prop_oneof![
            (prop::sample::select(&ROLES[..]), inner.clone())
                .prop_map(|(r, c)| Concept::exists(r, c)),
            prop::collection::vec(inner, 2..=3).prop_map(Concept::and),
        ]
    })
    .boxed()
}

/// Concepts whose atoms all come from `range`.
fn concept_in(range: std::ops::Range<usize>, depth: u32) -> BoxedStrategy<Concept> {
    let atom = range.prop_map(|i| Concept::atomic(name(i)));
    atom.prop_recursive(depth, 6, 2, |inner| {
        prop_oneof![
            (prop::sample::select(&ROLES[..]), inner.clone())
                .prop_map(|(r, c)| Concept::exists(r, c)),
            prop::collection::vec(inner, 2..=2).prop_map(Concept::and),
        ]
    })
    .boxed()
}

pub fn tbox(max_axioms: usize, names: usize, depth: u32) -> BoxedStrategy<TBox> {
    prop::collection::vec(
        (concept(names, depth), concept(names, depth)),
        1..=max_axioms,
    )
    .prop_map(|axioms| {
        axioms
            .into_iter()
            .map(|(l, r)| ConceptInclusion::new(l, r))
            .collect()
    })
    .boxed()
}

/// TBoxes where every name on a right-hand side has a smaller index than
/// every name on the left, so no name depends on itself.
pub fn acyclic_tbox(max_axioms: usize, names: usize, depth: u32) -> BoxedStrategy<TBox> {
    let axiom = (1..names).prop_flat_map(move |split| {
        (concept_in(split..names, depth), concept_in(0..split, depth))
            .prop_map(|(l, r)| ConceptInclusion::new(l, r))
    });
    prop::collection::vec(axiom, 1..=max_axioms)
        .prop_map(|axioms| axioms.into_iter().collect())
        .boxed()
}

pub fn all_subsets<T: Clone>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    (0u32..1 << items.len()).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, x)| x.clone())
            .collect()
    })
}
