//! Seeded random TBoxes and problems.

#![allow(dead_code)]

use std::ops::Range;
use std::path::PathBuf;

use el_abduct_core::{AbductionProblem, Concept, ConceptInclusion, ConceptName, TBox};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROLES: [&str; 2] = ["r", "s"];

pub fn name(i: usize) -> ConceptName {
    ConceptName::new(&format!("A{i}"))
}

pub fn example(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/examples")
        .join(file)
}

pub struct Gen(pub ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// A concept over `A{i}` for `i` in `names`; `top` allows ⊤ leaves.
    pub fn concept(&mut self, names: Range<usize>, depth: u32, top: bool) -> Concept {
        if depth > 0 && self.0.gen_bool(0.4) {
            if self.0.gen_bool(0.5) {
                let role = *ROLES.choose(&mut self.0).expect("roles");
                return Concept::exists(role, self.concept(names, depth - 1, top));
            }
            let n = self.0.gen_range(2..=3);
            let parts: Vec<_> = (0..n)
                .map(|_| self.concept(names.clone(), depth - 1, top))
                .collect();
            return Concept::and(parts);
        }
        if top && self.0.gen_ratio(1, 10) {
            Concept::top()
        } else {
            Concept::atomic(name(self.0.gen_range(names)))
        }
    }

    pub fn tbox(&mut self, max_axioms: usize, names: usize, depth: u32) -> TBox {
        let n = self.0.gen_range(1..=max_axioms);
        (0..n)
            .map(|_| {
                let lhs = self.concept(0..names, depth, true);
                let rhs = self.concept(0..names, depth, true);
                ConceptInclusion::new(lhs, rhs)
            })
            .collect()
    }

    /// Right-hand names have smaller indices than left-hand names.
    pub fn acyclic_tbox(&mut self, max_axioms: usize, names: usize, depth: u32) -> TBox {
        let n = self.0.gen_range(1..=max_axioms);
        (0..n)
            .map(|_| {
                let split = self.0.gen_range(1..names);
                let lhs = self.concept(split..names, depth, false);
                let rhs = self.concept(0..split, depth, false);
                ConceptInclusion::new(lhs, rhs)
            })
            .collect()
    }

    /// An atomic observation over the first `names` names that `t` does not
    /// already entail, with every name abducible.
    pub fn problem(&mut self, t: TBox, names: usize) -> Option<AbductionProblem> {
        let a = self.0.gen_range(0..names);
        let b = self.0.gen_range(0..names);
        AbductionProblem::with_full_signature(t, ConceptInclusion::atomic(name(a), name(b))).ok()
    }

    /// Draws until a problem is found.
    pub fn problem_with(
        &mut self,
        names: usize,
        mut tbox: impl FnMut(&mut Self) -> TBox,
    ) -> AbductionProblem {
        loop {
            let t = tbox(self);
            if let Some(p) = self.problem(t, names) {
                return p;
            }
        }
    }
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
