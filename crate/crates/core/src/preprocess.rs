//! Normal form, ⊤-elimination, observation wrapping, locality modules and
//! the assembled [`PreparedProblem`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::concept::{Concept, ConceptInclusion, ConceptName, Signature, TBox};
use crate::reasoner::Reasoner;

/// Default prefix for names introduced by normalization and wrapping.
pub const DEFAULT_FRESH_PREFIX: &str = "__fresh_";
/// Name that stands in for ⊤ after ⊤-elimination.
pub const TOP_NAME: &str = "__top";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PreprocessError {
    #[error("the background TBox already entails the observation {0}")]
    AlreadyEntailed(String),
}

/// Generator of concept names `{prefix}{n}` that avoids a set of taken names.
#[derive(Debug, Clone)]
pub struct FreshNames {
    prefix: String,
    next: usize,
    taken: BTreeSet<ConceptName>,
}

impl FreshNames {
    pub fn new(prefix: &str) -> Self {
        Self {
            prefix: prefix.to_string(),
            next: 1,
            taken: BTreeSet::new(),
        }
    }

    /// Marks names that must never be produced.
    pub fn avoid<'a>(&mut self, names: impl IntoIterator<Item = &'a ConceptName>) {
        self.taken.extend(names.into_iter().cloned());
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn next_name(&mut self) -> ConceptName {
        loop {
            let name = ConceptName::new(&format!("{}{}", self.prefix, self.next));
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Whether `ci` has one of the four normal-form shapes
/// `A ⊑ B`, `A1 ⊓ A2 ⊑ B`, `∃r.A ⊑ B`, `A ⊑ ∃r.B` over names and ⊤.
pub fn is_normal(ci: &ConceptInclusion) -> bool {
    let simple = |c: &Concept| matches!(c, Concept::Top | Concept::Atomic(_));
    let lhs_ok = match &ci.lhs {
        Concept::Top | Concept::Atomic(_) => true,
        Concept::Conjunction(parts) => {
            parts.as_slice().len() == 2 && parts.as_slice().iter().all(simple)
        }
        Concept::Existential(_, filler) => simple(filler) && simple(&ci.rhs),
    };
    let rhs_ok = match &ci.rhs {
        Concept::Top | Concept::Atomic(_) => true,
        Concept::Existential(_, filler) => simple(filler) && simple(&ci.lhs),
        Concept::Conjunction(_) => false,
    };
    lhs_ok && rhs_ok
}

/// Result of [`normalize`].
#[derive(Debug, Clone, Default)]
pub struct Normalized {
    pub tbox: TBox,
    /// Fresh name to the concept it abbreviates.
    pub name_map: BTreeMap<ConceptName, Concept>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Side {
    /// `C ⊑ N`: the name is implied by the concept.
    Lhs,
    /// `N ⊑ C`: the name implies the concept.
    Rhs,
}

struct Normalizer<'a> {
    fresh: &'a mut FreshNames,
    out: TBox,
    cache: BTreeMap<(Side, Concept), ConceptName>,
    name_map: BTreeMap<ConceptName, Concept>,
}

impl Normalizer<'_> {
    fn lhs_name(&mut self, c: &Concept) -> Concept {
        match c {
            Concept::Top | Concept::Atomic(_) => c.clone(),
            _ => {
                if let Some(n) = self.cache.get(&(Side::Lhs, c.clone())) {
                    return Concept::Atomic(n.clone());
                }
                let n = self.fresh.next_name();
                self.cache.insert((Side::Lhs, c.clone()), n.clone());
                self.name_map.insert(n.clone(), c.clone());
                self.axiom(c, &Concept::Atomic(n.clone()));
                Concept::Atomic(n)
            }
        }
    }

    fn rhs_name(&mut self, c: &Concept) -> Concept {
        match c {
            Concept::Top | Concept::Atomic(_) => c.clone(),
            _ => {
                if let Some(n) = self.cache.get(&(Side::Rhs, c.clone())) {
                    return Concept::Atomic(n.clone());
                }
                let n = self.fresh.next_name();
                self.cache.insert((Side::Rhs, c.clone()), n.clone());
                self.name_map.insert(n.clone(), c.clone());
                self.axiom(&Concept::Atomic(n.clone()), c);
                Concept::Atomic(n)
            }
        }
    }

    fn emit(&mut self, lhs: Concept, rhs: Concept) {
        self.out.insert(ConceptInclusion { lhs, rhs });
    }

    fn axiom(&mut self, lhs: &Concept, rhs: &Concept) {
        let ci = ConceptInclusion {
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        };
        if is_normal(&ci) {
            self.out.insert(ci);
            return;
        }
        if rhs.is_top() {
            let l = self.simple_lhs(lhs);
            self.emit(l, Concept::Top);
            return;
        }
        for part in rhs.conjuncts() {
            match part {
                Concept::Existential(role, filler) => {
                    let filler = self.rhs_name(filler);
                    let l = match lhs {
                        Concept::Top | Concept::Atomic(_) => lhs.clone(),
                        _ => self.lhs_name(lhs),
                    };
                    self.emit(l, Concept::Existential(role.clone(), filler.into()));
                }
                atom => {
                    let l = self.simple_lhs(lhs);
                    self.emit(l, atom.clone());
                }
            }
        }
    }

    /// Rewrites a left-hand side into one of the three normal lhs shapes.
    fn simple_lhs(&mut self, lhs: &Concept) -> Concept {
        match lhs {
            Concept::Top | Concept::Atomic(_) => lhs.clone(),
            Concept::Existential(role, filler) => {
                Concept::Existential(role.clone(), self.lhs_name(filler).into())
            }
            Concept::Conjunction(parts) => {
                let names: Vec<Concept> =
                    parts.as_slice().iter().map(|p| self.lhs_name(p)).collect();
                let mut acc = names[0].clone();
                for (i, next) in names.iter().enumerate().skip(1) {
                    let pair = Concept::and([acc.clone(), next.clone()]);
                    if i + 1 == names.len() {
                        return pair;
                    }
                    let prefix = Concept::and(names[..=i].iter().cloned());
                    acc = match self.cache.get(&(Side::Lhs, prefix.clone())) {
                        Some(n) => Concept::Atomic(n.clone()),
                        None => {
                            let n = self.fresh.next_name();
                            self.cache.insert((Side::Lhs, prefix.clone()), n.clone());
                            self.name_map.insert(n.clone(), prefix);
                            self.emit(pair, Concept::Atomic(n.clone()));
                            Concept::Atomic(n)
                        }
                    };
                }
                acc
            }
        }
    }
}

/// Rewrites `tbox` into normal form, drawing new names from `fresh`.
///
/// The result is a conservative extension: entailments over the input
/// names are unchanged, also in the presence of any further TBox over them.
pub fn normalize(tbox: &TBox, fresh: &mut FreshNames) -> Normalized {
    fresh.avoid(&tbox.signature().concepts);
    let mut n = Normalizer {
        fresh,
        out: TBox::new(),
        cache: BTreeMap::new(),
        name_map: BTreeMap::new(),
    };
    for ci in tbox {
        n.axiom(&ci.lhs, &ci.rhs);
    }
    Normalized {
        tbox: n.out,
        name_map: n.name_map,
    }
}

fn replace_top(c: &Concept, top: &ConceptName) -> Concept {
    match c {
        Concept::Top => Concept::Atomic(top.clone()),
        Concept::Atomic(_) => c.clone(),
        Concept::Conjunction(parts) => {
            Concept::and(parts.as_slice().iter().map(|p| replace_top(p, top)))
        }
        Concept::Existential(r, f) => Concept::exists(r.clone(), replace_top(f, top)),
    }
}

/// Replaces ⊤ by the name `top` and axiomatizes it as the greatest concept
/// over the names of `tbox` and `extra_names`. Returns the input unchanged
/// (and `None`) when ⊤ does not occur.
pub fn eliminate_top(
    tbox: &TBox,
    extra_names: &BTreeSet<ConceptName>,
    top: &ConceptName,
) -> (TBox, Option<ConceptName>) {
    if !tbox.contains_top() {
        return (tbox.clone(), None);
    }
    let mut out: TBox = tbox
        .iter()
        .map(|ci| ConceptInclusion {
            lhs: replace_top(&ci.lhs, top),
            rhs: replace_top(&ci.rhs, top),
        })
        .collect();
    let sig = tbox.signature();
    let top_c = Concept::Atomic(top.clone());
    for role in &sig.roles {
        out.insert(ConceptInclusion {
            lhs: Concept::Existential(role.clone(), top_c.clone().into()),
            rhs: top_c.clone(),
        });
    }
    for name in sig.concepts.iter().chain(extra_names).filter(|n| *n != top) {
        out.insert(ConceptInclusion {
            lhs: Concept::Atomic(name.clone()),
            rhs: top_c.clone(),
        });
    }
    (out, Some(top.clone()))
}

/// Atomic stand-ins for the two sides of an observation.
#[derive(Debug, Clone)]
pub struct WrappedObservation {
    pub lhs_name: ConceptName,
    pub rhs_name: ConceptName,
    pub extra_axioms: TBox,
}

/// Gives complex observation sides fresh names `F ⊑ C1` and `C2 ⊑ F'`.
pub fn wrap_observation(obs: &ConceptInclusion, fresh: &mut FreshNames) -> WrappedObservation {
    let mut extra_axioms = TBox::new();
    let mut side = |c: &Concept, is_lhs: bool| match c {
        Concept::Atomic(n) => n.clone(),
        _ => {
            let n = fresh.next_name();
            let named = Concept::Atomic(n.clone());
            let ci = if is_lhs {
                ConceptInclusion {
                    lhs: named,
                    rhs: c.clone(),
                }
            } else {
                ConceptInclusion {
                    lhs: c.clone(),
                    rhs: named,
                }
            };
            extra_axioms.insert(ci);
            n
        }
    };
    let lhs_name = side(&obs.lhs, true);
    let rhs_name = side(&obs.rhs, false);
    WrappedObservation {
        lhs_name,
        rhs_name,
        extra_axioms,
    }
}

fn bot_local_concept(c: &Concept, sig: &Signature) -> bool {
    match c {
        Concept::Top => false,
        Concept::Atomic(n) => !sig.concepts.contains(n),
        Concept::Conjunction(parts) => parts.as_slice().iter().any(|p| bot_local_concept(p, sig)),
        Concept::Existential(r, f) => !sig.roles.contains(r) || bot_local_concept(f, sig),
    }
}

fn top_local_concept(c: &Concept, sig: &Signature) -> bool {
    match c {
        Concept::Top => true,
        Concept::Atomic(n) => !sig.concepts.contains(n),
        Concept::Conjunction(parts) => parts.as_slice().iter().all(|p| top_local_concept(p, sig)),
        Concept::Existential(r, f) => !sig.roles.contains(r) && top_local_concept(f, sig),
    }
}

fn extract_module(
    tbox: &TBox,
    sig: &Signature,
    local: impl Fn(&ConceptInclusion, &Signature) -> bool,
) -> TBox {
    let mut sig = sig.clone();
    let mut inside = alloc::vec![false; tbox.len()];
    loop {
        let mut changed = false;
        for (i, ci) in tbox.iter().enumerate() {
            if !inside[i] && !local(ci, &sig) {
                inside[i] = true;
                sig.extend(&ci.signature());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    tbox.iter()
        .zip(inside)
        .filter(|(_, keep)| *keep)
        .map(|(ci, _)| ci.clone())
        .collect()
}

/// Syntactic ⊥-locality module: preserves all subsumers of concepts over `sig`.
pub fn extract_bot_module(tbox: &TBox, sig: &Signature) -> TBox {
    extract_module(tbox, sig, |ci, s| bot_local_concept(&ci.lhs, s))
}

/// Syntactic ⊤-locality module: preserves all subsumees of concepts over `sig`.
pub fn extract_top_module(tbox: &TBox, sig: &Signature) -> TBox {
    extract_module(tbox, sig, |ci, s| top_local_concept(&ci.rhs, s))
}

/// `⟨T, Σ, C1 ⊑ C2⟩` with `T ⊭ C1 ⊑ C2`.
#[derive(Debug, Clone)]
pub struct AbductionProblem {
    background: TBox,
    abducibles: BTreeSet<ConceptName>,
    observation: ConceptInclusion,
}

impl AbductionProblem {
    /// Builds the problem, restricting the abducibles to the names of the
    /// background and the observation.
    pub fn new(
        background: TBox,
        abducibles: impl IntoIterator<Item = ConceptName>,
        observation: ConceptInclusion,
    ) -> Result<Self, PreprocessError> {
        if Reasoner::new(&background).entails_ci(&observation) {
            return Err(PreprocessError::AlreadyEntailed(observation.to_string()));
        }
        let mut sig = background.signature();
        observation.lhs.collect_signature(&mut sig);
        observation.rhs.collect_signature(&mut sig);
        let abducibles = abducibles
            .into_iter()
            .filter(|a| sig.concepts.contains(a))
            .collect();
        Ok(Self {
            background,
            abducibles,
            observation,
        })
    }

    /// Abducibles = every concept name of the background and observation.
    pub fn with_full_signature(
        background: TBox,
        observation: ConceptInclusion,
    ) -> Result<Self, PreprocessError> {
        let mut sig = background.signature();
        observation.lhs.collect_signature(&mut sig);
        observation.rhs.collect_signature(&mut sig);
        Self::new(background, sig.concepts, observation)
    }

    pub fn background(&self) -> &TBox {
        &self.background
    }

    pub fn abducibles(&self) -> &BTreeSet<ConceptName> {
        &self.abducibles
    }

    pub fn observation(&self) -> &ConceptInclusion {
        &self.observation
    }

    /// Names of the background plus those of the observation.
    pub fn input_signature(&self) -> Signature {
        let mut sig = self.background.signature();
        sig.extend(&self.observation.signature());
        sig
    }
}

#[derive(Debug, Clone)]
pub struct PrepareOptions {
    pub use_modules: bool,
    pub fresh_prefix: String,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        Self {
            use_modules: true,
            fresh_prefix: DEFAULT_FRESH_PREFIX.to_string(),
        }
    }
}

/// The problem in the shape the translation expects.
#[derive(Debug, Clone)]
pub struct PreparedProblem {
    /// Normalized, ⊤-free background (module plus wrapper axioms).
    pub tbox: TBox,
    pub lhs_name: ConceptName,
    pub rhs_name: ConceptName,
    pub abducibles: BTreeSet<ConceptName>,
    pub name_map: BTreeMap<ConceptName, Concept>,
    pub top_name: Option<ConceptName>,
    /// Axioms of the input background kept by module extraction.
    pub module: TBox,
    /// The full input background.
    pub original: TBox,
    pub observation: ConceptInclusion,
}

/// Wraps the observation, extracts `M⊥(C1) ∪ M⊤(C2)`, normalizes and removes ⊤.
pub fn prepare(problem: &AbductionProblem, opts: &PrepareOptions) -> PreparedProblem {
    let obs = problem.observation();
    let mut fresh = FreshNames::new(&opts.fresh_prefix);
    let input_sig = problem.input_signature();
    fresh.avoid(&input_sig.concepts);
    fresh.avoid([&ConceptName::new(TOP_NAME)]);

    let wrapped = wrap_observation(obs, &mut fresh);
    let module = if opts.use_modules {
        let bot = extract_bot_module(problem.background(), &obs.lhs.signature());
        let top = extract_top_module(problem.background(), &obs.rhs.signature());
        problem
            .background()
            .iter()
            .filter(|ci| bot.contains(ci) || top.contains(ci))
            .cloned()
            .collect()
    } else {
        problem.background().clone()
    };
    let normalized = normalize(&module.union(&wrapped.extra_axioms), &mut fresh);
    let observation_names: BTreeSet<_> =
        [wrapped.lhs_name.clone(), wrapped.rhs_name.clone()].into();
    let (tbox, top_name) = eliminate_top(
        &normalized.tbox,
        &observation_names,
        &ConceptName::new(TOP_NAME),
    );
    let mut name_map = normalized.name_map;
    for ci in wrapped.extra_axioms.iter() {
        let (fresh_side, concept) = match (&ci.lhs, &ci.rhs) {
            (Concept::Atomic(n), c) if *n == wrapped.lhs_name => (n, c),
            (c, Concept::Atomic(n)) => (n, c),
            _ => continue,
        };
        name_map.insert(fresh_side.clone(), concept.clone());
    }
    PreparedProblem {
        tbox,
        lhs_name: wrapped.lhs_name,
        rhs_name: wrapped.rhs_name,
        abducibles: problem.abducibles().clone(),
        name_map,
        top_name,
        module,
        original: problem.background().clone(),
        observation: obs.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn a(n: &str) -> Concept {
        Concept::atomic(n)
    }

    fn ci(l: Concept, r: Concept) -> ConceptInclusion {
        ConceptInclusion::new(l, r)
    }

    fn names(t: &TBox) -> Vec<String> {
        t.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn normal_tbox_is_fixpoint() {
        let t: TBox = [
            ci(a("A"), a("B")),
            ci(Concept::and([a("A"), a("B")]), a("C")),
            ci(Concept::exists("r", a("A")), a("B")),
            ci(a("A"), Concept::exists("r", a("B"))),
        ]
        .into_iter()
        .collect();
        let n = normalize(&t, &mut FreshNames::new("X"));
        assert_eq!(n.tbox, t);
        assert!(n.name_map.is_empty());
    }

    #[test]
    fn equivalence_normal_form() {
        let mut t = TBox::new();
        t.insert_equivalence(
            a("Professor"),
            Concept::and([a("Doctor"), Concept::exists("employment", a("Chair"))]),
        );
        let n = normalize(&t, &mut FreshNames::new("X"));
        assert_eq!(
            names(&n.tbox),
            vec![
                "Professor SubClassOf Doctor",
                "Professor SubClassOf employment some Chair",
                "employment some Chair SubClassOf X1",
                "Doctor and X1 SubClassOf Professor",
            ]
        );
    }

    #[test]
    fn conjunction_of_existentials_on_lhs() {
        let t: TBox = [ci(
            Concept::and([Concept::exists("r2", a("M")), Concept::exists("r2", a("Z"))]),
            a("Y"),
        )]
        .into_iter()
        .collect();
        let n = normalize(&t, &mut FreshNames::new("N"));
        assert_eq!(
            names(&n.tbox),
            vec![
                "r2 some M SubClassOf N1",
                "r2 some Z SubClassOf N2",
                "N1 and N2 SubClassOf Y"
            ]
        );
    }

    #[test]
    fn long_conjunctions_fold_pairwise() {
        let t: TBox = [ci(Concept::and([a("A"), a("B"), a("C")]), a("D"))]
            .into_iter()
            .collect();
        let n = normalize(&t, &mut FreshNames::new("N"));
        assert_eq!(
            names(&n.tbox),
            vec!["A and B SubClassOf N1", "C and N1 SubClassOf D"]
        );
        assert!(n.tbox.iter().all(is_normal));
    }

    #[test]
    fn top_elimination_recipe() {
        let t: TBox = [ci(Concept::exists("r", Concept::Top), a("B"))]
            .into_iter()
            .collect();
        let top = ConceptName::new(TOP_NAME);
        let (out, name) = eliminate_top(&t, &BTreeSet::new(), &top);
        assert_eq!(name, Some(top));
        assert_eq!(
            names(&out),
            vec![
                "r some __top SubClassOf B",
                "r some __top SubClassOf __top",
                "B SubClassOf __top"
            ]
        );
        let kept: TBox = [ci(a("A"), Concept::Top)].into_iter().collect();
        assert_eq!(
            names(&eliminate_top(&kept, &BTreeSet::new(), &ConceptName::new(TOP_NAME)).0),
            vec!["A SubClassOf __top"]
        );
    }

    #[test]
    fn wrapping_complex_sides() {
        let mut fresh = FreshNames::new("F");
        let w = wrap_observation(&ci(Concept::and([a("A"), a("B")]), a("C")), &mut fresh);
        assert_eq!(w.lhs_name.as_str(), "F1");
        assert_eq!(w.rhs_name.as_str(), "C");
        assert_eq!(names(&w.extra_axioms), vec!["F1 SubClassOf A and B"]);
        let w = wrap_observation(&ci(a("A"), Concept::exists("r", a("B"))), &mut fresh);
        assert_eq!(names(&w.extra_axioms), vec!["r some B SubClassOf F2"]);
    }

    #[test]
    fn simple_modules() {
        let t: TBox = [ci(a("A"), a("B")), ci(a("C"), a("D"))]
            .into_iter()
            .collect();
        let sig_a = a("A").signature();
        assert_eq!(
            names(&extract_bot_module(&t, &sig_a)),
            vec!["A SubClassOf B"]
        );
        assert_eq!(
            names(&extract_top_module(&t, &a("D").signature())),
            vec!["C SubClassOf D"]
        );
        assert!(extract_bot_module(&t, &Signature::default()).is_empty());
        assert!(extract_top_module(&t, &Signature::default()).is_empty());
    }
}
