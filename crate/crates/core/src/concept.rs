//! EL syntax: names, concepts, concept inclusions and TBoxes.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// An atomic concept name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptName(Arc<str>);

/// A role name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleName(Arc<str>);

macro_rules! name_impls {
    ($ty:ident) => {
        impl $ty {
            pub fn new(name: &str) -> Self {
                Self(Arc::from(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $ty {
            fn from(name: &str) -> Self {
                Self::new(name)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

name_impls!(ConceptName);
name_impls!(RoleName);

/// An EL concept.
///
/// Values are always canonical: conjunctions are flat, duplicate-free,
/// ⊤-free, sorted and have at least two conjuncts. The only way to build a
/// conjunction is [`Concept::and`], which enforces this.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Atomic(ConceptName),
    Conjunction(Conjuncts),
    Existential(RoleName, Box<Concept>),
}

/// The sorted conjunct list of a canonical conjunction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conjuncts(Vec<Concept>);

impl Conjuncts {
    pub fn as_slice(&self) -> &[Concept] {
        &self.0
    }
}

impl Concept {
    pub fn top() -> Self {
        Concept::Top
    }

    pub fn atomic(name: impl Into<ConceptName>) -> Self {
        Concept::Atomic(name.into())
    }

    /// `∃role.filler`, with the filler put into canonical form.
    pub fn exists(role: impl Into<RoleName>, filler: Concept) -> Self {
        Concept::Existential(role.into(), Box::new(filler.canonical()))
    }

    /// Conjunction of the given concepts in canonical form.
    pub fn and(parts: impl IntoIterator<Item = Concept>) -> Self {
        let mut set = BTreeSet::new();
        for part in parts {
            match part.canonical() {
                Concept::Top => {}
                Concept::Conjunction(inner) => set.extend(inner.0),
                other => {
                    set.insert(other);
                }
            }
        }
        let mut items: Vec<Concept> = set.into_iter().collect();
        match items.len() {
            0 => Concept::Top,
            1 => items.pop().expect("one element"),
            _ => Concept::Conjunction(Conjuncts(items)),
        }
    }

    /// The unique canonical form; idempotent.
    pub fn canonical(&self) -> Concept {
        match self {
            Concept::Top | Concept::Atomic(_) => self.clone(),
            Concept::Existential(role, filler) => {
                Concept::Existential(role.clone(), Box::new(filler.canonical()))
            }
            Concept::Conjunction(parts) => Concept::and(parts.0.iter().cloned()),
        }
    }

    /// Top-level conjuncts; empty for ⊤, the concept itself when it is not a conjunction.
    pub fn conjuncts(&self) -> &[Concept] {
        match self {
            Concept::Top => &[],
            Concept::Conjunction(parts) => &parts.0,
            other => core::slice::from_ref(other),
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Concept::Top)
    }

    pub fn as_atomic(&self) -> Option<&ConceptName> {
        match self {
            Concept::Atomic(name) => Some(name),
            _ => None,
        }
    }

    /// Whether ⊤ occurs anywhere, including as an existential filler.
    pub fn contains_top(&self) -> bool {
        match self {
            Concept::Top => true,
            Concept::Atomic(_) => false,
            Concept::Conjunction(parts) => parts.0.iter().any(Concept::contains_top),
            Concept::Existential(_, filler) => filler.contains_top(),
        }
    }

    /// Number of existential restrictions occurring in the concept.
    pub fn existential_count(&self) -> usize {
        match self {
            Concept::Top | Concept::Atomic(_) => 0,
            Concept::Conjunction(parts) => parts.0.iter().map(Concept::existential_count).sum(),
            Concept::Existential(_, filler) => 1 + filler.existential_count(),
        }
    }

    /// Nesting depth of existential restrictions.
    pub fn role_depth(&self) -> usize {
        match self {
            Concept::Top | Concept::Atomic(_) => 0,
            Concept::Conjunction(parts) => {
                parts.0.iter().map(Concept::role_depth).max().unwrap_or(0)
            }
            Concept::Existential(_, filler) => 1 + filler.role_depth(),
        }
    }

    pub fn collect_signature(&self, sig: &mut Signature) {
        match self {
            Concept::Top => {}
            Concept::Atomic(name) => {
                sig.concepts.insert(name.clone());
            }
            Concept::Conjunction(parts) => {
                for part in &parts.0 {
                    part.collect_signature(sig);
                }
            }
            Concept::Existential(role, filler) => {
                sig.roles.insert(role.clone());
                filler.collect_signature(sig);
            }
        }
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        self.collect_signature(&mut sig);
        sig
    }
}

impl From<ConceptName> for Concept {
    fn from(name: ConceptName) -> Self {
        Concept::Atomic(name)
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("Top"),
            Concept::Atomic(name) => write!(f, "{name}"),
            Concept::Conjunction(parts) => {
                for (i, part) in parts.0.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    write!(f, "{part}")?;
                }
                Ok(())
            }
            Concept::Existential(role, filler) => match **filler {
                Concept::Conjunction(_) => write!(f, "{role} some ({filler})"),
                _ => write!(f, "{role} some {filler}"),
            },
        }
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A concept inclusion `lhs ⊑ rhs`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptInclusion {
    pub lhs: Concept,
    pub rhs: Concept,
}

impl ConceptInclusion {
    pub fn new(lhs: Concept, rhs: Concept) -> Self {
        Self {
            lhs: lhs.canonical(),
            rhs: rhs.canonical(),
        }
    }

    /// `lhs ⊑ rhs` between two concept names.
    pub fn atomic(lhs: impl Into<ConceptName>, rhs: impl Into<ConceptName>) -> Self {
        Self::new(Concept::atomic(lhs), Concept::atomic(rhs))
    }

    pub fn signature(&self) -> Signature {
        let mut sig = self.lhs.signature();
        self.rhs.collect_signature(&mut sig);
        sig
    }

    pub fn contains_top(&self) -> bool {
        self.lhs.contains_top() || self.rhs.contains_top()
    }

    /// Number of concept names occurring in the axiom, counted with multiplicity.
    pub fn atom_count(&self) -> usize {
        fn count(c: &Concept) -> usize {
            match c {
                Concept::Top => 0,
                Concept::Atomic(_) => 1,
                Concept::Conjunction(parts) => parts.as_slice().iter().map(count).sum(),
                Concept::Existential(_, filler) => count(filler),
            }
        }
        count(&self.lhs) + count(&self.rhs)
    }
}

impl fmt::Display for ConceptInclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} SubClassOf {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for ConceptInclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Concept and role names of a TBox, concept or axiom.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<ConceptName>,
    pub roles: BTreeSet<RoleName>,
}

impl Signature {
    pub fn extend(&mut self, other: &Signature) {
        self.concepts.extend(other.concepts.iter().cloned());
        self.roles.extend(other.roles.iter().cloned());
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.roles.is_empty()
    }
}

/// A finite set of concept inclusions.
///
/// Axioms keep their insertion order (duplicates are dropped) so that
/// fresh-name and Skolem-function numbering follow the input.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct TBox {
    axioms: Vec<ConceptInclusion>,
}

impl TBox {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an axiom; returns false when it was already present.
    pub fn insert(&mut self, ci: ConceptInclusion) -> bool {
        if self.axioms.contains(&ci) {
            return false;
        }
        self.axioms.push(ci);
        true
    }

    /// Adds `lhs ≡ rhs` as the two inclusions it stands for.
    pub fn insert_equivalence(&mut self, lhs: Concept, rhs: Concept) {
        self.insert(ConceptInclusion::new(lhs.clone(), rhs.clone()));
        self.insert(ConceptInclusion::new(rhs, lhs));
    }

    pub fn axioms(&self) -> &[ConceptInclusion] {
        &self.axioms
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ConceptInclusion> {
        self.axioms.iter()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn contains(&self, ci: &ConceptInclusion) -> bool {
        self.axioms.contains(ci)
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for ci in &self.axioms {
            ci.lhs.collect_signature(&mut sig);
            ci.rhs.collect_signature(&mut sig);
        }
        sig
    }

    /// This TBox followed by the axioms of `other` that are not already present.
    pub fn union(&self, other: &TBox) -> TBox {
        let mut out = self.clone();
        for ci in other.iter() {
            out.insert(ci.clone());
        }
        out
    }

    pub fn contains_top(&self) -> bool {
        self.axioms.iter().any(ConceptInclusion::contains_top)
    }

    /// Total number of existential restrictions over all axioms.
    pub fn existential_count(&self) -> usize {
        self.axioms
            .iter()
            .map(|ci| ci.lhs.existential_count() + ci.rhs.existential_count())
            .sum()
    }
}

impl FromIterator<ConceptInclusion> for TBox {
    fn from_iter<I: IntoIterator<Item = ConceptInclusion>>(iter: I) -> Self {
        let mut tbox = TBox::new();
        for ci in iter {
            tbox.insert(ci);
        }
        tbox
    }
}

impl<'a> IntoIterator for &'a TBox {
    type Item = &'a ConceptInclusion;
    type IntoIter = core::slice::Iter<'a, ConceptInclusion>;

    fn into_iter(self) -> Self::IntoIter {
        self.axioms.iter()
    }
}

impl fmt::Debug for TBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.axioms.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Concept {
        Concept::atomic(n)
    }

    #[test]
    fn canonical_merges_nested_conjunctions() {
        let c = Concept::and([a("A"), Concept::and([a("B"), a("A")])]);
        assert_eq!(c, Concept::and([a("A"), a("B")]));
        assert_eq!(c.conjuncts().len(), 2);
    }

    #[test]
    fn top_is_dropped_from_conjunctions() {
        assert_eq!(Concept::and([Concept::top(), a("A")]), a("A"));
        assert_eq!(Concept::and([]), Concept::Top);
    }

    #[test]
    fn duplicate_conjuncts_under_role_collapse() {
        let c = Concept::exists("r", Concept::and([a("A"), a("A")]));
        assert_eq!(c, Concept::exists("r", a("A")));
    }

    #[test]
    fn display_parenthesises_conjunctive_fillers() {
        let c = Concept::and([a("B"), Concept::exists("r", Concept::and([a("C"), a("D")]))]);
        assert_eq!(alloc::format!("{c}"), "B and r some (C and D)");
    }

    #[test]
    fn tbox_signature_and_dedup() {
        let mut t = TBox::new();
        assert!(t.insert(ConceptInclusion::atomic("A", "B")));
        assert!(!t.insert(ConceptInclusion::atomic("A", "B")));
        t.insert(ConceptInclusion::new(a("B"), Concept::exists("r", a("C"))));
        let sig = t.signature();
        assert_eq!(sig.concepts.len(), 3);
        assert_eq!(sig.roles.len(), 1);
        assert_eq!(t.existential_count(), 1);
    }
}
