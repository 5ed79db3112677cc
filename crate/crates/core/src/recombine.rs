//! Turning prime implicates into flat hypotheses.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::concept::{Concept, ConceptInclusion, ConceptName, TBox};
use crate::engine::{NegativeImplicate, PrimeImplicates};
use crate::fol::Term;
use crate::reasoner::Reasoner;

/// A flat CI `A1 ⊓ … ⊓ An ⊑ B1 ⊓ … ⊓ Bm`; an empty left side is ⊤.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FlatCi {
    pub lhs: BTreeSet<ConceptName>,
    pub rhs: BTreeSet<ConceptName>,
}

impl FlatCi {
    /// Drops right-hand names already on the left; `None` if nothing remains.
    pub fn new(lhs: BTreeSet<ConceptName>, rhs: BTreeSet<ConceptName>) -> Option<Self> {
        let rhs: BTreeSet<_> = rhs.difference(&lhs).cloned().collect();
        (!rhs.is_empty()).then_some(Self { lhs, rhs })
    }

    pub fn to_ci(&self) -> ConceptInclusion {
        let side = |names: &BTreeSet<ConceptName>| {
            Concept::and(names.iter().cloned().map(Concept::atomic))
        };
        ConceptInclusion::new(side(&self.lhs), side(&self.rhs))
    }

    /// Number of atomic concepts on both sides.
    pub fn size(&self) -> usize {
        self.lhs.len() + self.rhs.len()
    }

    fn split(&self) -> impl Iterator<Item = (&BTreeSet<ConceptName>, &ConceptName)> {
        self.rhs.iter().map(move |b| (&self.lhs, b))
    }
}

impl fmt::Display for FlatCi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_ci(), f)
    }
}

/// The implicates a hypothesis was built from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Provenance {
    pub negative: NegativeImplicate,
    /// Per term: positive names found there and the negated names.
    pub support: BTreeMap<Term, (BTreeSet<ConceptName>, BTreeSet<ConceptName>)>,
}

#[derive(Clone, Debug)]
pub struct Hypothesis {
    pub axioms: BTreeSet<FlatCi>,
    pub provenance: Option<Provenance>,
    /// False when saturation stopped early.
    pub constructible: bool,
}

impl Hypothesis {
    pub fn new(axioms: impl IntoIterator<Item = FlatCi>) -> Self {
        Self {
            axioms: axioms.into_iter().collect(),
            provenance: None,
            constructible: true,
        }
    }

    pub fn to_tbox(&self) -> TBox {
        self.axioms.iter().map(FlatCi::to_ci).collect()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn signature(&self) -> BTreeSet<ConceptName> {
        self.axioms
            .iter()
            .flat_map(|a| a.lhs.iter().chain(&a.rhs))
            .cloned()
            .collect()
    }

    fn split_pairs(&self) -> BTreeSet<(&BTreeSet<ConceptName>, &ConceptName)> {
        self.axioms.iter().flat_map(FlatCi::split).collect()
    }
}

impl PartialEq for Hypothesis {
    fn eq(&self, other: &Self) -> bool {
        self.axioms == other.axioms
    }
}

impl Eq for Hypothesis {}

impl PartialOrd for Hypothesis {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hypothesis {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.axioms.cmp(&other.axioms)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.axioms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// One candidate hypothesis per negative implicate whose terms all carry an
/// abducible positive atom.
pub fn build_hypotheses(
    pi: &PrimeImplicates,
    abducibles: &BTreeSet<ConceptName>,
) -> Vec<Hypothesis> {
    let mut out: BTreeSet<Hypothesis> = BTreeSet::new();
    'clauses: for neg in &pi.negative {
        let mut support: BTreeMap<Term, (BTreeSet<ConceptName>, BTreeSet<ConceptName>)> =
            BTreeMap::new();
        for (t, b) in neg.literals() {
            support.entry(t.clone()).or_default().1.insert(b.clone());
        }
        for (t, (lhs, _)) in support.iter_mut() {
            let Some(names) = pi.positive.get(t) else {
                continue 'clauses;
            };
            lhs.extend(names.iter().filter(|n| abducibles.contains(*n)).cloned());
            if lhs.is_empty() {
                continue 'clauses;
            }
        }
        let axioms: BTreeSet<FlatCi> = support
            .values()
            .filter_map(|(lhs, rhs)| FlatCi::new(lhs.clone(), rhs.clone()))
            .collect();
        if axioms.is_empty() {
            continue;
        }
        out.insert(Hypothesis {
            axioms,
            provenance: Some(Provenance {
                negative: neg.clone(),
                support,
            }),
            constructible: pi.complete,
        });
    }
    out.into_iter().collect()
}

/// Rejects `h` if the background already entails one of its axioms.
pub fn filter_axiom_entailed(h: Hypothesis, background: &Reasoner) -> Option<Hypothesis> {
    (!h.axioms.iter().any(|a| background.entails_ci(&a.to_ci()))).then_some(h)
}

/// Keeps hypotheses with no strictly smaller hypothesis in the set, where
/// axioms are compared after splitting right-hand conjunctions.
pub fn subset_minimal_filter(hs: Vec<Hypothesis>) -> Vec<Hypothesis> {
    let pairs: Vec<_> = hs.iter().map(Hypothesis::split_pairs).collect();
    let keep: Vec<bool> = pairs
        .iter()
        .map(|p| !pairs.iter().any(|q| q.len() < p.len() && q.is_subset(p)))
        .collect();
    let mut out: Vec<Hypothesis> = hs
        .into_iter()
        .zip(keep)
        .filter_map(|(h, k)| k.then_some(h))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Whether `background ∪ h` entails `obs` and no axiom of `h` is already
/// entailed by `background`.
pub fn verify_solution(background: &TBox, h: &Hypothesis, obs: &ConceptInclusion) -> bool {
    let reasoner = Reasoner::new(background);
    if h.axioms.iter().any(|a| reasoner.entails_ci(&a.to_ci())) {
        return false;
    }
    Reasoner::new(&background.union(&h.to_tbox())).entails_ci(obs)
}

/// Builds, filters and sorts the final hypotheses.
pub fn recombine(
    pi: &PrimeImplicates,
    abducibles: &BTreeSet<ConceptName>,
    background: &TBox,
) -> Vec<Hypothesis> {
    let reasoner = Reasoner::new(background);
    let candidates = build_hypotheses(pi, abducibles)
        .into_iter()
        .filter_map(|h| filter_axiom_entailed(h, &reasoner))
        .collect();
    subset_minimal_filter(candidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::SkolemFn;
    use alloc::string::ToString;
    use alloc::vec;

    fn names(ns: &[&str]) -> BTreeSet<ConceptName> {
        ns.iter().map(|n| ConceptName::new(n)).collect()
    }

    fn ci(lhs: &[&str], rhs: &[&str]) -> FlatCi {
        FlatCi::new(names(lhs), names(rhs)).unwrap()
    }

    #[test]
    fn flat_ci_strips_tautological_part() {
        assert_eq!(ci(&["A"], &["A", "B"]), ci(&["A"], &["B"]));
        assert!(FlatCi::new(names(&["A", "B"]), names(&["A"])).is_none());
        assert_eq!(ci(&["B", "A"], &["C"]).to_string(), "A and B SubClassOf C");
    }

    #[test]
    fn subset_minimality() {
        let small = Hypothesis::new([ci(&["A"], &["B"])]);
        let big = Hypothesis::new([ci(&["A"], &["B"]), ci(&["C"], &["D"])]);
        let other = Hypothesis::new([ci(&["C"], &["E"])]);
        let kept = subset_minimal_filter(vec![big.clone(), small.clone(), other.clone()]);
        assert_eq!(kept, vec![small.clone(), other]);
        let merged = Hypothesis::new([ci(&["A"], &["B", "C"])]);
        assert_eq!(
            subset_minimal_filter(vec![merged, small.clone()]),
            vec![small]
        );
    }

    #[test]
    fn unmatched_term_contributes_nothing() {
        let sk1 = Term::app(
            SkolemFn {
                index: 1,
                duplicate: false,
            },
            Term::Const,
        );
        let mut pi = PrimeImplicates {
            complete: true,
            ..Default::default()
        };
        pi.positive.insert(Term::Const, names(&["A"]));
        pi.negative
            .insert(NegativeImplicate::new([(sk1, ConceptName::new("B"))]));
        pi.negative.insert(NegativeImplicate::new([(
            Term::Const,
            ConceptName::new("C"),
        )]));
        let hs = build_hypotheses(&pi, &names(&["A", "B", "C"]));
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].to_string(), "{A SubClassOf C}");
    }

    #[test]
    fn entailed_axiom_rejected() {
        let mut t = TBox::new();
        t.insert(ConceptInclusion::atomic("A", "B"));
        let r = Reasoner::new(&t);
        assert!(filter_axiom_entailed(Hypothesis::new([ci(&["A"], &["B"])]), &r).is_none());
        assert!(filter_axiom_entailed(Hypothesis::new([ci(&["A"], &["C"])]), &r).is_some());
        let obs = ConceptInclusion::atomic("A", "C");
        assert!(!verify_solution(&t, &Hypothesis::new([]), &obs));
        assert!(verify_solution(
            &t,
            &Hypothesis::new([ci(&["B"], &["C"])]),
            &obs
        ));
    }
}
