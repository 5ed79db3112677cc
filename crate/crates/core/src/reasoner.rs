//! EL subsumption by completion-rule saturation over normalized TBoxes.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::concept::{Concept, ConceptInclusion, ConceptName, RoleName, TBox};
use crate::preprocess::{is_normal, normalize, FreshNames};

const QUERY_PREFIX: &str = "__q";
const NORMALIZE_PREFIX: &str = "__n";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReasonerError {
    #[error("axiom is not in normal form: {0}")]
    NotNormalized(String),
}

type Id = u32;
const TOP: Id = 0;

#[derive(Clone, Default)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn contains(&self, i: Id) -> bool {
        let (w, b) = (i as usize / 64, i % 64);
        self.0.get(w).is_some_and(|word| word & (1 << b) != 0)
    }

    /// Returns true when `i` was not yet present.
    fn insert(&mut self, i: Id) -> bool {
        let (w, b) = (i as usize / 64, i % 64);
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        let fresh = self.0[w] & (1 << b) == 0;
        self.0[w] |= 1 << b;
        fresh
    }
}

#[derive(Clone, Default)]
struct NameSet {
    bits: BitSet,
    list: Vec<Id>,
}

impl NameSet {
    fn insert(&mut self, i: Id) -> bool {
        let fresh = self.bits.insert(i);
        if fresh {
            self.list.push(i);
        }
        fresh
    }
}

#[derive(Clone)]
enum Work {
    Subsumer(Id, Id),
    Link(Id, Id, Id),
}

/// Incremental completion state for a normalized TBox.
///
/// Names, fillers and ⊤ (id 0) are the elements of the canonical model;
/// `subsumers[a]` holds `{ b | T ⊨ a ⊑ b }` and `links` the role edges.
#[derive(Clone)]
struct Completion {
    ids: BTreeMap<ConceptName, Id>,
    names: Vec<Option<ConceptName>>,
    roles: BTreeMap<RoleName, Id>,
    told: Vec<Vec<Id>>,
    conj: Vec<Vec<(Id, Id)>>,
    exists_rhs: Vec<Vec<(Id, Id)>>,
    /// filler → (role, result) for `∃role.filler ⊑ result`.
    exists_lhs: Vec<Vec<(Id, Id)>>,
    subsumers: Vec<NameSet>,
    links: Vec<Vec<(Id, Id)>>,
    link_set: BTreeSet<(Id, Id, Id)>,
    preds: Vec<Vec<(Id, Id)>>,
    queue: VecDeque<Work>,
}

impl Completion {
    fn new() -> Self {
        let mut c = Completion {
            ids: BTreeMap::new(),
            names: Vec::new(),
            roles: BTreeMap::new(),
            told: Vec::new(),
            conj: Vec::new(),
            exists_rhs: Vec::new(),
            exists_lhs: Vec::new(),
            subsumers: Vec::new(),
            links: Vec::new(),
            link_set: BTreeSet::new(),
            preds: Vec::new(),
            queue: VecDeque::new(),
        };
        c.push_element(None);
        c
    }

    fn push_element(&mut self, name: Option<ConceptName>) -> Id {
        let id = self.names.len() as Id;
        self.names.push(name);
        self.told.push(Vec::new());
        self.conj.push(Vec::new());
        self.exists_rhs.push(Vec::new());
        self.exists_lhs.push(Vec::new());
        self.subsumers.push(NameSet::default());
        self.links.push(Vec::new());
        self.preds.push(Vec::new());
        self.add_subsumer(id, id);
        self.add_subsumer(id, TOP);
        id
    }

    fn id(&mut self, c: &Concept) -> Id {
        match c {
            Concept::Top => TOP,
            Concept::Atomic(n) => match self.ids.get(n) {
                Some(&i) => i,
                None => {
                    let i = self.push_element(Some(n.clone()));
                    self.ids.insert(n.clone(), i);
                    i
                }
            },
            _ => unreachable!("normal form sides are names or ⊤"),
        }
    }

    fn role(&mut self, r: &RoleName) -> Id {
        let next = self.roles.len() as Id;
        *self.roles.entry(r.clone()).or_insert(next)
    }

    /// Registers normalized axioms; call [`Completion::saturate`] afterwards.
    fn add_axioms<'a>(
        &mut self,
        axioms: impl IntoIterator<Item = &'a ConceptInclusion>,
    ) -> Result<(), ReasonerError> {
        let mut fresh_rules = Vec::new();
        for ci in axioms {
            if !is_normal(ci) {
                return Err(ReasonerError::NotNormalized(ci.to_string()));
            }
            match (&ci.lhs, &ci.rhs) {
                (Concept::Conjunction(parts), rhs) => {
                    let [l, r] = parts.as_slice() else {
                        unreachable!()
                    };
                    let (l, r, b) = (self.id(l), self.id(r), self.id(rhs));
                    self.conj[l as usize].push((r, b));
                    self.conj[r as usize].push((l, b));
                    fresh_rules.push(l);
                    fresh_rules.push(r);
                }
                (Concept::Existential(role, filler), rhs) => {
                    let (role, f, b) = (self.role(role), self.id(filler), self.id(rhs));
                    self.exists_lhs[f as usize].push((role, b));
                    fresh_rules.push(f);
                }
                (lhs, Concept::Existential(role, filler)) => {
                    let (a, role, f) = (self.id(lhs), self.role(role), self.id(filler));
                    self.exists_rhs[a as usize].push((role, f));
                    fresh_rules.push(a);
                }
                (lhs, rhs) => {
                    let (a, b) = (self.id(lhs), self.id(rhs));
                    self.told[a as usize].push(b);
                    fresh_rules.push(a);
                }
            }
        }
        // Rules added after some saturation must fire on existing facts.
        for trigger in fresh_rules {
            for x in 0..self.subsumers.len() {
                if self.subsumers[x].bits.contains(trigger) {
                    self.queue.push_back(Work::Subsumer(x as Id, trigger));
                }
            }
        }
        Ok(())
    }

    fn add_subsumer(&mut self, a: Id, b: Id) {
        if self.subsumers[a as usize].insert(b) {
            self.queue.push_back(Work::Subsumer(a, b));
        }
    }

    fn saturate(&mut self) {
        while let Some(work) = self.queue.pop_front() {
            match work {
                Work::Subsumer(a, b) => {
                    let ai = a as usize;
                    let bi = b as usize;
                    for k in 0..self.told[bi].len() {
                        let c = self.told[bi][k];
                        self.add_subsumer(a, c);
                    }
                    for k in 0..self.conj[bi].len() {
                        let (other, c) = self.conj[bi][k];
                        if self.subsumers[ai].bits.contains(other) {
                            self.add_subsumer(a, c);
                        }
                    }
                    for k in 0..self.exists_rhs[bi].len() {
                        let (r, f) = self.exists_rhs[bi][k];
                        if !self.link_set.contains(&(a, r, f)) {
                            self.queue.push_back(Work::Link(a, r, f));
                        }
                    }
                    for k in 0..self.preds[ai].len() {
                        let (p, r) = self.preds[ai][k];
                        for j in 0..self.exists_lhs[bi].len() {
                            let (r2, c) = self.exists_lhs[bi][j];
                            if r2 == r {
                                self.add_subsumer(p, c);
                            }
                        }
                    }
                }
                Work::Link(a, r, f) => {
                    if !self.link_set.insert((a, r, f)) {
                        continue;
                    }
                    self.links[a as usize].push((r, f));
                    self.preds[f as usize].push((a, r));
                    for k in 0..self.subsumers[f as usize].list.len() {
                        let b = self.subsumers[f as usize].list[k];
                        for j in 0..self.exists_lhs[b as usize].len() {
                            let (r2, c) = self.exists_lhs[b as usize][j];
                            if r2 == r {
                                self.add_subsumer(a, c);
                            }
                        }
                    }
                }
            }
        }
    }

    fn subsumes(&self, sub: Id, sup: Id) -> bool {
        self.subsumers[sub as usize].bits.contains(sup)
    }

    /// Whether element `e` of the canonical model satisfies `c`.
    fn satisfies(&self, e: Id, c: &Concept, memo: &mut BTreeMap<(Id, Concept), bool>) -> bool {
        match c {
            Concept::Top => true,
            Concept::Atomic(n) => self.ids.get(n).is_some_and(|&i| self.subsumes(e, i)),
            Concept::Conjunction(parts) => {
                parts.as_slice().iter().all(|p| self.satisfies(e, p, memo))
            }
            Concept::Existential(role, filler) => {
                let Some(&r) = self.roles.get(role) else {
                    return false;
                };
                if let Some(&v) = memo.get(&(e, c.clone())) {
                    return v;
                }
                let v = self.links[e as usize]
                    .iter()
                    .any(|&(r2, f)| r2 == r && self.satisfies(f, filler, memo));
                memo.insert((e, c.clone()), v);
                v
            }
        }
    }
}

/// Atomic subsumptions of a normalized TBox.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsumptionTable {
    entries: BTreeMap<ConceptName, BTreeSet<ConceptName>>,
    top_subsumers: BTreeSet<ConceptName>,
}

impl SubsumptionTable {
    /// `{ B | T ⊨ name ⊑ B }`; for names outside the TBox this is the name
    /// itself plus the subsumers of ⊤.
    pub fn subsumers(&self, name: &ConceptName) -> BTreeSet<ConceptName> {
        match self.entries.get(name) {
            Some(s) => s.clone(),
            None => {
                let mut s = self.top_subsumers.clone();
                s.insert(name.clone());
                s
            }
        }
    }

    pub fn subsumes(&self, sub: &ConceptName, sup: &ConceptName) -> bool {
        sub == sup
            || self.top_subsumers.contains(sup)
            || self.entries.get(sub).is_some_and(|s| s.contains(sup))
    }

    /// Names `B` with `T ⊨ ⊤ ⊑ B`.
    pub fn top_subsumers(&self) -> &BTreeSet<ConceptName> {
        &self.top_subsumers
    }

    pub fn entries(&self) -> &BTreeMap<ConceptName, BTreeSet<ConceptName>> {
        &self.entries
    }

    /// Pairs `(A, B)` with `A ≠ B` and `T ⊨ A ⊑ B`.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (&ConceptName, &ConceptName)> {
        self.entries
            .iter()
            .flat_map(|(a, bs)| bs.iter().filter(move |b| *b != a).map(move |b| (a, b)))
    }
}

/// Classifies a normalized TBox.
pub fn classify(tbox: &TBox) -> Result<SubsumptionTable, ReasonerError> {
    let mut c = Completion::new();
    c.add_axioms(tbox)?;
    c.saturate();
    Ok(table_of(&c, tbox.signature().concepts.iter()))
}

fn table_of<'a>(c: &Completion, names: impl Iterator<Item = &'a ConceptName>) -> SubsumptionTable {
    let name_of = |i: &Id| c.names[*i as usize].clone();
    let entries = names
        .map(|n| {
            let id = c.ids[n];
            (
                n.clone(),
                c.subsumers[id as usize]
                    .list
                    .iter()
                    .filter_map(name_of)
                    .collect(),
            )
        })
        .collect();
    let top_subsumers = c.subsumers[TOP as usize]
        .list
        .iter()
        .filter_map(name_of)
        .collect();
    SubsumptionTable {
        entries,
        top_subsumers,
    }
}

/// Subsumption reasoner for an arbitrary EL TBox.
///
/// The TBox is normalized and classified once; complex queries are answered
/// by adding a fresh name for the left-hand side and model-checking the
/// right-hand side in the resulting canonical model.
#[derive(Clone)]
pub struct Reasoner {
    base: Completion,
    signature: BTreeSet<ConceptName>,
    fresh: FreshNames,
}

impl Reasoner {
    pub fn new(tbox: &TBox) -> Self {
        let signature = tbox.signature().concepts;
        let mut fresh = FreshNames::new(NORMALIZE_PREFIX);
        let normalized = normalize(tbox, &mut fresh);
        let mut base = Completion::new();
        base.add_axioms(&normalized.tbox)
            .expect("normalize yields normal form");
        for n in &signature {
            base.id(&Concept::Atomic(n.clone()));
        }
        base.saturate();
        let mut query_fresh = FreshNames::new(QUERY_PREFIX);
        query_fresh.avoid(&signature);
        query_fresh.avoid(base.ids.keys());
        Reasoner {
            base,
            signature,
            fresh: query_fresh,
        }
    }

    /// Atomic subsumptions over the names of the input TBox.
    pub fn table(&self) -> SubsumptionTable {
        let mut t = table_of(&self.base, self.signature.iter());
        for subs in t.entries.values_mut() {
            subs.retain(|n| self.signature.contains(n));
        }
        t.top_subsumers.retain(|n| self.signature.contains(n));
        t
    }

    pub fn entails_ci(&self, ci: &ConceptInclusion) -> bool {
        self.entails(&ci.lhs, &ci.rhs)
    }

    /// `T ⊨ lhs ⊑ rhs`.
    pub fn entails(&self, lhs: &Concept, rhs: &Concept) -> bool {
        if rhs.is_top() {
            return true;
        }
        let known = match lhs {
            Concept::Top => Some(TOP),
            Concept::Atomic(n) => self.base.ids.get(n).copied(),
            _ => None,
        };
        if let Some(e) = known {
            return self.base.satisfies(e, rhs, &mut BTreeMap::new());
        }
        let mut fresh = self.fresh.clone();
        let q = fresh.next_name();
        let query: TBox = [ConceptInclusion::new(
            Concept::Atomic(q.clone()),
            lhs.clone(),
        )]
        .into_iter()
        .collect();
        let normalized = normalize(&query, &mut fresh);
        let mut c = self.base.clone();
        c.add_axioms(&normalized.tbox)
            .expect("normalize yields normal form");
        let e = c.id(&Concept::Atomic(q));
        c.saturate();
        c.satisfies(e, rhs, &mut BTreeMap::new())
    }

    /// Subsumption between two names (either may be outside the TBox).
    pub fn subsumes(&self, sub: &ConceptName, sup: &ConceptName) -> bool {
        sub == sup || self.entails(&Concept::Atomic(sub.clone()), &Concept::Atomic(sup.clone()))
    }
}

/// `T ⊨ ci` for an arbitrary TBox.
pub fn entails_ci(tbox: &TBox, ci: &ConceptInclusion) -> bool {
    Reasoner::new(tbox).entails_ci(ci)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Concept {
        Concept::atomic(n)
    }

    fn name(n: &str) -> ConceptName {
        ConceptName::new(n)
    }

    fn academia() -> TBox {
        let mut t = TBox::new();
        t.insert(ConceptInclusion::new(
            Concept::and([
                Concept::exists("employment", a("ResearchPosition")),
                Concept::exists("qualification", a("Diploma")),
            ]),
            a("Researcher"),
        ));
        t.insert(ConceptInclusion::new(
            Concept::exists("writes", a("ResearchPaper")),
            a("Researcher"),
        ));
        t.insert(ConceptInclusion::new(
            a("Doctor"),
            Concept::exists("qualification", a("PhD")),
        ));
        t.insert_equivalence(
            a("Professor"),
            Concept::and([a("Doctor"), Concept::exists("employment", a("Chair"))]),
        );
        t.insert(ConceptInclusion::new(
            a("FundsProvider"),
            Concept::exists("writes", a("GrantApplication")),
        ));
        t
    }

    #[test]
    fn academia_entailments() {
        let t = academia();
        let r = Reasoner::new(&t);
        assert!(r.subsumes(&name("Professor"), &name("Doctor")));
        assert!(!r.entails_ci(&ConceptInclusion::atomic("Professor", "Researcher")));
        let mut with_h = t.clone();
        with_h.insert(ConceptInclusion::atomic("Chair", "ResearchPosition"));
        with_h.insert(ConceptInclusion::atomic("PhD", "Diploma"));
        assert!(entails_ci(
            &with_h,
            &ConceptInclusion::atomic("Professor", "Researcher")
        ));
        assert!(r.entails(&a("Professor"), &Concept::exists("qualification", a("PhD"))));
        assert!(r.entails(&a("Anything"), &Concept::Top));
    }

    #[test]
    fn empty_tbox_is_reflexive_only() {
        let mut t = TBox::new();
        t.insert(ConceptInclusion::atomic("A", "A"));
        t.insert(ConceptInclusion::atomic("B", "B"));
        let table = classify(&t).unwrap();
        assert_eq!(table.subsumers(&name("A")), [name("A")].into());
        assert_eq!(table.subsumers(&name("B")), [name("B")].into());
    }

    #[test]
    fn non_normal_input_is_rejected() {
        let t: TBox = [ConceptInclusion::new(
            a("A"),
            Concept::and([a("B"), a("C")]),
        )]
        .into_iter()
        .collect();
        assert!(matches!(classify(&t), Err(ReasonerError::NotNormalized(_))));
    }

    #[test]
    fn existential_chains() {
        let t: TBox = [
            ConceptInclusion::new(a("A"), Concept::exists("r", a("B"))),
            ConceptInclusion::atomic("B", "C"),
            ConceptInclusion::new(Concept::exists("r", a("C")), a("D")),
        ]
        .into_iter()
        .collect();
        let table = classify(&t).unwrap();
        assert!(table.subsumes(&name("A"), &name("D")));
        assert!(!table.subsumes(&name("B"), &name("D")));
    }

    #[test]
    fn top_axioms() {
        let t: TBox = [
            ConceptInclusion::new(Concept::Top, a("A")),
            ConceptInclusion::new(Concept::exists("r", Concept::Top), a("B")),
            ConceptInclusion::new(a("C"), Concept::exists("r", a("D"))),
        ]
        .into_iter()
        .collect();
        let r = Reasoner::new(&t);
        assert!(r.subsumes(&name("D"), &name("A")));
        assert!(r.subsumes(&name("C"), &name("B")));
        assert!(r.subsumes(&name("Fresh"), &name("A")));
        assert!(!r.subsumes(&name("D"), &name("B")));
        assert_eq!(r.table().top_subsumers(), &[name("A")].into());
    }

    #[test]
    fn complex_queries() {
        let t: TBox = [ConceptInclusion::new(
            Concept::and([a("A"), Concept::exists("r", a("B"))]),
            a("C"),
        )]
        .into_iter()
        .collect();
        let r = Reasoner::new(&t);
        let lhs = Concept::and([a("A"), Concept::exists("r", Concept::and([a("B"), a("E")]))]);
        assert!(r.entails(&lhs, &a("C")));
        assert!(r.entails(&lhs, &Concept::exists("r", a("E"))));
        assert!(!r.entails(&a("A"), &a("C")));
    }

    #[test]
    fn table_hides_normalization_names() {
        let mut t = TBox::new();
        t.insert_equivalence(a("P"), Concept::and([a("D"), Concept::exists("e", a("C"))]));
        let table = Reasoner::new(&t).table();
        let pairs: Vec<_> = table
            .strict_pairs()
            .map(|(x, y)| alloc::format!("{x} < {y}"))
            .collect();
        assert_eq!(pairs, ["P < D"]);
    }
}
