//! Brute-force reference implementations, independent of the resolution
//! engine and the completion reasoner: a chase for entailment, naive
//! saturation, a direct connection-minimality check over description trees
//! and enumeration of packed hypotheses.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::concept::{Concept, ConceptInclusion, ConceptName, RoleName, TBox};
use crate::engine::{factorize, resolve, NegativeImplicate, PrimeImplicates, RoleAtom};
use crate::fol::{Clause, ClauseSet, Predicate, Term};
use crate::preprocess::{normalize, FreshNames};
use crate::reasoner::Reasoner;
use crate::recombine::{FlatCi, Hypothesis};
use crate::tree::{one_step_reductions, weak_homomorphisms, DescriptionTree, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search bounds exhausted before an answer was found")]
    BoundsExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Maximal role depth of the trees `D1` and `D2`.
    pub max_tree_depth: usize,
    /// Maximal node count of a `D2` candidate.
    pub max_nodes: usize,
    /// Maximal Skolem nesting for [`naive_saturation`].
    pub max_term_depth: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_tree_depth: 3,
            max_nodes: 8,
            max_term_depth: 3,
        }
    }
}

const MAX_SEARCH_STATES: usize = 200_000;
const MAX_NAIVE_CLAUSES: usize = 1_000;

/// Canonical model with one shared witness per filler concept.
#[derive(Default)]
struct Chase {
    labels: Vec<BTreeSet<ConceptName>>,
    edges: Vec<BTreeSet<(RoleName, usize)>>,
    witness: BTreeMap<Concept, usize>,
}

impl Chase {
    fn element(&mut self, c: &Concept) -> usize {
        if let Some(&e) = self.witness.get(c) {
            return e;
        }
        let e = self.labels.len();
        self.labels.push(BTreeSet::new());
        self.edges.push(BTreeSet::new());
        self.witness.insert(c.clone(), e);
        self.impose(e, c);
        e
    }

    fn impose(&mut self, e: usize, c: &Concept) -> bool {
        match c {
            Concept::Top => false,
            Concept::Atomic(a) => self.labels[e].insert(a.clone()),
            Concept::Conjunction(parts) => {
                let mut changed = false;
                for p in parts.as_slice() {
                    changed |= self.impose(e, p);
                }
                changed
            }
            Concept::Existential(r, f) => {
                if self.holds(e, c) {
                    return false;
                }
                let w = self.element(f);
                self.edges[e].insert((r.clone(), w))
            }
        }
    }

    fn holds(&self, e: usize, c: &Concept) -> bool {
        match c {
            Concept::Top => true,
            Concept::Atomic(a) => self.labels[e].contains(a),
            Concept::Conjunction(parts) => parts.as_slice().iter().all(|p| self.holds(e, p)),
            Concept::Existential(r, f) => self.edges[e]
                .iter()
                .any(|(s, w)| s == r && self.holds(*w, f)),
        }
    }

    fn run(&mut self, t: &TBox) {
        loop {
            let mut changed = false;
            for e in 0..self.labels.len() {
                for ci in t.iter() {
                    if self.holds(e, &ci.lhs) {
                        changed |= self.impose(e, &ci.rhs);
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }
}

/// `t ⊨ lhs ⊑ rhs`, decided by chasing `lhs` through the unnormalized TBox.
pub fn chase_entails(t: &TBox, lhs: &Concept, rhs: &Concept) -> bool {
    let mut m = Chase::default();
    let e = m.element(lhs);
    m.run(t);
    m.holds(e, rhs)
}

/// Closure of `phi` under binary resolution and factoring, dropping
/// tautologies and clauses with a term deeper than `max_term_depth`.
/// Returns `None` if the clause count exceeds an internal cap.
pub fn naive_saturation(phi: &ClauseSet, max_term_depth: usize) -> Option<BTreeSet<Clause>> {
    let admissible = |c: &Clause| !c.is_tautology() && c.depth() <= max_term_depth;
    let mut all: BTreeSet<Clause> = phi
        .clauses
        .iter()
        .map(|c| factorize(c).with_shape(crate::fol::Shape::Derived))
        .filter(admissible)
        .collect();
    let mut processed: Vec<Clause> = Vec::new();
    let mut queue: Vec<Clause> = all.iter().cloned().collect();
    while let Some(given) = queue.pop() {
        for other in processed.iter().chain(core::iter::once(&given)) {
            for r in resolve(&given, other) {
                let r = factorize(&r);
                if admissible(&r) && all.insert(r.clone()) {
                    queue.push(r);
                }
            }
        }
        processed.push(given);
        if all.len() > MAX_NAIVE_CLAUSES {
            return None;
        }
    }
    Some(all)
}

/// Reads ground prime implicates off a saturated clause set: positive
/// abducible and role units, and ⊆-minimal negative clauses over barred
/// abducibles without barred Skolem functions.
pub fn ground_implicates(
    clauses: &BTreeSet<Clause>,
    abducibles: &BTreeSet<ConceptName>,
) -> PrimeImplicates {
    let mut out = PrimeImplicates {
        complete: true,
        ..Default::default()
    };
    let mut negatives = Vec::new();
    for c in clauses.iter().filter(|c| c.is_ground() && !c.is_empty()) {
        let lits = c.literals();
        if let [l] = lits {
            if l.positive {
                match &l.predicate {
                    Predicate::Concept {
                        name,
                        duplicate: false,
                    } if abducibles.contains(name) => {
                        out.positive
                            .entry(l.args[0].clone())
                            .or_default()
                            .insert(name.clone());
                    }
                    Predicate::Role(role) => {
                        out.roles.insert(RoleAtom {
                            role: role.clone(),
                            from: l.args[0].clone(),
                            to: l.args[1].clone(),
                        });
                    }
                    _ => {}
                }
                continue;
            }
        }
        let negative: Option<Vec<(Term, ConceptName)>> = lits
            .iter()
            .map(|l| match &l.predicate {
                Predicate::Concept {
                    name,
                    duplicate: true,
                } if !l.positive
                    && abducibles.contains(name)
                    && !l.args[0].has_duplicate_function() =>
                {
                    Some((l.args[0].clone(), name.clone()))
                }
                _ => None,
            })
            .collect();
        if let Some(n) = negative {
            negatives.push(NegativeImplicate::new(n));
        }
    }
    for n in &negatives {
        if !negatives
            .iter()
            .any(|m| m.len() < n.len() && m.is_subset(n))
        {
            out.negative.insert(n.clone());
        }
    }
    out
}

/// A normalized copy of the background with a reasoner over it.
struct Background {
    reasoner: Reasoner,
    by_rhs: BTreeMap<ConceptName, Vec<Concept>>,
    existentials: Vec<(Concept, RoleName, Concept)>,
}

impl Background {
    fn new(tbox: &TBox) -> Self {
        let mut fresh = FreshNames::new("__oracle");
        let normalized = normalize(tbox, &mut fresh).tbox;
        let mut by_rhs: BTreeMap<ConceptName, Vec<Concept>> = BTreeMap::new();
        let mut existentials = Vec::new();
        for ci in normalized.iter() {
            match &ci.rhs {
                Concept::Atomic(b) => by_rhs.entry(b.clone()).or_default().push(ci.lhs.clone()),
                Concept::Existential(r, y) => {
                    existentials.push((ci.lhs.clone(), r.clone(), (**y).clone()))
                }
                _ => {}
            }
        }
        Self {
            reasoner: Reasoner::new(&normalized),
            by_rhs,
            existentials,
        }
    }

    fn entails(&self, lhs: &Concept, rhs: &Concept) -> bool {
        rhs.is_top() || self.reasoner.entails(lhs, rhs)
    }

    /// Tree of the canonical model of `root` unravelled to `depth`, with
    /// labels restricted to `names`.
    fn unravel(
        &self,
        root: &Concept,
        names: &BTreeSet<ConceptName>,
        depth: usize,
    ) -> DescriptionTree {
        let label = |c: &Concept| -> BTreeSet<ConceptName> {
            names
                .iter()
                .filter(|n| self.entails(c, &Concept::atomic((*n).clone())))
                .cloned()
                .collect()
        };
        let mut tree = DescriptionTree::leaf(label(root));
        let mut stack: Vec<(NodeId, Concept, usize)> = vec![(tree.root(), root.clone(), 0)];
        while let Some((node, concept, d)) = stack.pop() {
            if d == depth {
                continue;
            }
            let mut succ: Vec<(RoleName, Concept)> = concept
                .conjuncts()
                .iter()
                .filter_map(|p| match p {
                    Concept::Existential(r, f) => Some((r.clone(), (**f).clone())),
                    _ => None,
                })
                .collect();
            succ.extend(
                self.existentials
                    .iter()
                    .filter(|(x, _, _)| self.entails(&concept, x))
                    .map(|(_, r, y)| (r.clone(), y.clone())),
            );
            for (r, filler) in succ {
                let child = tree.add_child(node, r, label(&filler));
                stack.push((child, filler, d + 1));
            }
        }
        tree
    }
}

#[derive(Clone, Debug)]
enum Goal {
    Name(ConceptName),
    Exists(RoleName, Concept),
}

#[derive(Clone)]
struct Partial {
    labels: Vec<BTreeSet<ConceptName>>,
    children: Vec<Vec<(RoleName, usize)>>,
    depth: Vec<usize>,
    agenda: Vec<(usize, Goal, BTreeSet<ConceptName>)>,
}

impl Partial {
    fn concept(&self, node: usize) -> Concept {
        let atoms = self.labels[node].iter().cloned().map(Concept::atomic);
        let edges = self.children[node]
            .iter()
            .map(|(r, c)| Concept::exists(r.clone(), self.concept(*c)));
        Concept::and(atoms.chain(edges))
    }

    fn push_concept(&mut self, node: usize, c: &Concept, path: &BTreeSet<ConceptName>) {
        for part in c.conjuncts() {
            match part {
                Concept::Atomic(n) => self
                    .agenda
                    .push((node, Goal::Name(n.clone()), path.clone())),
                Concept::Existential(r, f) => {
                    self.agenda
                        .push((node, Goal::Exists(r.clone(), (**f).clone()), path.clone()))
                }
                Concept::Top | Concept::Conjunction(_) => {}
            }
        }
    }
}

struct Regression<'a> {
    bg: &'a Background,
    names: &'a BTreeSet<ConceptName>,
    cfg: OracleConfig,
    states: usize,
    truncated: bool,
    found: BTreeSet<Concept>,
}

impl Regression<'_> {
    fn run(&mut self, mut state: Partial) {
        self.states += 1;
        if self.states > MAX_SEARCH_STATES {
            self.truncated = true;
            return;
        }
        let Some((node, goal, path)) = state.agenda.pop() else {
            self.found.insert(state.concept(0));
            return;
        };
        match goal {
            Goal::Name(b) => {
                if state.labels[node].contains(&b) {
                    return self.run(state);
                }
                if path.contains(&b) {
                    return;
                }
                if self.names.contains(&b) {
                    let mut next = state.clone();
                    next.labels[node].insert(b.clone());
                    self.run(next);
                }
                let mut path = path;
                path.insert(b.clone());
                for lhs in self.bg.by_rhs.get(&b).into_iter().flatten() {
                    let mut next = state.clone();
                    next.push_concept(node, lhs, &path);
                    self.run(next);
                }
            }
            Goal::Exists(r, filler) => {
                if state.depth[node] < self.cfg.max_tree_depth
                    && state.labels.len() < self.cfg.max_nodes
                {
                    let mut next = state.clone();
                    let child = next.labels.len();
                    next.labels.push(BTreeSet::new());
                    next.children.push(Vec::new());
                    next.depth.push(state.depth[node] + 1);
                    next.children[node].push((r.clone(), child));
                    next.push_concept(child, &filler, &BTreeSet::new());
                    self.run(next);
                } else {
                    self.truncated = true;
                }
                for (x, s, y) in &self.bg.existentials {
                    if *s == r && self.bg.entails(y, &filler) {
                        let mut next = state.clone();
                        next.push_concept(node, x, &path);
                        self.run(next);
                    }
                }
            }
        }
    }
}

/// All ways of merging same-role siblings, at every depth.
fn merge_variants(c: &Concept) -> BTreeSet<Concept> {
    let mut atoms = Vec::new();
    let mut groups: BTreeMap<RoleName, Vec<Concept>> = BTreeMap::new();
    for part in c.conjuncts() {
        match part {
            Concept::Existential(r, f) => groups.entry(r.clone()).or_default().push((**f).clone()),
            other => atoms.push(other.clone()),
        }
    }
    let mut partial: Vec<Vec<Concept>> = vec![atoms];
    for (role, fillers) in groups {
        let mut next = Vec::new();
        for blocks in partitions(&fillers) {
            let mut options: Vec<Vec<Concept>> = vec![Vec::new()];
            for block in blocks {
                let merged = Concept::and(block);
                let variants = merge_variants(&merged);
                options = options
                    .iter()
                    .flat_map(|o| {
                        let role = &role;
                        variants.iter().map(move |v| {
                            let mut o = o.clone();
                            o.push(Concept::exists(role.clone(), v.clone()));
                            o
                        })
                    })
                    .collect();
            }
            for base in &partial {
                for o in &options {
                    next.push(base.iter().cloned().chain(o.iter().cloned()).collect());
                }
            }
        }
        partial = next;
    }
    partial.into_iter().map(Concept::and).collect()
}

fn partitions(items: &[Concept]) -> Vec<Vec<Vec<Concept>>> {
    let Some((first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(first.clone());
            out.push(q);
        }
        let mut q = p;
        q.push(vec![first.clone()]);
        out.push(q);
    }
    out
}

struct Subsumees {
    concepts: Vec<Concept>,
    truncated: bool,
}

/// ⪯⊓-minimal concepts over `names` (and any roles) entailing `goal`,
/// within the tree bounds.
fn minimal_subsumees(
    bg: &Background,
    goal: &Concept,
    names: &BTreeSet<ConceptName>,
    cfg: OracleConfig,
) -> Subsumees {
    let mut reg = Regression {
        bg,
        names,
        cfg,
        states: 0,
        truncated: false,
        found: BTreeSet::new(),
    };
    let mut start = Partial {
        labels: vec![BTreeSet::new()],
        children: vec![Vec::new()],
        depth: vec![0],
        agenda: Vec::new(),
    };
    start.push_concept(0, goal, &BTreeSet::new());
    reg.run(start);
    let mut candidates = BTreeSet::new();
    for c in &reg.found {
        candidates.extend(merge_variants(c));
    }
    let concepts = candidates
        .into_iter()
        .filter(|d| bg.entails(d, goal))
        .filter(|d| one_step_reductions(d).iter().all(|r| !bg.entails(r, goal)))
        .collect();
    Subsumees {
        concepts,
        truncated: reg.truncated,
    }
}

fn all_names(tbox: &TBox, obs: &ConceptInclusion) -> BTreeSet<ConceptName> {
    let mut sig = tbox.signature();
    sig.extend(&obs.signature());
    sig.concepts
}

/// Whether `h` arises from some `D1`, `D2` and weak homomorphism as a
/// connection-minimal hypothesis.
pub fn check_connection_minimal(
    tbox: &TBox,
    obs: &ConceptInclusion,
    h: &Hypothesis,
    cfg: OracleConfig,
) -> Result<bool, OracleError> {
    let bg = Background::new(tbox);
    let names = all_names(tbox, obs);
    let subsumees = minimal_subsumees(&bg, &obs.rhs, &names, cfg);
    let unravelled = bg.unravel(&obs.lhs, &names, cfg.max_tree_depth);
    for d2 in &subsumees.concepts {
        let tree = DescriptionTree::from_concept(d2);
        for phi in weak_homomorphisms(&tree, &unravelled) {
            let slots: Vec<(&BTreeSet<ConceptName>, &BTreeSet<ConceptName>)> = tree
                .nodes()
                .map(|w| (unravelled.label(phi.get(w)), tree.label(w)))
                .collect();
            let mut covered = BTreeSet::new();
            if assign(&bg, h, &slots, &mut covered) {
                return Ok(true);
            }
        }
    }
    if subsumees.truncated {
        Err(OracleError::BoundsExhausted)
    } else {
        Ok(false)
    }
}

/// Backtracking choice per `D2` node: omit it (its CI is entailed for the
/// full available label) or let it produce one axiom of `h`.
fn assign<'h>(
    bg: &Background,
    h: &'h Hypothesis,
    slots: &[(&BTreeSet<ConceptName>, &BTreeSet<ConceptName>)],
    covered: &mut BTreeSet<&'h FlatCi>,
) -> bool {
    let Some(((available, wanted), rest)) = slots.split_first() else {
        return covered.len() == h.axioms.len();
    };
    let conj = |ns: &BTreeSet<ConceptName>| Concept::and(ns.iter().cloned().map(Concept::atomic));
    if bg.entails(&conj(available), &conj(wanted)) && assign(bg, h, rest, covered) {
        return true;
    }
    for a in &h.axioms {
        let fits = a.lhs.is_subset(available)
            && FlatCi::new(a.lhs.clone(), (*wanted).clone()).as_ref() == Some(a)
            && !bg.entails(&conj(&a.lhs), &conj(&a.rhs));
        if fits {
            let fresh = covered.insert(a);
            if assign(bg, h, rest, covered) {
                return true;
            }
            if fresh {
                covered.remove(a);
            }
        }
    }
    false
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub hypotheses: Vec<Hypothesis>,
    /// The tree bounds cut the search short.
    pub truncated: bool,
}

/// Packed connection-minimal hypotheses over `abducibles`, taking `D1` as
/// the unravelled canonical model of the observation's left side. A `D2`
/// node with a non-empty label must land on a node with a non-empty label.
pub fn enumerate_packed(
    tbox: &TBox,
    obs: &ConceptInclusion,
    abducibles: &BTreeSet<ConceptName>,
    cfg: OracleConfig,
) -> Enumeration {
    let bg = Background::new(tbox);
    let subsumees = minimal_subsumees(&bg, &obs.rhs, abducibles, cfg);
    let unravelled = bg.unravel(&obs.lhs, abducibles, cfg.max_tree_depth);
    let mut out = BTreeSet::new();
    for d2 in &subsumees.concepts {
        let tree = DescriptionTree::from_concept(d2);
        'phi: for phi in weak_homomorphisms(&tree, &unravelled) {
            let mut axioms = Vec::new();
            for w in tree.nodes() {
                let wanted = tree.label(w);
                if wanted.is_empty() {
                    continue;
                }
                let available = unravelled.label(phi.get(w));
                if available.is_empty() {
                    continue 'phi;
                }
                axioms.extend(FlatCi::new(available.clone(), wanted.clone()));
            }
            if !axioms.is_empty() {
                out.insert(Hypothesis::new(axioms));
            }
        }
    }
    Enumeration {
        hypotheses: out.into_iter().collect(),
        truncated: subsumees.truncated,
    }
}
