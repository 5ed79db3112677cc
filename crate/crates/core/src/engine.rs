//! Set-of-support resolution computing positive and negative ground prime
//! implicates of a translated problem.
//!
//! Every inference has a ground premise, resolvents carry at most one
//! variable and no term nests deeper than the configured bound. Under that
//! regime unification degenerates to matching a pattern against a ground
//! literal, so ground terms are interned and compared by id.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::clock::{Clock, Deadline};
use crate::concept::{ConceptName, RoleName};
use crate::fol::{Clause, ClauseSet, Literal, Predicate, Shape, SkolemFn, Term};

type TermId = u32;
type PredId = u32;
const SK0: TermId = 0;

struct TermBank {
    nodes: Vec<(Option<SkolemFn>, TermId, usize)>,
    index: BTreeMap<(SkolemFn, TermId), TermId>,
}

impl TermBank {
    fn new() -> Self {
        Self {
            nodes: vec![(None, SK0, 0)],
            index: BTreeMap::new(),
        }
    }

    fn app(&mut self, f: SkolemFn, arg: TermId) -> TermId {
        if let Some(&t) = self.index.get(&(f, arg)) {
            return t;
        }
        let id = self.nodes.len() as TermId;
        let depth = self.depth(arg) + 1;
        self.nodes.push((Some(f), arg, depth));
        self.index.insert((f, arg), id);
        id
    }

    fn depth(&self, t: TermId) -> usize {
        self.nodes[t as usize].2
    }

    fn head(&self, t: TermId) -> Option<(SkolemFn, TermId)> {
        let (f, arg, _) = self.nodes[t as usize];
        f.map(|f| (f, arg))
    }

    fn intern(&mut self, t: &Term) -> Option<TermId> {
        match t {
            Term::Const => Some(SK0),
            Term::Var(_) => None,
            Term::App(f, arg) => {
                let a = self.intern(arg)?;
                Some(self.app(*f, a))
            }
        }
    }

    fn to_term(&self, t: TermId) -> Term {
        match self.head(t) {
            None => Term::Const,
            Some((f, arg)) => Term::app(f, self.to_term(arg)),
        }
    }

    fn has_duplicate_function(&self, t: TermId) -> bool {
        match self.head(t) {
            None => false,
            Some((f, arg)) => f.duplicate || self.has_duplicate_function(arg),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Arg {
    Ground(TermId),
    Var(u8),
    Fn(SkolemFn, u8),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Lit {
    positive: bool,
    pred: PredId,
    first: Arg,
    second: Option<Arg>,
}

impl Lit {
    fn args(&self) -> impl Iterator<Item = Arg> {
        core::iter::once(self.first).chain(self.second)
    }

    fn is_ground(&self) -> bool {
        self.args().all(|a| matches!(a, Arg::Ground(_)))
    }
}

#[derive(Clone)]
struct PredInfo {
    predicate: Predicate,
    duplicate: Option<bool>,
}

#[derive(Clone, Debug)]
struct EClause {
    lits: Vec<Lit>,
    ground: bool,
    /// Some argument is a ground term, which licenses inferences with
    /// non-ground partners.
    anchored: bool,
    /// Some literal is over a barred concept name.
    barred: bool,
    depth: usize,
}

impl EClause {
    fn is_positive_unit(&self) -> bool {
        matches!(self.lits.as_slice(), [l] if l.positive)
    }

    /// Whether two clauses may be resolved: one premise must contain a
    /// ground term, and on the unbarred side, which is definite Horn, one
    /// premise must be a positive unit.
    fn licenses(&self, other: &EClause) -> bool {
        (self.anchored || other.anchored)
            && (self.barred || other.barred || self.is_positive_unit() || other.is_positive_unit())
    }
}

/// Where a premise of an inference comes from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Premise {
    /// Index into the input clause list.
    Input(usize),
    /// Index into the derived clause list.
    Derived(usize),
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Premise::Input(i) => write!(f, "i{i}"),
            Premise::Derived(i) => write!(f, "d{i}"),
        }
    }
}

/// One binary resolution step.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Inference {
    pub left: Premise,
    pub right: Premise,
    pub resolvent: usize,
}

#[derive(Clone, Debug)]
pub struct SaturationConfig {
    /// Maximal Skolem nesting depth of any literal.
    pub depth_bound: usize,
    pub record_trace: bool,
}

/// A ground role atom `role(from, to)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct RoleAtom {
    pub role: RoleName,
    pub from: Term,
    pub to: Term,
}

impl fmt::Display for RoleAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.role, self.from, self.to)
    }
}

/// A negative ground clause `¬B1'(t1) ∨ … ∨ ¬Bm'(tm)`, stored as
/// `(term, name)` pairs with the bar dropped.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct NegativeImplicate(BTreeSet<(Term, ConceptName)>);

impl NegativeImplicate {
    pub fn new(literals: impl IntoIterator<Item = (Term, ConceptName)>) -> Self {
        Self(literals.into_iter().collect())
    }

    pub fn literals(&self) -> &BTreeSet<(Term, ConceptName)> {
        &self.0
    }

    pub fn terms(&self) -> BTreeSet<&Term> {
        self.0.iter().map(|(t, _)| t).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &NegativeImplicate) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl fmt::Display for NegativeImplicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (t, n)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "~{n}'({t})")?;
        }
        Ok(())
    }
}

/// Positive and negative ground prime implicates over the abducibles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimeImplicates {
    /// `A(t)` atoms, grouped by term.
    pub positive: BTreeMap<Term, BTreeSet<ConceptName>>,
    pub roles: BTreeSet<RoleAtom>,
    pub negative: BTreeSet<NegativeImplicate>,
    /// False when the soft limit interrupted saturation.
    pub complete: bool,
}

impl PrimeImplicates {
    pub fn positive_atoms(&self) -> impl Iterator<Item = (&Term, &ConceptName)> {
        self.positive
            .iter()
            .flat_map(|(t, ns)| ns.iter().map(move |n| (t, n)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EngineStats {
    pub given: usize,
    pub generated: usize,
    pub retained: usize,
    pub forward_subsumed: usize,
    pub backward_subsumed: usize,
    pub discarded_mixed: usize,
    pub discarded_bound: usize,
    pub discarded_vars: usize,
    pub max_term_depth: usize,
}

#[derive(Clone, Debug)]
pub struct SaturationOutput {
    pub implicates: PrimeImplicates,
    pub stats: EngineStats,
    /// Input clauses as used (indices of [`Premise::Input`]).
    pub inputs: Vec<Clause>,
    /// Retained derived clauses, populated only with `record_trace`.
    pub derived: Vec<Clause>,
    pub trace: Vec<Inference>,
}

impl SaturationOutput {
    /// One line per inference: `d7 <- i3 + d2 : clause`.
    pub fn trace_lines(&self) -> Vec<String> {
        self.trace
            .iter()
            .map(|inf| {
                let clause = self
                    .derived
                    .get(inf.resolvent)
                    .map(|c| format!("{c}"))
                    .unwrap_or_default();
                format!(
                    "d{} <- {} + {} : {}",
                    inf.resolvent, inf.left, inf.right, clause
                )
            })
            .collect()
    }
}

struct Engine<'a> {
    terms: TermBank,
    preds: Vec<PredInfo>,
    pred_ids: BTreeMap<Predicate, PredId>,
    abducibles: &'a BTreeSet<ConceptName>,
    bound: usize,

    inputs: Vec<EClause>,
    input_by_pred: BTreeMap<(PredId, bool), Vec<(usize, usize)>>,

    clauses: Vec<EClause>,
    alive: Vec<bool>,
    processed: Vec<bool>,
    ground_lit_index: BTreeMap<Lit, Vec<usize>>,
    nonground_seen: BTreeSet<Vec<Lit>>,
    proc_ground_by_pred: BTreeMap<(PredId, bool), Vec<(usize, usize)>>,
    proc_nonground_by_pred: BTreeMap<(PredId, bool), Vec<(usize, usize)>>,
    sos: BinaryHeap<Reverse<(usize, usize, usize)>>,

    stats: EngineStats,
    trace: Option<Vec<Inference>>,
}

impl<'a> Engine<'a> {
    fn pred(&mut self, p: &Predicate) -> PredId {
        if let Some(&id) = self.pred_ids.get(p) {
            return id;
        }
        let id = self.preds.len() as PredId;
        let duplicate = match p {
            Predicate::Concept { duplicate, .. } => Some(*duplicate),
            Predicate::Role(_) => None,
        };
        self.preds.push(PredInfo {
            predicate: p.clone(),
            duplicate,
        });
        self.pred_ids.insert(p.clone(), id);
        id
    }

    fn arg(&mut self, t: &Term) -> Arg {
        self.try_arg(t)
            .expect("only shallow non-ground terms are supported")
    }

    fn try_arg(&mut self, t: &Term) -> Option<Arg> {
        Some(match t {
            Term::Var(v) => Arg::Var(*v),
            Term::App(f, inner) => match **inner {
                Term::Var(v) => Arg::Fn(*f, v),
                _ => Arg::Ground(self.terms.intern(t)?),
            },
            Term::Const => Arg::Ground(SK0),
        })
    }

    fn term(&self, a: Arg) -> Term {
        match a {
            Arg::Ground(t) => self.terms.to_term(t),
            Arg::Var(v) => Term::Var(v),
            Arg::Fn(f, v) => Term::app(f, Term::Var(v)),
        }
    }

    fn literal(&self, l: &Lit) -> Literal {
        Literal {
            positive: l.positive,
            predicate: self.preds[l.pred as usize].predicate.clone(),
            args: l.args().map(|a| self.term(a)).collect(),
        }
    }

    fn convert(&mut self, c: &Clause) -> EClause {
        let lits: Vec<Lit> = c
            .literals()
            .iter()
            .map(|l| Lit {
                positive: l.positive,
                pred: self.pred(&l.predicate),
                first: self.arg(&l.args[0]),
                second: l.args.get(1).map(|t| self.arg(t)),
            })
            .collect();
        self.finish(lits)
    }

    fn finish(&self, mut lits: Vec<Lit>) -> EClause {
        lits.sort();
        lits.dedup();
        let ground = lits.iter().all(Lit::is_ground);
        let anchored = lits
            .iter()
            .flat_map(Lit::args)
            .any(|a| matches!(a, Arg::Ground(_)));
        let barred = lits
            .iter()
            .any(|l| self.preds[l.pred as usize].duplicate == Some(true));
        let depth = lits
            .iter()
            .flat_map(Lit::args)
            .map(|a| match a {
                Arg::Ground(t) => self.terms.depth(t),
                Arg::Var(_) => 0,
                Arg::Fn(..) => 1,
            })
            .max()
            .unwrap_or(0);
        EClause {
            lits,
            ground,
            anchored,
            barred,
            depth,
        }
    }

    fn to_clause(&self, c: &EClause) -> Clause {
        Clause::new(c.lits.iter().map(|l| self.literal(l)), Shape::Derived)
    }

    fn is_mixed(&self, lits: &[Lit]) -> bool {
        let mut seen = [false, false];
        for l in lits {
            if let Some(d) = self.preds[l.pred as usize].duplicate {
                seen[d as usize] = true;
            }
        }
        seen[0] && seen[1]
    }

    /// Matches `pattern` against the ground literal `ground` (ignoring
    /// polarity), extending `subst`.
    fn match_lit(&self, pattern: &Lit, ground: &Lit, subst: &mut [Option<TermId>; 2]) -> bool {
        if pattern.pred != ground.pred {
            return false;
        }
        let pairs = core::iter::once((pattern.first, ground.first))
            .chain(pattern.second.zip(ground.second));
        for (p, g) in pairs {
            let Arg::Ground(g) = g else { return false };
            let (v, target) = match p {
                Arg::Ground(t) => {
                    if t != g {
                        return false;
                    }
                    continue;
                }
                Arg::Var(v) => (v, g),
                Arg::Fn(f, v) => match self.terms.head(g) {
                    Some((h, inner)) if h == f => (v, inner),
                    _ => return false,
                },
            };
            let slot = &mut subst[v as usize];
            match slot {
                Some(bound) if *bound != target => return false,
                _ => *slot = Some(target),
            }
        }
        true
    }

    fn apply(&mut self, lit: &Lit, subst: &[Option<TermId>; 2]) -> Option<Lit> {
        let mut map = |a: Arg| -> Option<Arg> {
            Some(match a {
                Arg::Ground(_) => a,
                Arg::Var(v) => subst[v as usize].map_or(a, Arg::Ground),
                Arg::Fn(f, v) => match subst[v as usize] {
                    None => a,
                    Some(t) => {
                        if self.terms.depth(t) + 1 > self.bound {
                            return None;
                        }
                        Arg::Ground(self.terms.app(f, t))
                    }
                },
            })
        };
        let first = map(lit.first)?;
        let second = match lit.second {
            Some(a) => Some(map(a)?),
            None => None,
        };
        Some(Lit {
            first,
            second,
            ..*lit
        })
    }

    /// Resolves `pattern_clause` (on literal `pi`) with ground `ground_clause`
    /// (on literal `gi`).
    fn resolve_pair(
        &mut self,
        pattern_clause: &EClause,
        pi: usize,
        ground_clause: &EClause,
        gi: usize,
    ) -> Option<EClause> {
        let p = pattern_clause.lits[pi];
        let g = ground_clause.lits[gi];
        if p.positive == g.positive {
            return None;
        }
        let mut subst = [None, None];
        if !self.match_lit(&p, &g, &mut subst) {
            return None;
        }
        let mut lits = Vec::with_capacity(pattern_clause.lits.len() + ground_clause.lits.len());
        for (i, l) in pattern_clause.lits.iter().enumerate() {
            if i != pi {
                match self.apply(l, &subst) {
                    Some(l) => lits.push(l),
                    None => {
                        self.stats.discarded_bound += 1;
                        return None;
                    }
                }
            }
        }
        lits.extend(
            ground_clause
                .lits
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != gi)
                .map(|(_, l)| *l),
        );
        self.admit(lits)
    }

    /// Resolves two clauses that both contain variables by unification.
    fn unify_pair(
        &mut self,
        left: &EClause,
        li: usize,
        right: &EClause,
        ri: usize,
    ) -> Option<EClause> {
        if left.lits[li].positive == right.lits[ri].positive
            || left.lits[li].pred != right.lits[ri].pred
        {
            return None;
        }
        let offset = 2;
        let shift: BTreeMap<u8, Term> = (0..offset).map(|v| (v, Term::Var(v + offset))).collect();
        let left_lits: Vec<Literal> = left.lits.iter().map(|l| self.literal(l)).collect();
        let right_lits: Vec<Literal> = right
            .lits
            .iter()
            .map(|l| self.literal(l).substitute(&shift))
            .collect();
        let mut subst = BTreeMap::new();
        if !unify_literals(&left_lits[li], &right_lits[ri], &mut subst) {
            return None;
        }
        let rest = left_lits
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != li)
            .chain(right_lits.iter().enumerate().filter(|(k, _)| *k != ri))
            .map(|(_, l)| l.clone());
        let resolved = apply_subst(rest, &subst);
        if resolved
            .iter()
            .flat_map(|l| &l.args)
            .any(|t| t.depth() > self.bound)
        {
            self.stats.discarded_bound += 1;
            return None;
        }
        let mut lits = Vec::with_capacity(resolved.len());
        for l in &resolved {
            let first = self.try_arg(&l.args[0]);
            let second = l.args.get(1).map(|t| self.try_arg(t));
            let (Some(first), Some(second)) = (first, second.map_or(Some(None), |a| a.map(Some)))
            else {
                self.stats.discarded_vars += 1;
                return None;
            };
            lits.push(Lit {
                positive: l.positive,
                pred: self.pred(&l.predicate),
                first,
                second,
            });
        }
        self.admit(lits)
    }

    /// Applies the variable, signature, depth and tautology checks to a
    /// fresh resolvent.
    fn admit(&mut self, mut lits: Vec<Lit>) -> Option<EClause> {
        self.stats.generated += 1;
        let vars: BTreeSet<u8> = lits
            .iter()
            .flat_map(Lit::args)
            .filter_map(|a| match a {
                Arg::Var(v) | Arg::Fn(_, v) => Some(v),
                Arg::Ground(_) => None,
            })
            .collect();
        if vars.len() > 1 {
            self.stats.discarded_vars += 1;
            return None;
        }
        if let Some(&v) = vars.first() {
            if v != 0 {
                for l in &mut lits {
                    for a in [&mut l.first].into_iter().chain(l.second.as_mut()) {
                        match a {
                            Arg::Var(w) | Arg::Fn(_, w) if *w == v => *w = 0,
                            _ => {}
                        }
                    }
                }
            }
        }
        if self.is_mixed(&lits) {
            self.stats.discarded_mixed += 1;
            return None;
        }
        let c = self.finish(lits);
        if c.depth > self.bound {
            self.stats.discarded_bound += 1;
            return None;
        }
        let tautology = c.lits.iter().any(|l| {
            l.positive
                && c.lits.contains(&Lit {
                    positive: false,
                    ..*l
                })
        });
        (!tautology).then_some(c)
    }

    fn forward_subsumed(&self, c: &EClause) -> bool {
        if !c.ground {
            return self.nonground_seen.contains(&c.lits);
        }
        c.lits.iter().any(|l| {
            self.ground_lit_index.get(l).is_some_and(|ids| {
                ids.iter()
                    .any(|&id| self.alive[id] && is_subset(&self.clauses[id].lits, &c.lits))
            })
        })
    }

    fn backward_subsume(&mut self, c: &EClause, own: usize) {
        let Some(ids) = self.ground_lit_index.get(&c.lits[0]) else {
            return;
        };
        let victims: Vec<usize> = ids
            .iter()
            .copied()
            .filter(|&id| id != own && self.alive[id] && is_subset(&c.lits, &self.clauses[id].lits))
            .collect();
        for id in victims {
            self.alive[id] = false;
            self.stats.backward_subsumed += 1;
        }
    }

    fn keep(&mut self, c: EClause, from: Option<(Premise, Premise)>) {
        if self.forward_subsumed(&c) {
            self.stats.forward_subsumed += 1;
            return;
        }
        let id = self.clauses.len();
        if c.ground {
            if !c.lits.is_empty() {
                self.backward_subsume(&c, id);
            }
            for l in &c.lits {
                self.ground_lit_index.entry(*l).or_default().push(id);
            }
        } else {
            self.nonground_seen.insert(c.lits.clone());
        }
        self.stats.max_term_depth = self.stats.max_term_depth.max(c.depth);
        self.stats.retained += 1;
        self.sos.push(Reverse((c.depth, c.lits.len(), id)));
        self.clauses.push(c);
        self.alive.push(true);
        self.processed.push(false);
        if let (Some(trace), Some((left, right))) = (self.trace.as_mut(), from) {
            trace.push(Inference {
                left,
                right,
                resolvent: id,
            });
        }
    }

    /// Resolves `left` on literal `li` with `right` on literal `ri`, using
    /// one-way matching whenever one side is ground.
    fn resolve_lits(
        &mut self,
        left: &EClause,
        li: usize,
        right: &EClause,
        ri: usize,
    ) -> Option<EClause> {
        if right.ground {
            self.resolve_pair(left, li, right, ri)
        } else if left.ground {
            self.resolve_pair(right, ri, left, li)
        } else {
            self.unify_pair(left, li, right, ri)
        }
    }

    fn process(&mut self, id: usize) {
        self.processed[id] = true;
        self.stats.given += 1;
        let given = self.clauses[id].clone();
        let mut out: Vec<(EClause, Premise)> = Vec::new();
        for (gi, l) in given.lits.iter().enumerate() {
            let key = (l.pred, !l.positive);
            if given.anchored {
                for &(ci, li) in self
                    .input_by_pred
                    .get(&key)
                    .map(Vec::as_slice)
                    .unwrap_or(&[])
                    .to_vec()
                    .iter()
                {
                    let partner = self.inputs[ci].clone();
                    if !given.licenses(&partner) {
                        continue;
                    }
                    if let Some(r) = self.resolve_lits(&given, gi, &partner, li) {
                        out.push((r, Premise::Input(ci)));
                    }
                }
            }
            let partners: Vec<(usize, usize)> =
                [&self.proc_ground_by_pred, &self.proc_nonground_by_pred]
                    .into_iter()
                    .flat_map(|index| index.get(&key).into_iter().flatten().copied())
                    .collect();
            for (ci, li) in partners {
                if !self.alive[ci] {
                    continue;
                }
                let partner = self.clauses[ci].clone();
                if !given.licenses(&partner) {
                    continue;
                }
                if let Some(r) = self.resolve_lits(&given, gi, &partner, li) {
                    out.push((r, Premise::Derived(ci)));
                }
            }
        }
        let index = if given.ground {
            &mut self.proc_ground_by_pred
        } else {
            &mut self.proc_nonground_by_pred
        };
        for (li, l) in given.lits.iter().enumerate() {
            index
                .entry((l.pred, l.positive))
                .or_default()
                .push((id, li));
        }
        for (r, partner) in out {
            self.keep(r, Some((Premise::Derived(id), partner)));
        }
    }
}

fn is_subset(small: &[Lit], large: &[Lit]) -> bool {
    small.len() <= large.len() && small.iter().all(|l| large.binary_search(l).is_ok())
}

/// Whether an input clause takes part in saturation.
///
/// With presaturation the original `∃r.A ⊑ B` clauses are not needed for
/// the positive implicates, and the barred Skolem clauses only produce
/// terms over barred functions that no positive literal can match.
fn used_input(c: &Clause, presaturated: bool) -> bool {
    if !presaturated {
        return true;
    }
    let duplicate = c.literals().iter().any(|l| l.predicate.is_duplicate());
    match c.shape() {
        Shape::I5 => duplicate,
        Shape::I6 | Shape::I7 => !duplicate,
        _ => true,
    }
}

/// Saturates `phi` from its ground clauses and collects the prime implicates.
pub fn saturate(
    phi: &ClauseSet,
    cfg: &SaturationConfig,
    clock: &dyn Clock,
    soft_limit: Deadline,
) -> SaturationOutput {
    let mut engine = Engine {
        terms: TermBank::new(),
        preds: Vec::new(),
        pred_ids: BTreeMap::new(),
        abducibles: &phi.abducibles,
        bound: cfg.depth_bound,
        inputs: Vec::new(),
        input_by_pred: BTreeMap::new(),
        clauses: Vec::new(),
        alive: Vec::new(),
        processed: Vec::new(),
        ground_lit_index: BTreeMap::new(),
        nonground_seen: BTreeSet::new(),
        proc_ground_by_pred: BTreeMap::new(),
        proc_nonground_by_pred: BTreeMap::new(),
        sos: BinaryHeap::new(),
        stats: EngineStats::default(),
        trace: cfg.record_trace.then(Vec::new),
    };

    let mut used_inputs = Vec::new();
    let mut seeds = Vec::new();
    for c in &phi.clauses {
        if c.is_tautology() {
            continue;
        }
        if c.is_ground() {
            seeds.push(c.clone());
        } else if used_input(c, phi.presaturated) {
            let ec = engine.convert(c);
            let idx = engine.inputs.len();
            for (li, l) in ec.lits.iter().enumerate() {
                engine
                    .input_by_pred
                    .entry((l.pred, l.positive))
                    .or_default()
                    .push((idx, li));
            }
            engine.inputs.push(ec);
            used_inputs.push(c.clone());
        }
    }
    for c in seeds {
        let ec = engine.convert(&c);
        engine.keep(ec, None);
    }

    let mut complete = true;
    let mut iterations = 0usize;
    while let Some(Reverse((_, _, id))) = engine.sos.pop() {
        iterations += 1;
        if iterations.is_multiple_of(64) && soft_limit.expired(clock) {
            complete = false;
            break;
        }
        if !engine.alive[id] {
            continue;
        }
        engine.process(id);
    }

    let implicates = collect(&engine, complete);
    let derived = if cfg.record_trace {
        engine.clauses.iter().map(|c| engine.to_clause(c)).collect()
    } else {
        Vec::new()
    };
    SaturationOutput {
        implicates,
        stats: engine.stats.clone(),
        inputs: used_inputs,
        derived,
        trace: engine.trace.take().unwrap_or_default(),
    }
}

fn collect(engine: &Engine<'_>, complete: bool) -> PrimeImplicates {
    let mut out = PrimeImplicates {
        complete,
        ..Default::default()
    };
    let mut negatives: Vec<NegativeImplicate> = Vec::new();
    for (id, c) in engine.clauses.iter().enumerate() {
        if !engine.alive[id] || !c.ground || c.lits.is_empty() {
            continue;
        }
        let first = c.lits[0];
        let info = &engine.preds[first.pred as usize];
        if c.lits.len() == 1 && first.positive {
            let Arg::Ground(t) = first.first else {
                continue;
            };
            match (&info.predicate, first.second) {
                (
                    Predicate::Concept {
                        name,
                        duplicate: false,
                    },
                    None,
                ) if engine.abducibles.contains(name) => {
                    out.positive
                        .entry(engine.terms.to_term(t))
                        .or_default()
                        .insert(name.clone());
                }
                (Predicate::Role(role), Some(Arg::Ground(to))) => {
                    out.roles.insert(RoleAtom {
                        role: role.clone(),
                        from: engine.terms.to_term(t),
                        to: engine.terms.to_term(to),
                    });
                }
                _ => {}
            }
            continue;
        }
        let mut lits = Vec::new();
        let all_abducible_negative = c.lits.iter().all(|l| {
            let Arg::Ground(t) = l.first else {
                return false;
            };
            match &engine.preds[l.pred as usize].predicate {
                Predicate::Concept { name, .. }
                    if !l.positive && l.second.is_none() && engine.abducibles.contains(name) =>
                {
                    if engine.terms.has_duplicate_function(t) {
                        return false;
                    }
                    lits.push((engine.terms.to_term(t), name.clone()));
                    true
                }
                _ => false,
            }
        });
        if all_abducible_negative {
            negatives.push(NegativeImplicate::new(lits));
        }
    }
    negatives.sort_by_key(NegativeImplicate::len);
    for (i, n) in negatives.iter().enumerate() {
        if !negatives[..i]
            .iter()
            .any(|m| m.len() < n.len() && m.is_subset(n))
        {
            out.negative.insert(n.clone());
        }
    }
    out
}

fn unify(a: &Term, b: &Term, subst: &mut BTreeMap<u8, Term>) -> bool {
    let a = resolve_var(a, subst);
    let b = resolve_var(b, subst);
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs(*x, t, subst) {
                return false;
            }
            subst.insert(*x, t.clone());
            true
        }
        (Term::Const, Term::Const) => true,
        (Term::App(f, s), Term::App(g, t)) => f == g && unify(s, t, subst),
        _ => false,
    }
}

fn resolve_var(t: &Term, subst: &BTreeMap<u8, Term>) -> Term {
    match t {
        Term::Var(v) => match subst.get(v) {
            Some(u) => resolve_var(u, subst),
            None => t.clone(),
        },
        _ => t.clone(),
    }
}

fn occurs(v: u8, t: &Term, subst: &BTreeMap<u8, Term>) -> bool {
    match resolve_var(t, subst) {
        Term::Var(w) => w == v,
        Term::Const => false,
        Term::App(_, inner) => occurs(v, &inner, subst),
    }
}

fn fully(t: &Term, subst: &BTreeMap<u8, Term>) -> Term {
    match resolve_var(t, subst) {
        Term::App(f, inner) => Term::app(f, fully(&inner, subst)),
        other => other,
    }
}

fn apply_subst(lits: impl Iterator<Item = Literal>, subst: &BTreeMap<u8, Term>) -> Vec<Literal> {
    lits.map(|l| Literal {
        args: l.args.iter().map(|t| fully(t, subst)).collect(),
        ..l
    })
    .collect()
}

/// Renames variables to `0, 1, …` in order of first occurrence.
fn normalize_vars(lits: Vec<Literal>) -> Clause {
    let mut order: BTreeMap<u8, u8> = BTreeMap::new();
    let sorted = Clause::new(lits, Shape::Derived);
    for l in sorted.literals() {
        for t in &l.args {
            if let Some(v) = t.var() {
                let next = order.len() as u8;
                order.entry(v).or_insert(next);
            }
        }
    }
    let renaming = order
        .into_iter()
        .map(|(from, to)| (from, Term::Var(to)))
        .collect();
    Clause::new(
        sorted.literals().iter().map(|l| l.substitute(&renaming)),
        Shape::Derived,
    )
}

fn unify_literals(a: &Literal, b: &Literal, subst: &mut BTreeMap<u8, Term>) -> bool {
    a.predicate == b.predicate
        && a.args.len() == b.args.len()
        && a.args.iter().zip(&b.args).all(|(s, t)| unify(s, t, subst))
}

/// All binary resolvents of two clauses, with premises renamed apart.
pub fn resolve(left: &Clause, right: &Clause) -> Vec<Clause> {
    let offset = left.vars().last().map_or(0, |v| v + 1);
    let shift: BTreeMap<u8, Term> = right
        .vars()
        .into_iter()
        .map(|v| (v, Term::Var(v + offset)))
        .collect();
    let right_lits: Vec<Literal> = right
        .literals()
        .iter()
        .map(|l| l.substitute(&shift))
        .collect();
    let mut out = BTreeSet::new();
    for (i, l) in left.literals().iter().enumerate() {
        for (j, r) in right_lits.iter().enumerate() {
            if l.positive == r.positive {
                continue;
            }
            let mut subst = BTreeMap::new();
            if !unify_literals(l, r, &mut subst) {
                continue;
            }
            let rest = left
                .literals()
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, x)| x.clone())
                .chain(
                    right_lits
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, x)| x.clone()),
                );
            out.insert(normalize_vars(apply_subst(rest, &subst)));
        }
    }
    out.into_iter().collect()
}

/// Merges unifiable same-sign literals until none remain.
pub fn factorize(c: &Clause) -> Clause {
    let mut current = c.clone();
    'outer: loop {
        let lits = current.literals();
        for i in 0..lits.len() {
            for j in i + 1..lits.len() {
                if lits[i].positive != lits[j].positive {
                    continue;
                }
                let mut subst = BTreeMap::new();
                if unify_literals(&lits[i], &lits[j], &mut subst) {
                    current = normalize_vars(apply_subst(lits.iter().cloned(), &subst));
                    continue 'outer;
                }
            }
        }
        return current.with_shape(c.shape());
    }
}
