//! Clausal first-order translation of a prepared abduction problem.
//!
//! Concept names become unary predicates, roles binary ones. The background
//! is translated twice: once as is and once with every concept name replaced
//! by a barred duplicate (`A'`), with distinct Skolem functions for the copy.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::concept::{Concept, ConceptInclusion, ConceptName, RoleName};
use crate::preprocess::PreparedProblem;
use crate::reasoner::SubsumptionTable;

/// A unary Skolem function `sk{index}`, or `skd{index}` for the barred copy.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SkolemFn {
    pub index: u32,
    pub duplicate: bool,
}

impl fmt::Display for SkolemFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.duplicate { "skd" } else { "sk" };
        write!(f, "{tag}{}", self.index)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// The Skolem constant `sk0`.
    Const,
    App(SkolemFn, Box<Term>),
    Var(u8),
}

impl Term {
    pub fn app(f: SkolemFn, arg: Term) -> Self {
        Term::App(f, Box::new(arg))
    }

    /// `f1(f2(…(sk0)))` for the functions listed outermost first.
    pub fn chain(fns: &[SkolemFn]) -> Self {
        fns.iter().rev().fold(Term::Const, |t, f| Term::app(*f, t))
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Const | Term::Var(_) => 0,
            Term::App(_, t) => 1 + t.depth(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Const => true,
            Term::Var(_) => false,
            Term::App(_, t) => t.is_ground(),
        }
    }

    pub fn var(&self) -> Option<u8> {
        match self {
            Term::Const => None,
            Term::Var(v) => Some(*v),
            Term::App(_, t) => t.var(),
        }
    }

    /// Skolem functions from the outside in.
    pub fn functions(&self) -> Vec<SkolemFn> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Term::App(f, t) = cur {
            out.push(*f);
            cur = t;
        }
        out
    }

    pub fn has_duplicate_function(&self) -> bool {
        match self {
            Term::App(f, t) => f.duplicate || t.has_duplicate_function(),
            _ => false,
        }
    }

    pub fn substitute(&self, subst: &BTreeMap<u8, Term>) -> Term {
        match self {
            Term::Const => Term::Const,
            Term::Var(v) => subst.get(v).cloned().unwrap_or(Term::Var(*v)),
            Term::App(f, t) => Term::app(*f, t.substitute(subst)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const => f.write_str("sk0"),
            Term::Var(0) => f.write_str("x"),
            Term::Var(1) => f.write_str("y"),
            Term::Var(v) => write!(f, "v{v}"),
            Term::App(g, t) => write!(f, "{g}({t})"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    Concept { name: ConceptName, duplicate: bool },
    Role(RoleName),
}

impl Predicate {
    pub fn concept(name: &ConceptName, duplicate: bool) -> Self {
        Predicate::Concept {
            name: name.clone(),
            duplicate,
        }
    }

    pub fn is_duplicate(&self) -> bool {
        matches!(
            self,
            Predicate::Concept {
                duplicate: true,
                ..
            }
        )
    }

    pub fn arity(&self) -> usize {
        match self {
            Predicate::Concept { .. } => 1,
            Predicate::Role(_) => 2,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Concept {
                name,
                duplicate: false,
            } => write!(f, "{name}"),
            Predicate::Concept {
                name,
                duplicate: true,
            } => write!(f, "{name}'"),
            Predicate::Role(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub predicate: Predicate,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn concept(positive: bool, name: &ConceptName, duplicate: bool, arg: Term) -> Self {
        Literal {
            positive,
            predicate: Predicate::concept(name, duplicate),
            args: vec![arg],
        }
    }

    pub fn role(positive: bool, role: &RoleName, from: Term, to: Term) -> Self {
        Literal {
            positive,
            predicate: Predicate::Role(role.clone()),
            args: vec![from, to],
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            ..self.clone()
        }
    }

    pub fn substitute(&self, subst: &BTreeMap<u8, Term>) -> Literal {
        Literal {
            positive: self.positive,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| t.substitute(subst)).collect(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_char('~')?;
        }
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_char(',')?;
            }
            write!(f, "{a}")?;
        }
        f.write_char(')')
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Origin of a clause: one of the seven input shapes, or a resolvent.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Shape {
    /// `C1(sk0)`
    I1,
    /// `¬C2'(sk0)`
    I2,
    /// `¬A(x) ∨ B(x)`
    I3,
    /// `¬A1(x) ∨ ¬A2(x) ∨ B(x)`
    I4,
    /// `¬r(x,y) ∨ ¬A(y) ∨ B(x)`
    I5,
    /// `¬A(x) ∨ r(x,sk(x))`
    I6,
    /// `¬A(x) ∨ B(sk(x))`
    I7,
    Derived,
}

/// A set of literals, kept sorted and duplicate-free.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
    shape: Shape,
}

impl Clause {
    pub fn new(literals: impl IntoIterator<Item = Literal>, shape: Shape) -> Self {
        let set: BTreeSet<Literal> = literals.into_iter().collect();
        Clause {
            literals: set.into_iter().collect(),
            shape,
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_ground(&self) -> bool {
        self.literals.iter().all(Literal::is_ground)
    }

    pub fn depth(&self) -> usize {
        self.literals.iter().map(Literal::depth).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<u8> {
        self.literals
            .iter()
            .flat_map(|l| l.args.iter().filter_map(Term::var))
            .collect()
    }

    pub fn positive_count(&self) -> usize {
        self.literals.iter().filter(|l| l.positive).count()
    }

    pub fn is_horn(&self) -> bool {
        self.positive_count() <= 1
    }

    pub fn is_tautology(&self) -> bool {
        self.literals
            .iter()
            .any(|l| l.positive && self.literals.contains(&l.negated()))
    }

    /// Same literals, different shape tag.
    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("[]");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [{:?}]", self.shape)
    }
}

/// The axiom behind a Skolem function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkolemInfo {
    pub axiom: ConceptInclusion,
    pub role: RoleName,
    pub filler: ConceptName,
}

/// The clause set of a translated problem.
#[derive(Clone, Debug)]
pub struct ClauseSet {
    pub clauses: Vec<Clause>,
    pub skolems: BTreeMap<SkolemFn, SkolemInfo>,
    /// Distinct concept predicates occurring in the clauses.
    pub n_concepts: usize,
    /// Existential restrictions occurring in the translated TBox.
    pub m_existentials: usize,
    pub abducibles: BTreeSet<ConceptName>,
    pub lhs_name: ConceptName,
    pub rhs_name: ConceptName,
    pub presaturated: bool,
}

impl ClauseSet {
    /// Maximal Skolem nesting depth that needs to be explored: `n × m`.
    pub fn depth_bound(&self) -> usize {
        self.n_concepts * self.m_existentials
    }

    /// One clause per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.clauses {
            let _ = writeln!(out, "{c}");
        }
        out
    }
}

fn x() -> Term {
    Term::Var(0)
}

fn y() -> Term {
    Term::Var(1)
}

fn name_of(c: &Concept) -> &ConceptName {
    c.as_atomic()
        .expect("prepared TBox is normalized and ⊤-free")
}

fn translate_axiom(
    ci: &ConceptInclusion,
    dup: bool,
    skolem: Option<SkolemFn>,
    out: &mut Vec<Clause>,
) {
    let neg = |c: &Concept, t: Term| Literal::concept(false, name_of(c), dup, t);
    let pos = |c: &Concept, t: Term| Literal::concept(true, name_of(c), dup, t);
    match (&ci.lhs, &ci.rhs) {
        (Concept::Conjunction(parts), rhs) => {
            let [l, r] = parts.as_slice() else {
                unreachable!("binary conjunction")
            };
            out.push(Clause::new(
                [neg(l, x()), neg(r, x()), pos(rhs, x())],
                Shape::I4,
            ));
        }
        (Concept::Existential(role, filler), rhs) => {
            out.push(Clause::new(
                [
                    Literal::role(false, role, x(), y()),
                    neg(filler, y()),
                    pos(rhs, x()),
                ],
                Shape::I5,
            ));
        }
        (lhs, Concept::Existential(role, filler)) => {
            let sk = skolem.expect("existential rhs has a Skolem function");
            let target = Term::app(sk, x());
            out.push(Clause::new(
                [
                    neg(lhs, x()),
                    Literal::role(true, role, x(), target.clone()),
                ],
                Shape::I6,
            ));
            out.push(Clause::new([neg(lhs, x()), pos(filler, target)], Shape::I7));
        }
        (lhs, rhs) => out.push(Clause::new([neg(lhs, x()), pos(rhs, x())], Shape::I3)),
    }
}

/// Translates `T ⊎ T'` together with `C1(sk0)` and `¬C2'(sk0)`.
pub fn translate(p: &PreparedProblem) -> ClauseSet {
    let mut skolems = BTreeMap::new();
    let mut per_axiom = Vec::new();
    let mut next = 1;
    for ci in p.tbox.iter() {
        if let Concept::Existential(role, filler) = &ci.rhs {
            let sk = SkolemFn {
                index: next,
                duplicate: false,
            };
            next += 1;
            let info = SkolemInfo {
                axiom: ci.clone(),
                role: role.clone(),
                filler: name_of(filler).clone(),
            };
            skolems.insert(sk, info.clone());
            skolems.insert(
                SkolemFn {
                    duplicate: true,
                    ..sk
                },
                info,
            );
            per_axiom.push(Some(sk));
        } else {
            per_axiom.push(None);
        }
    }

    let mut clauses = vec![
        Clause::new(
            [Literal::concept(true, &p.lhs_name, false, Term::Const)],
            Shape::I1,
        ),
        Clause::new(
            [Literal::concept(false, &p.rhs_name, true, Term::Const)],
            Shape::I2,
        ),
    ];
    for dup in [false, true] {
        for (ci, sk) in p.tbox.iter().zip(&per_axiom) {
            let sk = sk.map(|s| SkolemFn {
                duplicate: dup,
                ..s
            });
            translate_axiom(ci, dup, sk, &mut clauses);
        }
    }

    let predicates: BTreeSet<&Predicate> = clauses
        .iter()
        .flat_map(|c| c.literals.iter().map(|l| &l.predicate))
        .filter(|p| matches!(p, Predicate::Concept { .. }))
        .collect();
    let n_concepts = predicates.len();
    ClauseSet {
        clauses,
        skolems,
        n_concepts,
        m_existentials: p.tbox.existential_count(),
        abducibles: p.abducibles.clone(),
        lhs_name: p.lhs_name.clone(),
        rhs_name: p.rhs_name.clone(),
        presaturated: false,
    }
}

/// Adds `¬A(x) ∨ B(x)` and `¬A'(x) ∨ B'(x)` for every entailed `A ⊑ B`, `A ≠ B`.
pub fn presaturate(phi: &ClauseSet, table: &SubsumptionTable) -> ClauseSet {
    let mut out = phi.clone();
    let present: BTreeSet<Clause> = phi
        .clauses
        .iter()
        .map(|c| c.clone().with_shape(Shape::I3))
        .collect();
    for dup in [false, true] {
        for (a, b) in table.strict_pairs() {
            let c = Clause::new(
                [
                    Literal::concept(false, a, dup, x()),
                    Literal::concept(true, b, dup, x()),
                ],
                Shape::I3,
            );
            if !present.contains(&c) {
                out.clauses.push(c);
            }
        }
    }
    out.presaturated = true;
    out
}
