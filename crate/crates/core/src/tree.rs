//! Description trees, node mappings, the conjunct-dropping order and
//! (weak / TBox-) homomorphisms between trees.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::concept::{Concept, ConceptName, RoleName};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("mapping is not a weak homomorphism (node {node})")]
    NotWeakHomomorphism { node: NodeId },
}

#[derive(Clone, PartialEq, Eq)]
struct Node {
    label: BTreeSet<ConceptName>,
    parent: Option<(NodeId, RoleName)>,
    children: Vec<NodeId>,
}

/// A finite labeled tree with root 0.
///
/// Every child has a larger id than its parent; trees built by
/// [`DescriptionTree::from_concept`] are numbered in preorder.
#[derive(Clone, PartialEq, Eq)]
pub struct DescriptionTree {
    nodes: Vec<Node>,
}

impl DescriptionTree {
    /// A single root with the given label.
    pub fn leaf(label: BTreeSet<ConceptName>) -> Self {
        Self {
            nodes: vec![Node {
                label,
                parent: None,
                children: Vec::new(),
            }],
        }
    }

    pub fn from_concept(concept: &Concept) -> Self {
        let mut tree = Self::leaf(BTreeSet::new());
        tree.fill(0, concept);
        tree
    }

    fn fill(&mut self, node: NodeId, concept: &Concept) {
        for conjunct in concept.conjuncts() {
            match conjunct {
                Concept::Atomic(name) => {
                    self.nodes[node].label.insert(name.clone());
                }
                Concept::Existential(role, filler) => {
                    let child = self.add_child(node, role.clone(), BTreeSet::new());
                    self.fill(child, filler);
                }
                Concept::Top | Concept::Conjunction(_) => {
                    unreachable!("canonical conjuncts are atoms or existentials")
                }
            }
        }
    }

    pub fn add_child(
        &mut self,
        parent: NodeId,
        role: RoleName,
        label: BTreeSet<ConceptName>,
    ) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            label,
            parent: Some((parent, role)),
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn to_concept(&self) -> Concept {
        self.concept_at(0)
    }

    /// The concept represented by the subtree rooted at `node`.
    pub fn concept_at(&self, node: NodeId) -> Concept {
        let n = &self.nodes[node];
        let atoms = n.label.iter().cloned().map(Concept::Atomic);
        let edges = n.children.iter().map(|&c| {
            let role = self.role(c).expect("child has a role").clone();
            Concept::exists(role, self.concept_at(c))
        });
        Concept::and(atoms.chain(edges))
    }

    pub const fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> core::ops::Range<NodeId> {
        0..self.nodes.len()
    }

    pub fn label(&self, node: NodeId) -> &BTreeSet<ConceptName> {
        &self.nodes[node].label
    }

    pub fn label_mut(&mut self, node: NodeId) -> &mut BTreeSet<ConceptName> {
        &mut self.nodes[node].label
    }

    /// The label as a conjunction (⊤ when empty).
    pub fn label_concept(&self, node: NodeId) -> Concept {
        Concept::and(self.nodes[node].label.iter().cloned().map(Concept::Atomic))
    }

    pub fn children(&self, node: NodeId) -> &[NodeId] {
        &self.nodes[node].children
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.nodes[node].parent.as_ref().map(|(p, _)| *p)
    }

    /// Role of the edge entering `node`.
    pub fn role(&self, node: NodeId) -> Option<&RoleName> {
        self.nodes[node].parent.as_ref().map(|(_, r)| r)
    }

    pub fn depth(&self, node: NodeId) -> usize {
        let mut d = 0;
        let mut cur = node;
        while let Some(p) = self.parent(cur) {
            d += 1;
            cur = p;
        }
        d
    }

    pub fn height(&self) -> usize {
        self.nodes().map(|n| self.depth(n)).max().unwrap_or(0)
    }

    /// All `(parent, role, child)` edges in child order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, &RoleName, NodeId)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(c, n)| n.parent.as_ref().map(|(p, r)| (*p, r, c)))
    }
}

impl fmt::Debug for DescriptionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for id in self.nodes() {
            let indent = self.depth(id) * 2;
            write!(f, "{:indent$}{id}", "")?;
            if let Some(r) = self.role(id) {
                write!(f, " <{r}>")?;
            }
            writeln!(f, " {:?}", self.label(id))?;
        }
        Ok(())
    }
}

/// A total map from the nodes of a source tree to the nodes of a target tree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct NodeMapping(Vec<NodeId>);

impl NodeMapping {
    pub fn new(targets: Vec<NodeId>) -> Self {
        Self(targets)
    }

    pub fn get(&self, source: NodeId) -> NodeId {
        self.0[source]
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn is_weak(
    phi: &NodeMapping,
    source: &DescriptionTree,
    target: &DescriptionTree,
) -> Result<(), TreeError> {
    if phi.len() != source.len() {
        return Err(TreeError::NotWeakHomomorphism {
            node: phi.len().min(source.len()),
        });
    }
    if phi.get(0) != target.root() {
        return Err(TreeError::NotWeakHomomorphism { node: 0 });
    }
    for (p, role, c) in source.edges() {
        let image = phi.get(c);
        let ok = image < target.len()
            && target.parent(image) == Some(phi.get(p))
            && target.role(image) == Some(role);
        if !ok {
            return Err(TreeError::NotWeakHomomorphism { node: c });
        }
    }
    Ok(())
}

/// Every root- and edge-preserving map from `source` into `target`, ordered
/// lexicographically by image vector.
pub fn weak_homomorphisms(source: &DescriptionTree, target: &DescriptionTree) -> Vec<NodeMapping> {
    let mut out = Vec::new();
    let mut images = vec![0; source.len()];
    extend_homomorphism(source, target, 1, &mut images, &mut out);
    out
}

fn extend_homomorphism(
    source: &DescriptionTree,
    target: &DescriptionTree,
    next: NodeId,
    images: &mut Vec<NodeId>,
    out: &mut Vec<NodeMapping>,
) {
    if next == source.len() {
        out.push(NodeMapping(images.clone()));
        return;
    }
    let parent = source.parent(next).expect("non-root has a parent");
    let role = source.role(next);
    for &cand in target.children(images[parent]) {
        if target.role(cand) == role {
            images[next] = cand;
            extend_homomorphism(source, target, next + 1, images, out);
        }
    }
}

/// Whether the weak homomorphism `phi` from `source` into `target` satisfies
/// the label condition: `entails(⊓ l_target(φ(w)), ⊓ l_source(w))` for all `w`.
pub fn is_t_homomorphism(
    phi: &NodeMapping,
    source: &DescriptionTree,
    target: &DescriptionTree,
    mut entails: impl FnMut(&Concept, &Concept) -> bool,
) -> Result<bool, TreeError> {
    is_weak(phi, source, target)?;
    Ok(source.nodes().all(|w| {
        let want = source.label(w);
        let have = target.label(phi.get(w));
        want.is_subset(have) || entails(&target.label_concept(phi.get(w)), &source.label_concept(w))
    }))
}

/// `smaller ⪯⊓ larger`: `smaller` arises from `larger` by dropping conjuncts
/// at any depth.
pub fn preceq_and(smaller: &Concept, larger: &Concept) -> bool {
    let small = smaller.conjuncts();
    let large = larger.conjuncts();
    if small.len() > large.len() {
        return false;
    }
    let mut used = vec![false; large.len()];
    match_conjuncts(small, large, &mut used)
}

fn match_conjuncts(small: &[Concept], large: &[Concept], used: &mut [bool]) -> bool {
    let Some((first, rest)) = small.split_first() else {
        return true;
    };
    for (i, cand) in large.iter().enumerate() {
        if used[i] || !conjunct_embeds(first, cand) {
            continue;
        }
        used[i] = true;
        if match_conjuncts(rest, large, used) {
            return true;
        }
        used[i] = false;
    }
    false
}

fn conjunct_embeds(small: &Concept, large: &Concept) -> bool {
    match (small, large) {
        (Concept::Atomic(a), Concept::Atomic(b)) => a == b,
        (Concept::Existential(r, c), Concept::Existential(s, d)) => r == s && preceq_and(c, d),
        _ => false,
    }
}

/// All concepts obtained by dropping exactly one conjunct at one position.
///
/// Every `d ⪯⊓ c` with `d ≠ c` lies below one of these, so a property
/// closed downwards under ⪯⊓ only needs to be checked on this set.
pub fn one_step_reductions(c: &Concept) -> Vec<Concept> {
    let parts = c.conjuncts();
    let mut out = BTreeSet::new();
    for (i, part) in parts.iter().enumerate() {
        let others = || {
            parts
                .iter()
                .enumerate()
                .filter(move |(j, _)| *j != i)
                .map(|(_, p)| p.clone())
        };
        out.insert(Concept::and(others()));
        if let Concept::Existential(role, filler) = part {
            for reduced in one_step_reductions(filler) {
                out.insert(Concept::and(
                    others().chain([Concept::exists(role.clone(), reduced)]),
                ));
            }
        }
    }
    out.remove(c);
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn a(n: &str) -> Concept {
        Concept::atomic(n)
    }

    fn ex(r: &str, c: Concept) -> Concept {
        Concept::exists(r, c)
    }

    #[test]
    fn figure_one_left_tree() {
        let d1 = Concept::and([ex("employment", a("Chair")), ex("qualification", a("PhD"))]);
        let t = DescriptionTree::from_concept(&d1);
        assert_eq!(t.len(), 3);
        assert!(t.label(0).is_empty());
        assert_eq!(t.role(1).unwrap().as_str(), "employment");
        assert!(t.label(1).contains(&ConceptName::new("Chair")));
        assert_eq!(t.to_concept(), d1);
    }

    #[test]
    fn nested_tree_shape() {
        let c = Concept::and([
            a("L"),
            a("H"),
            ex(
                "r1",
                Concept::and([a("A"), ex("r2", a("M")), ex("r2", a("B"))]),
            ),
        ]);
        let t = DescriptionTree::from_concept(&c);
        assert_eq!(t.height(), 2);
        assert_eq!(t.label(0).len(), 2);
        assert_eq!(t.to_concept(), c);
    }

    #[test]
    fn empty_label_is_top() {
        let t = DescriptionTree::leaf(BTreeSet::new());
        assert_eq!(t.to_concept(), Concept::Top);
    }

    #[test]
    fn figure_one_homomorphism_is_unique() {
        let left = DescriptionTree::from_concept(&Concept::and([
            ex("employment", a("Chair")),
            ex("qualification", a("PhD")),
        ]));
        let right = DescriptionTree::from_concept(&Concept::and([
            ex("employment", a("ResearchPosition")),
            ex("qualification", a("Diploma")),
        ]));
        let homs = weak_homomorphisms(&right, &left);
        assert_eq!(homs, vec![NodeMapping::new(vec![0, 1, 2])]);
    }

    #[test]
    fn mismatched_roles_have_no_homomorphism() {
        let s = DescriptionTree::from_concept(&ex("r", a("A")));
        let t = DescriptionTree::from_concept(&ex("s", a("B")));
        assert!(weak_homomorphisms(&s, &t).is_empty());
        let single = DescriptionTree::from_concept(&a("A"));
        assert_eq!(weak_homomorphisms(&single, &single).len(), 1);
    }

    #[test]
    fn non_weak_mapping_is_rejected() {
        let s = DescriptionTree::from_concept(&ex("r", a("A")));
        let t = DescriptionTree::from_concept(&ex("s", a("A")));
        let err = is_t_homomorphism(&NodeMapping::new(vec![0, 1]), &s, &t, |_, _| true);
        assert_eq!(err, Err(TreeError::NotWeakHomomorphism { node: 1 }));
    }

    #[test]
    fn empty_labels_are_always_t_homomorphic() {
        let s = DescriptionTree::from_concept(&ex("r", Concept::Top));
        let homs = weak_homomorphisms(&s, &s);
        assert_eq!(is_t_homomorphism(&homs[0], &s, &s, |_, _| false), Ok(true));
    }

    #[test]
    fn preceq_examples() {
        let small = ex("r'", a("B"));
        let large = Concept::and([ex("r", a("A")), ex("r'", Concept::and([a("B"), a("B'")]))]);
        assert!(preceq_and(&small, &large));
        assert!(!preceq_and(&large, &small));
        assert!(!preceq_and(&ex("r", a("A")), &ex("s", a("A"))));
        assert!(preceq_and(&Concept::Top, &a("A")));
    }

    #[test]
    fn preceq_needs_distinct_targets() {
        let small = Concept::and([ex("r", a("A")), ex("r", Concept::and([a("A"), a("B")]))]);
        let large = ex("r", Concept::and([a("A"), a("B")]));
        assert!(!preceq_and(&small, &large));
    }

    #[test]
    fn reductions_of_nested_concept() {
        let c = Concept::and([a("E"), ex("r", Concept::and([a("F"), a("G")]))]);
        let got: Vec<_> = one_step_reductions(&c)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(
            got,
            ["E", "E and r some F", "E and r some G", "r some (F and G)"]
        );
    }
}
