//! The leaf representation: an edge-disjoint decomposition of a
//! many-ended tree into its leafless core and the leafy branches
//! hanging off it. Branches are described as rooted shapes over
//! occurrence classes; finitely many shape groups exist even when the
//! number of branch instances is infinite.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::finite_tree::{FiniteTree, VertexId};
use crate::presentation::{
    ClassGraph, Count, Multiplicity, OccurrenceClass, TreePresentation,
};
use crate::pruning::{pruning_trace, EndCategory, RankValue};

/// A rooted shape over classes: a state with child shapes and their
/// multiplicities. Always rayless and of bounded depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeNode {
    pub state: String,
    pub children: Vec<(ShapeNode, Multiplicity)>,
}

impl ShapeNode {
    pub fn leaf(state: &str) -> ShapeNode {
        ShapeNode { state: state.to_string(), children: Vec::new() }
    }

    /// Longest descending path length from this node.
    pub fn height(&self) -> u32 {
        self.children.iter().map(|(c, _)| 1 + c.height()).max().unwrap_or(0)
    }

    /// Canonical code: child entries rendered as multiplicity followed
    /// by the child's code, sorted; state names are ignored, so two
    /// shapes get equal codes iff they are isomorphic as rooted trees
    /// with multiplicities.
    pub fn canonical(&self) -> String {
        let mut entries: Vec<String> = self
            .children
            .iter()
            .map(|(c, m)| {
                let mut e = m.to_string();
                e.push_str(&c.canonical());
                e
            })
            .collect();
        entries.sort();
        let mut out = String::from("(");
        for e in entries {
            out.push_str(&e);
        }
        out.push(')');
        out
    }

    /// Materialises the shape as a finite tree with multiplicities
    /// capped; ids are assigned preorder starting at `next`.
    fn materialise(
        &self,
        cap: u32,
        parent: Option<VertexId>,
        next: &mut u64,
        edges: &mut Vec<(VertexId, VertexId)>,
    ) -> VertexId {
        let id = VertexId(*next);
        *next += 1;
        if let Some(p) = parent {
            edges.push((p, id));
        }
        for (c, m) in &self.children {
            for _ in 0..m.capped(cap) {
                c.materialise(cap, Some(id), next, edges);
            }
        }
        id
    }

    /// The shape as a finite tree (multiplicities capped), returning
    /// the root id.
    pub fn to_tree(&self, cap: u32) -> (FiniteTree, VertexId) {
        let mut next = 0u64;
        let mut edges = Vec::new();
        let root = self.materialise(cap, None, &mut next, &mut edges);
        let t = if edges.is_empty() {
            FiniteTree::single(root)
        } else {
            FiniteTree::from_edges(&edges).expect("shape materialisation is a tree")
        };
        (t, root)
    }
}

/// A leafy branch: the attachment core class, the branch root's state,
/// and the non-core subtrees hanging at the attachment vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafyBranchShape {
    pub attachment: OccurrenceClass,
    pub root_state: String,
    pub children: Vec<(ShapeNode, Multiplicity)>,
}

impl LeafyBranchShape {
    /// The branch as a rooted shape (root = attachment vertex).
    pub fn as_shape(&self) -> ShapeNode {
        ShapeNode { state: self.root_state.clone(), children: self.children.clone() }
    }

    /// Canonical code of the branch as a rooted shape; attachment class
    /// and state names do not participate.
    pub fn canonical(&self) -> String {
        self.as_shape().canonical()
    }

    /// Longest root-to-leaf distance within the branch.
    pub fn height(&self) -> u32 {
        self.as_shape().height()
    }
}

/// One group of identical branches: a shape plus how many instances of
/// it occur in the unfolding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchGroup {
    pub shape: LeafyBranchShape,
    pub occurrences: Count,
}

/// The decomposition of a many-ended tree: a presentation of the
/// leafless core plus the branch groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafRepresentation {
    pub core: TreePresentation,
    pub branches: Vec<BranchGroup>,
}

/// The leaf representation does not apply: the tree is rayless or has
/// only one end, so the core is empty.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NoCore;

impl fmt::Display for NoCore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "leaf representation not applicable: the tree has an empty core")
    }
}

fn class_of(p: &TreePresentation, g: &ClassGraph, idx: usize) -> OccurrenceClass {
    let (s, up) = g.classes[idx];
    OccurrenceClass { state: p.state_name(s).to_string(), up_ray: up }
}

/// Shape of the non-core region below a non-core class.
fn down_shape(p: &TreePresentation, g: &ClassGraph, core: &[bool], class: usize) -> ShapeNode {
    debug_assert!(!core[class]);
    let (s, _) = g.classes[class];
    let children = g.edges[class]
        .iter()
        .map(|&(c, m)| {
            debug_assert!(!core[c], "branch regions do not touch the core below");
            (down_shape(p, g, core, c), m)
        })
        .collect();
    ShapeNode { state: p.state_name(s).to_string(), children }
}

/// Computes the leaf representation of a many-ended presentation.
pub fn leaf_representation(p: &TreePresentation) -> Result<LeafRepresentation, NoCore> {
    let g = ClassGraph::build(p);
    let n = g.classes.len();
    let core: Vec<bool> = (0..n).map(|c| g.is_core(p, c)).collect();
    if !core.iter().any(|&c| c) {
        return Err(NoCore);
    }

    let mut branches: Vec<BranchGroup> = Vec::new();
    // when the root is not core, the topmost core class hosts the
    // upward branch; its downward non-core children fold into the same
    // branch
    let mut upward_attachment: Option<usize> = None;

    if !core[0] {
        // unique chain of non-core classes from the root occurrence
        // down to the topmost core vertex
        let mut chain = Vec::new();
        let mut cur = 0usize;
        loop {
            if core[cur] {
                break;
            }
            chain.push(cur);
            let mut next = None;
            for &(c, _) in &g.edges[cur] {
                let (cs, _) = g.classes[c];
                if g.ray[cs] {
                    debug_assert!(next.is_none(), "chain direction must be unique");
                    next = Some(c);
                }
            }
            cur = next.expect("a many-ended tree has a direction toward the core");
        }
        let attach = cur;
        upward_attachment = Some(attach);

        // the chain rooted at the attachment, with off-chain subtrees
        let mut up_node: Option<ShapeNode> = None;
        for &ci in &chain {
            let (s, _) = g.classes[ci];
            let mut children: Vec<(ShapeNode, Multiplicity)> = g.edges[ci]
                .iter()
                .filter(|&&(c, _)| {
                    let (cs, _) = g.classes[c];
                    !g.ray[cs]
                })
                .map(|&(c, m)| (down_shape(p, &g, &core, c), m))
                .collect();
            if let Some(prev) = up_node.take() {
                children.push((prev, Multiplicity::Finite(1)));
            }
            up_node = Some(ShapeNode { state: p.state_name(s).to_string(), children });
        }

        let (s, _) = g.classes[attach];
        let mut children = alloc::vec![(up_node.expect("non-empty chain"), Multiplicity::Finite(1))];
        for &(c, m) in &g.edges[attach] {
            if !core[c] {
                children.push((down_shape(p, &g, &core, c), m));
            }
        }
        branches.push(BranchGroup {
            shape: LeafyBranchShape {
                attachment: class_of(p, &g, attach),
                root_state: p.state_name(s).to_string(),
                children,
            },
            occurrences: Count::Finite(1),
        });
    }

    // downward branches at every other core class with non-core children
    for z in 0..n {
        if !core[z] || Some(z) == upward_attachment {
            continue;
        }
        let non_core_children: Vec<(ShapeNode, Multiplicity)> = g.edges[z]
            .iter()
            .filter(|&&(c, _)| !core[c])
            .map(|&(c, m)| (down_shape(p, &g, &core, c), m))
            .collect();
        if non_core_children.is_empty() {
            continue;
        }
        let (s, _) = g.classes[z];
        branches.push(BranchGroup {
            shape: LeafyBranchShape {
                attachment: class_of(p, &g, z),
                root_state: p.state_name(s).to_string(),
                children: non_core_children,
            },
            occurrences: g.occurrence_count(z),
        });
    }

    let core_p = core_restriction(p, &g, &core);
    Ok(LeafRepresentation { core: core_p, branches })
}

/// The core as a presentation of its own: one state per core class,
/// keeping only edges between core classes.
fn core_restriction(p: &TreePresentation, g: &ClassGraph, core: &[bool]) -> TreePresentation {
    let n = g.classes.len();
    // name each core class; disambiguate states that occur in two
    // core classes
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for (ci, &(s, _)) in g.classes.iter().enumerate() {
        if core[ci] {
            *counts.entry(s).or_insert(0) += 1;
        }
    }
    let name_of = |ci: usize| -> String {
        let (s, up) = g.classes[ci];
        if counts.get(&s).copied().unwrap_or(0) > 1 {
            let mut n = p.state_name(s).to_string();
            n.push_str(if up { "_u" } else { "_d" });
            n
        } else {
            p.state_name(s).to_string()
        }
    };
    let root_class = if core[0] {
        0
    } else {
        // topmost core class: the unique core class with up_ray = false
        (0..n)
            .find(|&c| core[c] && !g.classes[c].1)
            .expect("a many-ended tree has a topmost core class")
    };
    let mut defs: Vec<(String, Vec<(String, Multiplicity)>)> = Vec::new();
    let mut order: Vec<usize> = alloc::vec![root_class];
    for c in 0..n {
        if core[c] && c != root_class {
            order.push(c);
        }
    }
    for &c in &order {
        let children = g.edges[c]
            .iter()
            .filter(|&&(d, _)| core[d])
            .map(|&(d, m)| (name_of(d), m))
            .collect();
        defs.push((name_of(c), children));
    }
    TreePresentation::new(defs, &name_of(root_class)).expect("core restriction is valid")
}

/// Rank of a branch as a standalone finite tree, by capped simulation.
pub fn branch_rank(b: &LeafyBranchShape) -> u32 {
    branch_rank_capped(b, 2)
}

/// Branch rank with an explicit cap (2 and 3 must agree).
pub fn branch_rank_capped(b: &LeafyBranchShape, cap: u32) -> u32 {
    let (t, _) = b.as_shape().to_tree(cap);
    match pruning_trace(&t).1 {
        RankValue::Finite(r) => r,
        RankValue::Omega => unreachable!("branches are finite after capping"),
    }
}

/// Total number of branch instances, omega-absorbing.
pub fn branch_count(rep: &LeafRepresentation) -> Count {
    rep.branches
        .iter()
        .fold(Count::Finite(0), |acc, b| acc.add(b.occurrences))
}

/// Maximum distance of a leaf from the core: the largest branch height.
pub fn max_leaf_distance(rep: &LeafRepresentation) -> u32 {
    rep.branches.iter().map(|b| b.shape.height()).max().unwrap_or(0)
}

/// Convenience: the end category gate plus decomposition.
pub fn leaf_representation_checked(
    p: &TreePresentation,
) -> Result<LeafRepresentation, NoCore> {
    match crate::pruning::end_category(p) {
        EndCategory::ManyEnds => leaf_representation(p),
        _ => Err(NoCore),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_dsl;
    use crate::pruning::{is_leafless, rank_of_presentation};

    #[test]
    fn binary_has_no_branches() {
        let p = parse_dsl("state r { q:2 } state q { q:2 } root r").unwrap();
        let rep = leaf_representation(&p).unwrap();
        assert!(rep.branches.is_empty());
        assert_eq!(branch_count(&rep), Count::Finite(0));
        assert_eq!(max_leaf_distance(&rep), 0);
        assert!(is_leafless(&rep.core));
    }

    #[test]
    fn comb_has_no_core() {
        let p = parse_dsl("state c { c:1 t:1 } state t { } root c").unwrap();
        assert_eq!(leaf_representation(&p), Err(NoCore));
    }

    #[test]
    fn double_ray_with_one_pendant() {
        let p = parse_dsl("state m { a:2 t:1 } state a { a:1 } state t { } root m").unwrap();
        let rep = leaf_representation(&p).unwrap();
        assert_eq!(rep.branches.len(), 1);
        let b = &rep.branches[0];
        assert_eq!(b.occurrences, Count::Finite(1));
        assert_eq!(b.shape.height(), 1);
        assert_eq!(branch_rank(&b.shape), 1);
        assert_eq!(branch_count(&rep), Count::Finite(1));
        assert_eq!(max_leaf_distance(&rep), 1);
        assert!(is_leafless(&rep.core));
    }

    #[test]
    fn pendant_everywhere_gives_omega_branches() {
        let p = parse_dsl(
            "state m { a:1 b:1 t:1 } state a { a:1 t:1 } state b { b:1 t:1 } state t { } root m",
        )
        .unwrap();
        let rep = leaf_representation(&p).unwrap();
        assert_eq!(branch_count(&rep), Count::Omega);
        assert_eq!(max_leaf_distance(&rep), 1);
    }

    #[test]
    fn branch_ranks() {
        // double ray with a pendant path of length 2
        let p = parse_dsl("state m { a:2 t:1 } state a { a:1 } state t { u:1 } state u { } root m")
            .unwrap();
        let rep = leaf_representation(&p).unwrap();
        assert_eq!(rep.branches.len(), 1);
        assert_eq!(branch_rank(&rep.branches[0].shape), 2);
        assert_eq!(max_leaf_distance(&rep), 2);

        // branch = root with omega pendant length-2 paths: same rank as
        // the star-of-P2
        let p = parse_dsl(
            "state m { a:2 s:1 } state a { a:1 } state s { t:w } state t { u:1 } state u { } root m",
        )
        .unwrap();
        let rep = leaf_representation(&p).unwrap();
        assert_eq!(rep.branches.len(), 1);
        assert_eq!(branch_rank(&rep.branches[0].shape), 3);
        assert_eq!(branch_rank_capped(&rep.branches[0].shape, 3), 3);
    }

    #[test]
    fn rank_equals_max_leaf_distance() {
        for text in [
            "state m { a:2 t:1 } state a { a:1 } state t { } root m",
            "state m { a:2 t:1 } state a { a:1 } state t { u:1 } state u { } root m",
            "state m { a:1 b:1 t:1 } state a { a:1 t:1 } state b { b:1 t:1 } state t { } root m",
            "state r { q:2 } state q { q:2 } root r",
            "state x { y:1 } state y { b:1 } state b { b:2 } root x",
        ] {
            let p = parse_dsl(text).unwrap();
            let rep = leaf_representation(&p).unwrap();
            assert_eq!(
                rank_of_presentation(&p),
                RankValue::Finite(max_leaf_distance(&rep)),
                "{text}"
            );
        }
    }

    #[test]
    fn upward_branch_shape() {
        let p = parse_dsl("state x { y:1 } state y { b:1 } state b { b:2 } root x").unwrap();
        let rep = leaf_representation(&p).unwrap();
        assert_eq!(rep.branches.len(), 1);
        let b = &rep.branches[0];
        assert_eq!(b.occurrences, Count::Finite(1));
        // chain x - y above the topmost core vertex: height 2
        assert_eq!(b.shape.height(), 2);
        assert!(is_leafless(&rep.core));
    }

    #[test]
    fn shape_canonical_ignores_names() {
        let a = ShapeNode {
            state: "a".into(),
            children: alloc::vec![(ShapeNode::leaf("x"), Multiplicity::Finite(2))],
        };
        let b = ShapeNode {
            state: "zz".into(),
            children: alloc::vec![(ShapeNode::leaf("yy"), Multiplicity::Finite(2))],
        };
        assert_eq!(a.canonical(), b.canonical());
        let c = ShapeNode {
            state: "a".into(),
            children: alloc::vec![(ShapeNode::leaf("x"), Multiplicity::Omega)],
        };
        assert_ne!(a.canonical(), c.canonical());
    }
}
