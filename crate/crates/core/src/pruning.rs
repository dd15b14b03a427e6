//! The leaf-pruning recursion: repeatedly delete all vertices of degree
//! at most one. For finite trees the recursion is run explicitly; for
//! presentations the fixpoint (the leafless core) and the rank are
//! computed on the finite class graph.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::finite_tree::{FiniteTree, VertexId};
use crate::presentation::{
    classify_unfold, ClassGraph, Multiplicity, OccurrenceClass, TreePresentation, Unfolding,
};

/// The rank of a tree: a natural number, or omega for one-ended trees.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum RankValue {
    Finite(u32),
    Omega,
}

impl fmt::Display for RankValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankValue::Finite(n) => write!(f, "{n}"),
            RankValue::Omega => write!(f, "omega"),
        }
    }
}

/// How many ends the presented tree has: none, exactly one, or more
/// than one.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EndCategory {
    ZeroEnds,
    OneEnd,
    ManyEnds,
}

impl fmt::Display for EndCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndCategory::ZeroEnds => write!(f, "zero-ends"),
            EndCategory::OneEnd => write!(f, "one-end"),
            EndCategory::ManyEnds => write!(f, "many-ends"),
        }
    }
}

/// The record of a finite pruning run.
#[derive(Clone, Debug)]
pub struct PruningTrace {
    /// Vertices removed in each round, in order; every round non-empty.
    pub rounds: Vec<BTreeSet<VertexId>>,
    /// Round (1-based) in which each removed vertex went away.
    pub removal_round: BTreeMap<VertexId, u32>,
    /// The fixpoint tree (empty for finite inputs).
    pub fixpoint: FiniteTree,
}

/// One pruning round: simultaneously removes every vertex of degree at
/// most one (leaves and isolated vertices).
pub fn prune_step(t: &FiniteTree) -> FiniteTree {
    let keep: BTreeSet<VertexId> = t.vertices().filter(|&v| t.degree(v) >= 2).collect();
    t.induced(&keep)
}

/// Iterates `prune_step` to the fixpoint. The rank is the number of
/// rounds with a non-empty removal; for finite trees the fixpoint is
/// the empty tree.
pub fn pruning_trace(t: &FiniteTree) -> (PruningTrace, RankValue) {
    let mut rounds = Vec::new();
    let mut removal_round = BTreeMap::new();
    let mut cur = t.clone();
    let mut round = 0u32;
    loop {
        let next = prune_step(&cur);
        let removed: BTreeSet<VertexId> =
            cur.vertices().filter(|v| !next.contains(*v)).collect();
        if removed.is_empty() {
            break;
        }
        round += 1;
        for &v in &removed {
            removal_round.insert(v, round);
        }
        rounds.push(removed);
        cur = next;
    }
    let rank = RankValue::Finite(round);
    (PruningTrace { rounds, removal_round, fixpoint: cur }, rank)
}

/// The presentation-level description of the leafless core: the set of
/// occurrence classes whose vertices lie on double rays, plus the set
/// of states whose subtrees contain rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreClassification {
    pub core_classes: BTreeSet<OccurrenceClass>,
    pub ray_states: BTreeSet<alloc::string::String>,
}

impl CoreClassification {
    pub fn is_empty(&self) -> bool {
        self.core_classes.is_empty()
    }
}

/// Classifies the occurrence classes of a presentation: a class is core
/// iff its occurrences have at least two incident directions containing
/// rays (up flag plus ray-bearing child directions, with multiplicity).
pub fn classify_core(p: &TreePresentation) -> CoreClassification {
    let g = ClassGraph::build(p);
    let core_classes = (0..g.classes.len())
        .filter(|&c| g.is_core(p, c))
        .map(|c| {
            let (s, up) = g.classes[c];
            OccurrenceClass { state: p.state_name(s).to_string(), up_ray: up }
        })
        .collect();
    let mut reachable_states = BTreeSet::new();
    for &(s, _) in &g.classes {
        reachable_states.insert(s);
    }
    let ray_states = reachable_states
        .into_iter()
        .filter(|&s| g.ray[s])
        .map(|s| p.state_name(s).to_string())
        .collect();
    CoreClassification { core_classes, ray_states }
}

/// End count category: rayless, one end, or more than one end.
pub fn end_category(p: &TreePresentation) -> EndCategory {
    let cls = classify_core(p);
    if cls.ray_states.is_empty() {
        EndCategory::ZeroEnds
    } else if cls.core_classes.is_empty() {
        EndCategory::OneEnd
    } else {
        EndCategory::ManyEnds
    }
}

/// Materialises a rayless presentation as a finite tree with every
/// multiplicity capped. A vertex's removal round only depends on having
/// zero, one or at least two live neighbour directions, so cap 2 is
/// exact; cap 3 is used for validation.
pub(crate) fn capped_tree(p: &TreePresentation, cap: u32) -> FiniteTree {
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    let root = VertexId(0);
    adj.insert(root, BTreeSet::new());
    let mut next = 1u64;
    // (vertex, state) work list; the state graph is acyclic for rayless
    // presentations, so this terminates
    let mut stack = alloc::vec![(root, p.root_state())];
    while let Some((v, s)) = stack.pop() {
        for &(c, m) in p.children(s) {
            for _ in 0..m.capped(cap) {
                let id = VertexId(next);
                next += 1;
                adj.entry(v).or_default().insert(id);
                adj.entry(id).or_default().insert(v);
                stack.push((id, c));
            }
        }
    }
    FiniteTree::from_adjacency_unchecked(adj)
}

/// Rank of the presented tree, computed with the default simulation cap
/// of 2.
pub fn rank_of_presentation(p: &TreePresentation) -> RankValue {
    rank_of_presentation_capped(p, 2)
}

/// Rank with an explicit multiplicity cap for the rayless simulation
/// (2 and 3 must agree; exposed for the cap-validation suite).
pub fn rank_of_presentation_capped(p: &TreePresentation, cap: u32) -> RankValue {
    match end_category(p) {
        EndCategory::ZeroEnds => {
            let t = capped_tree(p, cap);
            pruning_trace(&t).1
        }
        EndCategory::OneEnd => RankValue::Omega,
        EndCategory::ManyEnds => RankValue::Finite(max_leaf_distance_classes(p)),
    }
}

/// Maximum distance of a leaf from the core, by recursion over the
/// class graph. Zero for leafless trees.
fn max_leaf_distance_classes(p: &TreePresentation) -> u32 {
    let g = ClassGraph::build(p);
    let n = g.classes.len();
    let core: Vec<bool> = (0..n).map(|c| g.is_core(p, c)).collect();
    let mut memo: Vec<Option<u32>> = alloc::vec![None; n];
    let mut best = 0u32;

    // downward branches hanging off core classes
    for z in 0..n {
        if !core[z] {
            continue;
        }
        for &(c, _) in &g.edges[z] {
            if !core[c] {
                best = best.max(1 + branch_height(&g, &core, &mut memo, c));
            }
        }
    }

    // the upward branch, when the root occurrence is not in the core:
    // walk the unique chain of non-core classes toward the topmost core
    // vertex
    if !core[0] {
        let mut chain = Vec::new(); // class indices from the root down
        let mut cur = 0usize;
        loop {
            if core[cur] {
                break;
            }
            chain.push(cur);
            // the chain edge is the unique ray-bearing child direction
            let mut next = None;
            for &(c, _) in &g.edges[cur] {
                let (cs, _) = g.classes[c];
                if g.ray[cs] {
                    debug_assert!(next.is_none(), "chain direction must be unique");
                    next = Some(c);
                }
            }
            match next {
                Some(c) => cur = c,
                // no direction toward the core: not a many-ends input
                None => return best,
            }
        }
        let len = chain.len() as u32;
        for (i, &ci) in chain.iter().enumerate() {
            let dist = len - i as u32; // distance of this chain vertex from the core
            let mut has_off_chain = false;
            for &(c, _) in &g.edges[ci] {
                let (cs, _) = g.classes[c];
                if !g.ray[cs] {
                    has_off_chain = true;
                    best = best.max(dist + 1 + branch_height(&g, &core, &mut memo, c));
                }
            }
            if i == 0 && !has_off_chain {
                // the root occurrence itself is a leaf
                best = best.max(len);
            }
        }
    }
    best
}

/// Height of the rayless region below a non-core class: the longest
/// descending path to a childless occurrence.
fn branch_height(g: &ClassGraph, core: &[bool], memo: &mut Vec<Option<u32>>, class: usize) -> u32 {
    if let Some(h) = memo[class] {
        return h;
    }
    debug_assert!(!core[class]);
    let mut h = 0;
    for &(c, _) in &g.edges[class] {
        debug_assert!(!core[c], "branch regions do not touch the core below");
        h = h.max(1 + branch_height(g, core, memo, c));
    }
    memo[class] = Some(h);
    h
}

/// Vertices of an unfolding whose occurrence class is core.
pub fn core_vertices(p: &TreePresentation, u: &Unfolding) -> BTreeSet<VertexId> {
    let g = ClassGraph::build(p);
    let classes = classify_unfold(p, u, &g);
    u.vertices().filter(|v| g.is_core(p, classes[v.0 as usize])).collect()
}

/// Whether the presented tree is finite: rayless with no omega
/// multiplicities reachable from the root.
pub fn is_finite_tree(p: &TreePresentation) -> bool {
    let g = ClassGraph::build(p);
    if g.classes.iter().any(|&(s, _)| g.ray[s]) {
        return false;
    }
    for (ci, _) in g.classes.iter().enumerate() {
        for &(_, m) in &g.edges[ci] {
            if m == Multiplicity::Omega {
                return false;
            }
        }
    }
    true
}

/// Whether the presented tree is leafless (equal to its core).
pub fn is_leafless(p: &TreePresentation) -> bool {
    let g = ClassGraph::build(p);
    (0..g.classes.len()).all(|c| g.is_core(p, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_dsl;

    fn v(n: u64) -> VertexId {
        VertexId(n)
    }

    fn path(n: u64) -> FiniteTree {
        if n == 1 {
            return FiniteTree::single(v(0));
        }
        let edges: Vec<_> = (0..n - 1).map(|i| (v(i), v(i + 1))).collect();
        FiniteTree::from_edges(&edges).unwrap()
    }

    #[test]
    fn prune_step_examples() {
        let p3 = path(3);
        let next = prune_step(&p3);
        assert_eq!(next.vertex_count(), 1);
        assert!(next.contains(v(1)));

        assert!(prune_step(&FiniteTree::single(v(0))).is_empty());

        let star =
            FiniteTree::from_edges(&[(v(0), v(1)), (v(0), v(2)), (v(0), v(3))]).unwrap();
        let next = prune_step(&star);
        assert_eq!(next.vertex_count(), 1);
        assert!(next.contains(v(0)));
    }

    #[test]
    fn trace_on_path5() {
        let (trace, rank) = pruning_trace(&path(5));
        assert_eq!(rank, RankValue::Finite(3));
        assert_eq!(trace.rounds.len(), 3);
        assert_eq!(trace.rounds[0], [v(0), v(4)].into_iter().collect());
        assert_eq!(trace.rounds[1], [v(1), v(3)].into_iter().collect());
        assert_eq!(trace.rounds[2], [v(2)].into_iter().collect());
        assert!(trace.fixpoint.is_empty());
        assert_eq!(trace.removal_round[&v(2)], 3);
    }

    #[test]
    fn trace_on_single_edge_and_empty() {
        let (_, rank) = pruning_trace(&path(2));
        assert_eq!(rank, RankValue::Finite(1));
        let (trace, rank) = pruning_trace(&FiniteTree::empty());
        assert_eq!(rank, RankValue::Finite(0));
        assert!(trace.rounds.is_empty());
    }

    #[test]
    fn path_rank_formula() {
        for n in 1..=50u64 {
            let (_, rank) = pruning_trace(&path(n));
            assert_eq!(rank, RankValue::Finite(((n + 1) / 2) as u32), "path {n}");
        }
    }

    #[test]
    fn classify_double_ray() {
        let p = parse_dsl("state m { a:1 b:1 } state a { a:1 } state b { b:1 } root m").unwrap();
        let cls = classify_core(&p);
        // every reachable class is core
        assert_eq!(cls.core_classes.len(), 3);
        assert_eq!(end_category(&p), EndCategory::ManyEnds);
        assert!(is_leafless(&p));
    }

    #[test]
    fn classify_ray_has_no_core() {
        let p = parse_dsl("state a { a:1 } root a").unwrap();
        assert!(classify_core(&p).is_empty());
        assert_eq!(end_category(&p), EndCategory::OneEnd);
        assert_eq!(rank_of_presentation(&p), RankValue::Omega);
    }

    #[test]
    fn classify_binary() {
        let p = parse_dsl("state r { q:2 } state q { q:2 } root r").unwrap();
        let cls = classify_core(&p);
        assert_eq!(cls.core_classes.len(), 2);
        assert_eq!(end_category(&p), EndCategory::ManyEnds);
        assert_eq!(rank_of_presentation(&p), RankValue::Finite(0));
    }

    #[test]
    fn star_of_p2() {
        let p = parse_dsl("state r { m:w } state m { l:1 } state l { } root r").unwrap();
        assert_eq!(end_category(&p), EndCategory::ZeroEnds);
        assert_eq!(rank_of_presentation(&p), RankValue::Finite(3));
        assert_eq!(rank_of_presentation_capped(&p, 3), RankValue::Finite(3));
    }

    #[test]
    fn comb_is_one_ended() {
        let p = parse_dsl("state c { c:1 t:1 } state t { } root c").unwrap();
        assert_eq!(end_category(&p), EndCategory::OneEnd);
        assert_eq!(rank_of_presentation(&p), RankValue::Omega);
        assert!(classify_core(&p).is_empty());
    }

    #[test]
    fn pendant_on_double_ray() {
        // double ray with one pendant edge at the junction
        let p = parse_dsl("state m { a:2 t:1 } state a { a:1 } state t { } root m").unwrap();
        assert_eq!(end_category(&p), EndCategory::ManyEnds);
        assert_eq!(rank_of_presentation(&p), RankValue::Finite(1));
    }

    #[test]
    fn upward_branch_rank() {
        // the root hangs above the core by two edges
        let p = parse_dsl("state x { y:1 } state y { b:1 } state b { b:2 } root x").unwrap();
        assert_eq!(end_category(&p), EndCategory::ManyEnds);
        assert_eq!(rank_of_presentation(&p), RankValue::Finite(2));
    }

    #[test]
    fn finite_tree_detection() {
        let p = parse_dsl("state r { a:2 } state a { } root r").unwrap();
        assert!(is_finite_tree(&p));
        let p = parse_dsl("state r { a:w } state a { } root r").unwrap();
        assert!(!is_finite_tree(&p));
        let p = parse_dsl("state a { a:1 } root a").unwrap();
        assert!(!is_finite_tree(&p));
    }
}
