//! Exact finite trees: construction, degrees, canonical forms and
//! isomorphism. Vertex ids are opaque tokens; every algorithm here is
//! id-agnostic.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Opaque vertex identifier.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Why an edge list failed to describe a tree.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NotATree {
    Cycle,
    Disconnected,
    DuplicateEdge,
    SelfLoop,
}

impl fmt::Display for NotATree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotATree::Cycle => write!(f, "edge set contains a cycle"),
            NotATree::Disconnected => write!(f, "edge set is disconnected"),
            NotATree::DuplicateEdge => write!(f, "duplicate edge"),
            NotATree::SelfLoop => write!(f, "self-loop"),
        }
    }
}

/// Returned by operations that require a non-empty tree.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EmptyTree;

impl fmt::Display for EmptyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "operation requires a non-empty tree")
    }
}

/// A finite tree as an adjacency map. The empty tree (no vertices) is a
/// valid value: pruning produces it. Isolated single vertices are
/// represented by an entry with an empty neighbour set.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FiniteTree {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl FiniteTree {
    /// The empty tree.
    pub fn empty() -> Self {
        FiniteTree { adj: BTreeMap::new() }
    }

    /// A single isolated vertex.
    pub fn single(v: VertexId) -> Self {
        let mut adj = BTreeMap::new();
        adj.insert(v, BTreeSet::new());
        FiniteTree { adj }
    }

    /// Builds a tree from an edge list. The vertex set is inferred from
    /// the edges; an empty list yields the empty tree.
    pub fn from_edges(pairs: &[(VertexId, VertexId)]) -> Result<Self, NotATree> {
        let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for &(a, b) in pairs {
            if a == b {
                return Err(NotATree::SelfLoop);
            }
            if !adj.entry(a).or_default().insert(b) {
                return Err(NotATree::DuplicateEdge);
            }
            adj.entry(b).or_default().insert(a);
        }
        let t = FiniteTree { adj };
        t.check()?;
        Ok(t)
    }

    /// Internal unchecked constructor for code that builds trees
    /// structurally (unfolding, pruning).
    pub(crate) fn from_adjacency_unchecked(adj: BTreeMap<VertexId, BTreeSet<VertexId>>) -> Self {
        FiniteTree { adj }
    }

    fn check(&self) -> Result<(), NotATree> {
        let n = self.vertex_count();
        if n == 0 {
            return Ok(());
        }
        let e: usize = self.adj.values().map(|s| s.len()).sum::<usize>() / 2;
        // connectivity by BFS from an arbitrary vertex
        let start = *self.adj.keys().next().unwrap();
        let mut seen = BTreeSet::new();
        seen.insert(start);
        let mut queue = Vec::new();
        queue.push(start);
        while let Some(v) = queue.pop() {
            for &w in &self.adj[&v] {
                if seen.insert(w) {
                    queue.push(w);
                }
            }
        }
        if seen.len() != n {
            return Err(NotATree::Disconnected);
        }
        if e != n - 1 {
            return Err(NotATree::Cycle);
        }
        Ok(())
    }

    /// True for the empty tree.
    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    /// Each edge once, as an ordered pair (small, large).
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&v, ns)| ns.iter().copied().filter(move |&w| v < w).map(move |w| (v, w)))
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |s| s.len())
    }

    /// True iff the vertex set is non-empty, connected and acyclic. Used
    /// by the pruning invariant suite; `from_edges` output always passes.
    pub fn is_tree(&self) -> bool {
        !self.is_empty() && self.check().is_ok()
    }

    /// Degree of every vertex. The degree sum equals twice the edge count.
    pub fn degree_map(&self) -> BTreeMap<VertexId, usize> {
        self.adj.iter().map(|(&v, s)| (v, s.len())).collect()
    }

    /// The restriction to a vertex subset (edges with both ends kept).
    pub(crate) fn induced(&self, keep: &BTreeSet<VertexId>) -> FiniteTree {
        let adj = self
            .adj
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(&v, ns)| (v, ns.iter().copied().filter(|w| keep.contains(w)).collect()))
            .collect();
        FiniteTree { adj }
    }

    /// The centroid vertices (one or two) of a non-empty tree: the
    /// vertices minimising the largest component left by their removal.
    pub fn centroids(&self) -> Result<Vec<VertexId>, EmptyTree> {
        if self.is_empty() {
            return Err(EmptyTree);
        }
        let n = self.vertex_count();
        let root = *self.adj.keys().next().unwrap();
        // iterative post-order for subtree sizes
        let mut size: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut parent: BTreeMap<VertexId, Option<VertexId>> = BTreeMap::new();
        let mut order = Vec::with_capacity(n);
        let mut stack = Vec::new();
        stack.push((root, None));
        while let Some((v, p)) = stack.pop() {
            parent.insert(v, p);
            order.push(v);
            for w in self.neighbors(v) {
                if Some(w) != p {
                    stack.push((w, Some(v)));
                }
            }
        }
        for &v in order.iter().rev() {
            let s = 1 + self
                .neighbors(v)
                .filter(|&w| Some(w) != parent[&v])
                .map(|w| size[&w])
                .sum::<usize>();
            size.insert(v, s);
        }
        let max_comp = |v: VertexId| -> usize {
            let up = n - size[&v];
            self.neighbors(v)
                .filter(|&w| Some(w) != parent[&v])
                .map(|w| size[&w])
                .chain(core::iter::once(up))
                .max()
                .unwrap_or(0)
        };
        let best = self.vertices().map(max_comp).min().unwrap();
        Ok(self.vertices().filter(|&v| max_comp(v) == best).collect())
    }
}

/// A finite tree with a distinguished root vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootedFiniteTree {
    tree: FiniteTree,
    root: VertexId,
}

impl RootedFiniteTree {
    pub fn new(tree: FiniteTree, root: VertexId) -> Result<Self, EmptyTree> {
        if !tree.contains(root) {
            return Err(EmptyTree);
        }
        Ok(RootedFiniteTree { tree, root })
    }

    pub fn tree(&self) -> &FiniteTree {
        &self.tree
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Children of `v` when the tree is oriented away from the root.
    pub fn children(&self, v: VertexId, parent: Option<VertexId>) -> Vec<VertexId> {
        self.tree.neighbors(v).filter(|&w| Some(w) != parent).collect()
    }
}

/// AHU canonical code of a rooted tree: `()` for a leaf, child codes
/// sorted lexicographically and wrapped in parentheses otherwise. Equal
/// codes characterise rooted isomorphism.
pub fn ahu_canonical(t: &RootedFiniteTree) -> Result<String, EmptyTree> {
    if t.tree().is_empty() {
        return Err(EmptyTree);
    }
    Ok(ahu_code(t.tree(), t.root(), None))
}

fn ahu_code(t: &FiniteTree, v: VertexId, parent: Option<VertexId>) -> String {
    let mut codes: Vec<String> = t
        .neighbors(v)
        .filter(|&w| Some(w) != parent)
        .map(|w| ahu_code(t, w, Some(v)))
        .collect();
    codes.sort();
    let mut out = String::from("(");
    for c in &codes {
        out.push_str(c);
    }
    out.push(')');
    out
}

/// Canonical code of an unrooted tree: the AHU code rooted at the
/// centroid, taking the lexicographically smaller code when there are
/// two centroids.
pub fn unrooted_canonical(t: &FiniteTree) -> Result<String, EmptyTree> {
    let cs = t.centroids()?;
    cs.iter().map(|&c| ahu_code(t, c, None)).min().ok_or(EmptyTree)
}

/// Unrooted tree isomorphism via centroid canonical codes. Two empty
/// trees are isomorphic.
pub fn isomorphic(t: &FiniteTree, s: &FiniteTree) -> bool {
    match (t.is_empty(), s.is_empty()) {
        (true, true) => true,
        (true, false) | (false, true) => false,
        _ => unrooted_canonical(t) == unrooted_canonical(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u64) -> VertexId {
        VertexId(n)
    }

    fn path(n: u64) -> FiniteTree {
        if n == 0 {
            return FiniteTree::empty();
        }
        if n == 1 {
            return FiniteTree::single(v(0));
        }
        let edges: Vec<_> = (0..n - 1).map(|i| (v(i), v(i + 1))).collect();
        FiniteTree::from_edges(&edges).unwrap()
    }

    #[test]
    fn from_edges_path() {
        let t = FiniteTree::from_edges(&[(v(1), v(2)), (v(2), v(3))]).unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.edge_count(), 2);
    }

    #[test]
    fn from_edges_rejects_cycle() {
        let r = FiniteTree::from_edges(&[(v(1), v(2)), (v(2), v(3)), (v(3), v(1))]);
        assert_eq!(r, Err(NotATree::Cycle));
    }

    #[test]
    fn from_edges_rejects_disconnected() {
        let r = FiniteTree::from_edges(&[(v(1), v(2)), (v(3), v(4))]);
        assert_eq!(r, Err(NotATree::Disconnected));
    }

    #[test]
    fn from_edges_rejects_duplicate_and_loop() {
        assert_eq!(
            FiniteTree::from_edges(&[(v(1), v(2)), (v(2), v(1))]),
            Err(NotATree::DuplicateEdge)
        );
        assert_eq!(FiniteTree::from_edges(&[(v(1), v(1))]), Err(NotATree::SelfLoop));
    }

    #[test]
    fn empty_tree_is_valid() {
        let t = FiniteTree::from_edges(&[]).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn degree_map_examples() {
        let t = path(3);
        let d = t.degree_map();
        assert_eq!(d[&v(0)], 1);
        assert_eq!(d[&v(1)], 2);
        assert_eq!(d[&v(2)], 1);

        let s = FiniteTree::single(v(7));
        assert_eq!(s.degree_map()[&v(7)], 0);

        let star =
            FiniteTree::from_edges(&[(v(0), v(1)), (v(0), v(2)), (v(0), v(3))]).unwrap();
        let d = star.degree_map();
        assert_eq!(d[&v(0)], 3);
        assert_eq!(d[&v(1)], 1);
        let sum: usize = d.values().sum();
        assert_eq!(sum, 2 * star.edge_count());
    }

    #[test]
    fn ahu_examples() {
        let single = RootedFiniteTree::new(FiniteTree::single(v(0)), v(0)).unwrap();
        assert_eq!(ahu_canonical(&single).unwrap(), "()");

        let t = FiniteTree::from_edges(&[(v(0), v(1)), (v(0), v(2))]).unwrap();
        let r = RootedFiniteTree::new(t, v(0)).unwrap();
        assert_eq!(ahu_canonical(&r).unwrap(), "(()())");
    }

    #[test]
    fn ahu_distinguishes_rootings_of_path3() {
        let t = path(3);
        let end = RootedFiniteTree::new(t.clone(), v(0)).unwrap();
        let mid = RootedFiniteTree::new(t, v(1)).unwrap();
        assert_ne!(ahu_canonical(&end).unwrap(), ahu_canonical(&mid).unwrap());
    }

    #[test]
    fn centroids_of_paths() {
        assert_eq!(path(5).centroids().unwrap(), vec![v(2)]);
        assert_eq!(path(4).centroids().unwrap().len(), 2);
        assert_eq!(path(1).centroids().unwrap(), vec![v(0)]);
        assert_eq!(path(2).centroids().unwrap().len(), 2);
    }

    #[test]
    fn isomorphic_basic() {
        let p4 = path(4);
        let p4b = FiniteTree::from_edges(&[(v(10), v(20)), (v(20), v(30)), (v(30), v(40))])
            .unwrap();
        assert!(isomorphic(&p4, &p4b));

        let star =
            FiniteTree::from_edges(&[(v(0), v(1)), (v(0), v(2)), (v(0), v(3))]).unwrap();
        assert!(!isomorphic(&p4, &star));
        assert!(isomorphic(&FiniteTree::empty(), &FiniteTree::empty()));
        assert!(!isomorphic(&FiniteTree::empty(), &p4));
    }
}
