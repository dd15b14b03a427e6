//! Embedding tests: exact for finite trees via a matching DP, and
//! bounded-depth witnesses for presentations. A truncated witness is a
//! finite vertex map on unfoldings together with a state-pair relation
//! that describes how the map continues past the frontier.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::finite_tree::{FiniteTree, RootedFiniteTree, VertexId};
use crate::presentation::{unfold, ClassGraph, TreePresentation, UnfoldConfig, Unfolding};

/// Depth and omega width of one unfolding; fixes the finite tree a
/// truncated witness talks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnfoldSpec {
    pub depth: u32,
    pub omega_width: u32,
}

impl UnfoldSpec {
    pub fn new(depth: u32, omega_width: u32) -> UnfoldSpec {
        UnfoldSpec { depth, omega_width }
    }

    pub fn config(self) -> UnfoldConfig {
        UnfoldConfig { omega_width: self.omega_width, ..UnfoldConfig::default() }
    }

    pub fn unfold(self, p: &TreePresentation) -> Unfolding {
        unfold(p, self.depth, &self.config()).expect("witness unfoldings stay within budget")
    }
}

/// A finite vertex map on truncated unfoldings. `rule` records every
/// (source state, target state) pair the map realizes; vertices on the
/// source frontier must continue along pairs from this relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedWitness {
    pub source: UnfoldSpec,
    pub target: UnfoldSpec,
    pub map: BTreeMap<VertexId, VertexId>,
    pub rule: BTreeSet<(String, String)>,
}

/// An embedding witness: a full vertex map for finite trees, or a
/// truncated map for presentations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmbeddingWitness {
    Exact(BTreeMap<VertexId, VertexId>),
    Truncated(TruncatedWitness),
}

impl EmbeddingWitness {
    pub fn map(&self) -> &BTreeMap<VertexId, VertexId> {
        match self {
            EmbeddingWitness::Exact(m) => m,
            EmbeddingWitness::Truncated(w) => &w.map,
        }
    }
}

/// Requested verification depth exceeds the depth the witness was
/// built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthExceedsWitness {
    pub requested: u32,
    pub available: u32,
}

impl fmt::Display for DepthExceedsWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "verification depth {} exceeds witness depth {}",
            self.requested, self.available
        )
    }
}

/// True iff `map` is total on `t`, injective, and sends edges of `t`
/// to edges of `s`.
pub fn is_valid_embedding(
    map: &BTreeMap<VertexId, VertexId>,
    t: &FiniteTree,
    s: &FiniteTree,
) -> bool {
    let mut seen = BTreeSet::new();
    for v in t.vertices() {
        match map.get(&v) {
            Some(&y) if s.contains(y) && seen.insert(y) => {}
            _ => return false,
        }
    }
    t.edges().all(|(a, b)| {
        let (Some(&fa), Some(&fb)) = (map.get(&a), map.get(&b)) else {
            return false;
        };
        s.neighbors(fa).any(|n| n == fb)
    })
}

struct EmbedDp<'a> {
    t: &'a RootedFiniteTree,
    s: &'a RootedFiniteTree,
    memo: BTreeMap<(VertexId, VertexId), bool>,
}

impl<'a> EmbedDp<'a> {
    fn new(t: &'a RootedFiniteTree, s: &'a RootedFiniteTree) -> Self {
        EmbedDp { t, s, memo: BTreeMap::new() }
    }

    fn fits(&mut self, v: VertexId, vp: Option<VertexId>, y: VertexId, yp: Option<VertexId>) -> bool {
        if let Some(&r) = self.memo.get(&(v, y)) {
            return r;
        }
        let tc: Vec<VertexId> = self.t.children(v, vp);
        let sc: Vec<VertexId> = self.s.children(y, yp);
        let ok = if tc.len() > sc.len() {
            false
        } else {
            self.max_matching(v, &tc, y, &sc).len() == tc.len()
        };
        self.memo.insert((v, y), ok);
        ok
    }

    /// Maximum matching of source children into target children via
    /// augmenting paths; lowest-index order makes the result
    /// deterministic.
    fn max_matching(
        &mut self,
        v: VertexId,
        tc: &[VertexId],
        y: VertexId,
        sc: &[VertexId],
    ) -> Vec<(VertexId, VertexId)> {
        let mut match_of: Vec<Option<usize>> = alloc::vec![None; sc.len()];
        for (i, &c) in tc.iter().enumerate() {
            let mut visited = alloc::vec![false; sc.len()];
            let _ = self.augment(i, tc, sc, v, y, &mut match_of, &mut visited);
            let _ = c;
        }
        match_of
            .iter()
            .enumerate()
            .filter_map(|(j, m)| m.map(|i| (tc[i], sc[j])))
            .collect()
    }

    fn augment(
        &mut self,
        i: usize,
        tc: &[VertexId],
        sc: &[VertexId],
        v: VertexId,
        y: VertexId,
        match_of: &mut Vec<Option<usize>>,
        visited: &mut Vec<bool>,
    ) -> bool {
        for j in 0..sc.len() {
            if visited[j] || !self.fits(tc[i], Some(v), sc[j], Some(y)) {
                continue;
            }
            visited[j] = true;
            if match_of[j].is_none() {
                match_of[j] = Some(i);
                return true;
            }
            let prev = match_of[j].unwrap();
            if self.augment(prev, tc, sc, v, y, match_of, visited) {
                match_of[j] = Some(i);
                return true;
            }
        }
        false
    }

    fn extract(
        &mut self,
        v: VertexId,
        vp: Option<VertexId>,
        y: VertexId,
        yp: Option<VertexId>,
        out: &mut BTreeMap<VertexId, VertexId>,
    ) {
        out.insert(v, y);
        let tc = self.t.children(v, vp);
        let sc = self.s.children(y, yp);
        for (c, d) in self.max_matching(v, &tc, y, &sc) {
            self.extract(c, Some(v), d, Some(y), out);
        }
    }
}

/// Root-preserving embedding of rooted finite trees.
pub fn rooted_embeds(t: &RootedFiniteTree, s: &RootedFiniteTree) -> Option<EmbeddingWitness> {
    let mut dp = EmbedDp::new(t, s);
    if !dp.fits(t.root(), None, s.root(), None) {
        return None;
    }
    let mut map = BTreeMap::new();
    dp.extract(t.root(), None, s.root(), None, &mut map);
    debug_assert!(is_valid_embedding(&map, t.tree(), s.tree()));
    debug_assert_eq!(map.get(&t.root()), Some(&s.root()));
    Some(EmbeddingWitness::Exact(map))
}

/// Embedding of finite trees, tried over all images of one fixed
/// source root.
pub fn embeds(t: &FiniteTree, s: &FiniteTree) -> Option<EmbeddingWitness> {
    if t.is_empty() {
        return Some(EmbeddingWitness::Exact(BTreeMap::new()));
    }
    if t.vertex_count() > s.vertex_count() {
        return None;
    }
    let r0 = t.vertices().next().expect("non-empty");
    let rt = RootedFiniteTree::new(t.clone(), r0).expect("root is a vertex");
    for x in s.vertices() {
        let rs = RootedFiniteTree::new(s.clone(), x).expect("root is a vertex");
        if let Some(w) = rooted_embeds(&rt, &rs) {
            return Some(w);
        }
    }
    None
}

/// Mutual embeddability of finite trees.
pub fn equimorphic_finite(t: &FiniteTree, s: &FiniteTree) -> bool {
    embeds(t, s).is_some() && embeds(s, t).is_some()
}

/// Checks a witness on the depth-`depth` truncation of the source:
/// total, injective, adjacency-preserving, and frontier-consistent
/// with the witness rule.
pub fn verify_witness(
    w: &EmbeddingWitness,
    p: &TreePresentation,
    q: &TreePresentation,
    depth: u32,
) -> Result<bool, DepthExceedsWitness> {
    match w {
        EmbeddingWitness::Exact(map) => {
            let u = UnfoldSpec::new(depth, 3).unfold(p);
            let t = UnfoldSpec::new(depth, 3).unfold(q);
            Ok(is_valid_embedding(map, u.tree(), t.tree()))
        }
        EmbeddingWitness::Truncated(w) => verify_truncated(w, p, q, depth),
    }
}

fn verify_truncated(
    w: &TruncatedWitness,
    p: &TreePresentation,
    q: &TreePresentation,
    depth: u32,
) -> Result<bool, DepthExceedsWitness> {
    if depth > w.source.depth {
        return Err(DepthExceedsWitness { requested: depth, available: w.source.depth });
    }
    let u = UnfoldSpec::new(depth, w.source.omega_width).unfold(p);
    let t = w.target.unfold(q);
    let mut seen = BTreeSet::new();
    for v in u.vertices() {
        let Some(&y) = w.map.get(&v) else {
            return Ok(false);
        };
        if !t.tree().contains(y) || !seen.insert(y) {
            return Ok(false);
        }
        if let Some(vp) = u.parent_of(v) {
            let fp = w.map[&vp];
            if !t.tree().neighbors(fp).any(|n| n == y) {
                return Ok(false);
            }
        }
        if u.depth_of(v) == depth {
            let pair = (
                p.state_name(u.state_of(v)).to_string(),
                q.state_name(t.state_of(y)).to_string(),
            );
            if !w.rule.contains(&pair) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff every source vertex classified core maps to a core target
/// vertex. Source vertices are only trusted up to a depth margin below
/// the truncation boundary.
pub fn core_respecting(
    w: &TruncatedWitness,
    p: &TreePresentation,
    q: &TreePresentation,
    depth: u32,
) -> bool {
    let depth = depth.min(w.source.depth);
    let u = UnfoldSpec::new(depth, w.source.omega_width).unfold(p);
    let t = w.target.unfold(q);
    let gp = ClassGraph::build(p);
    let gq = ClassGraph::build(q);
    let cp = crate::presentation::classify_unfold(p, &u, &gp);
    let cq = crate::presentation::classify_unfold(q, &t, &gq);
    let margin = p.state_count() as u32 + 2;
    for v in u.vertices() {
        if u.depth_of(v) + margin > depth {
            continue;
        }
        if !gp.is_core(p, cp[v.0 as usize]) {
            continue;
        }
        let Some(&y) = w.map.get(&v) else {
            return false;
        };
        if !gq.is_core(q, cq[y.0 as usize]) {
            return false;
        }
    }
    true
}

/// A recipe for building a truncated witness top-down: an anchor path
/// of state-graph edge indices locating the image of the source root
/// in the target, a per-state target state, and an ordered list of
/// pendant chain states that instead walk along unused target
/// vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateRule {
    pub anchor: Vec<usize>,
    pub map: BTreeMap<String, String>,
    pub path_states: Vec<String>,
}

/// Builds a witness from a rule: regular source children greedily take
/// unused target children of the required state; chain states walk to
/// an unused neighbor (parent first, then children in order).
pub fn build_shift_witness(
    p: &TreePresentation,
    q: &TreePresentation,
    rule: &StateRule,
    source: UnfoldSpec,
    target: UnfoldSpec,
) -> Option<TruncatedWitness> {
    let u = source.unfold(p);
    let t = target.unfold(q);
    let mut anchor = t.root();
    for &e in &rule.anchor {
        anchor = t
            .children_of(anchor)
            .iter()
            .copied()
            .find(|&d| t.info(d).via_edge.map(|(ei, _)| ei) == Some(e))?;
    }
    if t.depth_of(anchor) + source.depth > target.depth {
        return None;
    }
    let is_path = |state: usize| rule.path_states.iter().any(|s| s == p.state_name(state));
    if is_path(u.state_of(u.root())) {
        return None;
    }
    let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();
    map.insert(u.root(), anchor);
    used.insert(anchor);
    let mut queue: Vec<VertexId> = alloc::vec![u.root()];
    let mut qi = 0;
    while qi < queue.len() {
        let v = queue[qi];
        qi += 1;
        let y = map[&v];
        for &c in u.children_of(v) {
            let target_vertex = if is_path(u.state_of(c)) {
                // walk to an unused neighbor of y
                let mut pick = None;
                if let Some(yp) = t.parent_of(y) {
                    if !used.contains(&yp) {
                        pick = Some(yp);
                    }
                }
                if pick.is_none() {
                    pick = t.children_of(y).iter().copied().find(|d| !used.contains(d));
                }
                pick?
            } else {
                let want = rule.map.get(p.state_name(u.state_of(c)))?;
                let want_idx = q.state_index(want)?;
                t.children_of(y)
                    .iter()
                    .copied()
                    .find(|&d| t.state_of(d) == want_idx && !used.contains(&d))?
            };
            map.insert(c, target_vertex);
            used.insert(target_vertex);
            queue.push(c);
        }
    }
    let rule_rel: BTreeSet<(String, String)> = map
        .iter()
        .map(|(&v, &y)| {
            (
                p.state_name(u.state_of(v)).to_string(),
                q.state_name(t.state_of(y)).to_string(),
            )
        })
        .collect();
    Some(TruncatedWitness { source, target, map, rule: rule_rel })
}

/// Recovers a rule from a witness whose state map happens to be
/// functional: the anchor is the image of the source root, and each
/// source state must map to a single target state throughout.
pub fn rule_of_witness(
    p: &TreePresentation,
    q: &TreePresentation,
    w: &TruncatedWitness,
) -> Option<StateRule> {
    let u = w.source.unfold(p);
    let t = w.target.unfold(q);
    let mut anchor = Vec::new();
    let mut cur = *w.map.get(&u.root())?;
    while t.parent_of(cur).is_some() {
        anchor.push(t.info(cur).via_edge?.0);
        cur = t.parent_of(cur).unwrap();
    }
    anchor.reverse();
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (&v, &y) in &w.map {
        let s = p.state_name(u.state_of(v)).to_string();
        let tn = q.state_name(t.state_of(y)).to_string();
        match map.get(&s) {
            Some(prev) if *prev != tn => return None,
            _ => {
                map.insert(s, tn);
            }
        }
    }
    Some(StateRule { anchor, map, path_states: Vec::new() })
}

/// Searches for a proper self-embedding rule of `p`: an anchor of
/// depth ≥ 1 plus a per-state target state so that every state's child
/// list fits into its image's child list with multiplicity to spare.
pub fn search_shift_rule(p: &TreePresentation) -> Option<StateRule> {
    // candidate anchors: child-index paths of length 1 and 2
    let mut anchors: Vec<(Vec<usize>, usize)> = Vec::new();
    let root = p.root_state();
    for (i, &(s1, _)) in p.children(root).iter().enumerate() {
        anchors.push((alloc::vec![i], s1));
        for (j, &(s2, _)) in p.children(s1).iter().enumerate() {
            anchors.push((alloc::vec![i, j], s2));
        }
    }
    for (anchor, target_state) in anchors {
        let mut map: BTreeMap<usize, usize> = BTreeMap::new();
        if assign_rule(p, root, target_state, &mut map) {
            let named = map
                .into_iter()
                .map(|(s, t)| (p.state_name(s).to_string(), p.state_name(t).to_string()))
                .collect();
            return Some(StateRule { anchor, map: named, path_states: Vec::new() });
        }
    }
    None
}

/// Tries to extend the partial state map with s → t, propagating to
/// children: each source child edge must fit inside a distinct target
/// child edge of at least its multiplicity.
fn assign_rule(
    p: &TreePresentation,
    s: usize,
    t: usize,
    map: &mut BTreeMap<usize, usize>,
) -> bool {
    match map.get(&s) {
        Some(&prev) => return prev == t,
        None => {
            map.insert(s, t);
        }
    }
    let sc = p.children(s);
    let tc = p.children(t);
    // greedy per-slot backtracking over target child edges
    fn place(
        p: &TreePresentation,
        sc: &[(usize, crate::presentation::Multiplicity)],
        tc: &[(usize, crate::presentation::Multiplicity)],
        i: usize,
        used: &mut Vec<bool>,
        map: &mut BTreeMap<usize, usize>,
    ) -> bool {
        if i == sc.len() {
            return true;
        }
        let (cs, cm) = sc[i];
        for (j, &(dt, dm)) in tc.iter().enumerate() {
            if used[j] || !mult_fits(cm, dm) {
                continue;
            }
            let snapshot = map.clone();
            used[j] = true;
            if assign_rule(p, cs, dt, map) && place(p, sc, tc, i + 1, used, map) {
                return true;
            }
            used[j] = false;
            *map = snapshot;
        }
        false
    }
    let mut used = alloc::vec![false; tc.len()];
    if place(p, sc, tc, 0, &mut used, map) {
        true
    } else {
        map.remove(&s);
        false
    }
}

fn mult_fits(need: crate::presentation::Multiplicity, have: crate::presentation::Multiplicity) -> bool {
    use crate::presentation::Multiplicity::*;
    match (need, have) {
        (Omega, Omega) => true,
        (Omega, Finite(_)) => false,
        (Finite(a), Finite(b)) => a <= b,
        (Finite(_), Omega) => true,
    }
}
