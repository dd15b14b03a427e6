//! Independent test oracles: a small deterministic RNG, random tree
//! and presentation generators, brute-force embedding search, a naive
//! leaf-removal simulator, and exhaustive small-tree enumeration.
//! Nothing here shares code with the main algorithms; agreement is the
//! point.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::finite_tree::{unrooted_canonical, FiniteTree, VertexId};
use crate::presentation::{parse_dsl, TreePresentation};

/// SplitMix64: tiny, deterministic, good enough for test data.
#[derive(Clone, Debug)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in 0..bound.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }
}

/// Random tree on n vertices: vertex i attaches to a uniform earlier
/// vertex.
pub fn random_tree(rng: &mut Rng, n: u64) -> FiniteTree {
    if n == 0 {
        return FiniteTree::empty();
    }
    if n == 1 {
        return FiniteTree::single(VertexId(0));
    }
    let edges: Vec<(VertexId, VertexId)> =
        (1..n).map(|i| (VertexId(rng.below(i)), VertexId(i))).collect();
    FiniteTree::from_edges(&edges).expect("attachment process yields a tree")
}

/// Same tree with labels shuffled.
pub fn random_relabel(rng: &mut Rng, t: &FiniteTree) -> FiniteTree {
    let vs: Vec<VertexId> = t.vertices().collect();
    let mut perm: Vec<u64> = (0..vs.len() as u64).collect();
    for i in (1..perm.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    let index: BTreeMap<VertexId, u64> =
        vs.iter().enumerate().map(|(i, &v)| (v, perm[i])).collect();
    if vs.len() == 1 {
        return FiniteTree::single(VertexId(index[&vs[0]]));
    }
    let edges: Vec<(VertexId, VertexId)> = t
        .edges()
        .map(|(a, b)| (VertexId(index[&a]), VertexId(index[&b])))
        .collect();
    FiniteTree::from_edges(&edges).expect("relabeling preserves treeness")
}

/// Exhaustive injective-homomorphism search: does t embed into s?
pub fn brute_force_embeds(t: &FiniteTree, s: &FiniteTree) -> bool {
    if t.is_empty() {
        return true;
    }
    if t.vertex_count() > s.vertex_count() {
        return false;
    }
    // BFS order of t with parents, so each new vertex is constrained
    let start = t.vertices().next().unwrap();
    let mut order = alloc::vec![start];
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut seen: BTreeSet<VertexId> = [start].into_iter().collect();
    let mut qi = 0;
    while qi < order.len() {
        let v = order[qi];
        qi += 1;
        for w in t.neighbors(v) {
            if seen.insert(w) {
                parent.insert(w, v);
                order.push(w);
            }
        }
    }
    fn go(
        i: usize,
        order: &[VertexId],
        parent: &BTreeMap<VertexId, VertexId>,
        s: &FiniteTree,
        map: &mut BTreeMap<VertexId, VertexId>,
        used: &mut BTreeSet<VertexId>,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let v = order[i];
        let candidates: Vec<VertexId> = match parent.get(&v) {
            Some(p) => s.neighbors(map[p]).filter(|y| !used.contains(y)).collect(),
            None => s.vertices().collect(),
        };
        for y in candidates {
            if used.contains(&y) {
                continue;
            }
            map.insert(v, y);
            used.insert(y);
            if go(i + 1, order, parent, s, map, used) {
                return true;
            }
            map.remove(&v);
            used.remove(&y);
        }
        false
    }
    go(0, &order, &parent, s, &mut BTreeMap::new(), &mut BTreeSet::new())
}

/// All unlabeled trees with 1..=n vertices, one representative each.
pub fn all_trees_up_to(n: u64) -> Vec<FiniteTree> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for k in 1..=n {
        // every labeled tree shape arises from some parent vector
        let mut vec = alloc::vec![0u64; k as usize];
        loop {
            let t = if k == 1 {
                FiniteTree::single(VertexId(0))
            } else {
                let edges: Vec<(VertexId, VertexId)> = (1..k)
                    .map(|i| (VertexId(vec[i as usize]), VertexId(i)))
                    .collect();
                FiniteTree::from_edges(&edges).unwrap()
            };
            let code = unrooted_canonical(&t).unwrap();
            if seen.insert(code) {
                out.push(t);
            }
            // odometer over parent choices: position i ranges over 0..i
            let mut i = 1usize;
            loop {
                if i >= k as usize {
                    break;
                }
                vec[i] += 1;
                if vec[i] < i as u64 {
                    break;
                }
                vec[i] = 0;
                i += 1;
            }
            if i >= k as usize {
                break;
            }
        }
    }
    out
}

/// Leaf-removal simulation over a plain edge list; returns the removal
/// round of each vertex (1-based) or None for survivors, plus the
/// number of rounds that removed anything.
pub fn removal_rounds(t: &FiniteTree) -> (BTreeMap<VertexId, Option<u32>>, u32) {
    let mut alive: BTreeSet<VertexId> = t.vertices().collect();
    let mut edges: Vec<(VertexId, VertexId)> = t.edges().collect();
    let mut round_of: BTreeMap<VertexId, Option<u32>> =
        alive.iter().map(|&v| (v, None)).collect();
    let mut round = 0u32;
    loop {
        let mut deg: BTreeMap<VertexId, u32> = alive.iter().map(|&v| (v, 0)).collect();
        for &(a, b) in &edges {
            *deg.get_mut(&a).unwrap() += 1;
            *deg.get_mut(&b).unwrap() += 1;
        }
        let doomed: Vec<VertexId> =
            alive.iter().copied().filter(|v| deg[v] <= 1).collect();
        if doomed.is_empty() {
            break;
        }
        round += 1;
        for v in doomed {
            alive.remove(&v);
            round_of.insert(v, Some(round));
        }
        edges.retain(|&(a, b)| alive.contains(&a) && alive.contains(&b));
    }
    (round_of, round)
}

/// Number of removal rounds only.
pub fn naive_rank(t: &FiniteTree) -> u32 {
    removal_rounds(t).1
}

/// Random presentation with up to `max_states` states and
/// multiplicities in {1, 2, ω}, biased thin so truncated unfoldings
/// stay small.
pub fn random_presentation(rng: &mut Rng, max_states: u64) -> TreePresentation {
    let n = 1 + rng.below(max_states);
    let mut text = String::new();
    for s in 0..n {
        text.push_str(&format!("state s{s} {{ "));
        // up to 2 child edges; some states are leaves
        let k = match rng.below(10) {
            0..=2 => 0,
            3..=7 => 1,
            _ => 2,
        };
        for _ in 0..k {
            let c = rng.below(n);
            let m = match rng.below(10) {
                0..=5 => "1",
                6..=7 => "2",
                _ => "w",
            };
            text.push_str(&format!("s{c}:{m} "));
        }
        text.push_str("} ");
    }
    text.push_str("root s0");
    parse_dsl(&text).expect("generated text is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts_match_oeis() {
        let counts: Vec<usize> = (1..=8)
            .map(|n| {
                all_trees_up_to(n)
                    .iter()
                    .filter(|t| t.vertex_count() == n as usize)
                    .count()
            })
            .collect();
        assert_eq!(counts, alloc::vec![1, 1, 1, 2, 3, 6, 11, 23]);
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = Rng::new(7);
        for _ in 0..50 {
            let n = 1 + rng.below(40);
            let t = random_tree(&mut rng, n);
            assert!(t.is_tree());
            assert_eq!(t.vertex_count() as u64, n);
            let r = random_relabel(&mut rng, &t);
            assert!(crate::finite_tree::isomorphic(&t, &r));
        }
    }

    #[test]
    fn removal_rounds_on_path() {
        let t = FiniteTree::from_edges(&[
            (VertexId(0), VertexId(1)),
            (VertexId(1), VertexId(2)),
            (VertexId(2), VertexId(3)),
            (VertexId(3), VertexId(4)),
        ])
        .unwrap();
        let (rounds, total) = removal_rounds(&t);
        assert_eq!(total, 3);
        assert_eq!(rounds[&VertexId(0)], Some(1));
        assert_eq!(rounds[&VertexId(2)], Some(3));
    }

    #[test]
    fn random_presentations_parse_and_roundtrip() {
        let mut rng = Rng::new(11);
        for _ in 0..50 {
            let p = random_presentation(&mut rng, 5);
            let text = crate::presentation::serialize(&p);
            assert_eq!(parse_dsl(&text).unwrap(), p);
        }
    }
}
