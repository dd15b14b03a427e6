//! Sibling-family generators and the certificates that keep them
//! honest. A family carries per-member equimorphy evidence (truncated
//! witnesses or a construction note) and a matrix of recomputable
//! non-isomorphism certificates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::decomposition::{
    leaf_representation, max_leaf_distance, LeafyBranchShape, ShapeNode,
};
use crate::embedding::{
    build_shift_witness, core_respecting, rooted_embeds, rule_of_witness, verify_witness,
    EmbeddingWitness, StateRule, TruncatedWitness, UnfoldSpec,
};
use crate::finite_tree::RootedFiniteTree;
use crate::presentation::{
    occurrence_count, ClassGraph, Count, Multiplicity, OccurrenceClass, TreePresentation,
};
use crate::pruning::{end_category, is_leafless, rank_of_presentation, EndCategory, RankValue};

// ---------------------------------------------------------------------------
// certificates

/// A recomputable isomorphism invariant whose values differ between
/// two presentations. Shapes are identified by their canonical code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonIsoCertificate {
    RankMismatch(RankValue, RankValue),
    MaxLeafDistanceMismatch(u32, u32),
    DegreeProfileMismatch { degree: Count, count1: Count, count2: Count },
    BranchProfileMismatch { shape: String, count1: Count, count2: Count },
}

impl fmt::Display for NonIsoCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonIsoCertificate::RankMismatch(a, b) => write!(f, "rank {a} vs {b}"),
            NonIsoCertificate::MaxLeafDistanceMismatch(a, b) => {
                write!(f, "max leaf distance {a} vs {b}")
            }
            NonIsoCertificate::DegreeProfileMismatch { degree, count1, count2 } => {
                write!(f, "degree-{degree} vertex count {count1} vs {count2}")
            }
            NonIsoCertificate::BranchProfileMismatch { shape, count1, count2 } => {
                write!(f, "branch shape {shape} count {count1} vs {count2}")
            }
        }
    }
}

/// Vertex counts by degree, omega-absorbing. The root occurrence of
/// the root class lacks a parent edge and is rebucketed accordingly.
pub fn degree_profile(p: &TreePresentation) -> BTreeMap<Count, Count> {
    let g = ClassGraph::build(p);
    let mut profile: BTreeMap<Count, Count> = BTreeMap::new();
    for c in 0..g.classes.len() {
        let occ = g.occurrence_count(c);
        if occ == Count::Finite(0) {
            continue;
        }
        let deg = Count::Finite(1).add(g.child_degree_sum(p, c));
        let slot = profile.entry(deg).or_insert(Count::Finite(0));
        *slot = slot.add(occ);
    }
    // the root itself
    let root_nonroot_deg = Count::Finite(1).add(g.child_degree_sum(p, 0));
    if let Some(slot) = profile.get_mut(&root_nonroot_deg) {
        if let Count::Finite(n) = *slot {
            if n <= 1 {
                profile.remove(&root_nonroot_deg);
            } else {
                profile.insert(root_nonroot_deg, Count::Finite(n - 1));
            }
        }
    }
    let root_deg = g.child_degree_sum(p, 0);
    let slot = profile.entry(root_deg).or_insert(Count::Finite(0));
    *slot = slot.add(Count::Finite(1));
    profile
}

/// Number of vertices of the given degree.
pub fn degree_count(p: &TreePresentation, degree: Count) -> Count {
    degree_profile(p).get(&degree).copied().unwrap_or(Count::Finite(0))
}

fn state_shape(p: &TreePresentation, s: usize) -> ShapeNode {
    ShapeNode {
        state: p.state_name(s).to_string(),
        children: p
            .children(s)
            .iter()
            .map(|&(c, m)| (state_shape(p, c), m))
            .collect(),
    }
}

/// Number of branch instances with the given canonical shape code.
/// Many-ended trees count leafy-branch groups; rayless trees whose
/// root occurs exactly once count the root's child subtrees. Returns
/// None when neither reading applies.
pub fn branch_profile_count(p: &TreePresentation, shape: &str) -> Option<Count> {
    match end_category(p) {
        EndCategory::ManyEnds => {
            let rep = leaf_representation(p).ok()?;
            let mut total = Count::Finite(0);
            for b in &rep.branches {
                if b.shape.canonical() == shape {
                    total = total.add(b.occurrences);
                }
            }
            Some(total)
        }
        EndCategory::ZeroEnds => {
            let root = OccurrenceClass {
                state: p.state_name(p.root_state()).to_string(),
                up_ray: false,
            };
            if occurrence_count(p, &root) != Count::Finite(1) {
                return None;
            }
            let mut total = Count::Finite(0);
            for &(c, m) in p.children(p.root_state()) {
                if state_shape(p, c).canonical() == shape {
                    total = total.add(m.into());
                }
            }
            Some(total)
        }
        EndCategory::OneEnd => None,
    }
}

/// Recomputes the invariant a certificate cites on both presentations
/// and confirms the claimed values and their mismatch.
pub fn check_certificate(
    c: &NonIsoCertificate,
    p: &TreePresentation,
    q: &TreePresentation,
) -> bool {
    match c {
        NonIsoCertificate::RankMismatch(a, b) => {
            a != b && rank_of_presentation(p) == *a && rank_of_presentation(q) == *b
        }
        NonIsoCertificate::MaxLeafDistanceMismatch(a, b) => {
            if a == b {
                return false;
            }
            let (Ok(rp), Ok(rq)) = (leaf_representation(p), leaf_representation(q)) else {
                return false;
            };
            max_leaf_distance(&rp) == *a && max_leaf_distance(&rq) == *b
        }
        NonIsoCertificate::DegreeProfileMismatch { degree, count1, count2 } => {
            count1 != count2
                && degree_count(p, *degree) == *count1
                && degree_count(q, *degree) == *count2
        }
        NonIsoCertificate::BranchProfileMismatch { shape, count1, count2 } => {
            count1 != count2
                && branch_profile_count(p, shape) == Some(*count1)
                && branch_profile_count(q, shape) == Some(*count2)
        }
    }
}

// ---------------------------------------------------------------------------
// families

/// Equimorphy evidence for one member: mutual truncated witnesses when
/// we can build them, always with a note naming the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberEvidence {
    pub note: String,
    pub into_base: Option<TruncatedWitness>,
    pub from_base: Option<TruncatedWitness>,
}

/// A base presentation with pairwise non-isomorphic equimorphic
/// variants. Certificate entries are (i, j, certificate); None marks a
/// pair the construction cannot certify.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiblingFamily {
    pub base: TreePresentation,
    pub members: Vec<TreePresentation>,
    pub evidence: Vec<MemberEvidence>,
    pub certificates: Vec<(usize, usize, Option<NonIsoCertificate>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyError {
    NotLeafless,
    WitnessSurjectiveAtDepth,
    InfiniteRank,
    NoComplementRayEvidence,
    EvidenceMissing,
    ShapesNotPairwiseDistinct,
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            FamilyError::NotLeafless => "input presentation is not leafless",
            FamilyError::WitnessSurjectiveAtDepth => {
                "self-embedding witness leaves no room: surjective at its depth"
            }
            FamilyError::InfiniteRank => "input presentation has rank omega",
            FamilyError::NoComplementRayEvidence => {
                "no ray found outside the witness image"
            }
            FamilyError::EvidenceMissing => "supplied evidence is missing or invalid",
            FamilyError::ShapesNotPairwiseDistinct => {
                "replacement shapes are not pairwise distinct"
            }
        };
        f.write_str(msg)
    }
}

/// Re-checks everything a family claims: distinct members, verifying
/// witnesses that respect the core, and certificates that recompute.
pub fn validate_family(fam: &SiblingFamily) -> bool {
    for (i, a) in fam.members.iter().enumerate() {
        for b in fam.members.iter().skip(i + 1) {
            if a == b {
                return false;
            }
        }
    }
    if fam.evidence.len() != fam.members.len() {
        return false;
    }
    for (m, ev) in fam.members.iter().zip(&fam.evidence) {
        for (w, src, tgt) in [
            (&ev.into_base, m, &fam.base),
            (&ev.from_base, &fam.base, m),
        ] {
            if let Some(w) = w {
                let wrapped = EmbeddingWitness::Truncated(w.clone());
                if verify_witness(&wrapped, src, tgt, w.source.depth) != Ok(true) {
                    return false;
                }
                if !core_respecting(w, src, tgt, w.source.depth) {
                    return false;
                }
            }
        }
    }
    for &(i, j, ref c) in &fam.certificates {
        if i >= fam.members.len() || j >= fam.members.len() {
            return false;
        }
        if let Some(c) = c {
            if !check_certificate(c, &fam.members[i], &fam.members[j]) {
                return false;
            }
        }
    }
    true
}

fn fresh(taken: &mut BTreeSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    let mut i = 1u32;
    while taken.contains(&name) {
        i += 1;
        name = format!("{base}{i}");
    }
    taken.insert(name.clone());
    name
}

/// `p` with a pendant path of `n` fresh states attached to `state`.
fn attach_chain(p: &TreePresentation, state: &str, n: u32) -> (TreePresentation, Vec<String>) {
    let mut taken: BTreeSet<String> = p.state_names().map(str::to_string).collect();
    let names: Vec<String> = (1..=n).map(|i| fresh(&mut taken, &format!("c{i}"))).collect();
    let mut defs = p.definitions();
    for (i, name) in names.iter().enumerate() {
        let children = if i + 1 < names.len() {
            alloc::vec![(names[i + 1].clone(), Multiplicity::Finite(1))]
        } else {
            Vec::new()
        };
        defs.push((name.clone(), children));
    }
    if n > 0 {
        let def = defs.iter_mut().find(|(nm, _)| nm == state).expect("state exists");
        def.1.push((names[0].clone(), Multiplicity::Finite(1)));
    }
    let root = p.state_name(p.root_state()).to_string();
    (TreePresentation::new(defs, &root).expect("chain attachment is valid"), names)
}

/// Splits off a fresh root state when the root state also occurs as a
/// child, so a pendant attachment at the root touches one vertex only.
/// Returns the rewritten presentation and the fresh root name.
fn isolate_root(p: &TreePresentation) -> (TreePresentation, String) {
    let root_name = p.state_name(p.root_state()).to_string();
    let occurs_below = (0..p.state_count())
        .any(|s| p.children(s).iter().any(|&(c, _)| c == p.root_state()));
    if !occurs_below {
        return (p.clone(), root_name);
    }
    let mut taken: BTreeSet<String> = p.state_names().map(str::to_string).collect();
    let fresh_root = fresh(&mut taken, &format!("{root_name}0"));
    let mut defs = p.definitions();
    let root_children = defs
        .iter()
        .find(|(n, _)| *n == root_name)
        .expect("root is defined")
        .1
        .clone();
    defs.push((fresh_root.clone(), root_children));
    let q = TreePresentation::new(defs, &fresh_root).expect("root isolation is valid");
    (q, fresh_root)
}

fn identity_rule(p: &TreePresentation) -> StateRule {
    StateRule {
        anchor: Vec::new(),
        map: p.state_names().map(|s| (s.to_string(), s.to_string())).collect(),
        path_states: Vec::new(),
    }
}

fn has_omega(p: &TreePresentation) -> bool {
    (0..p.state_count())
        .any(|s| p.children(s).iter().any(|&(_, m)| m == Multiplicity::Omega))
}

/// Largest total finite child multiplicity of any state; the width
/// headroom a target unfolding needs beyond the source width.
fn width_slack(p: &TreePresentation) -> u32 {
    (0..p.state_count())
        .map(|s| {
            p.children(s)
                .iter()
                .map(|&(_, m)| match m {
                    Multiplicity::Finite(k) => k,
                    Multiplicity::Omega => 0,
                })
                .sum()
        })
        .max()
        .unwrap_or(0)
}

fn base_width(p: &TreePresentation) -> u32 {
    if has_omega(p) {
        3
    } else {
        2
    }
}

/// Pendant-path family on a leafless tree: member n grafts a path of
/// length n at the root, mapped back into the base along the ray the
/// self-embedding witness leaves uncovered.
pub fn leafless_family(
    p: &TreePresentation,
    f: &TruncatedWitness,
    n_max: u32,
) -> Result<SiblingFamily, FamilyError> {
    if !is_leafless(p) {
        return Err(FamilyError::NotLeafless);
    }
    let wrapped = EmbeddingWitness::Truncated(f.clone());
    if verify_witness(&wrapped, p, p, f.source.depth) != Ok(true) {
        return Err(FamilyError::EvidenceMissing);
    }
    let mut rule = rule_of_witness(p, p, f).ok_or(FamilyError::EvidenceMissing)?;
    if rule.anchor.is_empty() {
        return Err(FamilyError::WitnessSurjectiveAtDepth);
    }
    let (base, root_name) = isolate_root(p);
    if let Some(img) = rule.map.get(p.state_name(p.root_state())).cloned() {
        rule.map.insert(root_name.clone(), img);
    }
    build_pendant_family(&base, &rule, &root_name, n_max, f.source.depth, |_n| true)
        .map_err(|_| FamilyError::WitnessSurjectiveAtDepth)
}

/// Pendant-path family on a finite-rank tree whose self-embedding
/// misses a ray; pairs at or below the existing leaf distance bound
/// are left uncertified.
pub fn path_attach_family(
    p: &TreePresentation,
    f: &TruncatedWitness,
    attach_state: &str,
    n_max: u32,
) -> Result<SiblingFamily, FamilyError> {
    let RankValue::Finite(bound) = rank_of_presentation(p) else {
        return Err(FamilyError::InfiniteRank);
    };
    if end_category(p) == EndCategory::ZeroEnds {
        return Err(FamilyError::NoComplementRayEvidence);
    }
    if p.state_index(attach_state).is_none() {
        return Err(FamilyError::EvidenceMissing);
    }
    let wrapped = EmbeddingWitness::Truncated(f.clone());
    if verify_witness(&wrapped, p, p, f.source.depth) != Ok(true) {
        return Err(FamilyError::EvidenceMissing);
    }
    let mut rule = rule_of_witness(p, p, f).ok_or(FamilyError::EvidenceMissing)?;
    if rule.anchor.is_empty() {
        return Err(FamilyError::NoComplementRayEvidence);
    }
    let root_name = p.state_name(p.root_state());
    let (base, attach) = if attach_state == root_name {
        let (base, fresh_root) = isolate_root(p);
        if let Some(img) = rule.map.get(root_name).cloned() {
            rule.map.insert(fresh_root.clone(), img);
        }
        (base, fresh_root)
    } else {
        (p.clone(), attach_state.to_string())
    };
    build_pendant_family(&base, &rule, &attach, n_max, f.source.depth, |n| n > bound)
        .map_err(|_| FamilyError::NoComplementRayEvidence)
}

/// Shared pendant-path member construction. `certify` decides whether
/// a member's path length participates in certified pairs.
fn build_pendant_family(
    p: &TreePresentation,
    rule: &StateRule,
    attach_state: &str,
    n_max: u32,
    depth: u32,
    certify: impl Fn(u32) -> bool,
) -> Result<SiblingFamily, ()> {
    let w = base_width(p);
    let slack = width_slack(p);
    let anchor_len = rule.anchor.len() as u32;
    let mut members = Vec::new();
    let mut evidence = Vec::new();
    let mut distances = Vec::new();
    for n in 1..=n_max {
        let (member, chain) = attach_chain(p, attach_state, n);
        let mut rule_n = rule.clone();
        rule_n.path_states = chain;
        let into_base = build_shift_witness(
            &member,
            p,
            &rule_n,
            UnfoldSpec::new(depth, w),
            UnfoldSpec::new(depth + anchor_len, w + slack),
        )
        .ok_or(())?;
        let from_base = build_shift_witness(
            p,
            &member,
            &identity_rule(p),
            UnfoldSpec::new(depth, w),
            UnfoldSpec::new(depth, w),
        )
        .ok_or(())?;
        let dist = leaf_representation(&member)
            .ok()
            .map(|rep| max_leaf_distance(&rep));
        members.push(member);
        distances.push(dist);
        evidence.push(MemberEvidence {
            note: format!(
                "pendant path of length {n} at state {attach_state}, folded back \
                 along the ray the self-embedding leaves uncovered"
            ),
            into_base: Some(into_base),
            from_base: Some(from_base),
        });
    }
    let mut certificates = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let cert = match (distances[i], distances[j]) {
                (Some(a), Some(b))
                    if a != b && certify(i as u32 + 1) && certify(j as u32 + 1) =>
                {
                    Some(NonIsoCertificate::MaxLeafDistanceMismatch(a, b))
                }
                _ => None,
            };
            certificates.push((i, j, cert));
        }
    }
    Ok(SiblingFamily { base: p.clone(), members, evidence, certificates })
}

/// Approximate rooted equimorphy of two shapes: mutual rooted
/// embeddings between capped materialisations, giving the smaller side
/// width headroom on the larger.
fn rooted_shape_equimorphic(a: &ShapeNode, b: &ShapeNode) -> bool {
    fn shape_slack(s: &ShapeNode) -> u32 {
        let here: u32 = s
            .children
            .iter()
            .map(|&(_, m)| match m {
                Multiplicity::Finite(k) => k,
                Multiplicity::Omega => 0,
            })
            .sum();
        s.children
            .iter()
            .map(|(c, _)| shape_slack(c))
            .fold(here, u32::max)
    }
    let dir = |small: &ShapeNode, big: &ShapeNode| -> bool {
        let (ts, rs) = small.to_tree(3);
        let (tb, rb) = big.to_tree(3 + shape_slack(small).max(shape_slack(big)));
        let rts = RootedFiniteTree::new(ts, rs).expect("non-empty");
        let rtb = RootedFiniteTree::new(tb, rb).expect("non-empty");
        rooted_embeds(&rts, &rtb).is_some()
    };
    dir(a, b) && dir(b, a)
}

/// Replaces the branch group at `b`'s attachment class with each of the
/// supplied equimorphic shapes in turn.
pub fn branch_swap_family(
    p: &TreePresentation,
    b: &LeafyBranchShape,
    sibling_shapes: &[ShapeNode],
    n_max: usize,
) -> Result<SiblingFamily, FamilyError> {
    if sibling_shapes.len() < n_max || n_max == 0 {
        return Err(FamilyError::EvidenceMissing);
    }
    let shapes = &sibling_shapes[..n_max];
    let canons: Vec<String> = shapes.iter().map(ShapeNode::canonical).collect();
    {
        let mut sorted = canons.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != shapes.len() {
            return Err(FamilyError::ShapesNotPairwiseDistinct);
        }
    }
    let base_shape = b.as_shape();
    if !shapes.iter().all(|s| rooted_shape_equimorphic(s, &base_shape)) {
        return Err(FamilyError::EvidenceMissing);
    }
    let rep = leaf_representation(p).map_err(|_| FamilyError::EvidenceMissing)?;
    let group = rep
        .branches
        .iter()
        .find(|g| g.shape.canonical() == b.canonical() && g.shape.attachment == b.attachment)
        .ok_or(FamilyError::EvidenceMissing)?;
    let attach_state = group.shape.attachment.state.clone();

    // which child edges of the attachment state are core and stay
    let g = ClassGraph::build(p);
    let core: Vec<bool> = (0..g.classes.len()).map(|c| g.is_core(p, c)).collect();
    let z = g
        .index
        .get(&(
            p.state_index(&attach_state).ok_or(FamilyError::EvidenceMissing)?,
            b.attachment.up_ray,
        ))
        .copied()
        .ok_or(FamilyError::EvidenceMissing)?;
    let keep: Vec<bool> = g.edges[z].iter().map(|&(c, _)| core[c]).collect();

    let mut members = Vec::new();
    let mut evidence = Vec::new();
    for shape in shapes {
        members.push(graft_shape(p, &attach_state, &keep, shape));
        evidence.push(MemberEvidence {
            note: format!(
                "branch group at class {} replaced by a rooted-equimorphic shape {}",
                b.attachment,
                shape.canonical()
            ),
            into_base: None,
            from_base: None,
        });
    }
    let mut certificates = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let c1 = branch_profile_count(&members[i], &canons[i]);
            let c2 = branch_profile_count(&members[j], &canons[i]);
            let cert = match (c1, c2) {
                (Some(a), Some(b)) if a != b => Some(NonIsoCertificate::BranchProfileMismatch {
                    shape: canons[i].clone(),
                    count1: a,
                    count2: b,
                }),
                _ => None,
            };
            certificates.push((i, j, cert));
        }
    }
    Ok(SiblingFamily { base: p.clone(), members, evidence, certificates })
}

/// `p` with the non-kept child edges of `state` replaced by the
/// children of `shape`, realised as fresh states.
fn graft_shape(
    p: &TreePresentation,
    state: &str,
    keep: &[bool],
    shape: &ShapeNode,
) -> TreePresentation {
    let mut taken: BTreeSet<String> = p.state_names().map(str::to_string).collect();
    let mut defs = p.definitions();
    fn add_shape(
        node: &ShapeNode,
        defs: &mut Vec<(String, Vec<(String, Multiplicity)>)>,
        taken: &mut BTreeSet<String>,
    ) -> String {
        let name = fresh(taken, &node.state);
        let children: Vec<(String, Multiplicity)> = node
            .children
            .iter()
            .map(|(c, m)| (add_shape(c, defs, taken), *m))
            .collect();
        defs.push((name.clone(), children));
        name
    }
    let new_children: Vec<(String, Multiplicity)> = shape
        .children
        .iter()
        .map(|(c, m)| (add_shape(c, &mut defs, &mut taken), *m))
        .collect();
    let def = defs.iter_mut().find(|(nm, _)| nm == state).expect("state exists");
    let mut rebuilt: Vec<(String, Multiplicity)> = def
        .1
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(e, _)| e.clone())
        .collect();
    rebuilt.extend(new_children);
    def.1 = rebuilt;
    let root = p.state_name(p.root_state()).to_string();
    TreePresentation::new(defs, &root).expect("graft is valid")
}

/// The star with omega pendant length-2 paths and its finite
/// decorations: member k adds k pendant edges at the hub.
pub fn star_family(n_max: u32) -> SiblingFamily {
    assert!(n_max >= 1);
    let base = crate::presentation::parse_dsl(
        "state r { t:w } state t { u:1 } state u { } root r",
    )
    .expect("static text");
    let depth = 4;
    let mut members = Vec::new();
    let mut evidence = Vec::new();
    for k in 0..n_max {
        let member = if k == 0 {
            base.clone()
        } else {
            crate::presentation::parse_dsl(&format!(
                "state r {{ l:{k} t:w }} state l {{ }} state t {{ u:1 }} state u {{ }} root r"
            ))
            .expect("static text")
        };
        let into_rule = StateRule {
            anchor: Vec::new(),
            map: [("r", "r"), ("l", "t"), ("t", "t"), ("u", "u")]
                .into_iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            path_states: Vec::new(),
        };
        let into_base = build_shift_witness(
            &member,
            &base,
            &into_rule,
            UnfoldSpec::new(depth, 3),
            UnfoldSpec::new(depth, 3 + k),
        )
        .expect("pendant edges fit into spare path prefixes");
        let from_base = build_shift_witness(
            &base,
            &member,
            &identity_rule(&base),
            UnfoldSpec::new(depth, 3),
            UnfoldSpec::new(depth, 3),
        )
        .expect("the base is a subtree of every member");
        members.push(member);
        evidence.push(MemberEvidence {
            note: format!("{k} pendant edges at the hub, mapped into spare path prefixes"),
            into_base: Some(into_base),
            from_base: Some(from_base),
        });
    }
    let leaf_canon = ShapeNode::leaf("l").canonical();
    let mut certificates = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            certificates.push((
                i,
                j,
                Some(NonIsoCertificate::BranchProfileMismatch {
                    shape: leaf_canon.clone(),
                    count1: Count::Finite(i as u64),
                    count2: Count::Finite(j as u64),
                }),
            ));
        }
    }
    SiblingFamily { base, members, evidence, certificates }
}

// ---------------------------------------------------------------------------
// gallery

/// A worked example with its expected headline numbers recorded as
/// data; tests recompute and compare.
#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub presentation: TreePresentation,
    pub rank: RankValue,
    pub ends: EndCategory,
    pub core_class_count: usize,
}

/// Six standing examples: the complete binary tree, its pruned
/// sibling, the path-star, the ray, the double ray, and the comb.
pub fn gallery() -> BTreeMap<&'static str, GalleryEntry> {
    let entry = |text: &str, rank, ends, core_class_count| GalleryEntry {
        presentation: crate::presentation::parse_dsl(text).expect("static text"),
        rank,
        ends,
        core_class_count,
    };
    [
        (
            "binary",
            entry(
                "state r { q:2 } state q { q:2 } root r",
                RankValue::Finite(0),
                EndCategory::ManyEnds,
                2,
            ),
        ),
        (
            "pruned_binary",
            entry(
                "state r { a:1 q:1 } state a { q:1 } state q { q:2 } root r",
                RankValue::Finite(0),
                EndCategory::ManyEnds,
                3,
            ),
        ),
        (
            "star",
            entry(
                "state r { t:w } state t { u:1 } state u { } root r",
                RankValue::Finite(3),
                EndCategory::ZeroEnds,
                0,
            ),
        ),
        (
            "ray",
            entry("state a { a:1 } root a", RankValue::Omega, EndCategory::OneEnd, 0),
        ),
        (
            "double_ray",
            entry(
                "state m { a:2 } state a { a:1 } root m",
                RankValue::Finite(0),
                EndCategory::ManyEnds,
                2,
            ),
        ),
        (
            "comb",
            entry(
                "state c { c:1 t:1 } state t { } root c",
                RankValue::Omega,
                EndCategory::OneEnd,
                0,
            ),
        ),
    ]
    .into_iter()
    .collect()
}
