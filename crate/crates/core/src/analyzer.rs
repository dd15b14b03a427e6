//! Routes a presentation to a verdict on its number of siblings. The
//! router only ever claims Infinite with a validated family attached;
//! when it can name a dichotomy but not a side it says so, and
//! otherwise it reports Unknown.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::decomposition::{branch_count, leaf_representation, ShapeNode};
use crate::embedding::{build_shift_witness, search_shift_rule, StateRule, UnfoldSpec};
use crate::presentation::{
    occurrence_count, unfold, Count, Multiplicity, OccurrenceClass, TreePresentation,
    UnfoldConfig,
};
use crate::pruning::{
    end_category, is_finite_tree, is_leafless, rank_of_presentation, EndCategory, RankValue,
};
use crate::siblings::{
    leafless_family, path_attach_family, validate_family, MemberEvidence, NonIsoCertificate,
    SiblingFamily,
};

/// What the router concluded about the sibling count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    ExactlyOne,
    Infinite,
    DichotomyHolds,
    Unknown,
}

impl core::fmt::Display for Outcome {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Outcome::ExactlyOne => "exactly-one",
            Outcome::Infinite => "infinite",
            Outcome::DichotomyHolds => "dichotomy-holds",
            Outcome::Unknown => "unknown",
        })
    }
}

/// Search limits: witness depth and an unfolded-vertex cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub witness_depth: u32,
    pub vertex_cap: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { witness_depth: 10, vertex_cap: 100_000 }
    }
}

/// Outcome plus the reason and, for Infinite, a validated family.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub justification: String,
    pub evidence: Option<SiblingFamily>,
    pub budget_used: usize,
}

pub const JUSTIFY_FINITE_TREE: &str = "finite tree: equimorphic finite trees are isomorphic";
pub const JUSTIFY_RAYLESS: &str = "rayless dichotomy (Bonato-Tardif): one sibling or infinitely many";
pub const JUSTIFY_CONDITION1: &str =
    "infinitely repeated branch admits a trimmed copy: pendant-copy family";
pub const JUSTIFY_LEAFLESS: &str =
    "leafless tree with a self-embedding missing a ray: pendant-path family";
pub const DICHOTOMY_LEAFLESS: &str = "leafless dichotomy: one sibling or infinitely many";
pub const JUSTIFY_PATH_ATTACH: &str =
    "finite rank with a ray outside a self-embedding: path-attachment family";
pub const JUSTIFY_CONDITION3: &str = "finite rank with finitely many leafy branches";
pub const JUSTIFY_UNKNOWN: &str = "no routing condition matched within budget";

fn verdict(outcome: Outcome, justification: &str, evidence: Option<SiblingFamily>) -> Verdict {
    let budget_used = evidence
        .as_ref()
        .map(|f| {
            f.evidence
                .iter()
                .map(|e| {
                    e.into_base.as_ref().map_or(0, |w| w.map.len())
                        + e.from_base.as_ref().map_or(0, |w| w.map.len())
                })
                .sum()
        })
        .unwrap_or(0);
    Verdict { outcome, justification: justification.to_string(), evidence, budget_used }
}

fn fully_certified(f: &SiblingFamily) -> bool {
    f.members.len() >= 3 && f.certificates.iter().all(|(_, _, c)| c.is_some())
}

/// Evidence for the repeated-branch pattern: an omega child edge of
/// the root whose shape strictly contains a one-leaf-smaller copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition1Evidence {
    pub big: ShapeNode,
    pub small: ShapeNode,
}

/// Removes one deepest leaf from the shape; None when that leaf hangs
/// on an omega edge, which trimming cannot change.
pub fn trim_deepest(s: &ShapeNode) -> Option<ShapeNode> {
    let h = s.height();
    debug_assert!(h >= 1);
    let mut out = s.clone();
    let (idx, &(ref child, m)) = out
        .children
        .iter()
        .enumerate()
        .find(|(_, (c, _))| 1 + c.height() == h)
        .expect("some child realises the height");
    if child.height() > 0 {
        let trimmed = trim_deepest(child)?;
        out.children[idx].0 = trimmed;
        return Some(out);
    }
    match m {
        Multiplicity::Omega => None,
        Multiplicity::Finite(1) => {
            out.children.remove(idx);
            Some(out)
        }
        Multiplicity::Finite(k) => {
            out.children[idx].1 = Multiplicity::Finite(k - 1);
            Some(out)
        }
    }
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

/// Looks for the repeated-branch pattern at the root of a rayless
/// presentation. Heuristic: absence of evidence proves nothing.
pub fn check_condition1(p: &TreePresentation) -> Option<Condition1Evidence> {
    if end_category(p) != EndCategory::ZeroEnds {
        return None;
    }
    let root = p.root_state();
    let root_class = OccurrenceClass {
        state: p.state_name(root).to_string(),
        up_ray: false,
    };
    if occurrence_count(p, &root_class) != Count::Finite(1) {
        return None;
    }
    for &(c, m) in p.children(root) {
        if m != Multiplicity::Omega {
            continue;
        }
        let big = state_shape(p, c);
        if big.height() < 1 {
            continue;
        }
        if let Some(small) = trim_deepest(&big) {
            if small.canonical() != big.canonical() {
                return Some(Condition1Evidence { big, small });
            }
        }
    }
    None
}

/// Member k grafts k copies of the trimmed shape beside its omega
/// original; mutual witnesses map the copies into spare originals.
pub fn condition1_family(p: &TreePresentation, ev: &Condition1Evidence) -> Option<SiblingFamily> {
    let root_name = p.state_name(p.root_state()).to_string();
    let depth = p.state_count() as u32 + 2;
    let width = 3u32;
    let mut members = Vec::new();
    let mut evidence = Vec::new();
    for k in 0..3u32 {
        let (member, shape_rule) = if k == 0 {
            (p.clone(), BTreeMap::new())
        } else {
            graft_with_rule(p, &root_name, &ev.small, k)
        };
        let mut rule_map: BTreeMap<String, String> =
            p.state_names().map(|s| (s.to_string(), s.to_string())).collect();
        rule_map.extend(shape_rule);
        let into_rule = StateRule { anchor: Vec::new(), map: rule_map, path_states: Vec::new() };
        let into_base = build_shift_witness(
            &member,
            p,
            &into_rule,
            UnfoldSpec::new(depth, width),
            UnfoldSpec::new(depth, width + k),
        )?;
        let from_base = build_shift_witness(
            p,
            &member,
            &StateRule {
                anchor: Vec::new(),
                map: p.state_names().map(|s| (s.to_string(), s.to_string())).collect(),
                path_states: Vec::new(),
            },
            UnfoldSpec::new(depth, width),
            UnfoldSpec::new(depth, width),
        )?;
        members.push(member);
        evidence.push(MemberEvidence {
            note: alloc::format!(
                "{k} trimmed copies of the repeated branch grafted at the root"
            ),
            into_base: Some(into_base),
            from_base: Some(from_base),
        });
    }
    let canon = ev.small.canonical();
    let mut certificates = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let c1 = crate::siblings::branch_profile_count(&members[i], &canon);
            let c2 = crate::siblings::branch_profile_count(&members[j], &canon);
            let cert = match (c1, c2) {
                (Some(a), Some(b)) if a != b => Some(NonIsoCertificate::BranchProfileMismatch {
                    shape: canon.clone(),
                    count1: a,
                    count2: b,
                }),
                _ => None,
            };
            certificates.push((i, j, cert));
        }
    }
    Some(SiblingFamily { base: p.clone(), members, evidence, certificates })
}

/// `p` with `mult` copies of `shape` grafted at `state` via fresh
/// states; returns the fresh-to-original state rule.
fn graft_with_rule(
    p: &TreePresentation,
    state: &str,
    shape: &ShapeNode,
    mult: u32,
) -> (TreePresentation, BTreeMap<String, String>) {
    let mut taken: BTreeSet<String> = p.state_names().map(str::to_string).collect();
    let mut defs = p.definitions();
    let mut rule = BTreeMap::new();
    fn add(
        node: &ShapeNode,
        defs: &mut Vec<(String, Vec<(String, Multiplicity)>)>,
        taken: &mut BTreeSet<String>,
        rule: &mut BTreeMap<String, String>,
    ) -> String {
        let mut name = node.state.clone();
        let mut i = 1u32;
        while taken.contains(&name) {
            i += 1;
            name = alloc::format!("{}{i}", node.state);
        }
        taken.insert(name.clone());
        rule.insert(name.clone(), node.state.clone());
        let children: Vec<(String, Multiplicity)> = node
            .children
            .iter()
            .map(|(c, m)| (add(c, defs, taken, rule), *m))
            .collect();
        defs.push((name.clone(), children));
        name
    }
    let top = add(shape, &mut defs, &mut taken, &mut rule);
    let def = defs.iter_mut().find(|(nm, _)| nm == state).expect("state exists");
    def.1.push((top, Multiplicity::Finite(mult)));
    let root = p.state_name(p.root_state()).to_string();
    (TreePresentation::new(defs, &root).expect("graft is valid"), rule)
}

/// Keeps only the listed members, renumbering certificate entries.
fn retain_members(fam: SiblingFamily, keep: &[usize]) -> SiblingFamily {
    let pos: BTreeMap<usize, usize> =
        keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let members = keep.iter().map(|&i| fam.members[i].clone()).collect();
    let evidence = keep.iter().map(|&i| fam.evidence[i].clone()).collect();
    let certificates = fam
        .certificates
        .into_iter()
        .filter_map(|(i, j, c)| Some((*pos.get(&i)?, *pos.get(&j)?, c)))
        .collect();
    SiblingFamily { base: fam.base, members, evidence, certificates }
}

fn within_budget(p: &TreePresentation, budget: &Budget, width: u32) -> bool {
    let cfg = UnfoldConfig { omega_width: width, vertex_cap: budget.vertex_cap };
    unfold(p, budget.witness_depth, &cfg).is_ok()
}

fn base_width(p: &TreePresentation) -> u32 {
    let has_omega = (0..p.state_count())
        .any(|s| p.children(s).iter().any(|&(_, m)| m == Multiplicity::Omega));
    if has_omega {
        3
    } else {
        2
    }
}

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

/// Checks the finite-rank, finitely-many-branches condition; the note
/// reports what a bounded self-embedding search additionally found.
pub fn check_condition3(p: &TreePresentation) -> Option<String> {
    let RankValue::Finite(_) = rank_of_presentation(p) else {
        return None;
    };
    let rep = leaf_representation(p).ok()?;
    if !branch_count(&rep).is_finite() {
        return None;
    }
    let mut note = String::from("finite rank with finitely many leafy branches");
    if search_shift_rule(p).is_none() {
        note.push_str("; no proper self-embedding rule found, each branch is a finite \
                       rooted tree with a unique sibling, which suggests a single sibling \
                       overall (not asserted)");
    }
    Some(note)
}

/// Tries to produce a verified proper self-embedding witness of `p`.
fn self_embedding_witness(
    p: &TreePresentation,
    budget: &Budget,
) -> Option<crate::embedding::TruncatedWitness> {
    let rule = search_shift_rule(p)?;
    let w = base_width(p);
    build_shift_witness(
        p,
        p,
        &rule,
        UnfoldSpec::new(budget.witness_depth, w),
        UnfoldSpec::new(budget.witness_depth + rule.anchor.len() as u32, w + width_slack(p)),
    )
}

/// Full routing. Deterministic for a fixed budget; Infinite verdicts
/// re-validate their family before being reported.
pub fn analyze(p: &TreePresentation, budget: &Budget) -> Verdict {
    if is_finite_tree(p) {
        return verdict(Outcome::ExactlyOne, JUSTIFY_FINITE_TREE, None);
    }
    if end_category(p) == EndCategory::ZeroEnds {
        if let Some(ev) = check_condition1(p) {
            if let Some(fam) = condition1_family(p, &ev) {
                if fully_certified(&fam) && validate_family(&fam) {
                    return verdict(Outcome::Infinite, JUSTIFY_CONDITION1, Some(fam));
                }
            }
        }
        return verdict(Outcome::DichotomyHolds, JUSTIFY_RAYLESS, None);
    }
    let budgeted = within_budget(p, budget, base_width(p));
    if is_leafless(p) {
        if budgeted {
            if let Some(f) = self_embedding_witness(p, budget) {
                if let Ok(fam) = leafless_family(p, &f, 3) {
                    if fully_certified(&fam) && validate_family(&fam) {
                        return verdict(Outcome::Infinite, JUSTIFY_LEAFLESS, Some(fam));
                    }
                }
            }
        }
        return verdict(Outcome::DichotomyHolds, DICHOTOMY_LEAFLESS, None);
    }
    if let RankValue::Finite(bound) = rank_of_presentation(p) {
        if budgeted {
            if let Some(f) = self_embedding_witness(p, budget) {
                let root_name = p.state_name(p.root_state()).to_string();
                if let Ok(fam) = path_attach_family(p, &f, &root_name, bound + 3) {
                    let keep: Vec<usize> =
                        (bound as usize..fam.members.len()).collect();
                    if keep.len() >= 3 {
                        let fam = retain_members(fam, &keep);
                        if fully_certified(&fam) && validate_family(&fam) {
                            return verdict(Outcome::Infinite, JUSTIFY_PATH_ATTACH, Some(fam));
                        }
                    }
                }
            }
        }
        if let Some(note) = check_condition3(p) {
            return verdict(Outcome::DichotomyHolds, &note, None);
        }
    }
    verdict(Outcome::Unknown, JUSTIFY_UNKNOWN, None)
}
