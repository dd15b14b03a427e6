//! Finite descriptions of (possibly infinite) trees: a state graph with
//! child multiplicities whose rooted unfolding is the tree.
//!
//! DSL syntax, whitespace-insensitive, `#` starts a line comment:
//!
//! ```text
//! state r { q:2 }
//! state q { q:2 }
//! root r
//! ```
//!
//! `w` denotes the multiplicity omega (countably many copies).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::finite_tree::{FiniteTree, RootedFiniteTree, VertexId};

/// A child multiplicity: a positive integer or omega.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Multiplicity {
    Finite(u32),
    Omega,
}

impl Multiplicity {
    /// Multiplicity capped at `cap` for pruning simulations; omega caps
    /// to `cap` as well.
    pub fn capped(self, cap: u32) -> u32 {
        match self {
            Multiplicity::Finite(k) => k.min(cap),
            Multiplicity::Omega => cap,
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(k) => write!(f, "{k}"),
            Multiplicity::Omega => write!(f, "w"),
        }
    }
}

/// A possibly-infinite vertex count.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Count {
    Finite(u64),
    Omega,
}

impl Count {
    pub fn add(self, other: Count) -> Count {
        match (self, other) {
            (Count::Finite(a), Count::Finite(b)) => Count::Finite(a.saturating_add(b)),
            _ => Count::Omega,
        }
    }

    pub fn mul(self, other: Count) -> Count {
        match (self, other) {
            (Count::Finite(0), _) | (_, Count::Finite(0)) => Count::Finite(0),
            (Count::Finite(a), Count::Finite(b)) => Count::Finite(a.saturating_mul(b)),
            _ => Count::Omega,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Count::Finite(_))
    }
}

impl From<Multiplicity> for Count {
    fn from(m: Multiplicity) -> Count {
        match m {
            Multiplicity::Finite(k) => Count::Finite(k as u64),
            Multiplicity::Omega => Count::Omega,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(k) => write!(f, "{k}"),
            Count::Omega => write!(f, "w"),
        }
    }
}

/// Classifies occurrences of a state in the unfolding by whether the
/// parent-side direction contains a ray. The root occurrence always has
/// `up_ray = false`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct OccurrenceClass {
    pub state: String,
    pub up_ray: bool,
}

impl fmt::Display for OccurrenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.state, if self.up_ray { "^" } else { "" })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct StateDef {
    name: String,
    children: Vec<(usize, Multiplicity)>,
}

/// A validated tree presentation: named states, child multiplicities and
/// a root state. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePresentation {
    states: Vec<StateDef>,
    root: usize,
}

/// Parse and validation errors for the DSL.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DslError {
    Syntax { line: usize, col: usize, message: String },
    BadMultiplicity { line: usize, col: usize },
    UndefinedState(String),
    DuplicateState(String),
    NoRoot,
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslError::Syntax { line, col, message } => {
                write!(f, "syntax error at {line}:{col}: {message}")
            }
            DslError::BadMultiplicity { line, col } => {
                write!(f, "bad multiplicity at {line}:{col} (expected positive integer or w)")
            }
            DslError::UndefinedState(s) => write!(f, "undefined state `{s}`"),
            DslError::DuplicateState(s) => write!(f, "state `{s}` defined twice"),
            DslError::NoRoot => write!(f, "no root declaration"),
        }
    }
}

impl TreePresentation {
    /// Builds a presentation from `(state, children)` pairs and a root
    /// name, validating that every referenced state is defined.
    pub fn new(
        defs: Vec<(String, Vec<(String, Multiplicity)>)>,
        root: &str,
    ) -> Result<Self, DslError> {
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for (i, (name, _)) in defs.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(DslError::DuplicateState(name.clone()));
            }
        }
        let mut states = Vec::with_capacity(defs.len());
        for (name, children) in &defs {
            let mut resolved = Vec::with_capacity(children.len());
            for (child, m) in children {
                let idx = *index
                    .get(child)
                    .ok_or_else(|| DslError::UndefinedState(child.clone()))?;
                resolved.push((idx, *m));
            }
            states.push(StateDef { name: name.clone(), children: resolved });
        }
        let root = *index.get(root).ok_or_else(|| DslError::UndefinedState(root.to_string()))?;
        if states.is_empty() {
            return Err(DslError::NoRoot);
        }
        Ok(TreePresentation { states, root })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn root_state(&self) -> usize {
        self.root
    }

    pub fn state_name(&self, idx: usize) -> &str {
        &self.states[idx].name
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn children(&self, idx: usize) -> &[(usize, Multiplicity)] {
        &self.states[idx].children
    }

    pub fn state_names(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(|s| s.name.as_str())
    }

    /// Definition list in declaration order, by name; the inverse of
    /// [`TreePresentation::new`].
    pub fn definitions(&self) -> Vec<(String, Vec<(String, Multiplicity)>)> {
        self.states
            .iter()
            .map(|s| {
                (
                    s.name.clone(),
                    s.children
                        .iter()
                        .map(|&(c, m)| (self.states[c].name.clone(), m))
                        .collect(),
                )
            })
            .collect()
    }

}

// ---------------------------------------------------------------------------
// parsing

struct Token {
    text: String,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut cur = String::new();
        let mut start = 0usize;
        for (ci, ch) in line.chars().enumerate() {
            if ch.is_alphanumeric() || ch == '_' {
                if cur.is_empty() {
                    start = ci;
                }
                cur.push(ch);
            } else {
                if !cur.is_empty() {
                    out.push(Token { text: core::mem::take(&mut cur), line: ln + 1, col: start + 1 });
                }
                match ch {
                    '{' | '}' | ':' => out.push(Token {
                        text: ch.to_string(),
                        line: ln + 1,
                        col: ci + 1,
                    }),
                    c if c.is_whitespace() || c == ',' => {}
                    c => out.push(Token { text: c.to_string(), line: ln + 1, col: ci + 1 }),
                }
            }
        }
        if !cur.is_empty() {
            out.push(Token { text: cur, line: ln + 1, col: start + 1 });
        }
    }
    out
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses the DSL into a validated presentation.
pub fn parse_dsl(text: &str) -> Result<TreePresentation, DslError> {
    let tokens = tokenize(text);
    let mut defs: Vec<(String, Vec<(String, Multiplicity)>)> = Vec::new();
    let mut root: Option<String> = None;
    let mut i = 0usize;
    let syntax = |tok: Option<&Token>, msg: &str| -> DslError {
        match tok {
            Some(t) => DslError::Syntax { line: t.line, col: t.col, message: msg.to_string() },
            None => DslError::Syntax { line: 0, col: 0, message: msg.to_string() },
        }
    };
    while i < tokens.len() {
        match tokens[i].text.as_str() {
            "state" => {
                i += 1;
                let name = tokens.get(i).ok_or_else(|| syntax(None, "expected state name"))?;
                if !is_ident(&name.text) || name.text == "state" || name.text == "root" {
                    return Err(syntax(Some(name), "expected state name"));
                }
                let name_text = name.text.clone();
                i += 1;
                match tokens.get(i) {
                    Some(t) if t.text == "{" => i += 1,
                    t => return Err(syntax(t, "expected `{`")),
                }
                let mut children = Vec::new();
                loop {
                    let t = tokens.get(i).ok_or_else(|| syntax(None, "unterminated state body"))?;
                    if t.text == "}" {
                        i += 1;
                        break;
                    }
                    if !is_ident(&t.text) {
                        return Err(syntax(Some(t), "expected child state name or `}`"));
                    }
                    let child = t.text.clone();
                    i += 1;
                    match tokens.get(i) {
                        Some(t) if t.text == ":" => i += 1,
                        t => return Err(syntax(t, "expected `:` after child name")),
                    }
                    let m = tokens.get(i).ok_or_else(|| syntax(None, "expected multiplicity"))?;
                    let mult = if m.text == "w" {
                        Multiplicity::Omega
                    } else {
                        match m.text.parse::<u32>() {
                            Ok(k) if k >= 1 => Multiplicity::Finite(k),
                            _ => {
                                return Err(DslError::BadMultiplicity { line: m.line, col: m.col })
                            }
                        }
                    };
                    i += 1;
                    children.push((child, mult));
                }
                defs.push((name_text, children));
            }
            "root" => {
                i += 1;
                let name = tokens.get(i).ok_or_else(|| syntax(None, "expected root state name"))?;
                if !is_ident(&name.text) {
                    return Err(syntax(Some(name), "expected root state name"));
                }
                if root.is_some() {
                    return Err(syntax(Some(name), "root declared twice"));
                }
                root = Some(name.text.clone());
                i += 1;
            }
            _ => return Err(syntax(Some(&tokens[i]), "expected `state` or `root`")),
        }
    }
    let root = root.ok_or(DslError::NoRoot)?;
    TreePresentation::new(defs, &root)
}

/// Renders a presentation in the DSL; `parse_dsl` of the result is
/// structurally equal to the input.
pub fn serialize(p: &TreePresentation) -> String {
    let mut out = String::new();
    for s in &p.states {
        out.push_str("state ");
        out.push_str(&s.name);
        out.push_str(" {");
        for (c, m) in &s.children {
            out.push(' ');
            out.push_str(&p.states[*c].name);
            out.push(':');
            out.push_str(&m.to_string());
        }
        out.push_str(" }\n");
    }
    out.push_str("root ");
    out.push_str(&p.states[p.root].name);
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// unfolding

/// Parameters for unfolding: omega edges are truncated to `omega_width`
/// copies and the total vertex count is capped.
#[derive(Clone, Copy, Debug)]
pub struct UnfoldConfig {
    pub omega_width: u32,
    pub vertex_cap: usize,
}

impl Default for UnfoldConfig {
    fn default() -> Self {
        UnfoldConfig { omega_width: 3, vertex_cap: 1 << 21 }
    }
}

/// The vertex budget of an unfolding was exceeded.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BudgetExceeded {
    pub cap: usize,
}

impl fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unfolding exceeds the vertex budget of {}", self.cap)
    }
}

/// Per-vertex annotation of an unfolding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldInfo {
    pub state: usize,
    pub depth: u32,
    pub parent: Option<VertexId>,
    pub children: Vec<VertexId>,
    /// Index of the generating child edge in the parent state's child
    /// list, with the copy number; `None` for the root.
    pub via_edge: Option<(usize, u32)>,
}

/// A depth-truncated unfolding of a presentation, annotated per vertex
/// with `(state, depth)` and the parent/children structure. Vertex ids
/// are assigned in BFS order, so `unfold(p, d)` is a prefix of
/// `unfold(p, d + 1)` under the same config.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unfolding {
    tree: FiniteTree,
    root: VertexId,
    info: Vec<UnfoldInfo>,
}

impl Unfolding {
    pub fn tree(&self) -> &FiniteTree {
        &self.tree
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn rooted(&self) -> RootedFiniteTree {
        RootedFiniteTree::new(self.tree.clone(), self.root).expect("unfolding is non-empty")
    }

    pub fn len(&self) -> usize {
        self.info.len()
    }

    pub fn is_empty(&self) -> bool {
        self.info.is_empty()
    }

    pub fn info(&self, v: VertexId) -> &UnfoldInfo {
        &self.info[v.0 as usize]
    }

    pub fn state_of(&self, v: VertexId) -> usize {
        self.info(v).state
    }

    pub fn depth_of(&self, v: VertexId) -> u32 {
        self.info(v).depth
    }

    pub fn parent_of(&self, v: VertexId) -> Option<VertexId> {
        self.info(v).parent
    }

    pub fn children_of(&self, v: VertexId) -> &[VertexId] {
        &self.info(v).children
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.info.len() as u64).map(VertexId)
    }

    /// Resolves a path of child indices from the root.
    pub fn vertex_by_path(&self, path: &[usize]) -> Option<VertexId> {
        let mut v = self.root;
        for &i in path {
            v = *self.children_of(v).get(i)?;
        }
        Some(v)
    }
}

/// Unfolds a presentation to the given depth: every vertex at depth
/// strictly less than `depth` has all its children materialised, with
/// omega capped at the configured width.
pub fn unfold(
    p: &TreePresentation,
    depth: u32,
    cfg: &UnfoldConfig,
) -> Result<Unfolding, BudgetExceeded> {
    let mut info: Vec<UnfoldInfo> = Vec::new();
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    let root = VertexId(0);
    info.push(UnfoldInfo {
        state: p.root,
        depth: 0,
        parent: None,
        children: Vec::new(),
        via_edge: None,
    });
    adj.insert(root, BTreeSet::new());
    let mut next_id: u64 = 1;
    let mut head = 0usize; // BFS queue over info indices
    while head < info.len() {
        let v = VertexId(head as u64);
        let (state, d) = (info[head].state, info[head].depth);
        head += 1;
        if d >= depth {
            continue;
        }
        let mut children = Vec::new();
        for (edge_idx, &(c, m)) in p.children(state).iter().enumerate() {
            let copies = match m {
                Multiplicity::Finite(k) => k,
                Multiplicity::Omega => cfg.omega_width,
            };
            for copy in 0..copies {
                if info.len() >= cfg.vertex_cap {
                    return Err(BudgetExceeded { cap: cfg.vertex_cap });
                }
                let id = VertexId(next_id);
                next_id += 1;
                info.push(UnfoldInfo {
                    state: c,
                    depth: d + 1,
                    parent: Some(v),
                    children: Vec::new(),
                    via_edge: Some((edge_idx, copy)),
                });
                adj.entry(v).or_default().insert(id);
                adj.entry(id).or_default().insert(v);
                children.push(id);
            }
        }
        info[v.0 as usize].children = children;
    }
    Ok(Unfolding { tree: FiniteTree::from_adjacency_unchecked(adj), root, info })
}

// ---------------------------------------------------------------------------
// state-level reachability

/// Per-state flags: true iff the subtree unfolded from the state
/// contains a ray, i.e. the state reaches a directed cycle in the state
/// graph.
pub(crate) fn ray_state_flags(p: &TreePresentation) -> Vec<bool> {
    // A state is ray-free iff every descent from it terminates: the
    // least fixpoint of "all children ray-free".
    let n = p.state_count();
    let mut ray_free = alloc::vec![false; n];
    loop {
        let mut changed = false;
        for s in 0..n {
            if !ray_free[s] && p.children(s).iter().all(|&(c, _)| ray_free[c]) {
                ray_free[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    ray_free.iter().map(|&f| !f).collect()
}

/// True iff the subtree rooted at an occurrence of `state` contains a
/// ray.
pub fn contains_ray_state(p: &TreePresentation, state: &str) -> Option<bool> {
    let idx = p.state_index(state)?;
    Some(ray_state_flags(p)[idx])
}

/// The reachable occurrence classes of a presentation with their child
/// edges; the finite quotient on which core membership, occurrence
/// counts and branch shapes are computed.
#[derive(Clone, Debug)]
pub(crate) struct ClassGraph {
    pub ray: Vec<bool>,
    /// Reachable classes in BFS order from the root class.
    pub classes: Vec<(usize, bool)>,
    pub index: BTreeMap<(usize, bool), usize>,
    /// Per class, parallel to the state's child list: (child class index,
    /// multiplicity).
    pub edges: Vec<Vec<(usize, Multiplicity)>>,
}

impl ClassGraph {
    pub fn build(p: &TreePresentation) -> ClassGraph {
        let ray = ray_state_flags(p);
        let mut classes = Vec::new();
        let mut index = BTreeMap::new();
        let mut edges: Vec<Vec<(usize, Multiplicity)>> = Vec::new();
        let root_class = (p.root_state(), false);
        classes.push(root_class);
        index.insert(root_class, 0usize);
        let mut head = 0usize;
        while head < classes.len() {
            let (s, up) = classes[head];
            // total ray-direction count of child edges, capped at 2
            let rd_total: u32 = p
                .children(s)
                .iter()
                .filter(|&&(c, _)| ray[c])
                .map(|&(_, m)| m.capped(2))
                .sum::<u32>()
                .min(2);
            let mut out = Vec::with_capacity(p.children(s).len());
            for &(c, m) in p.children(s) {
                let this_ray = if ray[c] { 1 } else { 0 };
                // omega and finite >= 2 multiplicities leave a sibling
                // copy of the same direction
                let excl = if m.capped(2) >= 2 {
                    rd_total
                } else {
                    rd_total.saturating_sub(this_ray)
                };
                let child_up = up || excl >= 1;
                let key = (c, child_up);
                let ci = match index.get(&key) {
                    Some(&ci) => ci,
                    None => {
                        let ci = classes.len();
                        classes.push(key);
                        index.insert(key, ci);
                        ci
                    }
                };
                out.push((ci, m));
            }
            edges.push(out);
            head += 1;
        }
        // edges holds one entry per processed class, in class order
        debug_assert_eq!(edges.len(), classes.len());
        ClassGraph { ray, classes, index, edges }
    }

    /// Number of incident directions of a class that contain rays,
    /// capped at 2 plus the up flag.
    pub fn ray_directions(&self, p: &TreePresentation, class: usize) -> u32 {
        let (s, up) = self.classes[class];
        let down: u32 = p
            .children(s)
            .iter()
            .filter(|&&(c, _)| self.ray[c])
            .map(|&(_, m)| m.capped(2))
            .sum::<u32>()
            .min(2);
        down + if up { 1 } else { 0 }
    }

    pub fn is_core(&self, p: &TreePresentation, class: usize) -> bool {
        self.ray_directions(p, class) >= 2
    }

    /// Sum of the child multiplicities of the class's state: the degree
    /// of its occurrences not counting the parent edge. The root
    /// occurrence has exactly this degree; every other occurrence has
    /// one more.
    pub fn child_degree_sum(&self, p: &TreePresentation, class: usize) -> Count {
        let (s, _) = self.classes[class];
        let mut total = Count::Finite(0);
        for &(_, m) in p.children(s) {
            total = total.add(m.into());
        }
        total
    }

    pub fn occurrence_count(&self, class: usize) -> Count {
        // ancestors = classes that can reach `class`
        let n = self.classes.len();
        let mut reach = alloc::vec![false; n];
        reach[class] = true;
        loop {
            let mut changed = false;
            for a in 0..n {
                if !reach[a] && self.edges[a].iter().any(|&(b, _)| reach[b]) {
                    reach[a] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !reach[0] {
            return Count::Finite(0);
        }
        // a cycle among ancestors, or an omega edge between ancestors,
        // pumps infinitely many occurrences
        for a in 0..n {
            if !reach[a] {
                continue;
            }
            for &(b, m) in &self.edges[a] {
                if reach[b] || b == class {
                    if m == Multiplicity::Omega {
                        return Count::Omega;
                    }
                }
            }
        }
        // cycle detection within the ancestor set
        if has_cycle(&self.edges, &reach) {
            return Count::Omega;
        }
        // path-count DP over the ancestor DAG
        let mut memo: Vec<Option<u64>> = alloc::vec![None; n];
        fn count_to(
            edges: &[Vec<(usize, Multiplicity)>],
            reach: &[bool],
            memo: &mut Vec<Option<u64>>,
            from: usize,
            target: usize,
        ) -> u64 {
            if from == target {
                return 1;
            }
            if let Some(c) = memo[from] {
                return c;
            }
            let mut total: u64 = 0;
            for &(b, m) in &edges[from] {
                if b == target || reach[b] {
                    let k = match m {
                        Multiplicity::Finite(k) => k as u64,
                        Multiplicity::Omega => unreachable!("omega handled above"),
                    };
                    total = total
                        .saturating_add(k.saturating_mul(count_to(edges, reach, memo, b, target)));
                }
            }
            memo[from] = Some(total);
            total
        }
        Count::Finite(count_to(&self.edges, &reach, &mut memo, 0, class))
    }
}

fn has_cycle(edges: &[Vec<(usize, Multiplicity)>], within: &[bool]) -> bool {
    let n = edges.len();
    let mut color = alloc::vec![0u8; n]; // 0 white, 1 grey, 2 black
    fn dfs(edges: &[Vec<(usize, Multiplicity)>], within: &[bool], color: &mut [u8], v: usize) -> bool {
        color[v] = 1;
        for &(w, _) in &edges[v] {
            if !within[w] {
                continue;
            }
            if color[w] == 1 {
                return true;
            }
            if color[w] == 0 && dfs(edges, within, color, w) {
                return true;
            }
        }
        color[v] = 2;
        false
    }
    (0..n).any(|v| within[v] && color[v] == 0 && dfs(edges, within, &mut color, v))
}

/// Number of vertices of the unfolding that fall in the given occurrence
/// class: zero, a finite count, or omega.
pub fn occurrence_count(p: &TreePresentation, class: &OccurrenceClass) -> Count {
    let Some(s) = p.state_index(&class.state) else {
        return Count::Finite(0);
    };
    let g = ClassGraph::build(p);
    match g.index.get(&(s, class.up_ray)) {
        Some(&ci) => g.occurrence_count(ci),
        None => Count::Finite(0),
    }
}

/// The occurrence classes reachable from the root, in BFS order.
pub fn reachable_classes(p: &TreePresentation) -> Vec<OccurrenceClass> {
    ClassGraph::build(p)
        .classes
        .iter()
        .map(|&(s, up)| OccurrenceClass { state: p.state_name(s).to_string(), up_ray: up })
        .collect()
}

/// Annotates every vertex of an unfolding with its occurrence class
/// (class-graph index order matches [`reachable_classes`]).
pub(crate) fn classify_unfold(_p: &TreePresentation, u: &Unfolding, g: &ClassGraph) -> Vec<usize> {
    let mut out = alloc::vec![0usize; u.len()];
    for v in u.vertices() {
        let class = match u.parent_of(v) {
            None => 0,
            Some(parent) => {
                let pc = out[parent.0 as usize];
                let (edge_idx, _) = u.info(v).via_edge.expect("non-root has an edge");
                g.edges[pc][edge_idx].0
            }
        };
        out[v.0 as usize] = class;
    }
    out
}
