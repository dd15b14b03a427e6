//! Rendering: text and JSON reports, DOT export of truncated
//! unfoldings, and family directories with a JSON manifest. All
//! iteration orders are deterministic so identical inputs produce
//! identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use arbor_core::analyzer::Verdict;
use arbor_core::decomposition::{branch_count, branch_rank, max_leaf_distance, LeafRepresentation};
use arbor_core::presentation::{serialize, unfold, Count, UnfoldConfig};
use arbor_core::pruning::{classify_core, core_vertices, end_category, rank_of_presentation, RankValue};
use arbor_core::siblings::{NonIsoCertificate, SiblingFamily};
use arbor_core::TreePresentation;
use serde_json::{json, Value};

fn rank_json(r: RankValue) -> Value {
    match r {
        RankValue::Finite(n) => json!({ "finite": n }),
        RankValue::Omega => json!("omega"),
    }
}

fn count_json(c: Count) -> Value {
    match c {
        Count::Finite(n) => json!(n),
        Count::Omega => json!("omega"),
    }
}

pub fn rank_report_json(p: &TreePresentation) -> Value {
    let core = classify_core(p);
    json!({
        "rank": rank_json(rank_of_presentation(p)),
        "ends": end_category(p).to_string(),
        "core_classes": core.core_classes.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

pub fn rank_report_text(p: &TreePresentation) -> String {
    let core = classify_core(p);
    let classes: Vec<String> = core.core_classes.iter().map(|c| c.to_string()).collect();
    format!(
        "rank: {}\nends: {}\ncore classes: {}\n",
        rank_of_presentation(p),
        end_category(p),
        if classes.is_empty() { "(none)".to_string() } else { classes.join(" ") },
    )
}

pub fn decompose_report_json(rep: &LeafRepresentation) -> Value {
    json!({
        "core": serialize(&rep.core),
        "branch_count": count_json(branch_count(rep)),
        "max_leaf_distance": max_leaf_distance(rep),
        "branches": rep.branches.iter().map(|b| json!({
            "attachment": b.shape.attachment.to_string(),
            "shape": b.shape.canonical(),
            "height": b.shape.height(),
            "rank": branch_rank(&b.shape),
            "occurrences": count_json(b.occurrences),
        })).collect::<Vec<_>>(),
    })
}

pub fn decompose_report_text(rep: &LeafRepresentation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "core: {}", serialize(&rep.core));
    let _ = writeln!(out, "branch count: {}", branch_count(rep));
    let _ = writeln!(out, "max leaf distance: {}", max_leaf_distance(rep));
    if rep.branches.is_empty() {
        let _ = writeln!(out, "branches: (none)");
    }
    for b in &rep.branches {
        let _ = writeln!(
            out,
            "branch at {}: shape {} height {} rank {} occurrences {}",
            b.shape.attachment,
            b.shape.canonical(),
            b.shape.height(),
            branch_rank(&b.shape),
            b.occurrences,
        );
    }
    out
}

pub fn analyze_report_json(v: &Verdict) -> Value {
    json!({
        "outcome": v.outcome.to_string(),
        "justification": v.justification,
        "family_size": v.evidence.as_ref().map(|f| f.members.len()),
        "budget_used": v.budget_used,
    })
}

pub fn analyze_report_text(v: &Verdict) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "outcome: {}", v.outcome);
    let _ = writeln!(out, "justification: {}", v.justification);
    match &v.evidence {
        Some(f) => {
            let _ = writeln!(
                out,
                "evidence: validated family of {} members (export with the siblings command)",
                f.members.len()
            );
        }
        None => {
            let _ = writeln!(out, "evidence: none");
        }
    }
    let _ = writeln!(out, "budget used: {} mapped vertices", v.budget_used);
    out
}

/// DOT rendering of `unfold(p, depth)` with core vertices filled.
/// Vertex names are `state_depth_index`.
pub fn render_dot(p: &TreePresentation, depth: u32, width: u32) -> Result<String, String> {
    let cfg = UnfoldConfig { omega_width: width, ..UnfoldConfig::default() };
    let u = unfold(p, depth, &cfg).map_err(|e| e.to_string())?;
    let core = core_vertices(p, &u);
    let name = |v| {
        format!(
            "{}_{}_{}",
            p.state_name(u.state_of(v)),
            u.depth_of(v),
            v.0
        )
    };
    let mut out = String::from("digraph unfolding {\n");
    for v in u.vertices() {
        let style = if core.contains(&v) {
            " [style=filled, fillcolor=lightgray]"
        } else {
            ""
        };
        let _ = writeln!(out, "  \"{}\"{style};", name(v));
    }
    for v in u.vertices() {
        for &c in u.children_of(v) {
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", name(v), name(c));
        }
    }
    out.push_str("}\n");
    Ok(out)
}

fn certificate_json(c: &Option<NonIsoCertificate>) -> Value {
    match c {
        None => json!({ "kind": "uncertified" }),
        Some(NonIsoCertificate::RankMismatch(a, b)) => json!({
            "kind": "rank-mismatch",
            "values": [a.to_string(), b.to_string()],
        }),
        Some(NonIsoCertificate::MaxLeafDistanceMismatch(a, b)) => json!({
            "kind": "max-leaf-distance-mismatch",
            "values": [a, b],
        }),
        Some(NonIsoCertificate::DegreeProfileMismatch { degree, count1, count2 }) => json!({
            "kind": "degree-profile-mismatch",
            "degree": count_json(*degree),
            "values": [count_json(*count1), count_json(*count2)],
        }),
        Some(NonIsoCertificate::BranchProfileMismatch { shape, count1, count2 }) => json!({
            "kind": "branch-profile-mismatch",
            "shape": shape,
            "values": [count_json(*count1), count_json(*count2)],
        }),
    }
}

/// Writes base + member DSL files and a manifest; returns the summary
/// printed to stdout.
pub fn export_family(fam: &SiblingFamily, dir: &Path) -> Result<String, String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let write = |name: &str, text: &str| -> Result<(), String> {
        std::fs::write(dir.join(name), text)
            .map_err(|e| format!("cannot write {name}: {e}"))
    };
    write("base.dsl", &(serialize(&fam.base) + "\n"))?;
    let mut member_files = Vec::new();
    for (i, m) in fam.members.iter().enumerate() {
        let name = format!("member_{:02}.dsl", i + 1);
        write(&name, &(serialize(m) + "\n"))?;
        member_files.push(name);
    }
    let manifest = json!({
        "base": "base.dsl",
        "members": member_files,
        "evidence": fam.evidence.iter().map(|e| json!({
            "note": e.note,
            "witness_depths": {
                "into_base": e.into_base.as_ref().map(|w| w.source.depth),
                "from_base": e.from_base.as_ref().map(|w| w.source.depth),
            },
        })).collect::<Vec<_>>(),
        "certificates": fam.certificates.iter().map(|(i, j, c)| {
            let mut v = certificate_json(c);
            v["i"] = json!(i);
            v["j"] = json!(j);
            v
        }).collect::<Vec<_>>(),
    });
    write("manifest.json", &(serde_json::to_string_pretty(&manifest).unwrap() + "\n"))?;

    let certified = fam.certificates.iter().filter(|(_, _, c)| c.is_some()).count();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "family of {} members written to {} ({certified} certified pairs, {} uncertified)",
        fam.members.len(),
        dir.display(),
        fam.certificates.len() - certified,
    );
    for (i, j, c) in &fam.certificates {
        let line = match c {
            Some(c) => format!("member {} vs {}: {c}", i + 1, j + 1),
            None => format!("member {} vs {}: uncertified", i + 1, j + 1),
        };
        let _ = writeln!(out, "  {line}");
    }
    Ok(out)
}
