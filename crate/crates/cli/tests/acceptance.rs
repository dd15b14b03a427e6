//! Acceptance suite. Each test covers one numbered criterion and
//! prints a single pass line; a failing assertion is the fail line.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use arbor_core::decomposition::{leaf_representation, max_leaf_distance};
use arbor_core::embedding::{
    build_shift_witness, core_respecting, embeds, is_valid_embedding, search_shift_rule,
    verify_witness, EmbeddingWitness, UnfoldSpec,
};
use arbor_core::oracle::{
    all_trees_up_to, brute_force_embeds, naive_rank, random_presentation, random_relabel,
    random_tree, Rng,
};
use arbor_core::presentation::{parse_dsl, serialize, unfold, UnfoldConfig};
use arbor_core::pruning::{
    classify_core, core_vertices, end_category, prune_step, pruning_trace, rank_of_presentation,
    rank_of_presentation_capped,
};
use arbor_core::siblings::{
    check_certificate, degree_count, gallery, leafless_family, star_family, validate_family,
    NonIsoCertificate,
};
use arbor_core::finite_tree::isomorphic;
use arbor_core::{EndCategory, FiniteTree, RankValue, TreePresentation, VertexId};
use arbor_core::presentation::Count;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// Every corpus file plus the six standing gallery presentations.
fn corpus() -> Vec<(String, TreePresentation)> {
    let mut out = Vec::new();
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory exists")
        .map(|e| e.expect("readable entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "dsl"))
        .collect();
    files.sort();
    assert!(files.len() >= 10, "corpus has at least ten files");
    for f in files {
        let text = std::fs::read_to_string(&f).expect("readable corpus file");
        let p = parse_dsl(&text).expect("corpus file parses");
        out.push((f.file_stem().unwrap().to_string_lossy().into_owned(), p));
    }
    for (name, e) in gallery() {
        out.push((format!("gallery:{name}"), e.presentation));
    }
    out
}

fn is_tree_or_empty(t: &FiniteTree) -> bool {
    if t.is_empty() {
        return true;
    }
    let n = t.vertex_count();
    let edge_count = t.edges().count();
    if edge_count != n - 1 {
        return false;
    }
    let start = t.vertices().next().unwrap();
    let mut seen = std::collections::BTreeSet::from([start]);
    let mut queue = vec![start];
    while let Some(v) = queue.pop() {
        for w in t.neighbors(v) {
            if seen.insert(w) {
                queue.push(w);
            }
        }
    }
    seen.len() == n
}

#[test]
fn criterion_01_pruning_stages_are_trees() {
    let started = Instant::now();
    let mut rng = Rng::new(0xACCE_0001);
    for _ in 0..1_000 {
        let n = 1 + rng.below(200);
        let t = random_tree(&mut rng, n);
        let (trace, rank) = pruning_trace(&t);
        let mut stage = t.clone();
        assert!(is_tree_or_empty(&stage));
        for round in &trace.rounds {
            assert!(!round.is_empty(), "every recorded round removes something");
            stage = prune_step(&stage);
            assert!(is_tree_or_empty(&stage));
        }
        assert!(stage.is_empty(), "finite input prunes to nothing");
        assert_eq!(rank, RankValue::Finite(trace.rounds.len() as u32));
    }
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 10.0, "criterion 1 took {secs:.1}s, limit 10s");
    println!("acceptance 01 pruning stages stay trees on 1000 random inputs: pass");
}

#[test]
fn criterion_02_path_rank_formula() {
    for n in 1u64..=50 {
        let edges: Vec<_> = (1..n).map(|i| (VertexId(i - 1), VertexId(i))).collect();
        let t = if n == 1 {
            FiniteTree::single(VertexId(0))
        } else {
            FiniteTree::from_edges(&edges).unwrap()
        };
        let expected = (n as u32).div_ceil(2);
        assert_eq!(naive_rank(&t), expected, "independent simulator on path_{n}");
        assert_eq!(pruning_trace(&t).1, RankValue::Finite(expected), "engine on path_{n}");
    }
    println!("acceptance 02 rank(path_n) = ceil(n/2) for n = 1..50: pass");
}

/// Frontier-protected pruning on a truncated unfolding: repeatedly
/// remove degree <= 1 vertices except those at the truncation depth.
/// The fixpoint is the set of vertices on paths between two frontier
/// vertices. A descent from depth d to the frontier is longer than
/// #states once d <= depth - (#states + 2), so it repeats a state and
/// pumps to a genuine ray; hence on that depth range the fixpoint is
/// exactly the core.
fn frontier_fixpoint(u: &arbor_core::presentation::Unfolding, frontier: u32) -> std::collections::BTreeSet<VertexId> {
    let mut alive: std::collections::BTreeSet<VertexId> = u.vertices().collect();
    loop {
        let removable: Vec<VertexId> = alive
            .iter()
            .copied()
            .filter(|&v| {
                u.depth_of(v) < frontier
                    && u.tree().neighbors(v).filter(|n| alive.contains(n)).count() <= 1
            })
            .collect();
        if removable.is_empty() {
            return alive;
        }
        for v in removable {
            alive.remove(&v);
        }
    }
}

fn core_matches_simulation(p: &TreePresentation, cap: usize) -> Option<bool> {
    let s = p.state_count() as u32;
    let depth = 2 * s + 8;
    let cfg = UnfoldConfig { omega_width: 2, vertex_cap: cap };
    let u = unfold(p, depth, &cfg).ok()?;
    let core = core_vertices(p, &u);
    let fix = frontier_fixpoint(&u, depth);
    for v in u.vertices() {
        if u.depth_of(v) > depth - (s + 2) {
            continue;
        }
        if core.contains(&v) != fix.contains(&v) {
            return Some(false);
        }
    }
    Some(true)
}

#[test]
fn criterion_03_core_classification_matches_simulation() {
    let started = Instant::now();
    for (name, e) in gallery() {
        assert_eq!(
            core_matches_simulation(&e.presentation, 1 << 21),
            Some(true),
            "gallery entry {name}"
        );
    }
    let mut rng = Rng::new(0xACCE_0003);
    let mut accepted = 0;
    while accepted < 200 {
        let p = random_presentation(&mut rng, 5);
        match core_matches_simulation(&p, 200_000) {
            Some(ok) => {
                assert!(ok, "core classification disagrees on {}", serialize(&p));
                accepted += 1;
            }
            None => {} // unfolding too large for the budget, resample
        }
    }
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 60.0, "criterion 3 took {secs:.1}s, limit 60s");
    println!("acceptance 03 core classification matches removal simulation (6 gallery + 200 random): pass");
}

#[test]
fn criterion_04_few_ended_members_have_empty_core() {
    for (name, p) in corpus() {
        match end_category(&p) {
            EndCategory::ZeroEnds => {
                assert!(classify_core(&p).is_empty(), "{name} has zero ends but a core");
            }
            EndCategory::OneEnd => {
                assert!(classify_core(&p).is_empty(), "{name} has one end but a core");
                assert_eq!(rank_of_presentation(&p), RankValue::Omega, "{name} rank");
            }
            EndCategory::ManyEnds => {}
        }
    }
    println!("acceptance 04 zero/one-ended corpus members have empty core, one-ended have rank omega: pass");
}

#[test]
fn criterion_05_rank_equals_max_leaf_distance() {
    let mut checked = 0;
    for (name, p) in corpus() {
        if end_category(&p) != EndCategory::ManyEnds {
            continue;
        }
        let rep = leaf_representation(&p).expect("many ends implies a core");
        assert_eq!(
            rank_of_presentation(&p),
            RankValue::Finite(max_leaf_distance(&rep)),
            "{name}"
        );
        checked += 1;
    }
    assert!(checked >= 5, "corpus covers several many-ended members");
    println!("acceptance 05 rank equals max leaf distance on all {checked} many-ended corpus members: pass");
}

#[test]
fn criterion_06_embedding_agrees_with_brute_force() {
    let started = Instant::now();
    let trees = all_trees_up_to(8);
    assert_eq!(trees.len(), 48, "rooted-up-to-iso free trees on at most 8 vertices");
    for a in &trees {
        for b in &trees {
            let fast = embeds(a, b);
            assert_eq!(fast.is_some(), brute_force_embeds(a, b));
            if let Some(EmbeddingWitness::Exact(map)) = fast {
                assert!(is_valid_embedding(&map, a, b));
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 300.0, "criterion 6 took {secs:.1}s, limit 5min");
    println!("acceptance 06 matching embed agrees with brute force on all 48x48 tree pairs up to 8 vertices: pass");
}

#[test]
fn criterion_07_mutual_embedding_implies_isomorphic() {
    let mut rng = Rng::new(0xACCE_0007);
    let mut pairs: Vec<(FiniteTree, FiniteTree)> = Vec::new();
    // small independent samples, kept only when they mutually embed
    let small = all_trees_up_to(7);
    while pairs.len() < 100 {
        let a = &small[rng.below(small.len() as u64) as usize];
        let b = &small[rng.below(small.len() as u64) as usize];
        if embeds(a, b).is_some() && embeds(b, a).is_some() {
            pairs.push((random_relabel(&mut rng, a), random_relabel(&mut rng, b)));
        }
    }
    // larger relabeled copies
    while pairs.len() < 500 {
        let n = 1 + rng.below(30);
        let t = random_tree(&mut rng, n);
        let s = random_relabel(&mut rng, &t);
        assert!(embeds(&t, &s).is_some() && embeds(&s, &t).is_some());
        pairs.push((t, s));
    }
    for (t, s) in &pairs {
        assert!(isomorphic(t, s), "mutually embedding pair must be isomorphic");
    }
    println!("acceptance 07 500 mutually embedding random pairs are all isomorphic: pass");
}

#[test]
fn criterion_08_binary_pendant_family() {
    let started = Instant::now();
    let p = gallery()["binary"].presentation.clone();
    let rule = search_shift_rule(&p).expect("binary tree has a proper self-embedding");
    let f = build_shift_witness(
        &p,
        &p,
        &rule,
        UnfoldSpec::new(12, 2),
        UnfoldSpec::new(12 + rule.anchor.len() as u32, 4),
    )
    .expect("witness at depth 12");
    let fam = leafless_family(&p, &f, 8).expect("pendant family on the binary tree");
    assert_eq!(fam.members.len(), 8);
    assert!(validate_family(&fam));
    assert_eq!(fam.certificates.len(), 28);
    for (i, j, cert) in &fam.certificates {
        let cert = cert.as_ref().expect("all pairs certified");
        assert!(matches!(cert, NonIsoCertificate::MaxLeafDistanceMismatch(_, _)));
        assert!(check_certificate(cert, &fam.members[*i], &fam.members[*j]));
    }
    let mut verified = 0;
    for (m, ev) in fam.members.iter().zip(&fam.evidence) {
        let into = ev.into_base.as_ref().expect("member-to-base witness");
        let from = ev.from_base.as_ref().expect("base-to-member witness");
        assert_eq!(
            verify_witness(&EmbeddingWitness::Truncated(into.clone()), m, &fam.base, 12),
            Ok(true)
        );
        assert!(core_respecting(into, m, &fam.base, 12));
        assert_eq!(
            verify_witness(&EmbeddingWitness::Truncated(from.clone()), &fam.base, m, 12),
            Ok(true)
        );
        assert!(core_respecting(from, &fam.base, m, 12));
        verified += 2;
    }
    assert_eq!(verified, 16);
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 30.0, "criterion 8 took {secs:.1}s, limit 30s");
    println!("acceptance 08 binary pendant family: 8 members, 28 certificates, 16 core-respecting witnesses at depth 12: pass");
}

#[test]
fn criterion_09_degree_profile_separates_binary_from_pruned_sibling() {
    let g = gallery();
    let binary = &g["binary"].presentation;
    let pruned = &g["pruned_binary"].presentation;
    assert_eq!(degree_count(binary, Count::Finite(2)), Count::Finite(1));
    assert_eq!(degree_count(pruned, Count::Finite(2)), Count::Finite(2));
    let cert = NonIsoCertificate::DegreeProfileMismatch {
        degree: Count::Finite(2),
        count1: Count::Finite(1),
        count2: Count::Finite(2),
    };
    assert!(check_certificate(&cert, binary, pruned));
    let v = arbor_core::analyzer::analyze(binary, &arbor_core::analyzer::Budget::default());
    assert_eq!(v.outcome, arbor_core::analyzer::Outcome::Infinite);
    assert_eq!(v.justification, arbor_core::analyzer::JUSTIFY_LEAFLESS);
    println!("acceptance 09 degree-2 profile 1 vs 2, certificate checks, binary tree analyzed infinite: pass");
}

#[test]
fn criterion_10_star_family_and_analysis() {
    let fam = star_family(10);
    assert_eq!(fam.members.len(), 10);
    assert!(validate_family(&fam));
    assert_eq!(fam.certificates.len(), 45);
    for (i, j, cert) in &fam.certificates {
        let cert = cert.as_ref().expect("all star pairs certified");
        assert!(check_certificate(cert, &fam.members[*i], &fam.members[*j]));
    }
    for m in &fam.members {
        assert_eq!(rank_of_presentation(m), RankValue::Finite(3));
        assert_eq!(end_category(m), EndCategory::ZeroEnds);
    }
    let star = &gallery()["star"].presentation;
    let v = arbor_core::analyzer::analyze(star, &arbor_core::analyzer::Budget::default());
    assert_eq!(v.outcome, arbor_core::analyzer::Outcome::Infinite);
    assert_eq!(v.justification, arbor_core::analyzer::JUSTIFY_CONDITION1);
    println!("acceptance 10 star family: 10 certified members of rank 3, star analyzed infinite via repeated branch: pass");
}

#[test]
fn criterion_11_cap_two_equals_cap_three() {
    for (name, p) in corpus() {
        assert_eq!(
            rank_of_presentation_capped(&p, 2),
            rank_of_presentation_capped(&p, 3),
            "{name}"
        );
    }
    let mut rng = Rng::new(0xACCE_000B);
    for _ in 0..200 {
        let p = random_presentation(&mut rng, 5);
        assert_eq!(
            rank_of_presentation_capped(&p, 2),
            rank_of_presentation_capped(&p, 3),
            "{}",
            serialize(&p)
        );
    }
    println!("acceptance 11 pruning rank with cap 2 equals cap 3 on corpus and 200 random presentations: pass");
}

fn run_cli(args: &[&str]) -> (String, String, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_arbor-rank"))
        .args(args)
        .env_remove("ARBOR_RANK_CONFIG")
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
        out.status.code(),
    )
}

#[test]
fn criterion_12_cli_round_trip_and_determinism() {
    let dir = corpus_dir();
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "dsl"))
        .collect();
    files.sort();
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        let p = parse_dsl(&text).unwrap();
        let round = parse_dsl(&serialize(&p)).unwrap();
        assert_eq!(p, round, "round trip on {}", f.display());

        let path = f.to_str().unwrap();
        let (json1, _, code) = run_cli(&["rank", path, "--format", "json"]);
        assert_eq!(code, Some(0), "rank exits cleanly on {path}");
        let parsed: serde_json::Value = serde_json::from_str(&json1).expect("valid JSON");
        assert!(parsed.get("rank").is_some() && parsed.get("ends").is_some());
        let (json2, _, _) = run_cli(&["rank", path, "--format", "json"]);
        assert_eq!(json1, json2, "deterministic rank output on {path}");

        let (dot1, _, code) = run_cli(&["render", path, "--depth", "4"]);
        assert_eq!(code, Some(0));
        assert!(dot1.starts_with("digraph") && dot1.trim_end().ends_with('}'));
        let (dot2, _, _) = run_cli(&["render", path, "--depth", "4"]);
        assert_eq!(dot1, dot2, "deterministic render output on {path}");
    }

    // config file switches the default format
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.toml");
    std::fs::write(&cfg, "format = \"json\"\n").unwrap();
    let binary = dir.join("binary.dsl");
    let out = Command::new(env!("CARGO_BIN_EXE_arbor-rank"))
        .args(["rank", binary.to_str().unwrap()])
        .env("ARBOR_RANK_CONFIG", &cfg)
        .output()
        .unwrap();
    let v: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("config file selects JSON output");
    assert_eq!(v["ends"], "many-ends");

    // family export manifests are valid JSON and deterministic
    let fam1 = tmp.path().join("fam1");
    let fam2 = tmp.path().join("fam2");
    for out_dir in [&fam1, &fam2] {
        let (_, err, code) = run_cli(&[
            "siblings",
            binary.to_str().unwrap(),
            "--family",
            "leafless",
            "--count",
            "3",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code, Some(0), "siblings export: {err}");
    }
    let m1 = std::fs::read_to_string(fam1.join("manifest.json")).unwrap();
    let m2 = std::fs::read_to_string(fam2.join("manifest.json")).unwrap();
    assert_eq!(m1, m2, "deterministic manifest");
    let manifest: serde_json::Value = serde_json::from_str(&m1).unwrap();
    assert_eq!(manifest["members"].as_array().unwrap().len(), 3);

    // error paths keep their exit codes
    let bad = tmp.path().join("bad.dsl");
    std::fs::write(&bad, "state a { b:1 } root a").unwrap();
    let (_, _, code) = run_cli(&["rank", bad.to_str().unwrap()]);
    assert_eq!(code, Some(3), "undefined state is a validation error");
    std::fs::write(&bad, "state a { :: } root a").unwrap();
    let (_, _, code) = run_cli(&["rank", bad.to_str().unwrap()]);
    assert_eq!(code, Some(2), "syntax error");
    let star = dir.join("star.dsl");
    let (_, _, code) = run_cli(&["decompose", star.to_str().unwrap()]);
    assert_eq!(code, Some(4), "empty core rejects decomposition");

    println!("acceptance 12 CLI round trip, JSON/DOT validation, determinism across runs: pass");
}
