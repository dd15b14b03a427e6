//! `arbor-rank`: ranks, decompositions, sibling families, DOT
//! renderings and sibling-count verdicts for tree presentation files.
//!
//! Exit codes: 2 parse error, 3 validation error, 4 decomposition not
//! applicable, 5 family generator error.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arbor_core::analyzer::{analyze, trim_deepest, Budget};
use arbor_core::decomposition::{leaf_representation, ShapeNode};
use arbor_core::embedding::{build_shift_witness, search_shift_rule, TruncatedWitness, UnfoldSpec};
use arbor_core::presentation::{parse_dsl, DslError, Multiplicity};
use arbor_core::siblings::{
    branch_swap_family, leafless_family, path_attach_family, star_family, SiblingFamily,
};
use arbor_core::TreePresentation;
use clap::{Parser, Subcommand, ValueEnum};
use config::{Format, RunConfig};

const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NOT_APPLICABLE: u8 = 4;
const EXIT_GENERATOR: u8 = 5;

#[derive(Parser)]
#[command(name = "arbor-rank", version, about = "Pruning ranks and sibling families of finitely presented trees")]
struct Cli {
    /// TOML config file; flags take precedence. Defaults to
    /// $ARBOR_RANK_CONFIG when unset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FamilyKind {
    Leafless,
    PathAttach,
    BranchSwap,
    Star,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, end category and core classes of a presentation.
    Rank {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Leafless-core / leafy-branch decomposition.
    Decompose {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Generate a sibling family and write it to a directory.
    Siblings {
        file: PathBuf,
        #[arg(long, value_enum)]
        family: FamilyKind,
        #[arg(long)]
        count: Option<u32>,
        #[arg(long)]
        out: PathBuf,
        /// Witness depth for member embeddings.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// DOT rendering of the truncated unfolding.
    Render {
        file: PathBuf,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        width: Option<u32>,
    },
    /// Sibling-count verdict with attached evidence.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        budget_depth: Option<u32>,
        #[arg(long)]
        budget_vertices: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn load_presentation(path: &Path) -> Result<TreePresentation, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    parse_dsl(&text).map_err(|e| {
        let code = match e {
            DslError::Syntax { .. } | DslError::BadMultiplicity { .. } => EXIT_PARSE,
            DslError::UndefinedState(_) | DslError::DuplicateState(_) | DslError::NoRoot => {
                EXIT_VALIDATION
            }
        };
        fail(code, format!("{}: {e}", path.display()))
    })
}

fn self_witness(p: &TreePresentation, depth: u32) -> Result<TruncatedWitness, Failure> {
    let rule = search_shift_rule(p).ok_or_else(|| {
        fail(EXIT_GENERATOR, "no proper self-embedding rule found for this presentation")
    })?;
    let has_omega = (0..p.state_count())
        .any(|s| p.children(s).iter().any(|&(_, m)| m == Multiplicity::Omega));
    let w = if has_omega { 3 } else { 2 };
    let slack: u32 = (0..p.state_count())
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
        .unwrap_or(0);
    build_shift_witness(
        p,
        p,
        &rule,
        UnfoldSpec::new(depth, w),
        UnfoldSpec::new(depth + rule.anchor.len() as u32, w + slack),
    )
    .ok_or_else(|| fail(EXIT_GENERATOR, "self-embedding witness construction failed"))
}

/// Appends `extra` trimmed copies of the first infinitely repeated
/// sub-branch found in preorder; None when no such sub-branch exists.
fn with_extra_trims(node: &ShapeNode, extra: u32) -> Option<ShapeNode> {
    let hit = node.children.iter().find_map(|(c, m)| {
        if *m == Multiplicity::Omega && c.height() >= 1 {
            trim_deepest(c)
        } else {
            None
        }
    });
    if let Some(small) = hit {
        let mut s = node.clone();
        if extra > 0 {
            s.children.push((small, Multiplicity::Finite(extra)));
        }
        return Some(s);
    }
    for (i, (c, _)) in node.children.iter().enumerate() {
        if let Some(rebuilt) = with_extra_trims(c, extra) {
            let mut s = node.clone();
            s.children[i].0 = rebuilt;
            return Some(s);
        }
    }
    None
}

/// Shapes for branch swapping: the group's own shape plus variants
/// with extra trimmed copies of its infinitely repeated sub-branch.
fn swap_shapes(base: &ShapeNode, count: u32) -> Result<Vec<ShapeNode>, Failure> {
    (0..count)
        .map(|k| {
            with_extra_trims(base, k).ok_or_else(|| {
                fail(
                    EXIT_GENERATOR,
                    "branch swap needs an infinitely repeated sub-branch with a proper trim",
                )
            })
        })
        .collect()
}

fn generate_family(
    p: &TreePresentation,
    kind: FamilyKind,
    count: u32,
    depth: u32,
) -> Result<SiblingFamily, Failure> {
    let gen_err = |e: arbor_core::siblings::FamilyError| fail(EXIT_GENERATOR, e.to_string());
    match kind {
        FamilyKind::Star => {
            if count < 1 {
                return Err(fail(EXIT_GENERATOR, "count must be at least 1"));
            }
            Ok(star_family(count))
        }
        FamilyKind::Leafless => {
            let f = self_witness(p, depth)?;
            leafless_family(p, &f, count).map_err(gen_err)
        }
        FamilyKind::PathAttach => {
            let f = self_witness(p, depth)?;
            let root = p.state_name(p.root_state()).to_string();
            path_attach_family(p, &f, &root, count).map_err(gen_err)
        }
        FamilyKind::BranchSwap => {
            let rep = leaf_representation(p)
                .map_err(|e| fail(EXIT_GENERATOR, e.to_string()))?;
            let group = rep.branches.first().ok_or_else(|| {
                fail(EXIT_GENERATOR, "presentation has no leafy branches to swap")
            })?;
            let shapes = swap_shapes(&group.shape.as_shape(), count)?;
            branch_swap_family(p, &group.shape, &shapes, count as usize).map_err(gen_err)
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let cfg = RunConfig::load(cli.config.as_deref())
        .map_err(|e| fail(EXIT_VALIDATION, e))?;
    match cli.command {
        Command::Rank { file, format } => {
            let p = load_presentation(&file)?;
            Ok(match format.unwrap_or(cfg.format) {
                Format::Json => {
                    serde_json::to_string_pretty(&output::rank_report_json(&p)).unwrap() + "\n"
                }
                Format::Text => output::rank_report_text(&p),
            })
        }
        Command::Decompose { file, format } => {
            let p = load_presentation(&file)?;
            let rep = leaf_representation(&p)
                .map_err(|e| fail(EXIT_NOT_APPLICABLE, e.to_string()))?;
            Ok(match format.unwrap_or(cfg.format) {
                Format::Json => {
                    serde_json::to_string_pretty(&output::decompose_report_json(&rep)).unwrap()
                        + "\n"
                }
                Format::Text => output::decompose_report_text(&rep),
            })
        }
        Command::Siblings { file, family, count, out, depth } => {
            let p = load_presentation(&file)?;
            let fam = generate_family(
                &p,
                family,
                count.unwrap_or(cfg.count),
                depth.unwrap_or(cfg.witness_depth),
            )?;
            output::export_family(&fam, &out).map_err(|e| fail(EXIT_GENERATOR, e))
        }
        Command::Render { file, depth, width } => {
            let p = load_presentation(&file)?;
            output::render_dot(&p, depth.unwrap_or(cfg.depth), width.unwrap_or(cfg.omega_width))
                .map_err(|e| fail(EXIT_VALIDATION, e))
        }
        Command::Analyze { file, budget_depth, budget_vertices, format } => {
            let p = load_presentation(&file)?;
            let budget = Budget {
                witness_depth: budget_depth.unwrap_or(cfg.budget_depth),
                vertex_cap: budget_vertices.unwrap_or(cfg.budget_vertices),
            };
            let v = analyze(&p, &budget);
            Ok(match format.unwrap_or(cfg.format) {
                Format::Json => {
                    serde_json::to_string_pretty(&output::analyze_report_json(&v)).unwrap() + "\n"
                }
                Format::Text => output::analyze_report_text(&v),
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
