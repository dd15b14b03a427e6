//! Cantor–Bendixson pruning ranks, leaf representations and sibling
//! families for finite trees and finitely presented infinite trees.
//!
//! The crate is split along the pipeline:
//!
//! * [`finite_tree`] — exact finite trees, canonical forms, isomorphism;
//! * [`presentation`] — the DSL for regular tree presentations and their
//!   unfoldings;
//! * [`pruning`] — the leaf-pruning recursion, ranks and the leafless core;
//! * [`decomposition`] — the core / leafy-branch decomposition;
//! * [`embedding`] — embedding tests and bounded-depth witnesses;
//! * [`siblings`] — sibling-family generators and non-isomorphism
//!   certificates;
//! * [`analyzer`] — routing a presentation to a sibling-number verdict.
//!
//! The crate is `no_std` + `alloc`; all IO lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analyzer;
pub mod decomposition;
pub mod embedding;
pub mod finite_tree;
pub mod presentation;
pub mod pruning;
pub mod siblings;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

#[cfg(test)]
mod proptests;

pub use finite_tree::{FiniteTree, RootedFiniteTree, VertexId};
pub use presentation::{Multiplicity, OccurrenceClass, TreePresentation};
pub use pruning::{EndCategory, RankValue};
