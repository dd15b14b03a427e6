//! Property tests tying the main algorithms to the independent
//! oracles on randomized inputs.

use proptest::prelude::*;

use crate::finite_tree::{isomorphic, FiniteTree};
use crate::oracle::{
    naive_rank, random_presentation, random_relabel, random_tree, Rng,
};
use crate::presentation::{parse_dsl, serialize, unfold, UnfoldConfig};
use crate::pruning::{
    classify_core, end_category, prune_step, pruning_trace, rank_of_presentation,
    rank_of_presentation_capped, EndCategory, RankValue,
};

fn forest_components_are_trees(t: &FiniteTree) -> bool {
    // every pruning stage must stay a tree or become empty; a stage is
    // produced via induced subgraphs, so a broken invariant would show
    // up as a cycle or disconnection
    t.is_empty() || t.is_tree()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pruning_stages_stay_trees(seed in any::<u64>(), n in 1u64..80) {
        let mut rng = Rng::new(seed);
        let mut t = random_tree(&mut rng, n);
        while !t.is_empty() {
            prop_assert!(forest_components_are_trees(&t));
            let next = prune_step(&t);
            prop_assert!(next.vertex_count() < t.vertex_count() || next == t);
            if next == t {
                break;
            }
            t = next;
        }
    }

    #[test]
    fn trace_rank_matches_naive_simulator(seed in any::<u64>(), n in 1u64..60) {
        let mut rng = Rng::new(seed);
        let t = random_tree(&mut rng, n);
        let (_, rank) = pruning_trace(&t);
        prop_assert_eq!(rank, RankValue::Finite(naive_rank(&t)));
    }

    #[test]
    fn rank_is_relabeling_invariant(seed in any::<u64>(), n in 1u64..60) {
        let mut rng = Rng::new(seed);
        let t = random_tree(&mut rng, n);
        let r = random_relabel(&mut rng, &t);
        prop_assert!(isomorphic(&t, &r));
        prop_assert_eq!(pruning_trace(&t).1, pruning_trace(&r).1);
    }

    #[test]
    fn isomorphic_trees_are_equimorphic(seed in any::<u64>(), n in 1u64..20) {
        let mut rng = Rng::new(seed);
        let t = random_tree(&mut rng, n);
        let r = random_relabel(&mut rng, &t);
        prop_assert!(crate::embedding::equimorphic_finite(&t, &r));
    }

    #[test]
    fn parse_serialize_roundtrip(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let p = random_presentation(&mut rng, 5);
        let reparsed = parse_dsl(&serialize(&p));
        prop_assert_eq!(reparsed, Ok(p));
    }

    #[test]
    fn unfold_prefix_property(seed in any::<u64>(), d in 0u32..5) {
        let mut rng = Rng::new(seed);
        let p = random_presentation(&mut rng, 4);
        let cfg = UnfoldConfig { omega_width: 2, vertex_cap: 1 << 16 };
        let (Ok(small), Ok(big)) = (unfold(&p, d, &cfg), unfold(&p, d + 1, &cfg)) else {
            return Ok(());
        };
        for v in small.vertices() {
            prop_assert_eq!(small.state_of(v), big.state_of(v));
            prop_assert_eq!(small.parent_of(v), big.parent_of(v));
        }
    }

    #[test]
    fn rank_agrees_between_caps(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let p = random_presentation(&mut rng, 5);
        prop_assert_eq!(
            rank_of_presentation_capped(&p, 2),
            rank_of_presentation_capped(&p, 3)
        );
    }

    #[test]
    fn end_category_consistent_with_core(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let p = random_presentation(&mut rng, 5);
        let core = classify_core(&p);
        match end_category(&p) {
            EndCategory::ManyEnds => prop_assert!(!core.is_empty()),
            EndCategory::OneEnd => {
                prop_assert!(core.is_empty());
                prop_assert_eq!(rank_of_presentation(&p), RankValue::Omega);
            }
            EndCategory::ZeroEnds => {
                prop_assert!(core.is_empty());
                prop_assert!(matches!(rank_of_presentation(&p), RankValue::Finite(_)));
            }
        }
    }
}
