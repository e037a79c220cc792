mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{random_program, rules, GenConfig};
use tggflow::engine::{
    backward_transform, check_consistency, forward_transform, transform, Direction, TransformOptions,
};
use tggflow::flowgraphs::metamodels::{corr_metamodel, flow_metamodel};
use tggflow::graph::canon::{canonical_graph, canonical_triple};
use tggflow::graph::{Graph, TripleModel};
use tggflow::minijava::{normalize, parse_program, unparse_program};
use tggflow::rules::Domain;

fn program(seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    random_program(
        &mut rng,
        &GenConfig {
            max_statements: 8,
            max_depth: 3,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unparse_inverts_parse(seed in any::<u64>()) {
        let text = program(seed);
        let ast = parse_program(&text).unwrap();
        let printed = unparse_program(&ast).unwrap();
        let reparsed = parse_program(&printed).unwrap();
        prop_assert_eq!(canonical_graph(&ast), canonical_graph(&reparsed));
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let once = normalize(&program(seed)).unwrap();
        prop_assert_eq!(normalize(&once).unwrap(), once);
    }

    #[test]
    fn forward_then_backward_restores_the_program(seed in any::<u64>()) {
        let (rs, reg) = rules();
        let text = program(seed);
        let fwd = forward_transform(parse_program(&text).unwrap(), &rs, &reg).unwrap();
        let back = backward_transform(fwd.triple.target, &rs, &reg).unwrap();
        prop_assert_eq!(unparse_program(&back.triple.source).unwrap(), normalize(&text).unwrap());
    }

    #[test]
    fn forward_results_are_complete_and_conformant(seed in any::<u64>()) {
        let (rs, reg) = rules();
        let fwd = forward_transform(parse_program(&program(seed)).unwrap(), &rs, &reg).unwrap();
        let t = &fwd.triple;
        prop_assert!(fwd.marks.unmarked(t, Domain::Source).is_empty());
        prop_assert!(t.source.conforms().is_empty());
        prop_assert!(t.target.conforms().is_empty());
        prop_assert!(t.conforms().is_empty());
        // Every flow node except sequences is reached by exactly one corr link.
        for n in t.target.nodes().filter(|n| n.ty != "Seq") {
            prop_assert_eq!(t.corrs_from_target(n.id).len(), 1, "flow node {}", n.id);
        }
        prop_assert!(check_consistency(t, &rs, &reg).unwrap().consistent);
    }

    #[test]
    fn match_order_does_not_change_the_result(seed in any::<u64>(), shuffle in any::<u64>()) {
        let (rs, reg) = rules();
        let ast = parse_program(&program(seed)).unwrap();
        let start = || TripleModel::new(ast.clone(), Graph::new(flow_metamodel()), corr_metamodel());
        let ordered = transform(Direction::Forward, start(), &rs, &reg, &TransformOptions::default()).unwrap();
        let shuffled = transform(
            Direction::Forward,
            start(),
            &rs,
            &reg,
            &TransformOptions { shuffle_seed: Some(shuffle) },
        )
        .unwrap();
        prop_assert_eq!(canonical_triple(&ordered.triple), canonical_triple(&shuffled.triple));
    }
}
