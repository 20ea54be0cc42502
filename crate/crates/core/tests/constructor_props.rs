mod common;

use common::{naive_bound, rng};
use proptest::prelude::*;
use rand::Rng;
use stabmetro::constructors::{
    build_a_type, build_b_type, build_fragment, FragmentKind, JoinMode, MetaGraph, RuleTable,
    SubgraphKind,
};
use stabmetro::enumeration::random_connected_graph;
use stabmetro::pauli::stabilizer_element;
use stabmetro::qfi_formula::qfi_upper_bound;
use stabmetro::{PauliLetter, VertexSet};

const KINDS: [FragmentKind; 4] = [FragmentKind::S1, FragmentKind::S2, FragmentKind::S3, FragmentKind::S4];

fn min_size(k: FragmentKind) -> usize {
    match k {
        FragmentKind::S3 => 4,
        FragmentKind::S4 => 1,
        _ => 2,
    }
}

#[test]
fn bridged_complete_graphs_lose_more_than_four_per_edge() {
    let meta = MetaGraph {
        join: JoinMode::Bridge,
        meta_edges: vec![[0, 1]],
        assignment: vec![SubgraphKind { kind: FragmentKind::S1, size: 5 }; 2],
        meta_stabilizer: None,
    };
    let c = build_a_type(&meta).unwrap();
    let part = qfi_upper_bound(&build_fragment(meta.assignment[0]).unwrap()).unwrap();
    assert_eq!(part, 25);
    assert_eq!(qfi_upper_bound(&c.graph).unwrap(), 34);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fragments_meet_their_kind(k in 0usize..4, size in 1usize..=64) {
        let kind = KINDS[k];
        let built = build_fragment(SubgraphKind { kind, size });
        prop_assert_eq!(built.is_ok(), size >= min_size(kind));
        let Ok(g) = built else { return Ok(()) };
        prop_assert_eq!(g.n(), size);
        let ts = g.twins_structure();
        let twins: Vec<&Vec<usize>> = ts.nontrivial_twins().collect();
        let true_twins: Vec<&Vec<usize>> = ts.nontrivial_true_twins().collect();
        match kind {
            FragmentKind::S1 => {
                prop_assert!(twins.is_empty());
                prop_assert_eq!(true_twins.len(), 1);
                prop_assert_eq!(true_twins[0].len(), size);
            }
            FragmentKind::S2 => {
                prop_assert!(true_twins.is_empty() || size == 2);
                if size >= 3 {
                    prop_assert_eq!(twins.len(), 1);
                    prop_assert_eq!(twins[0].len(), size - 1);
                    prop_assert!(twins[0].iter().all(|&v| g.degree(v) == 1));
                    prop_assert!(!twins[0].contains(&0));
                }
            }
            FragmentKind::S3 => {
                prop_assert!(true_twins.is_empty());
                prop_assert!(twins.iter().any(|c| c.len() == size - 2 && c.iter().all(|&v| g.degree(v) == 2)));
            }
            FragmentKind::S4 => {
                prop_assert_eq!(g.edge_count(), 0);
            }
        }
    }

    #[test]
    fn a_type_composites_are_connected_and_bounded(k in 1usize..=6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let mg = random_connected_graph(k, 0.3, &mut r);
        let assignment: Vec<SubgraphKind> = (0..k)
            .map(|_| {
                let kind = KINDS[r.gen_range(0..3)];
                SubgraphKind { kind, size: r.gen_range(min_size(kind)..=8) }
            })
            .collect();
        let meta = MetaGraph {
            join: JoinMode::Bridge,
            meta_edges: mg.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            assignment: assignment.clone(),
            meta_stabilizer: None,
        };
        let c = build_a_type(&meta).unwrap();
        prop_assert!(c.graph.is_connected());
        prop_assert_eq!(c.graph.n(), assignment.iter().map(|a| a.size).sum::<usize>());
        // Bridging only changes the ports' own neighborhoods, so each port
        // can lose its twin pairs, true-twin pairs and leaf status, nothing
        // more.
        let mut parts = 0;
        let mut port_loss = 0;
        for &a in &assignment {
            let f = build_fragment(a).unwrap();
            parts += naive_bound(&f);
            let port = (0..f.n()).find(|&v| f.degree(v) != 1).unwrap_or(0);
            let ts = f.twins_structure();
            let class_len = |classes: &[Vec<usize>]| classes.iter().find(|c| c.contains(&port)).unwrap().len() as u64;
            port_loss += 2 * (class_len(&ts.twins_classes) - 1)
                + 2 * (class_len(&ts.true_twins_classes) - 1)
                + 2 * u64::from(f.degree(port) == 1);
        }
        if c.graph.n() != 2 {
            let bound = qfi_upper_bound(&c.graph).unwrap();
            prop_assert!(bound + port_loss >= parts, "{} + {} vs {}", bound, port_loss, parts);
        }
    }

    #[test]
    fn b_type_composites_are_connected(k in 1usize..=6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let mg = random_connected_graph(k, 0.4, &mut r);
        // Letters of a random full-support stabilizer of the meta-graph.
        let letters = loop {
            let alpha = VertexSet::from_mask(k, r.gen_range(1..1u64 << k));
            let (s, _) = stabilizer_element(&mg, &alpha).unwrap();
            if s.weight() == k {
                break s.letters();
            }
            if k == 1 {
                break vec![PauliLetter::X];
            }
        };
        let assignment: Vec<SubgraphKind> = letters
            .iter()
            .map(|l| {
                let kind = match l {
                    PauliLetter::X => FragmentKind::S1,
                    _ => KINDS[r.gen_range(1..4)],
                };
                SubgraphKind { kind, size: r.gen_range(min_size(kind).max(2)..=6) }
            })
            .collect();
        let text: String = letters.iter().map(|l| l.as_char()).collect();
        let meta = MetaGraph {
            join: JoinMode::FullJoin,
            meta_edges: mg.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            assignment,
            meta_stabilizer: Some(text),
        };
        match build_b_type(&meta, &RuleTable::default()) {
            Ok(c) if c.graph.n() == 2 => prop_assert!(c.graph.is_connected()),
            Ok(c) => {
                prop_assert!(c.graph.is_connected());
                prop_assert_eq!(qfi_upper_bound(&c.graph).unwrap(), naive_bound(&c.graph));
            }
            // A lone fragment of isolated points cannot be connected.
            Err(e) => prop_assert!(k == 1 && matches!(e, stabmetro::MetroError::Disconnected), "{e}"),
        }
    }
}
