mod common;

use common::connected_graph;
use proptest::prelude::*;
use stabmetro::Graph;

fn nbrs(g: &Graph, v: usize) -> Vec<usize> {
    g.adjacency(v).to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classes_satisfy_their_defining_equality(g in connected_graph(1, 10)) {
        let ts = g.twins_structure();
        let mut covered = vec![0; g.n()];
        for class in &ts.twins_classes {
            for &v in class {
                covered[v] += 1;
                prop_assert_eq!(nbrs(&g, v), nbrs(&g, class[0]));
            }
        }
        prop_assert!(covered.iter().all(|&c| c == 1));
        let mut covered = vec![0; g.n()];
        for class in &ts.true_twins_classes {
            for &v in class {
                covered[v] += 1;
                let mut a = nbrs(&g, v);
                a.push(v);
                a.sort_unstable();
                let mut b = nbrs(&g, class[0]);
                b.push(class[0]);
                b.sort_unstable();
                prop_assert_eq!(a, b);
            }
        }
        prop_assert!(covered.iter().all(|&c| c == 1));
        // Members of different classes differ.
        for (i, a) in ts.twins_classes.iter().enumerate() {
            for b in &ts.twins_classes[i + 1..] {
                prop_assert_ne!(nbrs(&g, a[0]), nbrs(&g, b[0]));
            }
        }
    }

    #[test]
    fn twin_and_true_twin_pairs_are_disjoint(g in connected_graph(1, 10)) {
        let ts = g.twins_structure();
        for v in ts.nontrivial_twins() {
            for u in ts.nontrivial_true_twins() {
                let shared = v.iter().filter(|x| u.contains(x)).count();
                prop_assert!(shared <= 1);
            }
        }
    }

    #[test]
    fn local_complement_is_an_involution(g in connected_graph(1, 10), v in 0usize..10) {
        let v = v % g.n();
        let h = g.local_complement(v).unwrap();
        prop_assert_eq!(h.n(), g.n());
        for i in 0..h.n() {
            prop_assert!(!h.has_edge(i, i));
            for j in 0..h.n() {
                prop_assert_eq!(h.has_edge(i, j), h.has_edge(j, i));
            }
        }
        prop_assert_eq!(h.local_complement(v).unwrap().edges(), g.edges());
    }

    #[test]
    fn leaves_have_one_neighbor_which_is_a_root(g in connected_graph(2, 10)) {
        let ts = g.twins_structure();
        for v in ts.leaves.iter() {
            let a = nbrs(&g, v);
            prop_assert_eq!(a.len(), 1);
            prop_assert!(ts.roots.contains(a[0]));
        }
        for r in ts.roots.iter() {
            prop_assert!(nbrs(&g, r).iter().any(|&u| ts.leaves.contains(u)));
        }
        prop_assert!(ts.u_set.is_disjoint(&ts.u_bar));
        prop_assert_eq!(ts.u_set.len() + ts.u_bar.len(), g.n());
    }
}
