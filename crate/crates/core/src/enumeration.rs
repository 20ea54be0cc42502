//! Exhaustive and random generation of small connected graphs.

use rand::Rng;

use crate::graph::Graph;
use crate::vertex_set::VertexSet;

/// Vertex pairs `(i, j)`, `i < j`, in lexicographic order. Bit `k` of an
/// edge mask selects pair `k`.
pub fn vertex_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// The labeled graph selected by an edge mask over [`vertex_pairs`].
pub fn graph_from_edge_mask(n: usize, pairs: &[(usize, usize)], mask: u64) -> Graph {
    let mut adj = vec![VertexSet::empty(n); n];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if mask >> k & 1 == 1 {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    Graph::from_adjacency_unchecked(adj)
}

/// Every connected labeled graph on `n` vertices, in edge-mask order.
///
/// There are `2^(n(n-1)/2)` candidates, so this is only practical for
/// `n ≤ 7`.
pub fn connected_labeled_graphs(n: usize) -> impl Iterator<Item = (u64, Graph)> {
    assert!((1..=11).contains(&n), "edge mask must fit in 64 bits");
    let pairs = vertex_pairs(n);
    let total = 1u64 << pairs.len();
    (0..total).filter_map(move |mask| {
        let g = graph_from_edge_mask(n, &pairs, mask);
        g.is_connected().then_some((mask, g))
    })
}

/// A random connected graph: a uniform random spanning tree skeleton plus
/// independent extra edges with probability `extra`.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, extra: f64, rng: &mut R) -> Graph {
    assert!(n >= 1);
    let mut g = Graph::empty(n).expect("positive order");
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        g.add_edge(order[k], parent);
    }
    for i in 0..n {
        for j in i + 1..n {
            if !g.has_edge(i, j) && rng.gen_bool(extra) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn connected_counts_match_known_sequence() {
        // Labeled connected graphs: 1, 1, 4, 38, 728, 26704.
        let counts: Vec<usize> = (1..=6).map(|n| connected_labeled_graphs(n).count()).collect();
        assert_eq!(counts, vec![1, 1, 4, 38, 728, 26704]);
    }

    #[test]
    fn random_graphs_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..12 {
            for _ in 0..20 {
                assert!(random_connected_graph(n, 0.3, &mut rng).is_connected());
            }
        }
    }
}
