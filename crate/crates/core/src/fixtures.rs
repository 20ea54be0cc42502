//! Reference graphs for the worked examples.

use std::collections::BTreeMap;

use crate::graph::{Graph, LabeledGraph};

/// The ten-vertex example graph with vertices `A..J`.
///
/// Fixed by the stated structure: twins `{A,B,D}` hanging off `C`, true twins
/// `{F,G}` with closed neighborhood `{E,F,G,H}`, leaf `J` on root `I`, and the
/// stabilizer of `{C,F,I,J}` acting as identity on exactly `{E,H}`. Those
/// constraints force the bridges `C–E` and `H–I` (or their mirror image).
pub fn fig1a() -> LabeledGraph {
    let names = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"];
    let idx = |s: &str| names.iter().position(|&x| x == s).expect("label");
    let edges: Vec<(usize, usize)> = [
        ("A", "C"),
        ("B", "C"),
        ("D", "C"),
        ("C", "E"),
        ("E", "F"),
        ("E", "G"),
        ("F", "G"),
        ("F", "H"),
        ("G", "H"),
        ("H", "I"),
        ("I", "J"),
    ]
    .iter()
    .map(|&(a, b)| (idx(a), idx(b)))
    .collect();
    let graph = Graph::from_edges(10, &edges).expect("valid fixture");
    let labels: BTreeMap<String, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.to_string(), i))
        .collect();
    LabeledGraph {
        graph,
        labels: Some(labels),
    }
}

/// Six vertices without twins, true twins or leaves: the first such
/// connected graph in edge-mask order (a hexagon).
pub fn fig1b() -> Graph {
    Graph::from_edges(6, &[(0, 4), (0, 5), (1, 3), (1, 5), (2, 3), (2, 4)]).expect("valid fixture")
}

/// Six vertices with `max_α F_α = 10 < F(G) = 12`: the first such connected
/// graph in edge-mask order (a square with pendant leaves on opposite
/// corners).
pub fn fig1c() -> Graph {
    Graph::from_edges(6, &[(0, 2), (0, 3), (0, 5), (1, 2), (1, 3), (1, 4)]).expect("valid fixture")
}
