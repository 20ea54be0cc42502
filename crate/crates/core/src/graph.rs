//! Undirected simple graphs and the structure the QFI closed forms consume:
//! neighborhoods, twins and true-twins classes, leaves and roots, the set `U`
//! of vertices without a true twin, and local complementation.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{MetroError, Result};
use crate::vertex_set::VertexSet;

/// Undirected simple graph on `n` vertices, stored as adjacency bitsets.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl Graph {
    /// Edgeless graph on `n ≥ 1` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(MetroError::InvalidGraph("vertex count must be positive".into()));
        }
        Ok(Self {
            n,
            adj: vec![VertexSet::empty(n); n],
        })
    }

    /// Builds a graph from an edge list. Self-loops, duplicates and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(i, j) in edges {
            g.check_vertex(i)?;
            g.check_vertex(j)?;
            if i == j {
                return Err(MetroError::InvalidGraph(format!("self-loop on vertex {i}")));
            }
            if g.adj[i].contains(j) {
                return Err(MetroError::InvalidGraph(format!("duplicate edge ({i}, {j})")));
            }
            g.adj[i].insert(j);
            g.adj[j].insert(i);
        }
        Ok(g)
    }

    pub(crate) fn from_adjacency_unchecked(adj: Vec<VertexSet>) -> Self {
        Self { n: adj.len(), adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(MetroError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// The open neighborhood `A_v`.
    pub fn neighborhood(&self, v: usize) -> Result<&VertexSet> {
        self.check_vertex(v)?;
        Ok(&self.adj[v])
    }

    /// Neighborhood without the range check; panics on a bad index.
    pub fn adjacency(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.adj[i].contains(j)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| self.adj[i].iter().filter(move |&j| j > i).map(move |j| (i, j)))
            .collect()
    }

    pub(crate) fn toggle_edge(&mut self, i: usize, j: usize) {
        debug_assert_ne!(i, j);
        self.adj[i].toggle(j);
        self.adj[j].toggle(i);
    }

    pub(crate) fn add_edge(&mut self, i: usize, j: usize) {
        if i != j && !self.adj[i].contains(j) {
            self.toggle_edge(i, j);
        }
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for w in self.adj[v].iter() {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = VertexSet::empty(self.n);
        seen.insert(0);
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for w in self.adj[v].iter() {
                if !seen.contains(w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        seen.len() == self.n
    }

    /// Protocol operations run only on connected graphs.
    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(MetroError::Disconnected)
        }
    }

    /// Toggles every edge inside `A_v`.
    pub fn local_complement(&self, v: usize) -> Result<Graph> {
        self.check_vertex(v)?;
        let mut g = self.clone();
        let nb = self.adj[v].to_vec();
        for (a, &i) in nb.iter().enumerate() {
            for &j in &nb[a + 1..] {
                g.toggle_edge(i, j);
            }
        }
        Ok(g)
    }

    /// A copy with one extra vertex attached to `v` as a pendant leaf.
    pub fn with_pendant_leaf(&self, v: usize) -> Result<Graph> {
        self.check_vertex(v)?;
        let n = self.n + 1;
        let mut adj: Vec<VertexSet> = self
            .adj
            .iter()
            .map(|a| a.with_universe(n).expect("grows universe"))
            .collect();
        adj.push(VertexSet::empty(n));
        let mut g = Graph::from_adjacency_unchecked(adj);
        g.add_edge(v, n - 1);
        Ok(g)
    }

    /// Places `other` after `self`, shifting its labels by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let n = self.n + other.n;
        let mut adj = Vec::with_capacity(n);
        for a in &self.adj {
            adj.push(a.with_universe(n).expect("grows universe"));
        }
        for a in &other.adj {
            adj.push(VertexSet::from_vertices(n, a.iter().map(|j| j + self.n)));
        }
        Graph::from_adjacency_unchecked(adj)
    }

    /// Twins and true-twins classes, leaves, roots, and the `U`/`Ū` split.
    pub fn twins_structure(&self) -> TwinsStructure {
        let twins_classes = group_by_key(self.n, |v| self.adj[v].clone());
        let true_twins_classes = group_by_key(self.n, |v| {
            let mut closed = self.adj[v].clone();
            closed.insert(v);
            closed
        });

        let mut leaves = VertexSet::empty(self.n);
        let mut roots = VertexSet::empty(self.n);
        for v in 0..self.n {
            if self.adj[v].len() == 1 {
                leaves.insert(v);
                roots.insert(self.adj[v].first().expect("degree one"));
            }
        }

        let mut u_set = VertexSet::empty(self.n);
        for class in true_twins_classes.iter().filter(|c| c.len() == 1) {
            u_set.insert(class[0]);
        }
        let u_bar = u_set.complement();

        TwinsStructure {
            twins_classes,
            true_twins_classes,
            leaves,
            roots,
            u_set,
            u_bar,
        }
    }
}

/// Equivalence classes of vertices sharing a key, ordered by smallest member.
fn group_by_key(n: usize, key: impl Fn(usize) -> VertexSet) -> Vec<Vec<usize>> {
    let mut index: HashMap<VertexSet, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let k = key(v);
        match index.get(&k) {
            Some(&c) => classes[c].push(v),
            None => {
                index.insert(k, classes.len());
                classes.push(vec![v]);
            }
        }
    }
    classes
}

/// Derived structure of a graph. Singleton classes are kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwinsStructure {
    pub twins_classes: Vec<Vec<usize>>,
    pub true_twins_classes: Vec<Vec<usize>>,
    pub leaves: VertexSet,
    pub roots: VertexSet,
    pub u_set: VertexSet,
    pub u_bar: VertexSet,
}

impl TwinsStructure {
    /// Twins classes with at least two members.
    pub fn nontrivial_twins(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.twins_classes.iter().filter(|c| c.len() >= 2)
    }

    pub fn nontrivial_true_twins(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.true_twins_classes.iter().filter(|c| c.len() >= 2)
    }
}

/// Named graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StandardGraph {
    /// `n` vertices; vertex 0 is the center.
    Star { n: usize },
    Cycle { n: usize },
    Path { n: usize },
    Complete { n: usize },
    /// Parts `0..a` and `a..a+b`.
    CompleteBipartite { a: usize, b: usize },
}

impl StandardGraph {
    pub fn build(self) -> Result<Graph> {
        let bad = |msg: &str| Err(MetroError::InvalidParameter(msg.to_string()));
        match self {
            StandardGraph::Star { n } => {
                if n < 2 {
                    return bad("star needs at least 2 vertices");
                }
                let edges: Vec<_> = (1..n).map(|j| (0, j)).collect();
                Graph::from_edges(n, &edges)
            }
            StandardGraph::Cycle { n } => {
                if n < 3 {
                    return bad("cycle needs at least 3 vertices");
                }
                let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
                Graph::from_edges(n, &edges)
            }
            StandardGraph::Path { n } => {
                if n < 1 {
                    return bad("path needs at least 1 vertex");
                }
                let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
                Graph::from_edges(n, &edges)
            }
            StandardGraph::Complete { n } => {
                if n < 1 {
                    return bad("complete graph needs at least 1 vertex");
                }
                let edges: Vec<_> = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .collect();
                Graph::from_edges(n, &edges)
            }
            StandardGraph::CompleteBipartite { a, b } => {
                if a < 1 || b < 1 {
                    return bad("complete bipartite parts must be nonempty");
                }
                let edges: Vec<_> = (0..a)
                    .flat_map(|i| (a..a + b).map(move |j| (i, j)))
                    .collect();
                Graph::from_edges(a + b, &edges)
            }
        }
    }
}

/// On-disk graph schema: `{"n": int, "edges": [[i,j],...], "labels": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, usize>>,
}

/// A graph plus optional vertex names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Option<BTreeMap<String, usize>>,
}

impl LabeledGraph {
    pub fn unlabeled(graph: Graph) -> Self {
        Self { graph, labels: None }
    }

    pub fn from_file(file: GraphFile) -> Result<Self> {
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Graph::from_edges(file.n, &edges)?;
        if let Some(labels) = &file.labels {
            let mut seen = VertexSet::empty(file.n);
            for (name, &v) in labels {
                graph.check_vertex(v)?;
                if seen.contains(v) {
                    return Err(MetroError::InvalidGraph(format!(
                        "vertex {v} has more than one label (second: {name:?})"
                    )));
                }
                seen.insert(v);
            }
        }
        Ok(Self {
            graph,
            labels: file.labels,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| MetroError::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.graph.n(),
            edges: self.graph.edges().into_iter().map(|(i, j)| [i, j]).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("graph file serializes")
    }

    /// Resolves a vertex by label or by decimal index.
    pub fn resolve(&self, name: &str) -> Result<usize> {
        if let Some(&v) = self.labels.as_ref().and_then(|l| l.get(name)) {
            return Ok(v);
        }
        let v: usize = name
            .parse()
            .map_err(|_| MetroError::Parse(format!("unknown vertex {name:?}")))?;
        self.graph.check_vertex(v)?;
        Ok(v)
    }

    pub fn vertex_name(&self, v: usize) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.iter().find(|(_, &i)| i == v).map(|(k, _)| k.clone()))
            .unwrap_or_else(|| v.to_string())
    }
}
