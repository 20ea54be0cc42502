//! Composite graphs glued from small fragments.
//!
//! A-type composites join fragments by single bridge edges between port
//! vertices; B-type composites fully join neighboring fragments, with the
//! allowed fragment kinds constrained by a stabilizer of the meta-graph.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MetroError, Result};
use crate::graph::{Graph, StandardGraph};
use crate::pauli::{stabilizer_element, PauliLetter};
use crate::qfi_formula::{qfi_upper_bound, search_optimal_alpha, SearchOptions};
use crate::vertex_set::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FragmentKind {
    /// `K_m`: one true-twins class.
    S1,
    /// Star `S_m`: `m−1` leaves forming a twins class.
    S2,
    /// `K_{2,m−2}`: a twins class of vertices with two neighbors.
    S3,
    /// `m` isolated vertices.
    S4,
}

impl FragmentKind {
    pub fn name(self) -> &'static str {
        match self {
            FragmentKind::S1 => "s1",
            FragmentKind::S2 => "s2",
            FragmentKind::S3 => "s3",
            FragmentKind::S4 => "s4",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgraphKind {
    pub kind: FragmentKind,
    pub size: usize,
}

/// The canonical fragment of the given kind and size.
pub fn build_fragment(k: SubgraphKind) -> Result<Graph> {
    let min = match k.kind {
        FragmentKind::S1 | FragmentKind::S2 => 2,
        FragmentKind::S3 => 4,
        FragmentKind::S4 => 1,
    };
    if k.size < min {
        return Err(MetroError::InvalidParameter(format!(
            "{} fragment needs size ≥ {min}, got {}",
            k.kind.name(),
            k.size
        )));
    }
    match k.kind {
        FragmentKind::S1 => StandardGraph::Complete { n: k.size }.build(),
        FragmentKind::S2 => StandardGraph::Star { n: k.size }.build(),
        FragmentKind::S3 => StandardGraph::CompleteBipartite { a: 2, b: k.size - 2 }.build(),
        FragmentKind::S4 => Graph::empty(k.size),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JoinMode {
    #[serde(rename = "A")]
    Bridge,
    #[serde(rename = "B")]
    FullJoin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Permitted,
    Prohibited,
}

/// Which fragment kinds may sit under each meta-stabilizer letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RuleTable(pub BTreeMap<char, BTreeMap<FragmentKind, Rule>>);

impl Default for RuleTable {
    /// X permits s1; Z permits s2, s3 and s4; Y prohibits s1.
    fn default() -> Self {
        use FragmentKind::*;
        let mut t = BTreeMap::new();
        t.insert('X', BTreeMap::from([(S1, Rule::Permitted)]));
        t.insert(
            'Z',
            BTreeMap::from([(S2, Rule::Permitted), (S3, Rule::Permitted), (S4, Rule::Permitted)]),
        );
        t.insert('Y', BTreeMap::from([(S1, Rule::Prohibited)]));
        RuleTable(t)
    }
}

impl RuleTable {
    pub fn lookup(&self, letter: PauliLetter, kind: FragmentKind) -> Option<Rule> {
        self.0.get(&letter.as_char()).and_then(|m| m.get(&kind)).copied()
    }

    pub fn validate(&self) -> Result<()> {
        for letter in self.0.keys() {
            if !matches!(letter, 'X' | 'Y' | 'Z') {
                return Err(MetroError::RuleTable(format!("unknown stabilizer letter '{letter}'")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaGraph {
    #[serde(rename = "type")]
    pub join: JoinMode,
    pub meta_edges: Vec<[usize; 2]>,
    pub assignment: Vec<SubgraphKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta_stabilizer: Option<String>,
}

impl MetaGraph {
    pub fn k(&self) -> usize {
        self.assignment.len()
    }

    pub fn graph(&self) -> Result<Graph> {
        let edges: Vec<(usize, usize)> = self.meta_edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(self.k(), &edges)
    }
}

/// A built composite with the fragment offsets and any rule-table cells that
/// were not specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composite {
    pub graph: Graph,
    pub offsets: Vec<usize>,
    pub unknown_rules: Vec<String>,
}

fn place(meta: &MetaGraph) -> Result<(Graph, Vec<Graph>, Vec<usize>)> {
    if meta.assignment.is_empty() {
        return Err(MetroError::InvalidParameter("empty assignment".into()));
    }
    let fragments: Vec<Graph> = meta.assignment.iter().map(|&k| build_fragment(k)).collect::<Result<_>>()?;
    let mut offsets = Vec::with_capacity(fragments.len());
    let mut g = fragments[0].clone();
    offsets.push(0);
    for f in &fragments[1..] {
        offsets.push(g.n());
        g = g.disjoint_union(f);
    }
    Ok((g, fragments, offsets))
}

/// Lowest-index vertex of degree other than one, else vertex 0.
fn port(f: &Graph) -> usize {
    (0..f.n()).find(|&v| f.degree(v) != 1).unwrap_or(0)
}

/// Fragments joined by one edge per meta-edge between their ports.
pub fn build_a_type(meta: &MetaGraph) -> Result<Composite> {
    if meta.join != JoinMode::Bridge {
        return Err(MetroError::InvalidParameter("A-type construction needs type \"A\"".into()));
    }
    if let Some(k) = meta.assignment.iter().find(|k| k.kind == FragmentKind::S4) {
        return Err(MetroError::InvalidParameter(format!(
            "A-type fragments are s1, s2 or s3, got {}",
            k.kind.name()
        )));
    }
    let mg = meta.graph()?;
    mg.require_connected()?;
    let (mut g, fragments, offsets) = place(meta)?;
    for e in &meta.meta_edges {
        let u = offsets[e[0]] + port(&fragments[e[0]]);
        let v = offsets[e[1]] + port(&fragments[e[1]]);
        g.add_edge(u, v);
    }
    g.require_connected()?;
    Ok(Composite {
        graph: g,
        offsets,
        unknown_rules: Vec::new(),
    })
}

/// Checks that `letters` has no identity and equals the letters of some
/// `S_α` of the meta-graph, with α the X/Y positions.
pub fn check_meta_stabilizer(meta_graph: &Graph, letters: &str) -> Result<Vec<PauliLetter>> {
    let parsed: Vec<PauliLetter> = letters
        .chars()
        .map(|c| {
            PauliLetter::from_char(c)
                .ok_or_else(|| MetroError::Parse(format!("'{c}' is not a Pauli letter")))
        })
        .collect::<Result<_>>()?;
    if parsed.len() != meta_graph.n() {
        return Err(MetroError::SizeMismatch {
            expected: meta_graph.n(),
            found: parsed.len(),
        });
    }
    if let Some(i) = parsed.iter().position(|&l| l == PauliLetter::I) {
        return Err(MetroError::RankDeficient(format!("{letters} (identity at meta-vertex {i})")));
    }
    let alpha = VertexSet::from_vertices(
        meta_graph.n(),
        (0..parsed.len()).filter(|&i| matches!(parsed[i], PauliLetter::X | PauliLetter::Y)),
    );
    if alpha.is_empty() {
        return Err(MetroError::RankDeficient(format!("{letters} (no X or Y letter)")));
    }
    let (s, _) = stabilizer_element(meta_graph, &alpha)?;
    if s.letters() != parsed {
        let actual: String = s.letters().iter().map(|l| l.as_char()).collect();
        return Err(MetroError::RankDeficient(format!(
            "{letters} (its X/Y positions give {actual})"
        )));
    }
    Ok(parsed)
}

/// Fragments fully joined along meta-edges, subject to the rule table.
pub fn build_b_type(meta: &MetaGraph, rules: &RuleTable) -> Result<Composite> {
    if meta.join != JoinMode::FullJoin {
        return Err(MetroError::InvalidParameter("B-type construction needs type \"B\"".into()));
    }
    rules.validate()?;
    let mg = meta.graph()?;
    mg.require_connected()?;
    let letters_text = meta
        .meta_stabilizer
        .as_deref()
        .ok_or_else(|| MetroError::InvalidParameter("B-type construction needs a meta_stabilizer".into()))?;
    let letters = check_meta_stabilizer(&mg, letters_text)?;
    let mut unknown_rules = Vec::new();
    for (i, (k, l)) in meta.assignment.iter().zip(&letters).enumerate() {
        match rules.lookup(*l, k.kind) {
            Some(Rule::Prohibited) => {
                return Err(MetroError::RuleTable(format!(
                    "meta-vertex {i}: letter {} prohibits {}",
                    l.as_char(),
                    k.kind.name()
                )))
            }
            Some(Rule::Permitted) => {}
            None => unknown_rules.push(format!("{}/{} at meta-vertex {i}", l.as_char(), k.kind.name())),
        }
    }
    let (mut g, fragments, offsets) = place(meta)?;
    for e in &meta.meta_edges {
        for u in 0..fragments[e[0]].n() {
            for v in 0..fragments[e[1]].n() {
                g.add_edge(offsets[e[0]] + u, offsets[e[1]] + v);
            }
        }
    }
    g.require_connected()?;
    Ok(Composite {
        graph: g,
        offsets,
        unknown_rules,
    })
}

/// Builds either type.
pub fn build(meta: &MetaGraph, rules: &RuleTable) -> Result<Composite> {
    match meta.join {
        JoinMode::Bridge => build_a_type(meta),
        JoinMode::FullJoin => build_b_type(meta, rules),
    }
}

// ---------------------------------------------------------------------------
// Scaling experiments

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingFamily {
    /// `N = c³`: `c` stars of size `c²` bridged center to center along a path.
    AtypeStarCluster,
    /// As above with complete-graph fragments.
    AtypeCompleteCluster,
    Star,
    Cycle,
}

/// The family member on `n` vertices.
pub fn family_graph(family: ScalingFamily, n: usize) -> Result<Graph> {
    match family {
        ScalingFamily::AtypeStarCluster | ScalingFamily::AtypeCompleteCluster => {
            let c = (n as f64).cbrt().round() as usize;
            if c * c * c != n || c < 2 {
                return Err(MetroError::InvalidParameter(format!(
                    "cluster family needs N = c³ with c ≥ 2, got {n}"
                )));
            }
            let kind = if family == ScalingFamily::AtypeStarCluster {
                FragmentKind::S2
            } else {
                FragmentKind::S1
            };
            let meta = MetaGraph {
                join: JoinMode::Bridge,
                meta_edges: (1..c).map(|i| [i - 1, i]).collect(),
                assignment: vec![SubgraphKind { kind, size: c * c }; c],
                meta_stabilizer: None,
            };
            Ok(build_a_type(&meta)?.graph)
        }
        ScalingFamily::Star => StandardGraph::Star { n }.build(),
        ScalingFamily::Cycle => StandardGraph::Cycle { n }.build(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub best_qfi: u64,
    pub bound: u64,
    pub alpha_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub family: ScalingFamily,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln F*` against `ln N`.
    pub exponent: f64,
    /// Same fit for the upper bound.
    pub bound_exponent: f64,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Best-found `F_α` and the bound across `n_values`, with log-log fits.
pub fn scaling_experiment(
    family: ScalingFamily,
    n_values: &[usize],
    opts: &SearchOptions,
) -> Result<ScalingReport> {
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(MetroError::InvalidParameter(format!(
            "need ≥3 distinct N values for a fit, got {}",
            ns.len()
        )));
    }
    let rows: Vec<ScalingRow> = ns
        .par_iter()
        .map(|&n| {
            let g = family_graph(family, n)?;
            let r = search_optimal_alpha(&g, opts)?;
            Ok(ScalingRow {
                n,
                best_qfi: r.qfi,
                bound: qfi_upper_bound(&g)?,
                alpha_size: r.alpha.len(),
            })
        })
        .collect::<Result<_>>()?;
    let lx: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| (r.best_qfi as f64).ln()).collect();
    let lb: Vec<f64> = rows.iter().map(|r| (r.bound as f64).ln()).collect();
    Ok(ScalingReport {
        family,
        exponent: fit_slope(&lx, &ly),
        bound_exponent: fit_slope(&lx, &lb),
        rows,
    })
}
