//! Closed-form QFI of graph-state protocols indexed by a vertex subset α,
//! the structural upper bound, the Hamiltonian and measurement prescription,
//! and search over α.
//!
//! With `x = α` and `z = ⊕_{i∈α} A_i` the stabilizer `S_α` acts as X on
//! `S₁ = x∖z`, as Y on `S₃ = x∩z`, as Z on `S₄ = z∖x` and trivially on `S₂`,
//! so `S₃+S₄ = z` and `S₁+S₄ = x⊕z`.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{self, LocalModel, Mat2};
use crate::error::{MetroError, Result};
use crate::graph::{Graph, TwinsStructure};
use crate::pauli::{stabilizer_element, PauliLetter, PauliString, SupportPartition};
use crate::vertex_set::VertexSet;

fn pairs(k: usize) -> u64 {
    let k = k as u64;
    k * k.saturating_sub(1) / 2
}

fn check_graph(g: &Graph) -> Result<()> {
    g.require_connected()?;
    if g.n() == 2 {
        return Err(MetroError::DegenerateGraph);
    }
    Ok(())
}

fn check_alpha(g: &Graph, alpha: &VertexSet) -> Result<()> {
    if alpha.universe() != g.n() {
        return Err(MetroError::SizeMismatch {
            expected: g.n(),
            found: alpha.universe(),
        });
    }
    if alpha.is_empty() {
        return Err(MetroError::EmptySubset);
    }
    Ok(())
}

/// `z = ⊕_{i∈α} A_i`.
fn z_mask(g: &Graph, alpha: &VertexSet) -> VertexSet {
    let mut z = VertexSet::empty(g.n());
    for i in alpha.iter() {
        z.xor_assign(g.adjacency(i));
    }
    z
}

/// Class masks of size at least two.
fn class_sets(n: usize, classes: &[Vec<usize>]) -> Vec<VertexSet> {
    classes
        .iter()
        .filter(|c| c.len() >= 2)
        .map(|c| VertexSet::from_vertices(n, c.iter().copied()))
        .collect()
}

/// `|S_α| + 2Σ_m C(|V_m∩z|,2) + 2Σ_n C(|U_n∩(x⊕z)|,2) + 2|L∩z|`.
pub fn qfi_alpha(g: &Graph, alpha: &VertexSet) -> Result<u64> {
    check_graph(g)?;
    check_alpha(g, alpha)?;
    let ts = g.twins_structure();
    let scorer = SetScorer::new(g.n(), &ts);
    Ok(scorer.score(alpha, &z_mask(g, alpha)))
}

/// `N + 2Σ_m C(|V_m|,2) + 2Σ_n C(|U_n|,2) + 2|L|`.
pub fn qfi_upper_bound(g: &Graph) -> Result<u64> {
    check_graph(g)?;
    Ok(bound_from_structure(g.n(), &g.twins_structure()))
}

fn bound_from_structure(n: usize, ts: &TwinsStructure) -> u64 {
    let twins: u64 = ts.twins_classes.iter().map(|c| pairs(c.len())).sum();
    let true_twins: u64 = ts.true_twins_classes.iter().map(|c| pairs(c.len())).sum();
    n as u64 + 2 * twins + 2 * true_twins + 2 * ts.leaves.len() as u64
}

/// Whether `S_α` attains the upper bound: `S₂ = ∅`, every true-twins class in
/// `S₁+S₄`, every twins class and every leaf in `S₃+S₄`.
pub fn attainable(g: &Graph, alpha: &VertexSet) -> Result<bool> {
    check_graph(g)?;
    check_alpha(g, alpha)?;
    let ts = g.twins_structure();
    let x = alpha;
    let z = z_mask(g, alpha);
    let x_xor_z = x.symmetric_difference(&z);
    let s2_empty = x.union(&z).len() == g.n();
    let tt_ok = class_sets(g.n(), &ts.true_twins_classes)
        .iter()
        .all(|c| c.is_subset(&x_xor_z));
    let twins_ok = class_sets(g.n(), &ts.twins_classes).iter().all(|c| c.is_subset(&z));
    let leaves_ok = ts.leaves.is_subset(&z);
    Ok(s2_empty && tt_ok && twins_ok && leaves_ok)
}

struct SetScorer {
    twins: Vec<VertexSet>,
    true_twins: Vec<VertexSet>,
    leaves: VertexSet,
}

impl SetScorer {
    fn new(n: usize, ts: &TwinsStructure) -> Self {
        Self {
            twins: class_sets(n, &ts.twins_classes),
            true_twins: class_sets(n, &ts.true_twins_classes),
            leaves: ts.leaves.clone(),
        }
    }

    fn score(&self, x: &VertexSet, z: &VertexSet) -> u64 {
        let x_xor_z = x.symmetric_difference(z);
        let mut f = x.union(z).len() as u64;
        f += 2 * self.twins.iter().map(|c| pairs(c.intersection_len(z))).sum::<u64>();
        f += 2 * self
            .true_twins
            .iter()
            .map(|c| pairs(c.intersection_len(&x_xor_z)))
            .sum::<u64>();
        f + 2 * self.leaves.intersection_len(z) as u64
    }
}

/// Bitmask scorer for graphs with at most 64 vertices.
#[derive(Clone, Debug)]
pub struct MaskScorer {
    n: usize,
    adj: Vec<u64>,
    twins: Vec<u64>,
    true_twins: Vec<u64>,
    leaves: u64,
    bound: u64,
}

impl MaskScorer {
    pub fn new(g: &Graph) -> Result<Self> {
        check_graph(g)?;
        if g.n() > 64 {
            return Err(MetroError::SizeLimit {
                what: "bitmask scorer",
                n: g.n(),
                limit: 64,
            });
        }
        let ts = g.twins_structure();
        let mask = |s: &VertexSet| s.to_mask().expect("at most 64 vertices");
        Ok(Self {
            n: g.n(),
            adj: (0..g.n()).map(|v| mask(g.adjacency(v))).collect(),
            twins: class_sets(g.n(), &ts.twins_classes).iter().map(mask).collect(),
            true_twins: class_sets(g.n(), &ts.true_twins_classes).iter().map(mask).collect(),
            leaves: mask(&ts.leaves),
            bound: bound_from_structure(g.n(), &ts),
        })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn z_of(&self, alpha: u64) -> u64 {
        let mut z = 0;
        let mut rest = alpha;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            z ^= self.adj[i];
            rest &= rest - 1;
        }
        z
    }

    pub fn score_xz(&self, x: u64, z: u64) -> u64 {
        let pc = |m: u64| m.count_ones() as usize;
        let xz = x ^ z;
        let mut f = pc(x | z) as u64;
        for &c in &self.twins {
            f += 2 * pairs(pc(c & z));
        }
        for &c in &self.true_twins {
            f += 2 * pairs(pc(c & xz));
        }
        f + 2 * pc(self.leaves & z) as u64
    }

    pub fn score(&self, alpha: u64) -> u64 {
        self.score_xz(alpha, self.z_of(alpha))
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Flip-by-flip evaluation of the closed form for greedy search.
struct IncrementalScorer<'a> {
    g: &'a Graph,
    x: Vec<bool>,
    z: Vec<bool>,
    twin_of: Vec<Option<usize>>,
    true_twin_of: Vec<Option<usize>>,
    leaf: Vec<bool>,
    twin_count: Vec<usize>,
    true_twin_count: Vec<usize>,
    score: i64,
    alpha_len: usize,
}

impl<'a> IncrementalScorer<'a> {
    fn new(g: &'a Graph, ts: &TwinsStructure) -> Self {
        let n = g.n();
        let index = |classes: &[Vec<usize>]| {
            let mut of = vec![None; n];
            let mut k = 0;
            for c in classes.iter().filter(|c| c.len() >= 2) {
                for &v in c {
                    of[v] = Some(k);
                }
                k += 1;
            }
            (of, k)
        };
        let (twin_of, nt) = index(&ts.twins_classes);
        let (true_twin_of, ntt) = index(&ts.true_twins_classes);
        Self {
            g,
            x: vec![false; n],
            z: vec![false; n],
            twin_of,
            true_twin_of,
            leaf: (0..n).map(|v| ts.leaves.contains(v)).collect(),
            twin_count: vec![0; nt],
            true_twin_count: vec![0; ntt],
            score: 0,
            alpha_len: 0,
        }
    }

    /// Updates the running score for a change of `(x_u, z_u)`.
    fn set_site(&mut self, u: usize, x: bool, z: bool) {
        let (ox, oz) = (self.x[u], self.z[u]);
        let mut delta = (x || z) as i64 - (ox || oz) as i64;
        if let Some(c) = self.twin_of[u] {
            if z != oz {
                let k = self.twin_count[c] as i64;
                if z {
                    delta += 2 * k;
                    self.twin_count[c] += 1;
                } else {
                    delta -= 2 * (k - 1);
                    self.twin_count[c] -= 1;
                }
            }
        }
        if let Some(c) = self.true_twin_of[u] {
            let (old, new) = (ox ^ oz, x ^ z);
            if old != new {
                let k = self.true_twin_count[c] as i64;
                if new {
                    delta += 2 * k;
                    self.true_twin_count[c] += 1;
                } else {
                    delta -= 2 * (k - 1);
                    self.true_twin_count[c] -= 1;
                }
            }
        }
        if self.leaf[u] && z != oz {
            delta += if z { 2 } else { -2 };
        }
        self.x[u] = x;
        self.z[u] = z;
        self.score += delta;
    }

    fn flip(&mut self, v: usize) {
        let xv = !self.x[v];
        let zv = self.z[v];
        self.set_site(v, xv, zv);
        self.alpha_len = if xv { self.alpha_len + 1 } else { self.alpha_len - 1 };
        let nb: Vec<usize> = self.g.adjacency(v).iter().collect();
        for u in nb {
            let (xu, zu) = (self.x[u], !self.z[u]);
            self.set_site(u, xu, zu);
        }
    }

    fn alpha(&self) -> VertexSet {
        VertexSet::from_vertices(self.x.len(), (0..self.x.len()).filter(|&v| self.x[v]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Greedy,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub mode: SearchMode,
    /// Largest `n` accepted by exhaustive search.
    pub exhaustive_limit: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            mode: SearchMode::Exhaustive,
            exhaustive_limit: 20,
            seed: 0,
            restarts: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub alpha: VertexSet,
    pub qfi: u64,
    pub bound: u64,
    pub attains_bound: bool,
    pub mode: SearchMode,
}

/// Maximizes `F_α` over nonempty α.
///
/// Exhaustive mode returns the smallest bitmask among the maximizers and
/// stops once a mask reaching the upper bound has been seen. Greedy mode
/// runs steepest single-vertex flips from `restarts` random starts.
pub fn search_optimal_alpha(g: &Graph, opts: &SearchOptions) -> Result<SearchResult> {
    check_graph(g)?;
    match opts.mode {
        SearchMode::Exhaustive => exhaustive(g, opts.exhaustive_limit.min(63)),
        SearchMode::Greedy => greedy(g, opts.seed, opts.restarts.max(1)),
    }
}

const CHUNK_BITS: u32 = 14;

fn exhaustive(g: &Graph, limit: usize) -> Result<SearchResult> {
    let n = g.n();
    if n > limit {
        return Err(MetroError::SizeLimit {
            what: "exhaustive search",
            n,
            limit,
        });
    }
    let scorer = MaskScorer::new(g)?;
    let bound = scorer.bound();
    let total: u64 = 1 << n;
    let chunk = 1u64 << CHUNK_BITS.min(n as u32);
    let chunks = total.div_ceil(chunk) as usize;
    let first_hit = AtomicUsize::new(usize::MAX);

    let best = (0..chunks)
        .into_par_iter()
        .filter_map(|c| {
            if c > first_hit.load(Ordering::Relaxed) {
                return None;
            }
            let lo = (c as u64 * chunk).max(1);
            let hi = ((c as u64 + 1) * chunk).min(total);
            let mut best: Option<(u64, u64)> = None;
            for mask in lo..hi {
                let f = scorer.score(mask);
                if best.map_or(true, |(bf, _)| f > bf) {
                    best = Some((f, mask));
                    if f == bound {
                        first_hit.fetch_min(c, Ordering::Relaxed);
                        break;
                    }
                }
            }
            best.map(|b| (c, b))
        })
        .collect::<Vec<_>>();

    // Merge by score, then by mask; chunks past the first bound hit cannot
    // hold a smaller maximizing mask.
    let (f, mask) = best
        .into_iter()
        .filter(|(c, _)| *c <= first_hit.load(Ordering::Relaxed))
        .map(|(_, b)| b)
        .fold(None::<(u64, u64)>, |acc, (f, m)| match acc {
            Some((af, am)) if af > f || (af == f && am < m) => Some((af, am)),
            _ => Some((f, m)),
        })
        .expect("at least one nonempty subset");
    Ok(SearchResult {
        alpha: VertexSet::from_mask(n, mask),
        qfi: f,
        bound,
        attains_bound: f == bound,
        mode: SearchMode::Exhaustive,
    })
}

fn greedy(g: &Graph, seed: u64, restarts: usize) -> Result<SearchResult> {
    let n = g.n();
    let ts = g.twins_structure();
    let bound = bound_from_structure(n, &ts);
    let runs: Vec<(i64, VertexSet)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut s = IncrementalScorer::new(g, &ts);
            for v in 0..n {
                if rng.gen_bool(0.5) {
                    s.flip(v);
                }
            }
            if s.alpha_len == 0 {
                s.flip(rng.gen_range(0..n));
            }
            loop {
                let current = s.score;
                let mut best: Option<(i64, usize)> = None;
                for v in 0..n {
                    if s.alpha_len == 1 && s.x[v] {
                        continue;
                    }
                    s.flip(v);
                    if s.score > current && best.map_or(true, |(b, _)| s.score > b) {
                        best = Some((s.score, v));
                    }
                    s.flip(v);
                }
                match best {
                    Some((_, v)) => s.flip(v),
                    None => break,
                }
                if s.score as u64 == bound {
                    break;
                }
            }
            (s.score, s.alpha())
        })
        .collect();
    let (f, alpha) = runs
        .into_iter()
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .expect("at least one restart");
    Ok(SearchResult {
        alpha,
        qfi: f as u64,
        bound,
        attains_bound: f as u64 == bound,
        mode: SearchMode::Greedy,
    })
}

/// The local protocol attached to `S_α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Protocol1Model {
    pub graph: Graph,
    pub alpha: VertexSet,
    pub stabilizer: PauliString,
    pub partition: SupportPartition,
    /// `(vertex, letter)` in increasing vertex order.
    pub hamiltonian: Vec<(usize, PauliLetter)>,
    /// Letter of `S_α` per vertex, Z on `S₂`.
    pub measurement: Vec<PauliLetter>,
    pub qfi: u64,
    pub bound: u64,
    pub attainable: bool,
}

/// Builds `H_α`: Z on `(S₁+S₃)∩R`, Y on `S₁∩R̄ + S₄∩Ū`, X on `S₃∩R̄ + S₄∩U`.
pub fn protocol1_model(g: &Graph, alpha: &VertexSet) -> Result<Protocol1Model> {
    let qfi = qfi_alpha(g, alpha)?;
    let (stabilizer, partition) = stabilizer_element(g, alpha)?;
    let ts = g.twins_structure();
    let r = &ts.roots;
    let mut hamiltonian = Vec::new();
    for v in 0..g.n() {
        let letter = if partition.s1.contains(v) {
            Some(if r.contains(v) { PauliLetter::Z } else { PauliLetter::Y })
        } else if partition.s3.contains(v) {
            Some(if r.contains(v) { PauliLetter::Z } else { PauliLetter::X })
        } else if partition.s4.contains(v) {
            Some(if ts.u_set.contains(v) { PauliLetter::X } else { PauliLetter::Y })
        } else {
            None
        };
        if let Some(l) = letter {
            hamiltonian.push((v, l));
        }
    }
    let measurement = (0..g.n())
        .map(|v| match stabilizer.letter(v) {
            PauliLetter::I => PauliLetter::Z,
            l => l,
        })
        .collect();
    Ok(Protocol1Model {
        graph: g.clone(),
        alpha: alpha.clone(),
        stabilizer,
        partition,
        hamiltonian,
        measurement,
        qfi,
        bound: bound_from_structure(g.n(), &ts),
        attainable: attainable(g, alpha)?,
    })
}

impl Protocol1Model {
    /// The dense model: graph-state probe, `H_α`, measurement letters.
    pub fn to_local_model(&self, pure_limit: usize, theta: f64) -> Result<LocalModel> {
        let probe = dense::graph_state(&self.graph, pure_limit)?;
        LocalModel::new(
            probe,
            dense::pauli_terms(&self.hamiltonian),
            self.measurement.iter().map(|&l| Mat2::pauli(l)).collect(),
            theta,
        )
    }

    /// `H_α` as a Pauli-sum label list, e.g. `["X_0", "Z_2"]`.
    pub fn hamiltonian_pairs(&self) -> Vec<(String, usize)> {
        self.hamiltonian
            .iter()
            .map(|&(v, l)| (l.as_char().to_string(), v))
            .collect()
    }

    pub fn to_output(&self) -> Protocol1Output {
        Protocol1Output {
            alpha: self.alpha.to_vec(),
            partition: self.partition.clone(),
            qfi: self.qfi,
            bound: self.bound,
            attainable: self.attainable,
            hamiltonian: self.hamiltonian_pairs(),
            measurement: self.measurement.iter().map(|l| l.as_char().to_string()).collect(),
        }
    }
}

/// JSON shape of an analyzed protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Protocol1Output {
    pub alpha: Vec<usize>,
    pub partition: SupportPartition,
    pub qfi: u64,
    pub bound: u64,
    pub attainable: bool,
    pub hamiltonian: Vec<(String, usize)>,
    pub measurement: Vec<String>,
}

/// Sorted `{F_α : ∅ ≠ α ⊆ V}`.
pub fn lc_qfi_multiset(g: &Graph, limit: usize) -> Result<Vec<u64>> {
    if g.n() > limit.min(63) {
        return Err(MetroError::SizeLimit {
            what: "subset enumeration",
            n: g.n(),
            limit: limit.min(63),
        });
    }
    let scorer = MaskScorer::new(g)?;
    let mut all: Vec<u64> = (1..1u64 << g.n()).into_par_iter().map(|m| scorer.score(m)).collect();
    all.par_sort_unstable();
    Ok(all)
}
