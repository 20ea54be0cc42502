#![allow(dead_code)]

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabmetro::enumeration::random_connected_graph;
use stabmetro::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected graph with `lo ≤ n ≤ hi`, skipping the two-vertex case.
pub fn connected_graph(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi, 0.0f64..0.7, any::<u64>())
        .prop_filter("n = 2 is degenerate", |(n, _, _)| *n != 2)
        .prop_map(|(n, extra, seed)| random_connected_graph(n, extra, &mut rng(seed)))
}

/// Graph plus a nonempty vertex mask.
pub fn graph_and_alpha(lo: usize, hi: usize) -> impl Strategy<Value = (Graph, u64)> {
    connected_graph(lo, hi).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), 1u64..(1u64 << n))
    })
}

fn neighbors(g: &Graph, v: usize) -> Vec<usize> {
    (0..g.n()).filter(|&u| g.has_edge(u, v)).collect()
}

/// The QFI upper bound computed straight from pairwise neighborhood
/// comparisons.
pub fn naive_bound(g: &Graph) -> u64 {
    let n = g.n();
    let open: Vec<Vec<usize>> = (0..n).map(|v| neighbors(g, v)).collect();
    let closed: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut c = open[v].clone();
            c.push(v);
            c.sort_unstable();
            c
        })
        .collect();
    let mut twin_pairs = 0u64;
    let mut true_pairs = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            if open[i] == open[j] {
                twin_pairs += 1;
            }
            if closed[i] == closed[j] {
                true_pairs += 1;
            }
        }
    }
    let leaves = (0..n).filter(|&v| open[v].len() == 1).count() as u64;
    n as u64 + 2 * twin_pairs + 2 * true_pairs + 2 * leaves
}

/// Random partition of a shuffled `0..n` into `≥ 2` blocks of size `≥ 2`.
pub fn subspace_spec(lo: usize, hi: usize) -> impl Strategy<Value = stabmetro::protocol2::SubspaceSpec> {
    (lo.max(4)..=hi, any::<u64>()).prop_map(|(n, seed)| {
        use rand::Rng;
        let mut r = rng(seed);
        let mut sizes = Vec::new();
        let mut left = n;
        while left >= 4 && (sizes.is_empty() || r.gen_bool(0.5)) {
            let s = r.gen_range(2..=left - 2);
            sizes.push(s);
            left -= s;
        }
        sizes.push(left);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, r.gen_range(0..=i));
        }
        let mut start = 0;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let b = order[start..start + s].to_vec();
                start += s;
                b
            })
            .collect();
        stabmetro::protocol2::SubspaceSpec::new(n, blocks).expect("valid partition")
    })
}

/// Random state on the subspace with full Hermitian coefficients.
pub fn subspace_state(
    spec: stabmetro::protocol2::SubspaceSpec,
    seed: u64,
) -> stabmetro::protocol2::SubspaceState {
    use rand::Rng;
    use stabmetro::dense::{random::complex_normal, CMatrix, C64};
    let mut r = rng(seed);
    let d = spec.dim();
    let rank = r.gen_range(1..=d);
    let mut m = CMatrix::zeros(d);
    for _ in 0..rank {
        let v: Vec<C64> = (0..d).map(|_| complex_normal(&mut r)).collect();
        m.add_scaled(&CMatrix::outer(&v), C64::new(1.0, 0.0));
    }
    let tr = m.trace().re;
    m.scale(C64::new(1.0 / tr, 0.0));
    stabmetro::protocol2::SubspaceState::new(spec, m).expect("valid state")
}
