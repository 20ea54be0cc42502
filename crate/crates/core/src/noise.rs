//! i.i.d. X-dephasing during encoding:
//! `L_θ^{(j)}(ρ) = p X_j U_j ρ U_j† X_j + (1−p) U_j ρ U_j†`, `U_j = e^{−iθX_j/2}`.
//!
//! The flip commutes with the rotation, so the encoded family is
//! `U_θ D_p(ρ) U_θ†` and its QFI is that of `D_p(ρ)` under `H = ΣX`. In the
//! X eigenbasis `D_p` multiplies `ρ_ab` by `(1−2p)^{d(a,b)}` with `d` the
//! Hamming distance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{self, spectral_qfi, CMatrix, DenseState, Mat2, C64};
use crate::error::{MetroError, Result};
use crate::optimize::NelderMead;
use crate::pauli::PauliLetter;
use crate::protocol2::{SubspaceSpec, SubspaceState};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DephasingModel {
    pub n: usize,
    pub p: f64,
    pub theta: f64,
}

impl DephasingModel {
    /// Accepts `p ∈ [0, 1]`.
    pub fn new(n: usize, p: f64, theta: f64) -> Result<Self> {
        check_p(p)?;
        if !theta.is_finite() {
            return Err(MetroError::InvalidParameter(format!("θ = {theta} is not finite")));
        }
        Ok(Self { n, p, theta })
    }

    /// Whether `0 < p < 1/2`, the regime of the robustness claims.
    pub fn in_protocol_regime(&self) -> bool {
        self.p > 0.0 && self.p < 0.5
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MetroError::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// `⊗_j L_θ^{(j)}(ρ)` on the dense density matrix.
pub fn apply_dephasing_encoding(
    rho: &DenseState,
    model: &DephasingModel,
    mixed_limit: usize,
) -> Result<DenseState> {
    let n = rho.n();
    if n != model.n {
        return Err(MetroError::SizeMismatch { expected: model.n, found: n });
    }
    if n > mixed_limit {
        return Err(MetroError::SizeLimit {
            what: "density-matrix oracle",
            n,
            limit: mixed_limit,
        });
    }
    let x = Mat2::pauli(PauliLetter::X);
    let u = x.half_angle_unitary(model.theta);
    let mut r = rho.density();
    for j in 0..n {
        r.conjugate_local(j, &u);
        if model.p > 0.0 {
            let mut flipped = r.clone();
            flipped.conjugate_local(j, &x);
            r.scale(C64::new(1.0 - model.p, 0.0));
            r.add_scaled(&flipped, C64::new(model.p, 0.0));
        }
    }
    Ok(DenseState::mixed_unchecked(n, r))
}

/// `N²(1−2p)^{2N}`.
pub fn ghz_dephasing_qfi(n: usize, p: f64) -> f64 {
    let n = n as f64;
    n * n * (1.0 - 2.0 * p).powf(2.0 * n)
}

/// `N(1−2p)²` for `|0…0⟩`.
pub fn separable_dephasing_qfi(n: usize, p: f64) -> f64 {
    n as f64 * (1.0 - 2.0 * p).powi(2)
}

/// QFI of the dephased encoded family, from the dense oracle.
pub fn f_dap(rho: &DenseState, p: f64, theta: f64, mixed_limit: usize) -> Result<f64> {
    let model = DephasingModel::new(rho.n(), p, theta)?;
    let out = apply_dephasing_encoding(rho, &model, mixed_limit)?;
    dense::qfi(&out, &dense::sum_x(rho.n()))
}

/// X-basis eigenvalue of `ΣX` on the block-constant string `a`
/// (bit `ω` set means block `ω` is all `|−⟩`).
fn block_h(sizes: &[usize], a: usize) -> i64 {
    sizes
        .iter()
        .enumerate()
        .map(|(w, &s)| if a >> w & 1 == 1 { -(s as i64) } else { s as i64 })
        .sum()
}

/// `F_dap` for a state of `P_K` without building the `2^N` matrix.
///
/// The state lives on the `2^{m+1}` block-constant X-basis strings, with
/// `|d_λ⟩ = (|0λ⟩ + |1λ̄⟩)/√2`; that span is invariant under the channel and
/// under `ΣX`, so the QFI is computed exactly inside it.
pub fn f_dap_subspace(state: &SubspaceState, p: f64, theta: f64) -> Result<f64> {
    check_p(p)?;
    let spec = state.spec();
    let sizes = spec.sizes();
    let m = spec.m();
    let d = spec.dim();
    let dim = 2 * d;
    let full = dim - 1;
    // |d_λ⟩ components: string (λ << 1) and its complement, each 1/√2.
    let ends = |l: usize| [(l << 1), full ^ (l << 1)];
    let c = state.coeffs();
    let mut r = CMatrix::zeros(dim);
    for l in 0..d {
        for l2 in 0..d {
            let v = c.get(l, l2) * 0.5;
            if v == ZERO {
                continue;
            }
            for a in ends(l) {
                for b in ends(l2) {
                    r.set(a, b, r.get(a, b) + v);
                }
            }
        }
    }
    let h: Vec<i64> = (0..dim).map(|a| block_h(&sizes, a)).collect();
    let q = 1.0 - 2.0 * p;
    for a in 0..dim {
        for b in 0..dim {
            let diff = a ^ b;
            let dist: usize = (0..=m).filter(|w| diff >> w & 1 == 1).map(|w| sizes[w]).sum();
            let phase = C64::from_polar(1.0, -0.5 * theta * (h[a] - h[b]) as f64);
            r.set(a, b, r.get(a, b) * q.powi(dist as i32) * phase);
        }
    }
    let (vals, vecs) = r.eigh();
    Ok(spectral_qfi(&vals, &vecs, |v| {
        v.iter().zip(&h).map(|(x, &e)| x * (0.5 * e as f64)).collect()
    }))
}

/// Searches pure states `Σ_λ a_λ|d_λ⟩` for the largest `F_dap`.
///
/// Every basis state `|d_λ⟩` is scored first; then `budget` Nelder–Mead runs
/// over the `2·2^m` real coordinates start from seeded random points. A run
/// replaces the incumbent only if it improves it by more than `1e-9`
/// relative.
pub fn optimize_robust_state(
    spec: &SubspaceSpec,
    p: f64,
    theta: f64,
    budget: usize,
    seed: u64,
) -> Result<(SubspaceState, f64)> {
    check_p(p)?;
    let d = spec.dim();
    let to_state = |x: &[f64]| -> Option<SubspaceState> {
        let amps: Vec<C64> = (0..d).map(|l| C64::new(x[2 * l], x[2 * l + 1])).collect();
        SubspaceState::pure(spec.clone(), &amps).ok()
    };
    let objective = |x: &[f64]| -> f64 {
        match to_state(x) {
            Some(s) => -f_dap_subspace(&s, p, theta).unwrap_or(0.0),
            None => 0.0,
        }
    };

    let mut best: Option<(SubspaceState, f64)> = None;
    for l in 0..d {
        let s = SubspaceState::basis(spec.clone(), l)?;
        let f = f_dap_subspace(&s, p, theta)?;
        if best.as_ref().map_or(true, |(_, b)| f > *b) {
            best = Some((s, f));
        }
    }

    let nm = NelderMead::default();
    let runs: Vec<(Vec<f64>, f64)> = (0..budget)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let x0: Vec<f64> = (0..2 * d).map(|_| dense::random::standard_normal(&mut rng)).collect();
            nm.minimize(objective, &x0)
        })
        .collect();
    for (x, v) in runs {
        let f = -v;
        let incumbent = best.as_ref().map_or(f64::NEG_INFINITY, |b| b.1);
        if f > incumbent + 1e-9 * incumbent.abs().max(1.0) {
            if let Some(s) = to_state(&x) {
                best = Some((s, f));
            }
        }
    }
    Ok(best.expect("at least one basis state"))
}

/// A probe of a sweep.
#[derive(Clone, Debug)]
pub enum ProbeKind {
    /// `N²(1−2p)^{2N}` at every grid size.
    Ghz,
    /// `N(1−2p)²` at every grid size.
    Separable,
    /// A fixed subspace state; the size grid is ignored.
    Subspace(SubspaceState),
    /// At each grid size, `parts` near-equal blocks, optimized at each `p`.
    Optimized { parts: usize, budget: usize, seed: u64 },
    /// A fixed state optimized once at `p_opt`, then evaluated on the grid.
    OptimizedAt { spec: SubspaceSpec, p_opt: f64, budget: usize, seed: u64 },
    /// A dense state evaluated with the density-matrix oracle.
    Dense(DenseState),
}

#[derive(Clone, Debug)]
pub struct Probe {
    pub id: String,
    pub kind: ProbeKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub probe_id: String,
    pub n: usize,
    pub p: f64,
    pub theta: f64,
    pub f_dap: f64,
    pub method: Method,
}

/// Near-equal block sizes, largest first.
pub fn balanced_sizes(n: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|k| n / parts + usize::from(k < n % parts)).collect()
}

/// `F_dap` for every probe, size and `p`; rows are ordered by probe, then
/// size, then `p`.
pub fn noise_sweep(
    probes: &[Probe],
    p_grid: &[f64],
    n_grid: &[usize],
    theta: f64,
    mixed_limit: usize,
) -> Result<Vec<SweepRow>> {
    for &p in p_grid {
        check_p(p)?;
    }
    let mut cells: Vec<(usize, usize, f64)> = Vec::new();
    let mut fixed_states: Vec<Option<SubspaceState>> = Vec::with_capacity(probes.len());
    for (i, probe) in probes.iter().enumerate() {
        let sizes: Vec<usize> = match &probe.kind {
            ProbeKind::Subspace(s) => vec![s.spec().n()],
            ProbeKind::OptimizedAt { spec, .. } => vec![spec.n()],
            ProbeKind::Dense(s) => vec![s.n()],
            _ => n_grid.to_vec(),
        };
        for &n in &sizes {
            for &p in p_grid {
                cells.push((i, n, p));
            }
        }
        fixed_states.push(match &probe.kind {
            ProbeKind::OptimizedAt { spec, p_opt, budget, seed } => {
                Some(optimize_robust_state(spec, *p_opt, theta, *budget, *seed)?.0)
            }
            _ => None,
        });
    }
    cells
        .into_par_iter()
        .map(|(i, n, p)| {
            let probe = &probes[i];
            let (f, method) = match &probe.kind {
                ProbeKind::Ghz => (ghz_dephasing_qfi(n, p), Method::ClosedForm),
                ProbeKind::Separable => (separable_dephasing_qfi(n, p), Method::ClosedForm),
                ProbeKind::Subspace(s) => (f_dap_subspace(s, p, theta)?, Method::Oracle),
                ProbeKind::OptimizedAt { .. } => {
                    let s = fixed_states[i].as_ref().expect("optimized above");
                    (f_dap_subspace(s, p, theta)?, Method::Oracle)
                }
                ProbeKind::Optimized { parts, budget, seed } => {
                    let spec = SubspaceSpec::from_sizes(&balanced_sizes(n, *parts))?;
                    (optimize_robust_state(&spec, p, theta, *budget, *seed)?.1, Method::Oracle)
                }
                ProbeKind::Dense(s) => (f_dap(s, p, theta, mixed_limit)?, Method::Oracle),
            };
            Ok(SweepRow {
                probe_id: probe.id.clone(),
                n,
                p,
                theta,
                f_dap: f,
                method,
            })
        })
        .collect()
}

/// Smallest `n` at which `|0…0⟩` overtakes GHZ under dephasing `p`, from the
/// closed forms; `None` if GHZ stays ahead up to `n_max`.
pub fn ghz_separable_crossover(p: f64, n_max: usize) -> Option<usize> {
    (1..=n_max).find(|&n| separable_dephasing_qfi(n, p) > ghz_dephasing_qfi(n, p))
}
