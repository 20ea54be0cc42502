//! Stabilizer subspaces `P_K` defined by a partition `V = K₁ ⊔ … ⊔ K_{m+1}`.
//!
//! `P_K` is the joint +1 eigenspace of `Z_V` and the pair operators
//! `X_{1|ω} X_{j|ω}` inside each block. It is spanned by
//! `|d_λ⟩ = Π_{ω≥2} Z_{K_ω}^{λ_{ω−1}} |GHZ_N⟩`, λ ∈ F₂^m. Under `H = ΣX`
//! the state `|d_λ⟩` behaves like a GHZ state with effective size
//! `h_λ = N − 2Σ_{ω≥2} λ_{ω−1}|K_ω|`.
//!
//! A coefficient index `l` encodes λ with bit `j` holding `λ_{j+1}`, the flip
//! of block `K_{j+2}`.

use serde::{Deserialize, Serialize};

use crate::dense::{self, CMatrix, DenseState, C64, OPERATOR_TOL};
use crate::error::{MetroError, Result};
use crate::pauli::{self, PauliLetter, PauliString};
use crate::vertex_set::VertexSet;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Largest `m` for which the `2^m` coefficient space is materialized.
pub const MAX_M: usize = 20;

/// An ordered partition of `0..n` into `m+1 ≥ 2` blocks of size at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SubspaceSpec {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl<'de> Deserialize<'de> for SubspaceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = SpecFile::deserialize(d)?;
        SubspaceSpec::new(f.n, f.blocks).map_err(serde::de::Error::custom)
    }
}

impl SubspaceSpec {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(MetroError::InvalidSpec(format!(
                "need at least two blocks, got {}",
                blocks.len()
            )));
        }
        if blocks.len() - 1 > MAX_M {
            return Err(MetroError::SizeLimit {
                what: "subspace dimension exponent m",
                n: blocks.len() - 1,
                limit: MAX_M,
            });
        }
        let mut seen = vec![false; n];
        for (w, b) in blocks.iter().enumerate() {
            if b.len() < 2 {
                return Err(MetroError::InvalidSpec(format!(
                    "block {} has {} vertices; every block needs at least 2",
                    w + 1,
                    b.len()
                )));
            }
            for &v in b {
                if v >= n {
                    return Err(MetroError::VertexOutOfRange { vertex: v, n });
                }
                if seen[v] {
                    return Err(MetroError::InvalidSpec(format!("vertex {v} appears twice")));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(MetroError::InvalidSpec(format!("vertex {v} is in no block")));
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Self { n, blocks })
    }

    /// Contiguous blocks `0..s₁`, `s₁..s₁+s₂`, ….
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let mut start = 0;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let b: Vec<usize> = (start..start + s).collect();
                start += s;
                b
            })
            .collect();
        Self::new(start, blocks)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| MetroError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// `ξ_ω = |K_ω|/N`.
    pub fn fractions(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.len() as f64 / self.n as f64).collect()
    }

    pub fn dim(&self) -> usize {
        1 << self.m()
    }

    pub fn block_set(&self, w: usize) -> VertexSet {
        VertexSet::from_vertices(self.n, self.blocks[w].iter().copied())
    }

    /// `h_λ = N − 2Σ_{ω≥2} λ_{ω−1}|K_ω|`.
    pub fn h(&self, lambda: usize) -> i64 {
        let flipped: usize = (0..self.m())
            .filter(|j| lambda >> j & 1 == 1)
            .map(|j| self.blocks[j + 1].len())
            .sum();
        self.n as i64 - 2 * flipped as i64
    }

    /// `Z_{K_ω}` mask applied by λ.
    pub fn flip_mask(&self, lambda: usize) -> VertexSet {
        let mut z = VertexSet::empty(self.n);
        for j in 0..self.m() {
            if lambda >> j & 1 == 1 {
                z.xor_assign(&self.block_set(j + 1));
            }
        }
        z
    }
}

/// `{Z_V} ∪ {X_{1|ω} X_{j|ω} : 2 ≤ j ≤ |K_ω|}`; `n − m` generators.
pub fn subspace_generators(spec: &SubspaceSpec) -> Vec<PauliString> {
    let n = spec.n();
    let mut gens = vec![PauliString::uniform(n, &VertexSet::full(n), PauliLetter::Z)];
    for b in spec.blocks() {
        for &j in &b[1..] {
            let pair = VertexSet::from_vertices(n, [b[0], j]);
            gens.push(PauliString::uniform(n, &pair, PauliLetter::X));
        }
    }
    gens
}

/// Amplitudes of `|d_λ⟩` in the computational basis.
pub fn basis_vector(spec: &SubspaceSpec, lambda: usize) -> Vec<C64> {
    let n = spec.n();
    let z = spec.flip_mask(lambda).to_mask().expect("dense sizes fit in 64 bits") as usize;
    let amp = (0.5f64).powf((n as f64 - 1.0) / 2.0);
    (0..1usize << n)
        .map(|b| {
            if b.count_ones() % 2 == 1 {
                ZERO
            } else if (b & z).count_ones() % 2 == 1 {
                C64::new(-amp, 0.0)
            } else {
                C64::new(amp, 0.0)
            }
        })
        .collect()
}

/// `|d_λ⟩` as a dense pure state.
pub fn basis_state(spec: &SubspaceSpec, lambda: usize, pure_limit: usize) -> Result<DenseState> {
    check_lambda(spec, lambda)?;
    if spec.n() > pure_limit {
        return Err(MetroError::SizeLimit {
            what: "pure-state oracle",
            n: spec.n(),
            limit: pure_limit,
        });
    }
    Ok(DenseState::Pure {
        n: spec.n(),
        amps: basis_vector(spec, lambda),
    })
}

fn check_lambda(spec: &SubspaceSpec, lambda: usize) -> Result<()> {
    if lambda >= spec.dim() {
        return Err(MetroError::InvalidParameter(format!(
            "λ index {lambda} outside 0..{}",
            spec.dim()
        )));
    }
    Ok(())
}

/// A density operator on `P_K` written in the `|d_λ⟩` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceState {
    spec: SubspaceSpec,
    coeffs: CMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    spec: SubspaceSpec,
    real: Vec<Vec<f64>>,
    #[serde(default)]
    imag: Option<Vec<Vec<f64>>>,
}

impl SubspaceState {
    /// Checks Hermiticity, unit trace and positivity of `coeffs`.
    pub fn new(spec: SubspaceSpec, coeffs: CMatrix) -> Result<Self> {
        if coeffs.dim() != spec.dim() {
            return Err(MetroError::SizeMismatch {
                expected: spec.dim(),
                found: coeffs.dim(),
            });
        }
        if coeffs.hermiticity_error() > OPERATOR_TOL {
            return Err(MetroError::NonHermitian);
        }
        let tr = coeffs.trace();
        if (tr - ONE).norm() > OPERATOR_TOL {
            return Err(MetroError::InvalidState(format!("trace {tr} is not 1")));
        }
        let (vals, _) = coeffs.eigh();
        if vals.first().is_some_and(|&v| v < -OPERATOR_TOL) {
            return Err(MetroError::InvalidState(format!(
                "negative eigenvalue {}",
                vals[0]
            )));
        }
        Ok(Self { spec, coeffs })
    }

    /// `|φ⟩⟨φ|` for `|φ⟩ = Σ_λ a_λ |d_λ⟩`, normalized.
    pub fn pure(spec: SubspaceSpec, amps: &[C64]) -> Result<Self> {
        if amps.len() != spec.dim() {
            return Err(MetroError::SizeMismatch {
                expected: spec.dim(),
                found: amps.len(),
            });
        }
        let nrm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return Err(MetroError::InvalidState("zero vector".into()));
        }
        let v: Vec<C64> = amps.iter().map(|a| a / nrm).collect();
        Ok(Self {
            spec,
            coeffs: CMatrix::outer(&v),
        })
    }

    /// `Σ_λ w_λ |d_λ⟩⟨d_λ|`, normalized.
    pub fn diagonal(spec: SubspaceSpec, weights: &[f64]) -> Result<Self> {
        if weights.len() != spec.dim() {
            return Err(MetroError::SizeMismatch {
                expected: spec.dim(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(MetroError::InvalidState("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(MetroError::InvalidState("weights sum to zero".into()));
        }
        let mut c = CMatrix::zeros(spec.dim());
        for (l, w) in weights.iter().enumerate() {
            c.set(l, l, C64::new(w / total, 0.0));
        }
        Ok(Self { spec, coeffs: c })
    }

    /// `|d_λ⟩⟨d_λ|`.
    pub fn basis(spec: SubspaceSpec, lambda: usize) -> Result<Self> {
        check_lambda(&spec, lambda)?;
        let mut w = vec![0.0; spec.dim()];
        w[lambda] = 1.0;
        Self::diagonal(spec, &w)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: StateFile = serde_json::from_str(text).map_err(|e| MetroError::Parse(e.to_string()))?;
        let d = f.spec.dim();
        let imag = f.imag.unwrap_or_else(|| vec![vec![0.0; d]; d]);
        if f.real.len() != d || imag.len() != d || f.real.iter().chain(&imag).any(|r| r.len() != d) {
            return Err(MetroError::SizeMismatch {
                expected: d,
                found: f.real.len(),
            });
        }
        let c = CMatrix::from_fn(d, |i, j| C64::new(f.real[i][j], imag[i][j]));
        Self::new(f.spec, c)
    }

    pub fn to_json(&self) -> String {
        let d = self.spec.dim();
        let f = StateFile {
            spec: self.spec.clone(),
            real: (0..d).map(|i| (0..d).map(|j| self.coeffs.get(i, j).re).collect()).collect(),
            imag: Some((0..d).map(|i| (0..d).map(|j| self.coeffs.get(i, j).im).collect()).collect()),
        };
        serde_json::to_string(&f).expect("serializable")
    }

    pub fn spec(&self) -> &SubspaceSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    /// `⟨d_λ|ρ|d_λ⟩` for every λ.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.spec.dim()).map(|l| self.coeffs.get(l, l).re).collect()
    }

    /// `Σ_{λλ'} c_{λλ'} |d_λ⟩⟨d_λ'|` as a density matrix.
    pub fn to_dense(&self, mixed_limit: usize) -> Result<DenseState> {
        let n = self.spec.n();
        if n > mixed_limit {
            return Err(MetroError::SizeLimit {
                what: "density-matrix oracle",
                n,
                limit: mixed_limit,
            });
        }
        let d = self.spec.dim();
        // ρ = B C B† with the basis vectors as columns of B.
        let basis: Vec<Vec<C64>> = (0..d).map(|l| basis_vector(&self.spec, l)).collect();
        let dim = 1usize << n;
        let support: Vec<usize> = (0..dim).filter(|b| b.count_ones() % 2 == 0).collect();
        let mut bc = vec![vec![ZERO; d]; dim];
        for &b in &support {
            for l2 in 0..d {
                bc[b][l2] = (0..d).map(|l| basis[l][b] * self.coeffs.get(l, l2)).sum();
            }
        }
        let mut rho = CMatrix::zeros(dim);
        for &b in &support {
            for &b2 in &support {
                let v: C64 = (0..d).map(|l2| bc[b][l2] * basis[l2][b2].conj()).sum();
                rho.set(b, b2, v);
            }
        }
        Ok(DenseState::mixed_unchecked(n, rho))
    }
}

/// `Σ_λ ⟨d_λ|ρ|d_λ⟩ h_λ²`.
pub fn qfi_subspace(state: &SubspaceState) -> f64 {
    state
        .populations()
        .iter()
        .enumerate()
        .map(|(l, p)| p * (state.spec.h(l) as f64).powi(2))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtremalQfi {
    pub max: f64,
    pub min: f64,
    /// `min_λ (h_λ/N)²`.
    pub r_min: f64,
    /// `min_λ |h_λ|`.
    pub h_min: u64,
}

pub fn extremal_qfi(spec: &SubspaceSpec) -> ExtremalQfi {
    let n = spec.n() as f64;
    let h_min = (0..spec.dim()).map(|l| spec.h(l).unsigned_abs()).min().expect("nonempty");
    let r_min = (h_min as f64 / n).powi(2);
    ExtremalQfi {
        max: n * n,
        min: (h_min * h_min) as f64,
        r_min,
        h_min,
    }
}

/// `ε = −ln r_min / ln N`, or `+∞` when `r_min = 0`.
pub fn tolerance(spec: &SubspaceSpec) -> f64 {
    let r = extremal_qfi(spec).r_min;
    if r == 0.0 {
        f64::INFINITY
    } else {
        -r.ln() / (spec.n() as f64).ln()
    }
}

/// Membership in `ℙ_ε`: `r_min ≥ N^{−ε}`, i.e. `tolerance ≤ ε`.
pub fn in_tolerance_class(spec: &SubspaceSpec, eps: f64) -> bool {
    let t = tolerance(spec);
    t.is_finite() && t <= eps + 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyParams {
    /// One block of size `large` with `(1+δ₁)/2 < large/n < 1`; the rest of
    /// the vertices are split into `rest` near-equal blocks.
    I {
        n: usize,
        large: usize,
        delta: f64,
        rest: usize,
    },
    /// `m` even, `m+1` equal blocks.
    Ii { n: usize, m: usize },
    /// `m` odd, `|K₁| = a < n/(2m)`, `|K₂| = n/m − a`, the others `n/m`.
    Iii { n: usize, m: usize, a: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub spec: SubspaceSpec,
    pub r_min: f64,
    pub epsilon: f64,
    /// The family's closed-form tolerance: a strict upper bound for (i),
    /// the exact value for (ii) and (iii).
    pub predicted: f64,
    pub within_prediction: bool,
    pub notes: Vec<String>,
}

fn infeasible(msg: String) -> MetroError {
    MetroError::InvalidParameter(msg)
}

/// Builds a partition of the given family with contiguous blocks.
pub fn family_partition(params: &FamilyParams) -> Result<FamilyReport> {
    let mut notes = Vec::new();
    let (sizes, predicted, exact): (Vec<usize>, f64, bool) = match *params {
        FamilyParams::I { n, large, delta, rest } => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(infeasible(format!("δ₁ = {delta} must lie in (0, 1)")));
            }
            let xi = large as f64 / n as f64;
            if !((1.0 + delta) / 2.0 < xi && large < n) {
                return Err(infeasible(format!(
                    "ξ = {large}/{n} must satisfy (1+δ₁)/2 = {} < ξ < 1",
                    (1.0 + delta) / 2.0
                )));
            }
            let remaining = n - large;
            if rest == 0 || remaining < 2 * rest {
                return Err(infeasible(format!(
                    "{remaining} remaining vertices cannot form {rest} blocks of size ≥ 2"
                )));
            }
            let mut sizes = vec![large];
            for k in 0..rest {
                sizes.push(remaining / rest + usize::from(k < remaining % rest));
            }
            (sizes, -2.0 * delta.ln() / (n as f64).ln(), false)
        }
        FamilyParams::Ii { n, m } => {
            if m < 2 || m % 2 == 1 {
                return Err(infeasible(format!("family (ii) needs even m ≥ 2, got {m}")));
            }
            if n % (m + 1) != 0 || n / (m + 1) < 2 {
                return Err(infeasible(format!("{n} vertices do not split into {} equal blocks of size ≥ 2", m + 1)));
            }
            notes.push(
                "exact tolerance is 2·ln(m+1)/ln N; the m ~ N^δ₂ scaling reads as δ₂ = ln(m+1)".into(),
            );
            (vec![n / (m + 1); m + 1], 2.0 * ((m + 1) as f64).ln() / (n as f64).ln(), true)
        }
        FamilyParams::Iii { n, m, a } => {
            if m % 2 == 0 {
                return Err(infeasible(format!("family (iii) needs odd m, got {m}")));
            }
            if n % m != 0 {
                return Err(infeasible(format!("{n} is not divisible by m = {m}")));
            }
            let unit = n / m;
            if a < 2 || unit < a + 2 {
                return Err(infeasible(format!("blocks ({a}, {}) must both have size ≥ 2", unit.saturating_sub(a))));
            }
            if 2 * m * a >= n {
                return Err(infeasible(format!("ξ₁ = {a}/{n} must be below 1/(2m)")));
            }
            notes.push(
                "block fractions are taken as ξ₁ = a/N, ξ₂ = 1/m − ξ₁, ξ₃ = … = 1/m; written as N/m the sizes would not be fractions"
                    .into(),
            );
            let r = 1.0 / m as f64 - 2.0 * a as f64 / n as f64;
            let mut sizes = vec![a, unit - a];
            sizes.extend(std::iter::repeat(unit).take(m - 1));
            (sizes, -2.0 * r.ln() / (n as f64).ln(), true)
        }
    };
    let spec = SubspaceSpec::from_sizes(&sizes)?;
    let ext = extremal_qfi(&spec);
    let epsilon = tolerance(&spec);
    let within_prediction = if exact {
        (epsilon - predicted).abs() <= 1e-9 * predicted.abs().max(1.0)
    } else {
        epsilon < predicted
    };
    Ok(FamilyReport {
        spec,
        r_min: ext.r_min,
        epsilon,
        predicted,
        within_prediction,
        notes,
    })
}

/// True iff every subspace generator fixes the support of `state`.
pub fn membership_check(state: &DenseState, spec: &SubspaceSpec) -> Result<bool> {
    if state.n() != spec.n() {
        return Err(MetroError::SizeMismatch {
            expected: spec.n(),
            found: state.n(),
        });
    }
    for g in subspace_generators(spec) {
        if !pauli::stabilizes(&g, state)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coefficients `⟨d_λ|ρ|d_λ'⟩` of a dense state in the basis of `spec`.
pub fn project_coefficients(state: &DenseState, spec: &SubspaceSpec) -> Result<CMatrix> {
    if state.n() != spec.n() {
        return Err(MetroError::SizeMismatch {
            expected: spec.n(),
            found: state.n(),
        });
    }
    let d = spec.dim();
    let basis: Vec<Vec<C64>> = (0..d).map(|l| basis_vector(spec, l)).collect();
    let rho = state.density();
    let applied: Vec<Vec<C64>> = basis.iter().map(|v| rho.mul_vec(v)).collect();
    Ok(CMatrix::from_fn(d, |i, j| {
        basis[i].iter().zip(&applied[j]).map(|(a, b)| a.conj() * b).sum()
    }))
}

// ---------------------------------------------------------------------------
// Channels

/// A completely positive trace-preserving map on `n`-qubit density matrices.
pub trait Channel: Sync {
    fn apply(&self, rho: &CMatrix, n: usize) -> Result<CMatrix>;
    fn name(&self) -> String;
}

pub struct IdentityChannel;

impl Channel for IdentityChannel {
    fn apply(&self, rho: &CMatrix, _n: usize) -> Result<CMatrix> {
        Ok(rho.clone())
    }
    fn name(&self) -> String {
        "identity".into()
    }
}

/// Independent single-qubit depolarizing noise `ρ ↦ (1−p)ρ + p·Tr_k(ρ)⊗I/2`.
pub struct Depolarizing {
    pub p: f64,
}

impl Channel for Depolarizing {
    fn apply(&self, rho: &CMatrix, n: usize) -> Result<CMatrix> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(MetroError::InvalidParameter(format!("p = {} outside [0, 1]", self.p)));
        }
        let mut out = rho.clone();
        for k in 0..n {
            let mut acc = out.clone();
            acc.scale(C64::new(1.0 - 0.75 * self.p, 0.0));
            for l in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
                let mut t = out.clone();
                t.conjugate_local(k, &dense::Mat2::pauli(l));
                acc.add_scaled(&t, C64::new(0.25 * self.p, 0.0));
            }
            out = acc;
        }
        Ok(out)
    }
    fn name(&self) -> String {
        format!("depolarizing(p={})", self.p)
    }
}

/// Kraus operators acting on the whole register.
pub struct KrausChannel {
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    /// Checks `Σ K†K = I` to within `1e-10`.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let d = ops.first().map(CMatrix::dim).ok_or_else(|| {
            MetroError::InvalidParameter("channel needs at least one Kraus operator".into())
        })?;
        let mut sum = CMatrix::zeros(d);
        for k in &ops {
            if k.dim() != d {
                return Err(MetroError::SizeMismatch { expected: d, found: k.dim() });
            }
            sum.add_scaled(&k.adjoint().matmul(k), ONE);
        }
        if sum.distance(&CMatrix::identity(d)) > OPERATOR_TOL {
            return Err(MetroError::InvalidParameter("Kraus operators are not trace preserving".into()));
        }
        Ok(Self { ops })
    }
}

impl Channel for KrausChannel {
    fn apply(&self, rho: &CMatrix, _n: usize) -> Result<CMatrix> {
        if rho.dim() != self.ops[0].dim() {
            return Err(MetroError::SizeMismatch {
                expected: self.ops[0].dim(),
                found: rho.dim(),
            });
        }
        let mut out = CMatrix::zeros(rho.dim());
        for k in &self.ops {
            out.add_scaled(&k.matmul(rho).matmul(&k.adjoint()), ONE);
        }
        Ok(out)
    }
    fn name(&self) -> String {
        format!("kraus({} operators)", self.ops.len())
    }
}

/// Single-qubit Pauli noise on one qubit: `Σ_P p_P PρP` over `I, X, Y, Z`.
pub struct LocalPauliChannel {
    pub qubit: usize,
    pub probs: [f64; 4],
}

impl Channel for LocalPauliChannel {
    fn apply(&self, rho: &CMatrix, n: usize) -> Result<CMatrix> {
        if self.qubit >= n {
            return Err(MetroError::VertexOutOfRange { vertex: self.qubit, n });
        }
        let total: f64 = self.probs.iter().sum();
        if self.probs.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > OPERATOR_TOL {
            return Err(MetroError::InvalidParameter("Pauli probabilities must form a distribution".into()));
        }
        let mut out = CMatrix::zeros(rho.dim());
        let letters = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
        for (l, &p) in letters.iter().zip(&self.probs) {
            if p == 0.0 {
                continue;
            }
            let mut t = rho.clone();
            t.conjugate_local(self.qubit, &dense::Mat2::pauli(*l));
            out.add_scaled(&t, C64::new(p, 0.0));
        }
        Ok(out)
    }
    fn name(&self) -> String {
        format!("pauli(qubit={}, p={:?})", self.qubit, self.probs)
    }
}

/// Removes coherences between different `|d_λ⟩` of `spec` (and between the
/// subspace and its complement).
pub struct SubspaceDephasing {
    pub spec: SubspaceSpec,
}

impl Channel for SubspaceDephasing {
    fn apply(&self, rho: &CMatrix, n: usize) -> Result<CMatrix> {
        if n != self.spec.n() {
            return Err(MetroError::SizeMismatch { expected: self.spec.n(), found: n });
        }
        let basis: Vec<Vec<C64>> = (0..self.spec.dim()).map(|l| basis_vector(&self.spec, l)).collect();
        // Q ρ Q with Q = I − Σ_λ P_λ, plus Σ_λ P_λ ρ P_λ.
        let dim = rho.dim();
        let mut proj = CMatrix::zeros(dim);
        for v in &basis {
            proj.add_scaled(&CMatrix::outer(v), ONE);
        }
        let mut q = CMatrix::identity(dim);
        q.add_scaled(&proj, -ONE);
        let mut out = q.matmul(rho).matmul(&q);
        for v in &basis {
            let rv = rho.mul_vec(v);
            let pop: C64 = v.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum();
            out.add_scaled(&CMatrix::outer(v), pop);
        }
        Ok(out)
    }
    fn name(&self) -> String {
        "subspace dephasing".into()
    }
}

// ---------------------------------------------------------------------------
// Robustness under channels

/// Ordered partitions of `0..n` into at least two blocks of size ≥ 2, in
/// restricted-growth order, at most `limit` of them.
pub fn candidate_specs(n: usize, limit: usize) -> Vec<SubspaceSpec> {
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];
    fn rec(
        v: usize,
        used: usize,
        n: usize,
        assign: &mut Vec<usize>,
        out: &mut Vec<SubspaceSpec>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if v == n {
            if used < 2 {
                return;
            }
            let mut blocks = vec![Vec::new(); used];
            for (u, &b) in assign.iter().enumerate() {
                blocks[b].push(u);
            }
            if blocks.iter().all(|b| b.len() >= 2) {
                out.push(SubspaceSpec::new(n, blocks).expect("valid by construction"));
            }
            return;
        }
        for b in 0..=used {
            assign[v] = b;
            rec(v + 1, used.max(b + 1), n, assign, out, limit);
        }
    }
    if n > 0 {
        rec(1, 1, n, &mut assign, &mut out, limit);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustnessReport {
    pub channel: String,
    pub epsilon: f64,
    pub trace_deviation: f64,
    /// The first spec in `ℙ_ε` whose subspace contains the channel output.
    pub found: Option<SubspaceSpec>,
    pub qfi: Option<f64>,
    pub oracle_qfi: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub within_bounds: bool,
    pub candidates_checked: usize,
    pub robust: bool,
}

/// Applies `channel` to `state` and looks for a spec `K₂ ∈ ℙ_ε` with the
/// output in `P_{K₂}`, checking its QFI lies in `[N^{2−ε}, N²]`. The input
/// spec is tried first, then candidate partitions up to `candidate_limit`.
pub fn scaling_robustness_check(
    state: &SubspaceState,
    channel: &dyn Channel,
    eps: f64,
    mixed_limit: usize,
    candidate_limit: usize,
) -> Result<RobustnessReport> {
    let n = state.spec().n();
    let rho = state.to_dense(mixed_limit)?.density();
    let out = channel.apply(&rho, n)?;
    let trace_deviation = (out.trace() - ONE).norm();
    let out_state = DenseState::mixed_unchecked(n, out);
    let nf = n as f64;
    let (lower, upper) = (nf.powf(2.0 - eps), nf * nf);

    let mut candidates = vec![state.spec().clone()];
    candidates.extend(
        candidate_specs(n, candidate_limit)
            .into_iter()
            .filter(|s| s != state.spec()),
    );
    let mut checked = 0;
    let mut report = RobustnessReport {
        channel: channel.name(),
        epsilon: eps,
        trace_deviation,
        found: None,
        qfi: None,
        oracle_qfi: None,
        lower,
        upper,
        within_bounds: false,
        candidates_checked: 0,
        robust: false,
    };
    for spec in candidates {
        if !in_tolerance_class(&spec, eps) {
            continue;
        }
        checked += 1;
        if !membership_check(&out_state, &spec)? {
            continue;
        }
        let coeffs = project_coefficients(&out_state, &spec)?;
        let projected = SubspaceState { spec: spec.clone(), coeffs };
        let f = qfi_subspace(&projected);
        let oracle = dense::qfi(&out_state, &dense::sum_x(n))?;
        let slack = 1e-9 * upper;
        report.within_bounds = f >= lower - slack && f <= upper + slack;
        report.robust = report.within_bounds && trace_deviation < OPERATOR_TOL;
        report.found = Some(spec);
        report.qfi = Some(f);
        report.oracle_qfi = Some(oracle);
        break;
    }
    report.candidates_checked = checked;
    Ok(report)
}
