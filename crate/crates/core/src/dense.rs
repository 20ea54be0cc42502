//! Brute-force ground truth: dense state vectors and density matrices,
//! quantum and classical Fisher information, and checks of the local
//! saturation conditions.
//!
//! Conventions: qubit `k` is bit `k` of a basis index; the encoding is
//! `ρ_θ = e^{-iθH/2} ρ e^{iθH/2}`, so the pure-state QFI is `Var(H)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{MetroError, Result};
use crate::graph::Graph;
use crate::pauli::{self, PauliLetter, PauliString};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for Hermiticity, trace and operator identities.
pub const OPERATOR_TOL: f64 = 1e-10;
/// Pairs with `λ_j + λ_k` at or below this are dropped from the spectral sum.
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// Outcomes with smaller probability are skipped in the CFI sum.
pub const PROB_CUTOFF: f64 = 1e-14;
/// A saturation gap above this is reported as a failure.
pub const GAP_FLAG: f64 = 1e-7;

/// Size limits for dense simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleLimits {
    pub pure: usize,
    pub mixed: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { pure: 16, mixed: 10 }
    }
}

impl OracleLimits {
    pub fn check_pure(&self, n: usize) -> Result<()> {
        if n > self.pure {
            return Err(MetroError::SizeLimit {
                what: "pure-state oracle",
                n,
                limit: self.pure,
            });
        }
        Ok(())
    }

    pub fn check_mixed(&self, n: usize) -> Result<()> {
        if n > self.mixed {
            return Err(MetroError::SizeLimit {
                what: "density-matrix oracle",
                n,
                limit: self.mixed,
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// 2×2 operators

/// Single-qubit operator, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn pauli(letter: PauliLetter) -> Self {
        match letter {
            PauliLetter::I => Self::identity(),
            PauliLetter::X => Mat2([[ZERO, ONE], [ONE, ZERO]]),
            PauliLetter::Y => Mat2([[ZERO, -I], [I, ZERO]]),
            PauliLetter::Z => Mat2([[ONE, ZERO], [ZERO, -ONE]]),
        }
    }

    /// `a·I + b·X + c·Y + d·Z` with real coefficients.
    pub fn from_bloch(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([
            [C64::new(a + d, 0.0), C64::new(b, -c)],
            [C64::new(b, c), C64::new(a - d, 0.0)],
        ])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let mut r = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j];
            }
        }
        r
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] += o.0[i][j];
            }
        }
        r
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        self.add(&o.scale(-ONE))
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let mut r = *self;
        for row in r.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        r
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn anticommutator(&self, o: &Mat2) -> Mat2 {
        self.mul(o).add(&o.mul(self))
    }

    pub fn commutator(&self, o: &Mat2) -> Mat2 {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        let g = self.adjoint().mul(self);
        let (a, d) = (g.0[0][0].re, g.0[1][1].re);
        let b = g.0[0][1].norm();
        let top = 0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt();
        top.max(0.0).sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).op_norm() <= tol
    }

    /// Eigenpairs of a Hermitian 2×2, largest eigenvalue first.
    pub fn hermitian_eigen(&self) -> [(f64, [C64; 2]); 2] {
        let m = &self.0;
        let (a, d) = (m[0][0].re, m[1][1].re);
        let b = m[0][1];
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        let (hi, lo) = (mean + r, mean - r);
        if b.norm() <= 1e-15 * (1.0 + a.abs() + d.abs()) {
            let e0 = [ONE, ZERO];
            let e1 = [ZERO, ONE];
            return if a >= d { [(a, e0), (d, e1)] } else { [(d, e1), (a, e0)] };
        }
        let vec_for = |lam: f64| {
            // (a-λ) v0 + b v1 = 0  →  v = (b, λ-a)
            let v = [b, C64::new(lam - a, 0.0)];
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            [v[0] / norm, v[1] / norm]
        };
        [(hi, vec_for(hi)), (lo, vec_for(lo))]
    }

    /// `e^{-iθM/2}` for Hermitian `M`.
    pub fn half_angle_unitary(&self, theta: f64) -> Mat2 {
        let mut u = Mat2::zero();
        for (lam, v) in self.hermitian_eigen() {
            let phase = C64::from_polar(1.0, -0.5 * theta * lam);
            for i in 0..2 {
                for j in 0..2 {
                    u.0[i][j] += phase * v[i] * v[j].conj();
                }
            }
        }
        u
    }
}

// ---------------------------------------------------------------------------
// Dense matrices

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, o.dim);
        let d = self.dim;
        let mut r = CMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &o.data[k * d..(k + 1) * d];
                let out = &mut r.data[i * d..(i + 1) * d];
                for (x, &y) in out.iter_mut().zip(row) {
                    *x += a * y;
                }
            }
        }
        r
    }

    pub fn add_scaled(&mut self, o: &CMatrix, s: C64) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: C64) {
        for a in self.data.iter_mut() {
            *a *= s;
        }
    }

    /// Frobenius distance.
    pub fn distance(&self, o: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                e = e.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        e
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `(M_k ⊗ I) · self` for a single-qubit `M` on qubit `k`.
    pub fn apply_local_left(&mut self, k: usize, m: &Mat2) {
        let d = self.dim;
        let s = 1usize << k;
        for i in 0..d {
            if i & s != 0 {
                continue;
            }
            let (r0, r1) = (i * d, (i | s) * d);
            for c in 0..d {
                let (a, b) = (self.data[r0 + c], self.data[r1 + c]);
                self.data[r0 + c] = m.0[0][0] * a + m.0[0][1] * b;
                self.data[r1 + c] = m.0[1][0] * a + m.0[1][1] * b;
            }
        }
    }

    /// `self · (M_k ⊗ I)†`.
    pub fn apply_local_right_adjoint(&mut self, k: usize, m: &Mat2) {
        let d = self.dim;
        let s = 1usize << k;
        let ma = m.adjoint();
        for r in 0..d {
            let row = &mut self.data[r * d..(r + 1) * d];
            for j in 0..d {
                if j & s != 0 {
                    continue;
                }
                let (a, b) = (row[j], row[j | s]);
                row[j] = a * ma.0[0][0] + b * ma.0[1][0];
                row[j | s] = a * ma.0[0][1] + b * ma.0[1][1];
            }
        }
    }

    /// `M_k · self · M_k†`.
    pub fn conjugate_local(&mut self, k: usize, m: &Mat2) {
        self.apply_local_left(k, m);
        self.apply_local_right_adjoint(k, m);
    }

    /// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending and
    /// the matching unit eigenvectors.
    pub fn eigh(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        use faer::complex_native::c64;
        let d = self.dim;
        let m = faer::Mat::<c64>::from_fn(d, d, |i, j| c64::from(self.get(i, j)));
        let eig = m.selfadjoint_eigendecomposition(faer::Side::Lower);
        let s = eig.s().column_vector();
        let u = eig.u();
        let values = (0..d).map(|j| s.read(j).re).collect();
        let vectors = (0..d)
            .map(|j| (0..d).map(|i| C64::from(u.read(i, j))).collect())
            .collect();
        (values, vectors)
    }
}

/// `(M_k ⊗ I)|ψ⟩` in place.
pub fn apply_local_vec(psi: &mut [C64], k: usize, m: &Mat2) {
    let s = 1usize << k;
    for i in 0..psi.len() {
        if i & s == 0 {
            let (a, b) = (psi[i], psi[i | s]);
            psi[i] = m.0[0][0] * a + m.0[0][1] * b;
            psi[i | s] = m.0[1][0] * a + m.0[1][1] * b;
        }
    }
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// A strictly local Hamiltonian term.
pub type LocalTerm = (usize, Mat2);

/// `H|ψ⟩` for `H = Σ_j H_j`.
pub fn apply_hamiltonian(psi: &[C64], terms: &[LocalTerm]) -> Vec<C64> {
    let mut out = vec![ZERO; psi.len()];
    for (k, m) in terms {
        let mut t = psi.to_vec();
        apply_local_vec(&mut t, *k, m);
        for (o, v) in out.iter_mut().zip(&t) {
            *o += v;
        }
    }
    out
}

/// `H ρ` for a local Hamiltonian.
fn hamiltonian_times(rho: &CMatrix, terms: &[LocalTerm]) -> CMatrix {
    let mut out = CMatrix::zeros(rho.dim());
    for (k, m) in terms {
        let mut t = rho.clone();
        t.apply_local_left(*k, m);
        out.add_scaled(&t, ONE);
    }
    out
}

/// Pauli terms with unit weight, e.g. `ΣX_j`.
pub fn pauli_terms(terms: &[(usize, PauliLetter)]) -> Vec<LocalTerm> {
    terms.iter().map(|&(q, l)| (q, Mat2::pauli(l))).collect()
}

/// `Σ_j X_j` on `n` qubits.
pub fn sum_x(n: usize) -> Vec<LocalTerm> {
    (0..n).map(|q| (q, Mat2::pauli(PauliLetter::X))).collect()
}

// ---------------------------------------------------------------------------
// States

#[derive(Clone, Debug, PartialEq)]
pub enum DenseState {
    Pure { n: usize, amps: Vec<C64> },
    Mixed { n: usize, rho: CMatrix },
}

impl DenseState {
    /// A pure state; the vector must be unit-norm to within `1e-10`.
    pub fn pure(n: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(MetroError::SizeMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        let nrm = norm_sqr(&amps).sqrt();
        if (nrm - 1.0).abs() > OPERATOR_TOL {
            return Err(MetroError::InvalidState(format!("norm {nrm} is not 1")));
        }
        Ok(DenseState::Pure { n, amps })
    }

    /// A pure state from an arbitrary nonzero vector.
    pub fn pure_normalized(n: usize, mut amps: Vec<C64>) -> Result<Self> {
        let nrm = norm_sqr(&amps).sqrt();
        if nrm == 0.0 {
            return Err(MetroError::InvalidState("zero vector".into()));
        }
        for a in amps.iter_mut() {
            *a /= nrm;
        }
        Self::pure(n, amps)
    }

    /// A density matrix, checked for Hermiticity, unit trace and positivity.
    pub fn mixed(n: usize, rho: CMatrix) -> Result<Self> {
        if rho.dim() != 1 << n {
            return Err(MetroError::SizeMismatch {
                expected: 1 << n,
                found: rho.dim(),
            });
        }
        if rho.hermiticity_error() > OPERATOR_TOL {
            return Err(MetroError::NonHermitian);
        }
        let tr = rho.trace();
        if (tr - ONE).norm() > OPERATOR_TOL {
            return Err(MetroError::InvalidState(format!("trace {tr} is not 1")));
        }
        let (vals, _) = rho.eigh();
        if let Some(&low) = vals.first() {
            if low < -OPERATOR_TOL {
                return Err(MetroError::InvalidState(format!("negative eigenvalue {low}")));
            }
        }
        Ok(DenseState::Mixed { n, rho })
    }

    pub(crate) fn mixed_unchecked(n: usize, rho: CMatrix) -> Self {
        DenseState::Mixed { n, rho }
    }

    pub fn n(&self) -> usize {
        match self {
            DenseState::Pure { n, .. } | DenseState::Mixed { n, .. } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, DenseState::Pure { .. })
    }

    pub fn density(&self) -> CMatrix {
        match self {
            DenseState::Pure { amps, .. } => CMatrix::outer(amps),
            DenseState::Mixed { rho, .. } => rho.clone(),
        }
    }

    pub fn to_mixed(&self) -> DenseState {
        DenseState::Mixed {
            n: self.n(),
            rho: self.density(),
        }
    }

    /// `⟨P⟩` for a Pauli string.
    pub fn expectation(&self, p: &PauliString) -> C64 {
        match self {
            DenseState::Pure { amps, .. } => inner(amps, &p.apply_to_vector(amps)),
            DenseState::Mixed { rho, .. } => {
                // Tr(Pρ) = Σ_b ⟨b|Pρ|b⟩ = Σ_b c_b ρ[b, b'] where P|b'⟩ = c_b'... ;
                // use P|b⟩ = c|b2⟩ ⇒ Tr(Pρ) = Σ_b c ρ[b, b2].
                (0..rho.dim())
                    .map(|b| {
                        let (c, b2) = p.act_on_basis(b);
                        c * rho.get(b, b2)
                    })
                    .sum()
            }
        }
    }

    /// `U ρ U†` for a product of single-qubit unitaries (`None` = identity).
    pub fn conjugated_by_local(&self, unitaries: &[Option<Mat2>]) -> DenseState {
        match self {
            DenseState::Pure { n, amps } => {
                let mut a = amps.clone();
                for (k, u) in unitaries.iter().enumerate() {
                    if let Some(u) = u {
                        apply_local_vec(&mut a, k, u);
                    }
                }
                DenseState::Pure { n: *n, amps: a }
            }
            DenseState::Mixed { n, rho } => {
                let mut r = rho.clone();
                for (k, u) in unitaries.iter().enumerate() {
                    if let Some(u) = u {
                        r.conjugate_local(k, u);
                    }
                }
                DenseState::Mixed { n: *n, rho: r }
            }
        }
    }
}

/// The graph state `Π_{(i,j)∈E} CZ_{ij} |+⟩^{⊗n}`.
pub fn graph_state(g: &Graph, limit: usize) -> Result<DenseState> {
    let n = g.n();
    if n > limit {
        return Err(MetroError::SizeLimit {
            what: "pure-state oracle",
            n,
            limit,
        });
    }
    let edges = g.edges();
    let amp = (0.5f64).powf(n as f64 / 2.0);
    let amps = (0..1usize << n)
        .map(|b| {
            let odd = edges
                .iter()
                .filter(|&&(i, j)| b >> i & 1 == 1 && b >> j & 1 == 1)
                .count()
                % 2
                == 1;
            C64::new(if odd { -amp } else { amp }, 0.0)
        })
        .collect();
    Ok(DenseState::Pure { n, amps })
}

/// `(|+⟩^{⊗n} + |−⟩^{⊗n})/√2`, stabilized by `Z_V` and all `X_iX_j`.
pub fn ghz(n: usize) -> DenseState {
    let amp = (0.5f64).powf((n as f64 - 1.0) / 2.0);
    let amps = (0..1usize << n)
        .map(|b| {
            if b.count_ones() % 2 == 0 {
                C64::new(amp, 0.0)
            } else {
                ZERO
            }
        })
        .collect();
    DenseState::Pure { n, amps }
}

/// `|0…0⟩`.
pub fn zero_state(n: usize) -> DenseState {
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = ONE;
    DenseState::Pure { n, amps }
}

/// `|+…+⟩`.
pub fn plus_state(n: usize) -> DenseState {
    let amp = (0.5f64).powf(n as f64 / 2.0);
    DenseState::Pure {
        n,
        amps: vec![C64::new(amp, 0.0); 1 << n],
    }
}

// ---------------------------------------------------------------------------
// Quantum Fisher information

fn check_terms(n: usize, terms: &[LocalTerm]) -> Result<()> {
    for (k, m) in terms {
        if *k >= n {
            return Err(MetroError::VertexOutOfRange { vertex: *k, n });
        }
        if !m.is_hermitian(OPERATOR_TOL) {
            return Err(MetroError::NonHermitian);
        }
    }
    Ok(())
}

/// QFI of `e^{-iθH/2} ρ e^{iθH/2}` for `H = Σ_j H_j`.
///
/// Pure states: `⟨H²⟩ − ⟨H⟩²`. Mixed states: the spectral sum
/// `2 Σ_{jk} (λ_j − λ_k)²/(λ_j + λ_k) |⟨j|H/2|k⟩|²` over pairs with
/// `λ_j + λ_k > 1e-12`, with the kernel of `ρ` summed in closed form.
pub fn qfi(state: &DenseState, terms: &[LocalTerm]) -> Result<f64> {
    check_terms(state.n(), terms)?;
    match state {
        DenseState::Pure { amps, .. } => {
            let h = apply_hamiltonian(amps, terms);
            let mean = inner(amps, &h);
            Ok((norm_sqr(&h) - mean.norm_sqr()).max(0.0))
        }
        DenseState::Mixed { rho, .. } => {
            if rho.hermiticity_error() > OPERATOR_TOL {
                return Err(MetroError::NonHermitian);
            }
            let (vals, vecs) = rho.eigh();
            Ok(spectral_qfi(&vals, &vecs, |v| {
                let mut g = apply_hamiltonian(v, terms);
                g.iter_mut().for_each(|x| *x *= 0.5);
                g
            }))
        }
    }
}

/// Spectral QFI for generator `G` given the eigenpairs of `ρ`.
///
/// Only eigenvectors with `λ > cutoff` are expanded; the rest of the space
/// enters through `‖G v_j‖² − Σ_{k∈supp} |G_kj|²`.
pub(crate) fn spectral_qfi(
    vals: &[f64],
    vecs: &[Vec<C64>],
    generator: impl Fn(&[C64]) -> Vec<C64>,
) -> f64 {
    let support: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > EIGEN_CUTOFF).collect();
    let applied: Vec<Vec<C64>> = support.iter().map(|&j| generator(&vecs[j])).collect();
    let mut f = 0.0;
    for (a, &j) in support.iter().enumerate() {
        let lj = vals[j];
        let mut in_support = 0.0;
        for (b, &k) in support.iter().enumerate() {
            let gkj = inner(&vecs[k], &applied[a]);
            let w = gkj.norm_sqr();
            in_support += w;
            let lk = vals[k];
            if b != a {
                f += 2.0 * (lj - lk) * (lj - lk) / (lj + lk) * w;
            }
        }
        let outside = (norm_sqr(&applied[a]) - in_support).max(0.0);
        f += 4.0 * lj * outside;
    }
    f
}

// ---------------------------------------------------------------------------
// Local models and classical Fisher information

/// A phase-estimation model with local Hamiltonian and local measurements.
#[derive(Clone, Debug)]
pub struct LocalModel {
    pub probe: DenseState,
    /// At most one term per qubit.
    pub h_terms: Vec<LocalTerm>,
    /// One Hermitian observable `Ω_k` per qubit.
    pub measurement: Vec<Mat2>,
    pub theta: f64,
}

impl LocalModel {
    pub fn new(
        probe: DenseState,
        h_terms: Vec<LocalTerm>,
        measurement: Vec<Mat2>,
        theta: f64,
    ) -> Result<Self> {
        let n = probe.n();
        check_terms(n, &h_terms)?;
        let mut seen = vec![false; n];
        for (k, _) in &h_terms {
            if seen[*k] {
                return Err(MetroError::InvalidParameter(format!(
                    "more than one Hamiltonian term on qubit {k}"
                )));
            }
            seen[*k] = true;
        }
        if measurement.len() != n {
            return Err(MetroError::SizeMismatch {
                expected: n,
                found: measurement.len(),
            });
        }
        if measurement.iter().any(|m| !m.is_hermitian(OPERATOR_TOL)) {
            return Err(MetroError::NonHermitian);
        }
        Ok(Self {
            probe,
            h_terms,
            measurement,
            theta,
        })
    }

    pub fn n(&self) -> usize {
        self.probe.n()
    }

    pub fn at_theta(&self, theta: f64) -> Self {
        Self {
            theta,
            ..self.clone()
        }
    }

    /// `H_k`, or zero when qubit `k` carries no term.
    pub fn local_hamiltonian(&self, k: usize) -> Mat2 {
        self.h_terms
            .iter()
            .find(|(q, _)| *q == k)
            .map_or(Mat2::zero(), |(_, m)| *m)
    }

    fn encoding_unitaries(&self, theta: f64) -> Vec<Option<Mat2>> {
        let mut us = vec![None; self.n()];
        for (k, m) in &self.h_terms {
            us[*k] = Some(m.half_angle_unitary(theta));
        }
        us
    }

    /// `ρ_θ` at the model's θ.
    pub fn encoded_probe(&self) -> DenseState {
        self.probe.conjugated_by_local(&self.encoding_unitaries(self.theta))
    }

    /// Rows of the basis change onto the joint eigenbasis of the rotated
    /// observables `e^{-iθH_k/2} Ω_k e^{iθH_k/2}`; row 0 is the larger
    /// eigenvalue.
    fn measurement_basis(&self) -> Result<Vec<Mat2>> {
        let us = self.encoding_unitaries(self.theta);
        let mut out = Vec::with_capacity(self.n());
        for (k, omega) in self.measurement.iter().enumerate() {
            let [(l0, e0), (l1, e1)] = omega.hermitian_eigen();
            if (l0 - l1).abs() < 1e-12 {
                return Err(MetroError::DegenerateObservable(k));
            }
            let u = us[k].unwrap_or_else(Mat2::identity);
            let rot = |e: [C64; 2]| {
                [
                    u.0[0][0] * e[0] + u.0[0][1] * e[1],
                    u.0[1][0] * e[0] + u.0[1][1] * e[1],
                ]
            };
            let (f0, f1) = (rot(e0), rot(e1));
            out.push(Mat2([[f0[0].conj(), f0[1].conj()], [f1[0].conj(), f1[1].conj()]]));
        }
        Ok(out)
    }

    /// Outcome probabilities of the measurement fixed at the model's θ, for
    /// the probe encoded at `state_theta`, with their first and second
    /// analytic θ-derivatives.
    fn outcome_statistics(&self, state_theta: f64) -> Result<OutcomeStats> {
        let basis = self.measurement_basis()?;
        let encoded = self.probe.conjugated_by_local(&self.encoding_unitaries(state_theta));
        let half = C64::new(0.0, -0.5);
        match &encoded {
            DenseState::Pure { amps, .. } => {
                // a = Wψ, b = W∂ψ, c = W∂²ψ with ∂ψ = -(i/2)Hψ
                let mut a = amps.clone();
                let mut b = apply_hamiltonian(amps, &self.h_terms);
                b.iter_mut().for_each(|x| *x *= half);
                let mut c = apply_hamiltonian(&b, &self.h_terms);
                c.iter_mut().for_each(|x| *x *= half);
                for (k, w) in basis.iter().enumerate() {
                    apply_local_vec(&mut a, k, w);
                    apply_local_vec(&mut b, k, w);
                    apply_local_vec(&mut c, k, w);
                }
                let p = a.iter().map(|x| x.norm_sqr()).collect();
                let dp = a.iter().zip(&b).map(|(x, y)| 2.0 * (x.conj() * y).re).collect();
                let d2p = a
                    .iter()
                    .zip(&b)
                    .zip(&c)
                    .map(|((x, y), z)| 2.0 * y.norm_sqr() + 2.0 * (x.conj() * z).re)
                    .collect();
                Ok(OutcomeStats { p, dp, d2p })
            }
            DenseState::Mixed { rho, .. } => {
                // ∂ρ = -(i/2)[H, ρ], ∂²ρ = -(i/2)[H, ∂ρ]
                let commutator = |m: &CMatrix| {
                    let hm = hamiltonian_times(m, &self.h_terms);
                    let mh = hamiltonian_times(&m.adjoint(), &self.h_terms).adjoint();
                    let mut out = hm;
                    out.add_scaled(&mh, -ONE);
                    out.scale(half);
                    out
                };
                let mut d = commutator(rho);
                let mut d2 = commutator(&d);
                let mut a = rho.clone();
                for (k, w) in basis.iter().enumerate() {
                    a.conjugate_local(k, w);
                    d.conjugate_local(k, w);
                    d2.conjugate_local(k, w);
                }
                let diag = |m: &CMatrix| (0..m.dim()).map(|x| m.get(x, x).re).collect();
                Ok(OutcomeStats {
                    p: diag(&a),
                    dp: diag(&d),
                    d2p: diag(&d2),
                })
            }
        }
    }

    /// `(outcome bits, p, ∂_θ p)` for every joint outcome. Bit `k` set means
    /// qubit `k` returned the smaller eigenvalue of its observable.
    pub fn probability_table(&self) -> Result<Vec<OutcomeRow>> {
        let OutcomeStats { p, dp, .. } = self.outcome_statistics(self.theta)?;
        Ok(p.into_iter()
            .zip(dp)
            .enumerate()
            .map(|(x, (p, dp))| OutcomeRow {
                outcome: (0..self.n()).map(|k| if x >> k & 1 == 1 { '1' } else { '0' }).collect(),
                p,
                dp,
            })
            .collect())
    }

    /// Central finite differences of the outcome probabilities with the
    /// measurement held fixed.
    pub fn finite_difference_derivatives(&self, step: f64) -> Result<Vec<f64>> {
        let plus = self.outcome_statistics(self.theta + step)?.p;
        let minus = self.outcome_statistics(self.theta - step)?.p;
        Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * step)).collect())
    }

    /// Central second differences, matching the `∂²p` used for null outcomes.
    pub fn finite_difference_second_derivatives(&self, step: f64) -> Result<Vec<f64>> {
        let plus = self.outcome_statistics(self.theta + step)?.p;
        let mid = self.outcome_statistics(self.theta)?.p;
        let minus = self.outcome_statistics(self.theta - step)?.p;
        Ok((0..mid.len())
            .map(|x| (plus[x] - 2.0 * mid[x] + minus[x]) / (step * step))
            .collect())
    }
}

struct OutcomeStats {
    p: Vec<f64>,
    dp: Vec<f64>,
    d2p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub outcome: String,
    pub p: f64,
    pub dp: f64,
}

/// Classical Fisher information `Σ_x (∂_θ p)²/p` of the rotated local
/// measurement `Ω_V(θ)`.
///
/// The rotated measurement is aligned with the stabilizer, so some outcomes
/// have `p = ∂p = 0` exactly at θ. Their term is the continuous limit
/// `(∂p)²/p → 2∂²p`; dropping them would lose all the information carried by
/// outcomes that the stabilizer forbids.
pub fn cfi_local(model: &LocalModel) -> Result<f64> {
    let OutcomeStats { p, dp, d2p } = model.outcome_statistics(model.theta)?;
    Ok((0..p.len())
        .map(|x| {
            if p[x] >= PROB_CUTOFF {
                dp[x] * dp[x] / p[x]
            } else {
                2.0 * d2p[x].max(0.0)
            }
        })
        .sum())
}

/// QFI of the model's encoded probe.
pub fn model_qfi(model: &LocalModel) -> Result<f64> {
    qfi(&model.encoded_probe(), &model.h_terms)
}

// ---------------------------------------------------------------------------
// Saturation conditions

/// The collective observable `K` of the saturation conditions.
#[derive(Clone, Debug)]
pub enum Collective {
    Pauli(PauliString),
    Dense(CMatrix),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    /// (i) `K` fixes every state in the support of `ρ`.
    pub stabilizes: bool,
    /// (ii) `{Ω_k, H_k} = 0` for every qubit with a term.
    pub measurement_anticommutes_h: bool,
    /// (iii) `[Ω_k, K] = 0` for every qubit.
    pub measurement_commutes_k: bool,
    /// (iv) `{K, H_k} = 0` for every qubit with a term.
    pub k_anticommutes_h: bool,
}

impl TheoremReport {
    pub fn all(&self) -> bool {
        self.stabilizes
            && self.measurement_anticommutes_h
            && self.measurement_commutes_k
            && self.k_anticommutes_h
    }
}

fn embed(n: usize, k: usize, m: &Mat2) -> CMatrix {
    let mut e = CMatrix::identity(1 << n);
    e.apply_local_left(k, m);
    e
}

/// Checks the four saturation conditions for `model` with collective `K`.
pub fn theorem_check(model: &LocalModel, k: &Collective) -> Result<TheoremReport> {
    let n = model.n();
    let tol = OPERATOR_TOL;
    let active: Vec<(usize, Mat2)> = (0..n)
        .map(|q| (q, model.local_hamiltonian(q)))
        .filter(|(_, h)| h.op_norm() > tol)
        .collect();

    let measurement_anticommutes_h = active
        .iter()
        .all(|(q, h)| model.measurement[*q].anticommutator(h).op_norm() <= tol);

    let report = match k {
        Collective::Pauli(p) => {
            if p.n() != n {
                return Err(MetroError::SizeMismatch { expected: n, found: p.n() });
            }
            let stabilizes = pauli::stabilizes(p, &model.probe)?;
            let kk = |q: usize| Mat2::pauli(p.letter(q));
            let measurement_commutes_k =
                (0..n).all(|q| model.measurement[q].commutator(&kk(q)).op_norm() <= tol);
            let k_anticommutes_h = active.iter().all(|(q, h)| kk(*q).anticommutator(h).op_norm() <= tol);
            TheoremReport {
                stabilizes,
                measurement_anticommutes_h,
                measurement_commutes_k,
                k_anticommutes_h,
            }
        }
        Collective::Dense(km) => {
            if km.dim() != 1 << n {
                return Err(MetroError::SizeMismatch {
                    expected: 1 << n,
                    found: km.dim(),
                });
            }
            let stabilizes = match &model.probe {
                DenseState::Pure { amps, .. } => {
                    let out = km.mul_vec(amps);
                    out.iter().zip(amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() <= tol
                }
                DenseState::Mixed { rho, .. } => km.matmul(rho).distance(rho) <= tol,
            };
            let measurement_commutes_k = (0..n).all(|q| {
                let om = embed(n, q, &model.measurement[q]);
                om.matmul(km).distance(&km.matmul(&om)) <= tol
            });
            let k_anticommutes_h = active.iter().all(|(q, h)| {
                let hm = embed(n, *q, h);
                let mut s = hm.matmul(km);
                s.add_scaled(&km.matmul(&hm), ONE);
                s.frobenius() <= tol
            });
            TheoremReport {
                stabilizes,
                measurement_anticommutes_h,
                measurement_commutes_k,
                k_anticommutes_h,
            }
        }
    };
    Ok(report)
}

/// Local protocol from a stabilizer `K = Π K_i` with traceless factors:
/// `Ω_i = K_i` and `H_i` the cyclically next Pauli letter (X→Y→Z→X).
pub fn corollary_protocol(k: &PauliString, probe: DenseState) -> Result<LocalModel> {
    if k.n() != probe.n() {
        return Err(MetroError::SizeMismatch {
            expected: probe.n(),
            found: k.n(),
        });
    }
    let letters = k.letters();
    if let Some(q) = letters.iter().position(|&l| l == PauliLetter::I) {
        return Err(MetroError::IdentityFactor(q));
    }
    let measurement = letters.iter().map(|&l| Mat2::pauli(l)).collect();
    let h_terms = letters
        .iter()
        .enumerate()
        .map(|(q, &l)| (q, Mat2::pauli(l.next())))
        .collect();
    LocalModel::new(probe, h_terms, measurement, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaturationRow {
    pub theta: f64,
    pub qfi: f64,
    pub cfi: f64,
    pub gap: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaturationReport {
    pub rows: Vec<SaturationRow>,
    pub max_gap: f64,
    pub saturated: bool,
}

/// QFI, CFI and their gap at each θ.
pub fn saturation_report(model: &LocalModel, thetas: &[f64]) -> Result<SaturationReport> {
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let m = model.at_theta(theta);
        let q = model_qfi(&m)?;
        let c = cfi_local(&m)?;
        let gap = q - c;
        rows.push(SaturationRow {
            theta,
            qfi: q,
            cfi: c,
            gap,
            flagged: gap > GAP_FLAG || gap < -1e-8,
        });
    }
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    let saturated = rows.iter().all(|r| !r.flagged);
    Ok(SaturationReport {
        rows,
        max_gap,
        saturated,
    })
}

/// Random states and operators for property tests.
pub mod random {
    use super::*;
    use rand::Rng;

    /// Box–Muller standard normal.
    pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
        C64::new(standard_normal(rng), standard_normal(rng))
    }

    /// Haar-random pure state.
    pub fn pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseState {
        let amps = (0..1 << n).map(|_| complex_normal(rng)).collect();
        DenseState::pure_normalized(n, amps).expect("nonzero")
    }

    /// Random density matrix of the given rank.
    pub fn mixed_state<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> DenseState {
        let d = 1 << n;
        let mut rho = CMatrix::zeros(d);
        let weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for w in weights {
            if let DenseState::Pure { amps, .. } = pure_state(n, rng) {
                rho.add_scaled(&CMatrix::outer(&amps), C64::new(w / total, 0.0));
            }
        }
        DenseState::mixed_unchecked(n, rho)
    }

    pub fn hermitian2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
        Mat2::from_bloch(
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
        )
    }

    /// Random single-qubit unitary `e^{-iM/2}` for random Hermitian `M`.
    pub fn unitary2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
        hermitian2(rng).half_angle_unitary(2.0)
    }
}
